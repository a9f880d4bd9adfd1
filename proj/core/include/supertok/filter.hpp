#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace supertok {

// The four structural surface patterns gating merge adoption.
enum class FilterRuleKind {
    CapitalizedPhraseInitial,
    PunctuationNewline,
    CommaLed,
    SingleDigit,
};

const char* to_string(FilterRuleKind kind);
FilterRuleKind filter_rule_from_string(std::string_view name);

struct FilterSet {
    std::vector<FilterRuleKind> enabled;

    static FilterSet all();   // the four structural rules
    static FilterSet none();  // empty gate: constant-true eligibility

    bool disabled() const { return enabled.empty(); }
};

struct Eligibility {
    bool eligible = false;
    std::optional<FilterRuleKind> rule;  // first matching rule, in canonical order
};

// Tests the full flattened surface of a merge candidate. With an empty rule
// set everything is eligible. Otherwise a surface containing two or more
// consecutive digits is ineligible under all rules.
Eligibility is_eligible(std::string_view surface, const FilterSet& rules);

// {"enabled": ["CapitalizedPhraseInitial", ...]}
FilterSet load_filter_config(const std::filesystem::path& path);
void save_filter_config(const std::filesystem::path& path, const FilterSet& rules);

bool has_multi_digit_run(std::string_view surface);
bool is_uppercase_codepoint(char32_t cp);

}  // namespace supertok
