#include "supertok/filter.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "supertok/errors.hpp"

namespace supertok {

namespace {

struct CodepointRange {
    char32_t lo;
    char32_t hi;
};

#include "uppercase_ranges.inc"

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

constexpr std::string_view kPunctuation = ".,:;?!";

bool is_listed_punct(char c) { return kPunctuation.find(c) != std::string_view::npos; }

// Decodes the UTF-8 codepoint starting at s[pos]; returns U+FFFD on bad input.
char32_t decode_utf8(std::string_view s, std::size_t pos) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    unsigned char b0 = byte(pos);
    if (b0 < 0x80) return b0;
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return 0xFFFD;
    }
    if (pos + len > s.size()) return 0xFFFD;
    for (int i = 1; i < len; ++i) {
        unsigned char b = byte(pos + i);
        if ((b & 0xC0) != 0x80) return 0xFFFD;
        cp = (cp << 6) | (b & 0x3F);
    }
    return cp;
}

// (a) First non-space character is an uppercase letter.
bool match_capitalized_phrase_initial(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    if (i >= s.size()) return false;
    return is_uppercase_codepoint(decode_utf8(s, i));
}

// (b) Leading punctuation from {. , : ; ? !}, possibly more punctuation,
// then at least one newline.
bool match_punctuation_newline(std::string_view s) {
    if (s.empty() || !is_listed_punct(s[0])) return false;
    std::size_t i = 1;
    while (i < s.size() && is_listed_punct(s[i])) ++i;
    return i < s.size() && s[i] == '\n';
}

// (c) "," then a space-prefixed word continuation.
bool match_comma_led(std::string_view s) {
    if (s.size() < 3 || s[0] != ',' || s[1] != ' ') return false;
    unsigned char c = static_cast<unsigned char>(s[2]);
    return std::isalpha(c) != 0 || c >= 0x80;
}

// (d) Exactly one space followed by exactly one digit.
bool match_single_digit(std::string_view s) {
    return s.size() == 2 && s[0] == ' ' && is_ascii_digit(s[1]);
}

bool match_rule(FilterRuleKind kind, std::string_view s) {
    switch (kind) {
        case FilterRuleKind::CapitalizedPhraseInitial: return match_capitalized_phrase_initial(s);
        case FilterRuleKind::PunctuationNewline: return match_punctuation_newline(s);
        case FilterRuleKind::CommaLed: return match_comma_led(s);
        case FilterRuleKind::SingleDigit: return match_single_digit(s);
    }
    return false;
}

constexpr FilterRuleKind kCanonicalOrder[] = {
    FilterRuleKind::CapitalizedPhraseInitial,
    FilterRuleKind::PunctuationNewline,
    FilterRuleKind::CommaLed,
    FilterRuleKind::SingleDigit,
};

}  // namespace

bool is_uppercase_codepoint(char32_t cp) {
    if (cp < 0x80) return cp >= 'A' && cp <= 'Z';
    auto it = std::upper_bound(std::begin(kUppercaseRanges), std::end(kUppercaseRanges), cp,
                               [](char32_t v, const CodepointRange& r) { return v < r.lo; });
    if (it == std::begin(kUppercaseRanges)) return false;
    --it;
    return cp >= it->lo && cp <= it->hi;
}

bool has_multi_digit_run(std::string_view surface) {
    for (std::size_t i = 0; i + 1 < surface.size(); ++i) {
        if (is_ascii_digit(surface[i]) && is_ascii_digit(surface[i + 1])) return true;
    }
    return false;
}

const char* to_string(FilterRuleKind kind) {
    switch (kind) {
        case FilterRuleKind::CapitalizedPhraseInitial: return "CapitalizedPhraseInitial";
        case FilterRuleKind::PunctuationNewline: return "PunctuationNewline";
        case FilterRuleKind::CommaLed: return "CommaLed";
        case FilterRuleKind::SingleDigit: return "SingleDigit";
    }
    return "?";
}

FilterRuleKind filter_rule_from_string(std::string_view name) {
    for (FilterRuleKind kind : kCanonicalOrder) {
        if (name == to_string(kind)) return kind;
    }
    throw ValidationError("unknown filter rule '" + std::string(name) + "'");
}

FilterSet FilterSet::all() {
    return FilterSet{{std::begin(kCanonicalOrder), std::end(kCanonicalOrder)}};
}

FilterSet FilterSet::none() { return FilterSet{}; }

Eligibility is_eligible(std::string_view surface, const FilterSet& rules) {
    if (rules.disabled()) return {true, std::nullopt};
    if (has_multi_digit_run(surface)) return {false, std::nullopt};
    for (FilterRuleKind kind : kCanonicalOrder) {
        if (std::find(rules.enabled.begin(), rules.enabled.end(), kind) == rules.enabled.end()) {
            continue;
        }
        if (match_rule(kind, surface)) return {true, kind};
    }
    return {false, std::nullopt};
}

FilterSet load_filter_config(const std::filesystem::path& path) {
    nlohmann::json j = detail::read_json_file(path);
    detail::check_format_version(j, path);
    FilterSet rules;
    for (const auto& name : j.at("enabled")) {
        rules.enabled.push_back(filter_rule_from_string(name.get<std::string>()));
    }
    return rules;
}

void save_filter_config(const std::filesystem::path& path, const FilterSet& rules) {
    nlohmann::json names = nlohmann::json::array();
    for (FilterRuleKind kind : rules.enabled) names.push_back(to_string(kind));
    detail::write_json_file(path, nlohmann::json{{"format_version", detail::kFormatVersion},
                                                 {"enabled", std::move(names)}});
}

}  // namespace supertok
