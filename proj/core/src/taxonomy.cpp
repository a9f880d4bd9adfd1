#include "supertok/taxonomy.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "supertok/errors.hpp"

namespace supertok {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool contains(std::string_view haystack, std::string_view needle) {
    return haystack.find(needle) != std::string_view::npos;
}

std::string_view lstrip_spaces(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

bool is_ascii_punct(unsigned char c) { return std::ispunct(c) != 0; }

// Leading punctuation and spaces dropped, trailing spaces dropped.
std::string_view trim_for_exact_match(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || is_ascii_punct(static_cast<unsigned char>(s.front())))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

bool starts_with_any(std::string_view s, std::initializer_list<std::string_view> prefixes) {
    return std::any_of(prefixes.begin(), prefixes.end(),
                       [&](std::string_view p) { return s.starts_with(p); });
}

// Single digit, or single letter other than "a"/"I", optionally preceded by
// ", " or one space.
bool is_single_symbol(std::string_view s) {
    if (s.starts_with(", ")) {
        s.remove_prefix(2);
    } else if (s.starts_with(" ")) {
        s.remove_prefix(1);
    }
    if (s.size() != 1) return false;
    const char c = s[0];
    if (c >= '0' && c <= '9') return true;
    if (std::isalpha(static_cast<unsigned char>(c)) == 0) return false;
    return c != 'a' && c != 'I';
}

bool comma_led_word(std::string_view s) {
    if (s.size() < 3 || !s.starts_with(", ")) return false;
    unsigned char c = static_cast<unsigned char>(s[2]);
    return std::isalpha(c) != 0 || c >= 0x80;
}

}  // namespace

const char* to_string(Category c) {
    switch (c) {
        case Category::Backtracking: return "Backtracking";
        case Category::Hedging: return "Hedging";
        case Category::Verification: return "Verification";
        case Category::ProblemRef: return "ProblemRef";
        case Category::StrategyShift: return "StrategyShift";
        case Category::Sequencing: return "Sequencing";
        case Category::Computation: return "Computation";
        case Category::Counterargument: return "Counterargument";
        case Category::Reasoning: return "Reasoning";
    }
    return "?";
}

Category category_from_string(std::string_view name) {
    for (Category c : kAllCategories) {
        if (name == to_string(c)) return c;
    }
    throw ValidationError("unknown category '" + std::string(name) + "'");
}

std::optional<Classification> classify(std::string_view surface) {
    const std::string lower = ascii_lower(surface);
    const std::string_view lead = lstrip_spaces(surface);

    // 1. Backtracking
    if (lead.starts_with("Wait")) return Classification{Category::Backtracking, "starts with \"Wait\""};
    if (contains(lower, "hold on")) return Classification{Category::Backtracking, "contains \"hold on\""};
    if (contains(lower, "but actually")) {
        return Classification{Category::Backtracking, "contains \"but actually\""};
    }
    if (contains(lower, "but wait")) return Classification{Category::Backtracking, "contains \"but wait\""};

    // 2. Hedging
    if (contains(lower, "maybe")) return Classification{Category::Hedging, "contains \"maybe\""};

    // 3. Verification
    if (contains(lower, "check")) return Classification{Category::Verification, "contains \"check\""};
    if (contains(lower, "matches")) return Classification{Category::Verification, "contains \"matches\""};
    if (contains(lower, "which is what")) {
        return Classification{Category::Verification, "contains \"which is what\""};
    }
    for (std::string_view word : {"correct", "yes", "right", "good", "impossible"}) {
        if (iequals(trim_for_exact_match(surface), word)) {
            return Classification{Category::Verification,
                                  "exact match \"" + std::string(word) + "\""};
        }
    }

    // 4. Problem reference
    if (contains(lower, "problem")) return Classification{Category::ProblemRef, "contains \"problem\""};
    if (contains(lower, "it says")) return Classification{Category::ProblemRef, "contains \"it says\""};

    // 5. Strategy shift
    if (starts_with_any(lead, {"Let's", "Let me", "So let", "But let"})) {
        return Classification{Category::StrategyShift, "starts with a strategy-shift phrase"};
    }
    if (contains(lower, "let's") || contains(lower, "let me")) {
        return Classification{Category::StrategyShift, "contains \"let's\"/\"let me\""};
    }

    // 6. Sequencing
    if (starts_with_any(lead, {"First", "Similarly", "Given that", "Now, the"})) {
        return Classification{Category::Sequencing, "starts with a sequencing phrase"};
    }

    // 7. Computation
    if (is_single_symbol(lead)) {
        return Classification{Category::Computation, "single digit or variable letter"};
    }

    // 8. Counterargument
    if (lead.starts_with("But ") || lead.starts_with(", but")) {
        return Classification{Category::Counterargument, "starts with \"But \" or \", but\""};
    }

    // 9. Reasoning
    if (lead.starts_with("Therefore")) {
        return Classification{Category::Reasoning, "starts with \"Therefore\""};
    }
    if (contains(lower, "i think")) return Classification{Category::Reasoning, "contains \"I think\""};
    if (comma_led_word(surface)) {
        return Classification{Category::Reasoning, "comma-led connective"};
    }

    return std::nullopt;
}

CategoryMap classify_table(const MergeTable& table) {
    CategoryMap map;
    map.base_vocab_size = table.base_vocab_size();
    for (const MergeRule& rule : table.merges()) {
        if (std::optional<Classification> c = classify(rule.surface)) {
            map.assignments.emplace(rule.new_id, std::move(*c));
        } else {
            map.unclassified.push_back(rule.new_id);
        }
    }
    return map;
}

std::array<std::uint64_t, kNumCategories> CategoryMap::counts() const {
    std::array<std::uint64_t, kNumCategories> out{};
    for (const auto& [id, c] : assignments) {
        ++out[static_cast<std::size_t>(c.category)];
    }
    return out;
}

void save_category_map(const std::filesystem::path& path, const CategoryMap& map) {
    nlohmann::json assignments = nlohmann::json::object();
    for (const auto& [id, c] : map.assignments) {
        assignments[std::to_string(id)] = {{"category", to_string(c.category)}, {"rule", c.rule}};
    }
    nlohmann::json counts = nlohmann::json::object();
    const auto n = map.counts();
    for (Category c : kAllCategories) {
        counts[to_string(c)] = n[static_cast<std::size_t>(c)];
    }
    detail::write_json_file(path, nlohmann::json{{"format_version", detail::kFormatVersion},
                                                 {"base_vocab_size", map.base_vocab_size},
                                                 {"assignments", std::move(assignments)},
                                                 {"unclassified", map.unclassified},
                                                 {"counts", std::move(counts)}});
}

CategoryMap load_category_map(const std::filesystem::path& path) {
    nlohmann::json j = detail::read_json_file(path);
    detail::check_format_version(j, path);
    CategoryMap map;
    try {
        map.base_vocab_size = j.at("base_vocab_size").get<std::uint32_t>();
        for (const auto& [key, value] : j.at("assignments").items()) {
            Classification c;
            c.category = category_from_string(value.at("category").get<std::string>());
            c.rule = value.value("rule", "");
            map.assignments.emplace(static_cast<TokenId>(std::stoul(key)), std::move(c));
        }
        map.unclassified = j.value("unclassified", std::vector<TokenId>{});
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return map;
}

}  // namespace supertok
