#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "supertok/merge_table.hpp"

namespace supertok {

// Nine structural categories, declared in rule-priority order (1..9).
enum class Category : std::uint8_t {
    Backtracking = 0,
    Hedging,
    Verification,
    ProblemRef,
    StrategyShift,
    Sequencing,
    Computation,
    Counterargument,
    Reasoning,
};

inline constexpr std::size_t kNumCategories = 9;
inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::Backtracking,  Category::Hedging,   Category::Verification,
    Category::ProblemRef,    Category::StrategyShift, Category::Sequencing,
    Category::Computation,   Category::Counterargument, Category::Reasoning,
};

const char* to_string(Category c);
Category category_from_string(std::string_view name);
inline int priority(Category c) { return static_cast<int>(c) + 1; }

struct Classification {
    Category category = Category::Reasoning;
    std::string rule;  // description of the pattern that fired
};

// Priority-ordered keyword/pattern rules over the decoded merge text. The
// first matching rule wins; nullopt when nothing matches.
std::optional<Classification> classify(std::string_view surface);

struct CategoryMap {
    std::uint32_t base_vocab_size = 0;
    std::map<TokenId, Classification> assignments;
    std::vector<TokenId> unclassified;

    std::array<std::uint64_t, kNumCategories> counts() const;
    std::size_t total() const { return assignments.size() + unclassified.size(); }
};

CategoryMap classify_table(const MergeTable& table);

// JSON: {format_version, base_vocab_size, assignments: {id: {category, rule}},
//        unclassified: [...], counts: {...}}
void save_category_map(const std::filesystem::path& path, const CategoryMap& map);
CategoryMap load_category_map(const std::filesystem::path& path);

}  // namespace supertok
