#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "supertok/taxonomy.hpp"
#include "supertok/tokenizer.hpp"

namespace supertok {

enum class TraceGroup : std::uint8_t { All, Correct, Incorrect };

const char* to_string(TraceGroup g);

// Categories of supertoken occurrences in trace order. Supertokens in the
// map's unclassified list produce no event; ids absent from the map entirely
// raise UnmappedSupertoken. With signposts_only, Reasoning and Computation
// events are dropped.
std::vector<Category> event_sequence(const Segmentation& seg, const CategoryMap& cmap,
                                     bool signposts_only = false);

struct CategorySequence {
    std::vector<Category> events;
    std::optional<bool> correct;
};

struct TransitionMatrix {
    std::array<std::array<std::uint64_t, kNumCategories>, kNumCategories> counts{};
    std::array<std::array<double, kNumCategories>, kNumCategories> probs{};
    std::array<bool, kNumCategories> row_empty{};
    TraceGroup group = TraceGroup::All;
    std::uint64_t n_events = 0;  // total transitions

    std::uint64_t row_total(Category from) const;
};

// Pools bigram counts across the group's sequences, then row-normalizes.
// Throws EmptyGroup when the group contains no transition.
TransitionMatrix transition_matrix(std::span<const CategorySequence> sequences, TraceGroup group);

// Alternative normalization: each trace's rows are normalized first, then
// averaged across the traces that visit the row. Counts stay pooled.
TransitionMatrix transition_matrix_mean_of_traces(std::span<const CategorySequence> sequences,
                                                  TraceGroup group);

struct RatioCell {
    Category from = Category::Reasoning;
    Category to = Category::Reasoning;
    double ratio = 1.0;  // >= 1, over-representation in the flagged direction
    bool problematic = false;  // true: over-represented in incorrect traces
};

// Per-cell over-representation ratios between the two row-normalized
// matrices; cells with a zero denominator are omitted. Sorted by ratio
// descending, then by (from, to).
std::vector<RatioCell> ratio_table(const TransitionMatrix& correct,
                                   const TransitionMatrix& incorrect);

// Bigram set counted as confusion cycles.
inline constexpr std::array<std::pair<Category, Category>, 5> kConfusionBigrams = {{
    {Category::Sequencing, Category::Sequencing},
    {Category::ProblemRef, Category::Hedging},
    {Category::Counterargument, Category::ProblemRef},
    {Category::Hedging, Category::Hedging},
    {Category::Counterargument, Category::Counterargument},
}};

inline constexpr std::array<Category, 4> kPostDifficultySources = {
    Category::Backtracking,
    Category::Counterargument,
    Category::ProblemRef,
    Category::Hedging,
};

inline constexpr std::array<Category, 2> kRecoveryTargets = {
    Category::StrategyShift,
    Category::Verification,
};

struct CompositeMetrics {
    // Among transitions leaving a post-difficulty source, the fraction
    // entering StrategyShift or Verification.
    double productive_recovery_rate = 0.0;
    // Fraction of all transitions inside the problematic bigram set.
    double confusion_cycle_rate = 0.0;
    // Fraction of all transitions whose target is Verification.
    double verification_inflow_rate = 0.0;
    std::uint64_t post_difficulty_transitions = 0;
    std::uint64_t total_transitions = 0;
};

CompositeMetrics composite_metrics(const TransitionMatrix& matrix);

inline constexpr double kZ95 = 1.96;
inline constexpr double kPairedSdFraction = 0.24;

struct IntervalEstimate {
    enum class Kind : std::uint8_t { Accuracy, PairedTokens };
    double delta = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t n = 0;
    Kind kind = Kind::Accuracy;

    bool significant() const { return lo > 0.0 || hi < 0.0; }
};

// 95% CI for the difference of two independent proportions:
// delta +- 1.96 * sqrt(p_b(1-p_b)/n + p_s(1-p_s)/n).
IntervalEstimate accuracy_ci(double p_base, double p_sft, std::uint64_t n);

// Paired completion-token CI with sigma_paired = 0.24 * mean(t_base, t_sft):
// delta +- 1.96 * sigma_paired / sqrt(n).
IntervalEstimate paired_token_ci(double t_base, double t_sft, std::uint64_t n);

}  // namespace supertok
