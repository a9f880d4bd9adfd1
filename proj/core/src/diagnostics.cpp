#include "supertok/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "supertok/errors.hpp"

namespace supertok {

const char* to_string(TraceGroup g) {
    switch (g) {
        case TraceGroup::All: return "all";
        case TraceGroup::Correct: return "correct";
        case TraceGroup::Incorrect: return "incorrect";
    }
    return "?";
}

std::vector<Category> event_sequence(const Segmentation& seg, const CategoryMap& cmap,
                                     bool signposts_only) {
    std::vector<Category> events;
    for (TokenId id : seg.token_ids) {
        if (id < cmap.base_vocab_size) continue;
        auto it = cmap.assignments.find(id);
        if (it == cmap.assignments.end()) {
            if (std::find(cmap.unclassified.begin(), cmap.unclassified.end(), id) !=
                cmap.unclassified.end()) {
                continue;  // known but residual: no event
            }
            throw UnmappedSupertoken(id);
        }
        const Category c = it->second.category;
        if (signposts_only && (c == Category::Reasoning || c == Category::Computation)) continue;
        events.push_back(c);
    }
    return events;
}

std::uint64_t TransitionMatrix::row_total(Category from) const {
    const auto& row = counts[static_cast<std::size_t>(from)];
    std::uint64_t total = 0;
    for (std::uint64_t c : row) total += c;
    return total;
}

TransitionMatrix transition_matrix(std::span<const CategorySequence> sequences, TraceGroup group) {
    TransitionMatrix m;
    m.group = group;
    for (const CategorySequence& seq : sequences) {
        if (group == TraceGroup::Correct && !(seq.correct && *seq.correct)) continue;
        if (group == TraceGroup::Incorrect && !(seq.correct && !*seq.correct)) continue;
        for (std::size_t i = 0; i + 1 < seq.events.size(); ++i) {
            ++m.counts[static_cast<std::size_t>(seq.events[i])]
                      [static_cast<std::size_t>(seq.events[i + 1])];
            ++m.n_events;
        }
    }
    if (m.n_events == 0) {
        throw EmptyGroup(std::string("group '") + to_string(group) +
                         "' contains no category transition");
    }
    for (std::size_t i = 0; i < kNumCategories; ++i) {
        std::uint64_t row_sum = 0;
        for (std::uint64_t c : m.counts[i]) row_sum += c;
        m.row_empty[i] = row_sum == 0;
        if (row_sum == 0) continue;
        for (std::size_t j = 0; j < kNumCategories; ++j) {
            m.probs[i][j] = static_cast<double>(m.counts[i][j]) / static_cast<double>(row_sum);
        }
    }
    return m;
}

TransitionMatrix transition_matrix_mean_of_traces(std::span<const CategorySequence> sequences,
                                                  TraceGroup group) {
    TransitionMatrix m = transition_matrix(sequences, group);
    std::array<std::array<double, kNumCategories>, kNumCategories> sums{};
    std::array<std::uint64_t, kNumCategories> visits{};
    for (const CategorySequence& seq : sequences) {
        if (group == TraceGroup::Correct && !(seq.correct && *seq.correct)) continue;
        if (group == TraceGroup::Incorrect && !(seq.correct && !*seq.correct)) continue;
        std::array<std::array<std::uint64_t, kNumCategories>, kNumCategories> local{};
        for (std::size_t i = 0; i + 1 < seq.events.size(); ++i) {
            ++local[static_cast<std::size_t>(seq.events[i])]
                   [static_cast<std::size_t>(seq.events[i + 1])];
        }
        for (std::size_t i = 0; i < kNumCategories; ++i) {
            std::uint64_t row_sum = 0;
            for (std::uint64_t c : local[i]) row_sum += c;
            if (row_sum == 0) continue;
            ++visits[i];
            for (std::size_t j = 0; j < kNumCategories; ++j) {
                sums[i][j] += static_cast<double>(local[i][j]) / static_cast<double>(row_sum);
            }
        }
    }
    for (std::size_t i = 0; i < kNumCategories; ++i) {
        for (std::size_t j = 0; j < kNumCategories; ++j) {
            m.probs[i][j] = visits[i] == 0 ? 0.0 : sums[i][j] / static_cast<double>(visits[i]);
        }
    }
    return m;
}

std::vector<RatioCell> ratio_table(const TransitionMatrix& correct,
                                   const TransitionMatrix& incorrect) {
    std::vector<RatioCell> cells;
    for (std::size_t i = 0; i < kNumCategories; ++i) {
        for (std::size_t j = 0; j < kNumCategories; ++j) {
            const double pc = correct.probs[i][j];
            const double pi = incorrect.probs[i][j];
            RatioCell cell;
            cell.from = static_cast<Category>(i);
            cell.to = static_cast<Category>(j);
            if (pi > pc) {
                if (pc <= 0.0) continue;  // zero denominator
                cell.ratio = pi / pc;
                cell.problematic = true;
            } else {
                if (pi <= 0.0) continue;
                cell.ratio = pc / pi;
                cell.problematic = false;
            }
            cells.push_back(cell);
        }
    }
    std::sort(cells.begin(), cells.end(), [](const RatioCell& a, const RatioCell& b) {
        if (a.ratio != b.ratio) return a.ratio > b.ratio;
        if (a.from != b.from) return a.from < b.from;
        return a.to < b.to;
    });
    return cells;
}

CompositeMetrics composite_metrics(const TransitionMatrix& matrix) {
    CompositeMetrics out;
    std::uint64_t total = 0;
    for (const auto& row : matrix.counts) {
        for (std::uint64_t c : row) total += c;
    }
    out.total_transitions = total;

    std::uint64_t post_difficulty = 0;
    std::uint64_t recovered = 0;
    for (Category from : kPostDifficultySources) {
        const auto& row = matrix.counts[static_cast<std::size_t>(from)];
        for (std::size_t j = 0; j < kNumCategories; ++j) post_difficulty += row[j];
        for (Category to : kRecoveryTargets) recovered += row[static_cast<std::size_t>(to)];
    }
    out.post_difficulty_transitions = post_difficulty;
    out.productive_recovery_rate =
        post_difficulty == 0 ? 0.0
                             : static_cast<double>(recovered) / static_cast<double>(post_difficulty);

    std::uint64_t confusion = 0;
    for (const auto& [from, to] : kConfusionBigrams) {
        confusion += matrix.counts[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
    }
    out.confusion_cycle_rate =
        total == 0 ? 0.0 : static_cast<double>(confusion) / static_cast<double>(total);

    std::uint64_t inflow = 0;
    for (const auto& row : matrix.counts) {
        inflow += row[static_cast<std::size_t>(Category::Verification)];
    }
    out.verification_inflow_rate =
        total == 0 ? 0.0 : static_cast<double>(inflow) / static_cast<double>(total);
    return out;
}

IntervalEstimate accuracy_ci(double p_base, double p_sft, std::uint64_t n) {
    if (!(p_base >= 0.0 && p_base <= 1.0) || !(p_sft >= 0.0 && p_sft <= 1.0)) {
        throw InvalidProportion("proportions must lie in [0, 1]");
    }
    if (n < 1) throw InvalidProportion("sample size must be >= 1");
    IntervalEstimate e;
    e.kind = IntervalEstimate::Kind::Accuracy;
    e.n = n;
    e.delta = p_sft - p_base;
    const double se = std::sqrt(p_base * (1.0 - p_base) / static_cast<double>(n) +
                                p_sft * (1.0 - p_sft) / static_cast<double>(n));
    e.lo = e.delta - kZ95 * se;
    e.hi = e.delta + kZ95 * se;
    return e;
}

IntervalEstimate paired_token_ci(double t_base, double t_sft, std::uint64_t n) {
    if (!(t_base > 0.0) || !(t_sft > 0.0)) {
        throw InvalidInput("token counts must be positive");
    }
    if (n < 1) throw InvalidInput("sample size must be >= 1");
    IntervalEstimate e;
    e.kind = IntervalEstimate::Kind::PairedTokens;
    e.n = n;
    e.delta = t_sft - t_base;
    const double mean = 0.5 * (t_base + t_sft);
    const double half = kZ95 * kPairedSdFraction * mean / std::sqrt(static_cast<double>(n));
    e.lo = e.delta - half;
    e.hi = e.delta + half;
    return e;
}

}  // namespace supertok
