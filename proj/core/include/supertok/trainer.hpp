#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "supertok/corpus.hpp"
#include "supertok/filter.hpp"
#include "supertok/merge_table.hpp"

namespace supertok {

struct TrainConfig {
    std::uint32_t budget = 250;
    std::uint64_t cap = 10;           // per-trace per-pair count cap
    FilterSet filter = FilterSet::all();
    std::uint32_t base_vocab_size = 0;  // 0: number of distinct base tokens
    std::uint64_t min_frequency = 2;    // adoption stops below this
};

// Iterated capped-frequency merge selection under the structural filter.
// Each iteration recounts adjacent pairs over the current segmentation,
// adopts the most frequent eligible pair and re-segments. Ties at equal
// frequency break by flattened surface, then by left/right part sequences.
MergeTable train(std::span<const Trace> traces, const TrainConfig& config);

// Token reduction 1 - supertokenized/base length (pooled over tokens) after
// applying the first k merges, for each requested prefix size k.
std::vector<std::pair<std::uint32_t, double>> compression_curve(
    std::span<const Trace> traces, const MergeTable& table,
    std::span<const std::uint32_t> prefix_sizes);

}  // namespace supertok
