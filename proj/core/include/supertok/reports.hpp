#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "supertok/diagnostics.hpp"
#include "supertok/entropy.hpp"

namespace supertok {

struct EntropyReport {
    std::uint64_t n_traces = 0;
    RoleStatsReport roles;
    std::vector<LengthBin> bins;
    CeilingReport ceiling;
    std::optional<RoleMeans> cross_means;  // re-scored by another model
    std::optional<GapTable> gap;

    std::string to_json() const;
};

// Computes roles, bins and the ceiling over the corpus; every trace must
// carry entropies. `cross` optionally holds the same traces re-scored by a
// different model (same ids and token counts).
EntropyReport build_entropy_report(std::span<const Trace> traces,
                                   std::span<const Segmentation> segs, double log2_vocab,
                                   std::span<const Trace> cross = {});

enum class PoolingMode {
    PooledCounts,     // pool bigram counts across traces, then normalize
    MeanOfTraceRows,  // normalize per trace, then average rows across traces
};

struct TransitionReport {
    TransitionMatrix all;
    std::optional<TransitionMatrix> correct;
    std::optional<TransitionMatrix> incorrect;
    std::vector<RatioCell> ratio_cells;              // when both groups exist
    std::map<std::string, CompositeMetrics> composite;  // keyed by group name
    bool signposts_only = false;
    PoolingMode pooling = PoolingMode::PooledCounts;

    std::string to_json() const;
};

TransitionReport build_transition_report(std::span<const CategorySequence> sequences,
                                         bool signposts_only = false,
                                         PoolingMode pooling = PoolingMode::PooledCounts);

std::string interval_to_json(const IntervalEstimate& e);

}  // namespace supertok
