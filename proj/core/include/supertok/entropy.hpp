#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "supertok/corpus.hpp"
#include "supertok/tokenizer.hpp"

namespace supertok {

enum class TokenRole : std::uint8_t { NonMerged, First, Continuation };

const char* to_string(TokenRole role);

struct RoleAnnotation {
    TokenRole role = TokenRole::NonMerged;
    std::uint32_t merge_len = 1;  // base-token length of the owning span
};

// One annotation per base token: a span of length L >= 2 contributes one
// First followed by L-1 Continuation annotations.
std::vector<RoleAnnotation> assign_roles(const Segmentation& seg);

struct RoleStats {
    double mean_bits = 0.0;
    double fraction = 0.0;  // of all token positions
    std::uint64_t count = 0;
};

struct RoleStatsReport {
    RoleStats non_merged;
    RoleStats first;
    RoleStats continuation;
    double merged_mean_bits = 0.0;  // over First + Continuation positions
    double rho = 0.0;               // merged-position fraction
    std::uint64_t n_tokens = 0;
};

// Arithmetic per-role means over aligned entropies. Reductions run over
// per-trace partials in trace order with compensated summation, so results
// do not depend on sharding or worker count.
RoleStatsReport role_stats(std::span<const Trace> traces,
                           std::span<const std::vector<RoleAnnotation>> roles);

struct LengthBin {
    std::uint32_t length = 2;  // exact merge length, or the lower edge for 16+
    bool open_ended = false;
    std::uint64_t count = 0;              // continuation tokens in the bin
    double mean_continuation_bits = 0.0;
    double reduction = 0.0;  // 1 - mean_cont(bin) / mean_non_merged
};

// Bins 2..15 plus 16+. Empty bins are absent from the result.
std::vector<LengthBin> length_binned_stats(std::span<const Trace> traces,
                                           std::span<const std::vector<RoleAnnotation>> roles);

// log2(151,919), a typical extended vocabulary size.
inline constexpr double kDefaultLog2Vocab = 17.212942788592752;

struct RoleCeiling {
    double rho = 0.0;
    double mean_bits = 0.0;
    double delta = 0.0;
};

struct CeilingReport {
    double rho = 0.0;
    double mean_entropy_bits = 0.0;  // h over merged positions
    double log2_vocab = 0.0;
    double delta = 0.0;           // rho * (1 - h / log2_vocab)
    double delta_over_rho = 0.0;
    std::optional<RoleCeiling> first;
    std::optional<RoleCeiling> continuation;
};

CeilingReport compression_ceiling(double rho, double h_merged, double log2_vocab);

// Per-role decomposition: each role contributes rho_role * (1 - h_role/log2|V|).
CeilingReport compression_ceiling_by_role(double rho_first, double h_first,
                                          double rho_continuation, double h_continuation,
                                          double log2_vocab);

struct RoleMeans {
    double non_merged = 0.0;
    double first = 0.0;
    double continuation = 0.0;
};

struct GapTable {
    RoleMeans delta;      // cross - self, per role
    double self_gap = 0.0;   // non_merged - continuation under the self scorer
    double cross_gap = 0.0;  // same gap under the cross scorer
};

GapTable cross_model_gap(const RoleMeans& self_scored, const RoleMeans& cross_scored);

}  // namespace supertok
