#include "supertok/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "supertok/errors.hpp"

namespace supertok {

namespace {

// Neumaier-compensated accumulator; reductions over per-trace partials in
// trace order are reproducible regardless of sharding.
struct KahanSum {
    double sum = 0.0;
    double c = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + c; }
};

constexpr std::uint32_t kMaxExactBin = 15;  // 16 and above pool into one bin

std::size_t bin_index(std::uint32_t merge_len) {
    // bins: 2..15 -> 0..13, 16+ -> 14
    return std::min(merge_len, kMaxExactBin + 1) - 2;
}

}  // namespace

const char* to_string(TokenRole role) {
    switch (role) {
        case TokenRole::NonMerged: return "non_merged";
        case TokenRole::First: return "first";
        case TokenRole::Continuation: return "continuation";
    }
    return "?";
}

std::vector<RoleAnnotation> assign_roles(const Segmentation& seg) {
    std::vector<RoleAnnotation> roles(seg.base_token_count());
    for (const TokenSpan& span : seg.spans) {
        if (span.len < 2) {
            roles[span.start] = RoleAnnotation{TokenRole::NonMerged, 1};
            continue;
        }
        roles[span.start] = RoleAnnotation{TokenRole::First, span.len};
        for (std::uint32_t i = 1; i < span.len; ++i) {
            roles[span.start + i] = RoleAnnotation{TokenRole::Continuation, span.len};
        }
    }
    return roles;
}

RoleStatsReport role_stats(std::span<const Trace> traces,
                           std::span<const std::vector<RoleAnnotation>> roles) {
    if (traces.size() != roles.size()) {
        throw InternalError("role annotations do not align with the corpus");
    }
    KahanSum sums[3];
    std::uint64_t counts[3] = {0, 0, 0};
    for (std::size_t t = 0; t < traces.size(); ++t) {
        const Trace& trace = traces[t];
        if (!trace.entropy) throw MissingEntropy(trace.id);
        if (roles[t].size() != trace.tokens.size()) {
            throw InternalError("role annotations for trace '" + trace.id +
                                "' do not align with its tokens");
        }
        KahanSum local[3];
        for (std::size_t i = 0; i < roles[t].size(); ++i) {
            const auto r = static_cast<std::size_t>(roles[t][i].role);
            local[r].add((*trace.entropy)[i]);
            ++counts[r];
        }
        for (int r = 0; r < 3; ++r) sums[r].add(local[r].value());
    }

    const std::uint64_t total = counts[0] + counts[1] + counts[2];
    RoleStatsReport report;
    report.n_tokens = total;
    RoleStats* slots[3] = {&report.non_merged, &report.first, &report.continuation};
    for (int r = 0; r < 3; ++r) {
        slots[r]->count = counts[r];
        slots[r]->mean_bits = counts[r] == 0 ? 0.0 : sums[r].value() / counts[r];
        slots[r]->fraction = total == 0 ? 0.0 : static_cast<double>(counts[r]) / total;
    }
    const std::uint64_t merged = counts[1] + counts[2];
    report.merged_mean_bits =
        merged == 0 ? 0.0 : (sums[1].value() + sums[2].value()) / merged;
    report.rho = total == 0 ? 0.0 : static_cast<double>(merged) / total;
    return report;
}

std::vector<LengthBin> length_binned_stats(std::span<const Trace> traces,
                                           std::span<const std::vector<RoleAnnotation>> roles) {
    if (traces.size() != roles.size()) {
        throw InternalError("role annotations do not align with the corpus");
    }
    constexpr std::size_t kBins = kMaxExactBin;  // 2..15 plus 16+
    KahanSum bin_sums[kBins];
    std::uint64_t bin_counts[kBins] = {};
    KahanSum non_merged_sum;
    std::uint64_t non_merged_count = 0;

    for (std::size_t t = 0; t < traces.size(); ++t) {
        const Trace& trace = traces[t];
        if (!trace.entropy) throw MissingEntropy(trace.id);
        KahanSum local[kBins];
        KahanSum local_non_merged;
        for (std::size_t i = 0; i < roles[t].size(); ++i) {
            const RoleAnnotation& r = roles[t][i];
            const double h = (*trace.entropy)[i];
            if (r.role == TokenRole::NonMerged) {
                local_non_merged.add(h);
                ++non_merged_count;
            } else if (r.role == TokenRole::Continuation) {
                const std::size_t b = bin_index(r.merge_len);
                local[b].add(h);
                ++bin_counts[b];
            }
        }
        for (std::size_t b = 0; b < kBins; ++b) bin_sums[b].add(local[b].value());
        non_merged_sum.add(local_non_merged.value());
    }

    const double non_merged_mean =
        non_merged_count == 0 ? 0.0 : non_merged_sum.value() / non_merged_count;
    std::vector<LengthBin> bins;
    for (std::size_t b = 0; b < kBins; ++b) {
        if (bin_counts[b] == 0) continue;  // empty bins are absent, not zero
        LengthBin bin;
        bin.length = static_cast<std::uint32_t>(b + 2);
        bin.open_ended = b + 2 == kMaxExactBin + 1;
        bin.count = bin_counts[b];
        bin.mean_continuation_bits = bin_sums[b].value() / bin_counts[b];
        bin.reduction =
            non_merged_mean == 0.0 ? 0.0 : 1.0 - bin.mean_continuation_bits / non_merged_mean;
        bins.push_back(bin);
    }
    return bins;
}

CeilingReport compression_ceiling(double rho, double h_merged, double log2_vocab) {
    if (!(log2_vocab > 0.0)) throw NonPositiveVocab("log2 vocabulary size must be positive");
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw ValidationError("merged-position fraction must lie in [0, 1]");
    }
    if (!(h_merged >= 0.0)) throw ValidationError("mean entropy must be non-negative");
    if (h_merged > log2_vocab) {
        throw ValidationError("mean entropy exceeds the vocabulary capacity log2|V|");
    }
    CeilingReport report;
    report.rho = rho;
    report.mean_entropy_bits = h_merged;
    report.log2_vocab = log2_vocab;
    report.delta = rho * (1.0 - h_merged / log2_vocab);
    report.delta_over_rho = rho == 0.0 ? 0.0 : report.delta / rho;
    return report;
}

CeilingReport compression_ceiling_by_role(double rho_first, double h_first,
                                          double rho_continuation, double h_continuation,
                                          double log2_vocab) {
    const double rho = rho_first + rho_continuation;
    const double h_merged =
        rho == 0.0 ? 0.0 : (rho_first * h_first + rho_continuation * h_continuation) / rho;
    CeilingReport report = compression_ceiling(rho, h_merged, log2_vocab);
    report.first = RoleCeiling{rho_first, h_first, rho_first * (1.0 - h_first / log2_vocab)};
    report.continuation = RoleCeiling{rho_continuation, h_continuation,
                                      rho_continuation * (1.0 - h_continuation / log2_vocab)};
    return report;
}

GapTable cross_model_gap(const RoleMeans& self_scored, const RoleMeans& cross_scored) {
    GapTable gap;
    gap.delta.non_merged = cross_scored.non_merged - self_scored.non_merged;
    gap.delta.first = cross_scored.first - self_scored.first;
    gap.delta.continuation = cross_scored.continuation - self_scored.continuation;
    gap.self_gap = self_scored.non_merged - self_scored.continuation;
    gap.cross_gap = cross_scored.non_merged - cross_scored.continuation;
    return gap;
}

}  // namespace supertok
