#include "supertok/entropy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support/builders.hpp"
#include "supertok/errors.hpp"
#include "supertok/trainer.hpp"

namespace supertok {
namespace {

using testing::make_trace;
using testing::random_corpus;

Segmentation seg_of(std::vector<TokenSpan> spans) {
    Segmentation seg;
    seg.spans = std::move(spans);
    seg.token_ids.assign(seg.spans.size(), 0);
    return seg;
}

TEST(AssignRoles, AllNonMergedWithoutSpans) {
    const Segmentation seg = seg_of({{0, 1}, {1, 1}, {2, 1}});
    const auto roles = assign_roles(seg);
    ASSERT_EQ(roles.size(), 3u);
    for (const RoleAnnotation& r : roles) {
        EXPECT_EQ(r.role, TokenRole::NonMerged);
        EXPECT_EQ(r.merge_len, 1u);
    }
}

TEST(AssignRoles, LengthThreeSpanInTenTokens) {
    std::vector<TokenSpan> spans;
    spans.push_back({0, 1});
    spans.push_back({1, 1});
    spans.push_back({2, 3});  // tokens 2, 3, 4
    for (std::uint32_t i = 5; i < 10; ++i) spans.push_back({i, 1});
    const auto roles = assign_roles(seg_of(std::move(spans)));
    ASSERT_EQ(roles.size(), 10u);
    EXPECT_EQ(roles[2].role, TokenRole::First);
    EXPECT_EQ(roles[2].merge_len, 3u);
    EXPECT_EQ(roles[3].role, TokenRole::Continuation);
    EXPECT_EQ(roles[4].role, TokenRole::Continuation);
    int first = 0;
    int continuation = 0;
    int merged = 0;
    for (const RoleAnnotation& r : roles) {
        if (r.role == TokenRole::First) ++first;
        if (r.role == TokenRole::Continuation) ++continuation;
        if (r.role != TokenRole::NonMerged) ++merged;
    }
    EXPECT_EQ(first, 1);
    EXPECT_EQ(continuation, 2);
    EXPECT_DOUBLE_EQ(merged / 10.0, 0.3);
}

TEST(AssignRoles, PartitionHoldsOnFuzzedSegmentations) {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 40; ++round) {
        const auto corpus = random_corpus(rng, 200);
        TrainConfig config;
        config.budget = 10;
        config.filter = FilterSet::none();
        const MergeTable table = train(corpus, config);
        for (const Trace& t : corpus) {
            const Segmentation seg = apply(t, table);
            const auto roles = assign_roles(seg);
            EXPECT_EQ(roles.size(), t.tokens.size());
            std::size_t merged = 0;
            for (const RoleAnnotation& r : roles) {
                if (r.role != TokenRole::NonMerged) {
                    ++merged;
                    EXPECT_GE(r.merge_len, 2u);
                }
            }
            EXPECT_DOUBLE_EQ(merged_position_fraction(seg),
                             t.tokens.empty() ? 0.0
                                              : static_cast<double>(merged) / t.tokens.size());
        }
    }
}

std::vector<std::vector<RoleAnnotation>> roles_for(const std::vector<Trace>& traces,
                                                   const MergeTable& table) {
    std::vector<std::vector<RoleAnnotation>> roles;
    for (const Trace& t : traces) roles.push_back(assign_roles(apply(t, table)));
    return roles;
}

TEST(RoleStats, ConstantEntropyGivesConstantMeans) {
    std::vector<std::string> tokens;
    for (int i = 0; i < 10; ++i) tokens.insert(tokens.end(), {"Let", "'s", " check"});
    std::vector<Trace> traces = {
        make_trace("t", tokens, std::vector<double>(tokens.size(), 1.0))};
    TrainConfig config;
    config.budget = 2;
    const MergeTable table = train(traces, config);
    const auto report = role_stats(traces, roles_for(traces, table));
    EXPECT_DOUBLE_EQ(report.first.mean_bits, 1.0);
    EXPECT_DOUBLE_EQ(report.continuation.mean_bits, 1.0);
    EXPECT_DOUBLE_EQ(report.merged_mean_bits, 1.0);
    EXPECT_DOUBLE_EQ(report.non_merged.fraction + report.first.fraction +
                         report.continuation.fraction,
                     1.0);
}

TEST(RoleStats, HandComputedToyCorpus) {
    // Trace 1: [ab][c] with (a,b) merged; trace 2: [a][c] non-merged.
    std::vector<Trace> traces = {
        make_trace("t1", {"a", "b", "c", "a", "b", "c"},
                   std::vector<double>{0.2, 0.4, 1.0, 0.6, 0.8, 2.0}),
        make_trace("t2", {"c", "c"}, std::vector<double>{3.0, 5.0}),
    };
    TrainConfig config;
    config.budget = 1;
    config.filter = FilterSet::none();
    config.cap = kUncapped;
    const MergeTable table = train(traces, config);
    ASSERT_EQ(table.merges().size(), 1u);
    ASSERT_EQ(table.merges()[0].surface, "ab");

    const auto report = role_stats(traces, roles_for(traces, table));
    // First tokens: 0.2, 0.6 -> 0.4. Continuations: 0.4, 0.8 -> 0.6.
    // Non-merged: 1.0, 2.0, 3.0, 5.0 -> 2.75.
    EXPECT_NEAR(report.first.mean_bits, 0.4, 1e-12);
    EXPECT_NEAR(report.continuation.mean_bits, 0.6, 1e-12);
    EXPECT_NEAR(report.non_merged.mean_bits, 2.75, 1e-12);
    EXPECT_NEAR(report.rho, 0.5, 1e-12);
    EXPECT_EQ(report.n_tokens, 8u);
}

TEST(RoleStats, MissingEntropyThrows) {
    std::vector<Trace> traces = {make_trace("nope", {"a", "b"})};
    TrainConfig config;
    config.budget = 0;
    const MergeTable table = train(traces, config);
    EXPECT_THROW(role_stats(traces, roles_for(traces, table)), MissingEntropy);
}

TEST(RoleStats, WeightedRecombination) {
    std::mt19937_64 rng(13);
    for (int round = 0; round < 15; ++round) {
        auto corpus = random_corpus(rng, 250);
        std::uniform_real_distribution<double> bits(0.0, 4.0);
        for (Trace& t : corpus) {
            std::vector<double> h(t.tokens.size());
            for (double& v : h) v = bits(rng);
            t.entropy = std::move(h);
        }
        TrainConfig config;
        config.budget = 10;
        config.filter = FilterSet::none();
        const MergeTable table = train(corpus, config);
        const auto report = role_stats(corpus, roles_for(corpus, table));
        const double merged_fraction = report.first.fraction + report.continuation.fraction;
        if (merged_fraction == 0.0) continue;
        const double recombined = (report.first.fraction * report.first.mean_bits +
                                   report.continuation.fraction * report.continuation.mean_bits) /
                                  merged_fraction;
        EXPECT_NEAR(report.merged_mean_bits, recombined, 1e-9);
    }
}

TEST(RoleStats, TraceOrderInvariance) {
    std::mt19937_64 rng(17);
    auto corpus = random_corpus(rng, 300, 6);
    std::uniform_real_distribution<double> bits(0.0, 4.0);
    for (Trace& t : corpus) {
        std::vector<double> h(t.tokens.size());
        for (double& v : h) v = bits(rng);
        t.entropy = std::move(h);
    }
    TrainConfig config;
    config.budget = 10;
    config.filter = FilterSet::none();
    const MergeTable table = train(corpus, config);
    const auto forward = role_stats(corpus, roles_for(corpus, table));

    std::vector<Trace> reversed(corpus.rbegin(), corpus.rend());
    const auto backward = role_stats(reversed, roles_for(reversed, table));
    EXPECT_NEAR(forward.non_merged.mean_bits, backward.non_merged.mean_bits, 1e-9);
    EXPECT_NEAR(forward.first.mean_bits, backward.first.mean_bits, 1e-9);
    EXPECT_NEAR(forward.continuation.mean_bits, backward.continuation.mean_bits, 1e-9);
}

TEST(LengthBins, HalvedEntropyGivesHalfReduction) {
    // Continuation entropy = 0.5 x non-merged mean in every bin.
    std::vector<Trace> traces;
    std::vector<std::vector<RoleAnnotation>> roles;
    for (std::uint32_t len : {2u, 3u, 5u, 16u, 20u}) {
        std::vector<std::string> tokens(len + 1, "w");
        std::vector<double> h(len + 1, 1.0);                 // the First token
        for (std::size_t i = 1; i < len; ++i) h[i] = 2.0;    // continuations
        h[len] = 4.0;                                        // the non-merged tail
        traces.push_back(make_trace("len" + std::to_string(len), tokens, h));
        std::vector<RoleAnnotation> r(len + 1);
        r[0] = {TokenRole::First, len};
        for (std::size_t i = 1; i < len; ++i) r[i] = {TokenRole::Continuation, len};
        r[len] = {TokenRole::NonMerged, 1};
        roles.push_back(std::move(r));
    }
    const auto bins = length_binned_stats(traces, roles);
    // Bins: 2, 3, 5 and 16+ (16 and 20 pool together).
    ASSERT_EQ(bins.size(), 4u);
    for (const LengthBin& bin : bins) {
        EXPECT_NEAR(bin.reduction, 0.5, 1e-12);
    }
    EXPECT_TRUE(bins.back().open_ended);
    EXPECT_EQ(bins.back().count, 15u + 19u);
}

TEST(LengthBins, ReductionZeroWhenEqualToNonMerged) {
    std::vector<Trace> traces = {
        make_trace("t", {"a", "b", "c"}, std::vector<double>{1.5, 2.0, 2.0})};
    std::vector<std::vector<RoleAnnotation>> roles = {{
        {TokenRole::First, 2},
        {TokenRole::Continuation, 2},
        {TokenRole::NonMerged, 1},
    }};
    const auto bins = length_binned_stats(traces, roles);
    ASSERT_EQ(bins.size(), 1u);
    EXPECT_EQ(bins[0].length, 2u);
    EXPECT_NEAR(bins[0].reduction, 0.0, 1e-12);
}

TEST(LengthBins, EmptyBinsAbsent) {
    std::vector<Trace> traces = {
        make_trace("t", {"a", "b", "c"}, std::vector<double>{1.0, 1.0, 1.0})};
    std::vector<std::vector<RoleAnnotation>> roles = {{
        {TokenRole::First, 2},
        {TokenRole::Continuation, 2},
        {TokenRole::NonMerged, 1},
    }};
    const auto bins = length_binned_stats(traces, roles);
    ASSERT_EQ(bins.size(), 1u);
    for (const LengthBin& bin : bins) {
        EXPECT_NE(bin.length, 3u);
    }
}

TEST(Ceiling, ZeroEntropyHitsRho) {
    const CeilingReport r = compression_ceiling(0.42, 0.0, kDefaultLog2Vocab);
    EXPECT_DOUBLE_EQ(r.delta, 0.42);
    EXPECT_DOUBLE_EQ(r.delta_over_rho, 1.0);
}

TEST(Ceiling, ReferenceOperatingPoint) {
    const double log2v = kDefaultLog2Vocab;
    const CeilingReport r = compression_ceiling(0.152, 0.06 * log2v, log2v);
    EXPECT_NEAR(r.delta, 0.14288, 1e-10);
    EXPECT_NEAR(r.delta_over_rho, 0.94, 1e-12);
    EXPECT_LE(r.delta, r.rho);
}

TEST(Ceiling, InvariantIdentity) {
    for (double rho : {0.0, 0.1, 0.5, 1.0}) {
        for (double ratio : {0.0, 0.06, 0.5, 0.99}) {
            const CeilingReport r = compression_ceiling(rho, ratio * 10.0, 10.0);
            EXPECT_NEAR(r.delta, rho * (1.0 - r.mean_entropy_bits / r.log2_vocab), 1e-12);
            EXPECT_LE(r.delta, rho + 1e-15);
        }
    }
}

TEST(Ceiling, StrictlyDecreasingInEntropy) {
    double prev = 1.0;
    for (double h : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const CeilingReport r = compression_ceiling(0.3, h, 10.0);
        EXPECT_LT(r.delta, prev);
        prev = r.delta;
    }
}

TEST(Ceiling, RoleDecomposition) {
    // Masses consistent with the reference decomposition: both roles at 6%
    // of capacity, contributions 8.0% and 6.2%.
    const double log2v = kDefaultLog2Vocab;
    const double h = 0.06 * log2v;
    const CeilingReport r = compression_ceiling_by_role(0.0660, h, 0.0851, h, log2v);
    ASSERT_TRUE(r.first.has_value());
    ASSERT_TRUE(r.continuation.has_value());
    EXPECT_NEAR(r.continuation->delta, 0.080, 5e-4);
    EXPECT_NEAR(r.first->delta, 0.062, 5e-4);
    EXPECT_NEAR(r.delta, r.first->delta + r.continuation->delta, 1e-12);
    EXPECT_NEAR(r.rho, 0.1511, 1e-12);
}

TEST(Ceiling, NonPositiveVocabThrows) {
    EXPECT_THROW(compression_ceiling(0.1, 1.0, 0.0), NonPositiveVocab);
    EXPECT_THROW(compression_ceiling(0.1, 1.0, -3.0), NonPositiveVocab);
}

TEST(CrossModelGap, IdenticalInputsGiveZero) {
    const RoleMeans m{1.0, 0.9, 0.8};
    const GapTable gap = cross_model_gap(m, m);
    EXPECT_DOUBLE_EQ(gap.delta.non_merged, 0.0);
    EXPECT_DOUBLE_EQ(gap.delta.first, 0.0);
    EXPECT_DOUBLE_EQ(gap.delta.continuation, 0.0);
    EXPECT_DOUBLE_EQ(gap.self_gap, gap.cross_gap);
}

TEST(CrossModelGap, ReferenceRoleMeans) {
    const RoleMeans self{1.27, 1.13, 1.01};
    const RoleMeans cross{1.98, 1.47, 1.36};
    const GapTable gap = cross_model_gap(self, cross);
    EXPECT_NEAR(gap.self_gap, 0.26, 1e-12);
    EXPECT_NEAR(gap.cross_gap, 0.62, 1e-12);
    EXPECT_NEAR(gap.delta.non_merged, 0.71, 1e-12);
    EXPECT_NEAR(gap.delta.first, 0.34, 1e-12);
    EXPECT_NEAR(gap.delta.continuation, 0.35, 1e-12);
}

TEST(CrossModelGap, ArbitraryArithmetic) {
    const GapTable gap = cross_model_gap(RoleMeans{2.0, 1.5, 0.5}, RoleMeans{3.0, 1.0, 2.5});
    EXPECT_DOUBLE_EQ(gap.delta.non_merged, 1.0);
    EXPECT_DOUBLE_EQ(gap.delta.first, -0.5);
    EXPECT_DOUBLE_EQ(gap.delta.continuation, 2.0);
    EXPECT_DOUBLE_EQ(gap.self_gap, 1.5);
    EXPECT_DOUBLE_EQ(gap.cross_gap, 0.5);
}

}  // namespace
}  // namespace supertok
