#include "supertok/reports.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "support/builders.hpp"
#include "supertok/errors.hpp"
#include "supertok/trainer.hpp"

namespace supertok {
namespace {

using testing::make_trace;

struct Fixture {
    std::vector<Trace> traces;
    MergeTable table;
    std::vector<Segmentation> segs;
};

Fixture entropy_fixture() {
    Fixture f;
    std::vector<std::string> tokens;
    for (int i = 0; i < 10; ++i) tokens.insert(tokens.end(), {"Let", "'s", " check"});
    std::vector<double> entropy(tokens.size(), 0.0);
    for (std::size_t i = 0; i < entropy.size(); ++i) entropy[i] = 0.5 + 0.1 * (i % 3);
    f.traces.push_back(make_trace("t0", tokens, entropy));
    f.traces.push_back(make_trace("t1", {"Let", "Let"}, std::vector<double>{2.0, 3.0}));
    TrainConfig config;
    config.budget = 2;
    f.table = train(f.traces, config);
    f.segs = apply_corpus(f.traces, f.table);
    return f;
}

TEST(EntropyReport, JsonCarriesRolesBinsAndCeiling) {
    const Fixture f = entropy_fixture();
    const EntropyReport report = build_entropy_report(f.traces, f.segs, kDefaultLog2Vocab);
    const nlohmann::json j = nlohmann::json::parse(report.to_json());
    EXPECT_EQ(j.at("format_version"), 1);
    EXPECT_EQ(j.at("n_traces"), 2);
    EXPECT_TRUE(j.at("roles").contains("non_merged"));
    EXPECT_TRUE(j.at("roles").contains("merged"));
    EXPECT_TRUE(j.at("ceiling").contains("delta"));
    EXPECT_TRUE(j.at("ceiling").contains("by_role"));
    EXPECT_TRUE(j.at("length_bins").is_array());
    EXPECT_FALSE(j.contains("cross_model"));

    const double rho = j.at("roles").at("merged").at("fraction").get<double>();
    const double delta = j.at("ceiling").at("delta").get<double>();
    EXPECT_GT(rho, 0.0);
    EXPECT_LE(delta, rho);
}

TEST(EntropyReport, CrossSectionCarriesGaps) {
    const Fixture f = entropy_fixture();
    // Re-score: every entropy shifted up by 0.5 bits.
    std::vector<Trace> cross = f.traces;
    for (Trace& t : cross) {
        for (double& v : *t.entropy) v += 0.5;
    }
    const EntropyReport report =
        build_entropy_report(f.traces, f.segs, kDefaultLog2Vocab, cross);
    ASSERT_TRUE(report.gap.has_value());
    EXPECT_NEAR(report.gap->delta.non_merged, 0.5, 1e-12);
    EXPECT_NEAR(report.gap->delta.continuation, 0.5, 1e-12);
    // A constant shift leaves the structural gap unchanged.
    EXPECT_NEAR(report.gap->self_gap, report.gap->cross_gap, 1e-12);

    const nlohmann::json j = nlohmann::json::parse(report.to_json());
    EXPECT_TRUE(j.at("cross_model").contains("gap"));
    EXPECT_NEAR(j.at("cross_model").at("delta").at("first").get<double>(), 0.5, 1e-12);
}

TEST(EntropyReport, CrossCorpusMismatchThrows) {
    const Fixture f = entropy_fixture();
    std::vector<Trace> wrong_ids = f.traces;
    wrong_ids[1].id = "other";
    EXPECT_THROW(build_entropy_report(f.traces, f.segs, kDefaultLog2Vocab, wrong_ids),
                 RoleMismatch);

    std::vector<Trace> fewer(f.traces.begin(), f.traces.begin() + 1);
    EXPECT_THROW(build_entropy_report(f.traces, f.segs, kDefaultLog2Vocab, fewer), RoleMismatch);
}

TEST(TransitionReport, JsonShape) {
    std::vector<CategorySequence> seqs = {
        {{Category::Backtracking, Category::StrategyShift, Category::Verification}, true},
        {{Category::Hedging, Category::Hedging, Category::Hedging}, false},
        {{Category::Reasoning, Category::Verification}, true},
    };
    const TransitionReport report = build_transition_report(seqs);
    ASSERT_TRUE(report.correct.has_value());
    ASSERT_TRUE(report.incorrect.has_value());
    EXPECT_EQ(report.composite.size(), 3u);

    const nlohmann::json j = nlohmann::json::parse(report.to_json());
    EXPECT_EQ(j.at("categories").size(), kNumCategories);
    EXPECT_EQ(j.at("pooling"), "pooled_counts");
    EXPECT_TRUE(j.at("groups").contains("all"));
    EXPECT_TRUE(j.at("groups").contains("correct"));
    EXPECT_TRUE(j.at("groups").contains("incorrect"));
    EXPECT_EQ(j.at("groups").at("all").at("counts").size(), kNumCategories);
    EXPECT_TRUE(j.at("composite").at("incorrect").contains("confusion_cycle_rate"));
    EXPECT_TRUE(j.at("ratio_cells").is_array());
}

TEST(TransitionReport, UnlabeledCorpusOmitsGroups) {
    std::vector<CategorySequence> seqs = {
        {{Category::Reasoning, Category::Verification, Category::Reasoning}, std::nullopt},
    };
    const TransitionReport report = build_transition_report(seqs);
    EXPECT_FALSE(report.correct.has_value());
    EXPECT_FALSE(report.incorrect.has_value());
    EXPECT_TRUE(report.ratio_cells.empty());
    EXPECT_EQ(report.composite.size(), 1u);
}

TEST(IntervalJson, CarriesSignificanceFlag) {
    const IntervalEstimate e = paired_token_ci(4441, 4183, 500);
    const nlohmann::json j = nlohmann::json::parse(interval_to_json(e));
    EXPECT_EQ(j.at("kind"), "tokens");
    EXPECT_EQ(j.at("n"), 500);
    EXPECT_TRUE(j.at("significant").get<bool>());
    EXPECT_LT(j.at("hi").get<double>(), 0.0);
}

}  // namespace
}  // namespace supertok
