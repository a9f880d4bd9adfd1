#include "supertok/corpus.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "support/builders.hpp"
#include "supertok/errors.hpp"

namespace supertok {
namespace {

using testing::make_trace;

class TempFile {
public:
    explicit TempFile(const std::string& content) {
        path_ = std::filesystem::temp_directory_path() /
                ("supertok_corpus_" + std::to_string(counter_++) + ".jsonl");
        std::ofstream out(path_, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::filesystem::remove(path_); }
    const std::filesystem::path& path() const { return path_; }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

TEST(LoadCorpus, MinimalRecord) {
    TempFile file(R"({"id":"t1","text":"ab","tokens":[["a",0,1],["b",1,2]]})"
                  "\n");
    const auto traces = load_corpus(file.path());
    ASSERT_EQ(traces.size(), 1u);
    EXPECT_EQ(traces[0].id, "t1");
    EXPECT_EQ(traces[0].text, "ab");
    ASSERT_EQ(traces[0].tokens.size(), 2u);
    EXPECT_EQ(traces[0].tokens[0].text, "a");
    EXPECT_EQ(traces[0].tokens[1].start, 1u);
    EXPECT_FALSE(traces[0].entropy.has_value());
    EXPECT_FALSE(traces[0].correct.has_value());
}

TEST(LoadCorpus, TilingViolation) {
    TempFile file(R"({"id":"t1","text":"ab","tokens":[["a",0,1]]})"
                  "\n");
    try {
        load_corpus(file.path());
        FAIL() << "expected OffsetMismatch";
    } catch (const OffsetMismatch& e) {
        EXPECT_EQ(e.trace_id(), "t1");
    }
}

TEST(LoadCorpus, SliceMismatch) {
    TempFile file(R"({"id":"t9","text":"ab","tokens":[["a",0,1],["c",1,2]]})"
                  "\n");
    EXPECT_THROW(load_corpus(file.path()), OffsetMismatch);
}

TEST(LoadCorpus, NonContiguousTokens) {
    TempFile file(R"({"id":"t1","text":"abc","tokens":[["a",0,1],["c",2,3]]})"
                  "\n");
    EXPECT_THROW(load_corpus(file.path()), OffsetMismatch);
}

TEST(LoadCorpus, MalformedMiddleLine) {
    TempFile file(R"({"id":"t1","text":"a","tokens":[["a",0,1]]})"
                  "\n{not json\n"
                  R"({"id":"t3","text":"a","tokens":[["a",0,1]]})"
                  "\n");
    try {
        load_corpus(file.path());
        FAIL() << "expected MalformedRecord";
    } catch (const MalformedRecord& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(LoadCorpus, EntropyLengthMismatch) {
    TempFile file(R"({"id":"t1","text":"ab","tokens":[["a",0,1],["b",1,2]],"entropy":[1.0]})"
                  "\n");
    EXPECT_THROW(load_corpus(file.path()), EntropyLengthMismatch);
}

TEST(LoadCorpus, NegativeEntropyRejected) {
    TempFile file(R"({"id":"t1","text":"a","tokens":[["a",0,1]],"entropy":[-0.5]})"
                  "\n");
    EXPECT_THROW(load_corpus(file.path()), MalformedRecord);
}

TEST(LoadCorpus, DuplicateIdRejected) {
    TempFile file(R"({"id":"t1","text":"a","tokens":[["a",0,1]]})"
                  "\n"
                  R"({"id":"t1","text":"b","tokens":[["b",0,1]]})"
                  "\n");
    EXPECT_THROW(load_corpus(file.path()), MalformedRecord);
}

TEST(LoadCorpus, MissingFile) {
    EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl"), IoError);
}

TEST(LoadCorpus, Utf8ByteOffsets) {
    // "é" is two bytes, "日" three.
    TempFile file(R"({"id":"u","text":"é日x","tokens":[["é",0,2],["日",2,5],["x",5,6]]})"
                  "\n");
    const auto traces = load_corpus(file.path());
    ASSERT_EQ(traces[0].tokens.size(), 3u);
    EXPECT_EQ(traces[0].tokens[1].text, "日");
}

TEST(LoadCorpus, RoundTripThroughSave) {
    std::vector<Trace> traces;
    traces.push_back(make_trace("a", {"Let", "'s", " check"}, std::vector<double>{1.0, 0.5, 0.25},
                                true));
    traces.push_back(make_trace("b", {" is", " the"}));
    TempFile file("");
    save_corpus(file.path(), traces);
    const auto loaded = load_corpus(file.path());
    ASSERT_EQ(loaded.size(), 2u);
    EXPECT_EQ(loaded[0].text, "Let's check");
    EXPECT_EQ(loaded[0].entropy->at(2), 0.25);
    EXPECT_EQ(loaded[0].correct, std::optional<bool>(true));
    EXPECT_EQ(loaded[1].tokens[1].text, " the");
}

TEST(Vocab, LexicographicIds) {
    const std::vector<Trace> traces = {make_trace("t", {"b", "a", "c", "a"})};
    const Vocab vocab = Vocab::build(traces);
    ASSERT_EQ(vocab.size(), 3u);
    EXPECT_EQ(vocab.text_of(0), "a");
    EXPECT_EQ(vocab.text_of(1), "b");
    EXPECT_EQ(vocab.text_of(2), "c");
    EXPECT_EQ(vocab.id_of("c"), 2u);
    EXPECT_THROW(vocab.id_of("z"), UnknownBaseToken);
}

std::vector<std::vector<TokenId>> encode_all(const std::vector<Trace>& traces,
                                             const Vocab& vocab) {
    std::vector<std::vector<TokenId>> segs;
    for (const Trace& t : traces) segs.push_back(encode_base(t, vocab));
    return segs;
}

TEST(CountPairs, CapLimitsSingleTrace) {
    std::vector<std::string> tokens;
    for (int i = 0; i < 1000; ++i) {
        tokens.push_back("Wait");
        tokens.push_back(",");
    }
    const std::vector<Trace> traces = {make_trace("t", tokens)};
    const Vocab vocab = Vocab::build(traces);
    const auto segs = encode_all(traces, vocab);
    const PairCountTable table = count_pairs(segs, 10);
    EXPECT_EQ(table.counts.at(PairKey{vocab.id_of("Wait"), vocab.id_of(",")}), 10u);
}

TEST(CountPairs, EmptyCorpus) {
    const PairCountTable table = count_pairs({}, 10);
    EXPECT_TRUE(table.counts.empty());
}

TEST(CountPairs, TwoTracesSumBelowCap) {
    const std::vector<std::string> tokens = {"a", "b", "c", "a", "b", "c", "a", "b"};
    const std::vector<Trace> traces = {make_trace("t1", tokens), make_trace("t2", tokens)};
    const Vocab vocab = Vocab::build(traces);
    const auto segs = encode_all(traces, vocab);
    const PairCountTable table = count_pairs(segs, 10);
    // Brute-force sliding window: 3 per trace, 6 total.
    EXPECT_EQ(table.counts.at(PairKey{vocab.id_of("a"), vocab.id_of("b")}), 6u);
    EXPECT_EQ(table.counts.at(PairKey{vocab.id_of("b"), vocab.id_of("c")}), 4u);
}

TEST(CountPairs, SelfOverlapCountsNonOverlapping) {
    const std::vector<Trace> t3 = {make_trace("t", {"a", "a", "a"})};
    const std::vector<Trace> t4 = {make_trace("t", {"a", "a", "a", "a"})};
    const std::vector<Trace> t5 = {make_trace("t", {"a", "a", "a", "a", "a"})};
    for (const auto& [traces, expected] :
         {std::pair{&t3, 1u}, std::pair{&t4, 2u}, std::pair{&t5, 2u}}) {
        const Vocab vocab = Vocab::build(*traces);
        const auto segs = encode_all(*traces, vocab);
        const PairCountTable table = count_pairs(segs, 10);
        EXPECT_EQ(table.counts.at(PairKey{0, 0}), expected);
    }
}

TEST(CountPairs, CapMonotonicity) {
    std::mt19937_64 rng(42);
    for (int round = 0; round < 25; ++round) {
        const auto traces = testing::random_corpus(rng, 120);
        const Vocab vocab = Vocab::build(traces);
        const auto segs = encode_all(traces, vocab);
        const PairCountTable lo = count_pairs(segs, 3);
        const PairCountTable hi = count_pairs(segs, 7);
        for (const auto& [key, count] : lo.counts) {
            EXPECT_LE(count, hi.counts.at(key));
        }
    }
}

TEST(CountPairs, ShardIndependence) {
    std::mt19937_64 rng(7);
    const auto traces = testing::random_corpus(rng, 200, 4);
    const Vocab vocab = Vocab::build(traces);
    const auto segs = encode_all(traces, vocab);
    const PairCountTable whole = count_pairs(segs, 5);

    PairCountTable stitched;
    std::span<const std::vector<TokenId>> all(segs);
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (const auto& [key, count] : count_pairs(all.subspan(i, 1), 5).counts) {
            stitched.counts[key] += count;
        }
    }
    EXPECT_EQ(whole.counts.size(), stitched.counts.size());
    for (const auto& [key, count] : whole.counts) {
        EXPECT_EQ(count, stitched.counts.at(key));
    }
}

}  // namespace
}  // namespace supertok
