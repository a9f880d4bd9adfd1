#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "supertok/corpus.hpp"
#include "supertok/taxonomy.hpp"
#include "supertok/tokenizer.hpp"
#include "supertok/trainer.hpp"

namespace {

using namespace supertok;

std::vector<std::string> phrase_pool() {
    return {"Let",  "'s",   " check", "Wait", ",",     " if",  " is",   " the", ".",
            "\n",   " so",  " and",   " 1",   " maybe", "So",  " then", "First", ",",
            " x",   " n",   "This",   " of",  " a",     "b",   "c",     " good"};
}

std::vector<Trace> synthetic_corpus(std::size_t n_traces, std::size_t tokens_per_trace) {
    std::mt19937_64 rng(12345);
    const auto pool = phrase_pool();
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<Trace> traces;
    traces.reserve(n_traces);
    for (std::size_t t = 0; t < n_traces; ++t) {
        Trace trace;
        trace.id = "b" + std::to_string(t);
        trace.tokens.reserve(tokens_per_trace);
        for (std::size_t i = 0; i < tokens_per_trace; ++i) {
            const std::string& tok = pool[pick(rng)];
            const std::size_t start = trace.text.size();
            trace.text += tok;
            trace.tokens.push_back(BaseToken{tok, start, trace.text.size()});
        }
        traces.push_back(std::move(trace));
    }
    return traces;
}

void BM_CountPairs(benchmark::State& state) {
    const auto traces = synthetic_corpus(200, 1000);
    const Vocab vocab = Vocab::build(traces);
    std::vector<std::vector<TokenId>> segs;
    for (const Trace& t : traces) segs.push_back(encode_base(t, vocab));
    std::size_t total = 0;
    for (const auto& s : segs) total += s.size();

    for (auto _ : state) {
        PairCountTable table = count_pairs(segs, 10);
        benchmark::DoNotOptimize(table);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * total));
}
BENCHMARK(BM_CountPairs);

void BM_Train(benchmark::State& state) {
    const auto traces = synthetic_corpus(100, 500);
    TrainConfig config;
    config.budget = static_cast<std::uint32_t>(state.range(0));
    config.filter = FilterSet::none();
    for (auto _ : state) {
        MergeTable table = train(traces, config);
        benchmark::DoNotOptimize(table);
    }
}
BENCHMARK(BM_Train)->Arg(10)->Arg(50);

void BM_Apply(benchmark::State& state) {
    const auto traces = synthetic_corpus(200, 1000);
    TrainConfig config;
    config.budget = 100;
    config.filter = FilterSet::none();
    const MergeTable table = train(traces, config);
    std::size_t total = 0;
    for (const Trace& t : traces) total += t.tokens.size();

    for (auto _ : state) {
        for (const Trace& t : traces) {
            Segmentation seg = apply(t, table);
            benchmark::DoNotOptimize(seg);
        }
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * total));
}
BENCHMARK(BM_Apply);

void BM_Classify(benchmark::State& state) {
    const auto traces = synthetic_corpus(100, 500);
    TrainConfig config;
    config.budget = 100;
    config.filter = FilterSet::none();
    const MergeTable table = train(traces, config);
    for (auto _ : state) {
        CategoryMap map = classify_table(table);
        benchmark::DoNotOptimize(map);
    }
}
BENCHMARK(BM_Classify);

}  // namespace

BENCHMARK_MAIN();
