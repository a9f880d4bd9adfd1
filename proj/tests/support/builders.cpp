#include "builders.hpp"

namespace supertok::testing {

Trace make_trace(std::string id, const std::vector<std::string>& tokens,
                 std::optional<std::vector<double>> entropy, std::optional<bool> correct) {
    Trace trace;
    trace.id = std::move(id);
    for (const std::string& text : tokens) {
        const std::size_t start = trace.text.size();
        trace.text += text;
        trace.tokens.push_back(BaseToken{text, start, trace.text.size()});
    }
    trace.entropy = std::move(entropy);
    trace.correct = correct;
    return trace;
}

const std::vector<std::string>& token_pool() {
    static const std::vector<std::string> pool = {
        "Let",  "'s",    " check", " the",  " is",  "Wait", ",",     " if",  ".",
        "\n",   " 1",    " maybe", "So",    " so",  "a",    "b",     "c",    " a",
        " b",   "x",     "é",      "日",     " ?",   "!",    " good", "First", " and",
        " 12",  " then", ":",      " quite", "&",   "<",    ">",     "\"",
    };
    return pool;
}

std::vector<Trace> random_corpus(std::mt19937_64& rng, std::size_t max_total_tokens,
                                 std::size_t max_traces) {
    const auto& pool = token_pool();
    std::uniform_int_distribution<std::size_t> trace_count(1, max_traces);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);

    const std::size_t n_traces = trace_count(rng);
    std::vector<Trace> traces;
    std::size_t remaining = max_total_tokens;
    for (std::size_t t = 0; t < n_traces; ++t) {
        const std::size_t budget = remaining / (n_traces - t);
        std::uniform_int_distribution<std::size_t> trace_len(0, budget);
        const std::size_t len = trace_len(rng);
        remaining -= len;

        std::vector<std::string> tokens;
        tokens.reserve(len);
        // Half the draws come from a small prefix so repeated pairs occur.
        std::uniform_int_distribution<std::size_t> small(0, 7);
        std::bernoulli_distribution coin(0.5);
        for (std::size_t i = 0; i < len; ++i) {
            tokens.push_back(pool[coin(rng) ? small(rng) : pick(rng)]);
        }
        traces.push_back(make_trace("t" + std::to_string(t), tokens));
    }
    return traces;
}

std::vector<Trace> bulk_corpus(std::mt19937_64& rng, std::size_t n_traces,
                               std::size_t max_tokens) {
    const auto& pool = token_pool();
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<std::size_t> small(0, 7);
    std::uniform_int_distribution<std::size_t> len_dist(0, max_tokens);
    std::bernoulli_distribution coin(0.5);

    std::vector<Trace> traces;
    traces.reserve(n_traces);
    for (std::size_t t = 0; t < n_traces; ++t) {
        std::vector<std::string> tokens;
        const std::size_t len = len_dist(rng);
        tokens.reserve(len);
        for (std::size_t i = 0; i < len; ++i) {
            tokens.push_back(pool[coin(rng) ? small(rng) : pick(rng)]);
        }
        traces.push_back(make_trace("t" + std::to_string(t), tokens));
    }
    return traces;
}

}  // namespace supertok::testing
