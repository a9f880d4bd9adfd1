#include "supertok/trainer.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>

#include "supertok/errors.hpp"
#include "supertok/parallel.hpp"
#include "supertok/tokenizer.hpp"

namespace supertok {

namespace {

// Replaces (left, right) -> new_id in one left-to-right pass. A single pass
// is exhaustive: replacing a pair can never create a new occurrence of the
// same pair, because new_id is fresh.
std::size_t replace_pair(std::vector<TokenId>& seq, TokenId left, TokenId right, TokenId new_id) {
    std::size_t read = 0;
    std::size_t write = 0;
    std::size_t replaced = 0;
    const std::size_t n = seq.size();
    while (read < n) {
        if (read + 1 < n && seq[read] == left && seq[read + 1] == right) {
            seq[write++] = new_id;
            read += 2;
            ++replaced;
        } else {
            seq[write++] = seq[read++];
        }
    }
    seq.resize(write);
    return replaced;
}

struct Candidate {
    PairKey pair;
    std::uint64_t count = 0;
    std::string surface;
};

// Frequency first, then flattened surface, then the part sequences of each
// side. Part sequences identify tokens uniquely, so this order is total and
// the selection does not depend on hash-map iteration order.
bool better_candidate(const Candidate& a, const Candidate& b, const MergeTable& table,
                      std::vector<std::string>& scratch_a, std::vector<std::string>& scratch_b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.surface != b.surface) return a.surface < b.surface;
    for (int side = 0; side < 2; ++side) {
        scratch_a.clear();
        scratch_b.clear();
        table.flatten(side == 0 ? a.pair.left : a.pair.right, scratch_a);
        table.flatten(side == 0 ? b.pair.left : b.pair.right, scratch_b);
        if (scratch_a != scratch_b) return scratch_a < scratch_b;
    }
    return false;
}

PairCountTable count_pairs_parallel(std::span<const std::vector<TokenId>> segs,
                                    std::uint64_t cap) {
    constexpr std::size_t kChunk = 256;
    const std::size_t n_chunks = (segs.size() + kChunk - 1) / kChunk;
    if (n_chunks <= 1 || worker_count() == 1) return count_pairs(segs, cap);

    std::vector<PairCountTable> partials(n_chunks);
    parallel_for(n_chunks, [&](std::size_t c) {
        const std::size_t begin = c * kChunk;
        const std::size_t len = std::min(kChunk, segs.size() - begin);
        partials[c] = count_pairs(segs.subspan(begin, len), cap);
    });
    PairCountTable total;
    total.cap = cap;
    for (PairCountTable& part : partials) {
        for (const auto& [key, count] : part.counts) total.counts[key] += count;
    }
    return total;
}

}  // namespace

MergeTable train(std::span<const Trace> traces, const TrainConfig& config) {
    if (config.cap == 0) throw ValidationError("pair count cap must be >= 1");
    Vocab vocab = Vocab::build(traces);
    const std::uint32_t base_size =
        config.base_vocab_size == 0 ? static_cast<std::uint32_t>(vocab.size())
                                    : config.base_vocab_size;
    MergeTable table(std::move(vocab), base_size, config.budget);

    std::vector<std::vector<TokenId>> segs(traces.size());
    parallel_for(traces.size(), [&](std::size_t i) {
        segs[i] = encode_base(traces[i], table.base_vocab());
    });

    // Pair surfaces never change once both sides exist, so eligibility
    // verdicts persist across iterations.
    std::unordered_map<PairKey, bool, PairKeyHash> eligibility;
    std::vector<std::string> scratch_a;
    std::vector<std::string> scratch_b;

    while (table.merges().size() < config.budget) {
        PairCountTable counts = count_pairs_parallel(segs, config.cap);

        std::optional<Candidate> best;
        for (const auto& [pair, count] : counts.counts) {
            if (count < config.min_frequency) continue;
            auto [it, inserted] = eligibility.try_emplace(pair, false);
            std::string surface;
            if (inserted) {
                surface = std::string(table.surface_of(pair.left)) +
                          std::string(table.surface_of(pair.right));
                it->second = is_eligible(surface, config.filter).eligible;
            }
            if (!it->second) continue;
            if (surface.empty()) {
                surface = std::string(table.surface_of(pair.left)) +
                          std::string(table.surface_of(pair.right));
            }
            Candidate candidate{pair, count, std::move(surface)};
            if (!best || better_candidate(candidate, *best, table, scratch_a, scratch_b)) {
                best = std::move(candidate);
            }
        }
        if (!best) break;

        MergeRule rule;
        rule.rank = static_cast<std::uint32_t>(table.merges().size());
        rule.left = best->pair.left;
        rule.right = best->pair.right;
        rule.new_id = static_cast<TokenId>(table.vocab_size());
        rule.surface = std::move(best->surface);
        table.flatten(rule.left, rule.parts);
        table.flatten(rule.right, rule.parts);
        rule.frequency = best->count;
        const TokenId left = rule.left;
        const TokenId right = rule.right;
        const TokenId new_id = rule.new_id;
        table.adopt(std::move(rule));

        parallel_for(segs.size(), [&](std::size_t i) {
            replace_pair(segs[i], left, right, new_id);
        });
    }
    return table;
}

std::vector<std::pair<std::uint32_t, double>> compression_curve(
    std::span<const Trace> traces, const MergeTable& table,
    std::span<const std::uint32_t> prefix_sizes) {
    for (std::uint32_t k : prefix_sizes) {
        if (k > table.merges().size()) throw PrefixOutOfRange(k, table.merges().size());
    }
    std::vector<std::uint32_t> sorted(prefix_sizes.begin(), prefix_sizes.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::uint64_t base_total = 0;
    std::vector<std::vector<TokenId>> segs(traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
        segs[i] = encode_base(traces[i], table.base_vocab());
        base_total += segs[i].size();
    }

    // Apply merges incrementally, snapshotting at each requested prefix.
    std::unordered_map<std::uint32_t, double> reduction_at;
    std::size_t next_rule = 0;
    for (std::uint32_t k : sorted) {
        for (; next_rule < k; ++next_rule) {
            const MergeRule& rule = table.merges()[next_rule];
            for (auto& seq : segs) replace_pair(seq, rule.left, rule.right, rule.new_id);
        }
        std::uint64_t merged_total = 0;
        for (const auto& seq : segs) merged_total += seq.size();
        reduction_at[k] = base_total == 0
                              ? 0.0
                              : 1.0 - static_cast<double>(merged_total) /
                                          static_cast<double>(base_total);
    }

    std::vector<std::pair<std::uint32_t, double>> result;
    result.reserve(prefix_sizes.size());
    for (std::uint32_t k : prefix_sizes) result.emplace_back(k, reduction_at.at(k));
    return result;
}

}  // namespace supertok
