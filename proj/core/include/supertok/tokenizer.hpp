#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "supertok/corpus.hpp"
#include "supertok/merge_table.hpp"

namespace supertok {

// Range of base-token indices covered by one output token.
struct TokenSpan {
    std::uint32_t start = 0;
    std::uint32_t len = 1;
    bool operator==(const TokenSpan&) const = default;
};

struct Segmentation {
    std::string trace_id;
    std::vector<TokenId> token_ids;
    std::vector<TokenSpan> spans;  // parallel to token_ids

    std::size_t base_token_count() const;
};

// Applies merge rules in rank order, each rule exhaustively left-to-right,
// mirroring training semantics. `prefix` limits the table to its first rules
// (kUncapped, the default, means the whole table).
Segmentation apply(const Trace& trace, const MergeTable& table,
                   std::uint64_t prefix = kUncapped);
Segmentation apply_tokens(std::span<const std::string> token_texts, const MergeTable& table,
                          std::uint64_t prefix = kUncapped);

std::vector<Segmentation> apply_corpus(std::span<const Trace> traces, const MergeTable& table);

// Exact original surface text.
std::string decode(const Segmentation& seg, const MergeTable& table);

// Fraction of output tokens drawn from the super vocabulary.
double adoption_rate(const Segmentation& seg, const MergeTable& table);

// Fraction of base-token positions lying inside merge spans.
double merged_position_fraction(const Segmentation& seg);

// JSONL, one record per line: {"id": ..., "token_ids": [...], "spans": [[start,len], ...]}
void save_segmentations(const std::filesystem::path& path, std::span<const Segmentation> segs);
std::vector<Segmentation> load_segmentations(const std::filesystem::path& path);

}  // namespace supertok
