#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "supertok/merge_table.hpp"

namespace supertok {

struct EmbeddingMatrix {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<float> data;  // row-major

    std::span<float> row(std::uint32_t i) { return {data.data() + std::size_t{i} * cols, cols}; }
    std::span<const float> row(std::uint32_t i) const {
        return {data.data() + std::size_t{i} * cols, cols};
    }
    static EmbeddingMatrix zeros(std::uint32_t rows, std::uint32_t cols);
};

enum class ExtendMode {
    // Appended row = mean of the left and right constituent rows, which may
    // themselves be appended rows. This composes pairwise means along the
    // merge chain.
    Chained,
    // Appended row = mean of all flattened base-part rows.
    FlatAverage,
};

// Appends one row per merge in rank order. The input must cover the base
// vocabulary (plus any previously appended rows when applied incrementally).
EmbeddingMatrix extend_embeddings(const EmbeddingMatrix& matrix, const MergeTable& table,
                                  ExtendMode mode = ExtendMode::Chained);

// Binary: "STEB" magic, u32 rows, u32 cols, f32 payload, all little-endian.
void save_embeddings_binary(const std::filesystem::path& path, const EmbeddingMatrix& m);
EmbeddingMatrix load_embeddings_binary(const std::filesystem::path& path);

// Text: first line "rows cols", then one row per line.
void save_embeddings_text(const std::filesystem::path& path, const EmbeddingMatrix& m);
EmbeddingMatrix load_embeddings_text(const std::filesystem::path& path);

}  // namespace supertok
