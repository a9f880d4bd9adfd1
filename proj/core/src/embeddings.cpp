#include "supertok/embeddings.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "supertok/errors.hpp"

namespace supertok {

EmbeddingMatrix EmbeddingMatrix::zeros(std::uint32_t rows, std::uint32_t cols) {
    return EmbeddingMatrix{rows, cols, std::vector<float>(std::size_t{rows} * cols, 0.0f)};
}

EmbeddingMatrix extend_embeddings(const EmbeddingMatrix& matrix, const MergeTable& table,
                                  ExtendMode mode) {
    if (matrix.cols == 0) throw DimensionMismatch("embedding dimension must be >= 1");
    if (matrix.rows < table.base_vocab_size()) {
        throw DimensionMismatch("matrix has " + std::to_string(matrix.rows) +
                                " rows, base vocabulary needs " +
                                std::to_string(table.base_vocab_size()));
    }
    // Incremental application: rows beyond the base vocabulary must line up
    // with a prefix of the merge list.
    const std::size_t already = matrix.rows - table.base_vocab_size();
    if (already > table.merges().size()) {
        throw DimensionMismatch("matrix already has more appended rows than the table has merges");
    }

    EmbeddingMatrix out;
    out.cols = matrix.cols;
    out.rows = static_cast<std::uint32_t>(table.base_vocab_size() + table.merges().size());
    out.data = matrix.data;
    out.data.resize(std::size_t{out.rows} * out.cols, 0.0f);

    for (std::size_t r = already; r < table.merges().size(); ++r) {
        const MergeRule& rule = table.merges()[r];
        std::span<float> dst = out.row(rule.new_id);
        if (mode == ExtendMode::Chained) {
            std::span<const float> left = out.row(rule.left);
            std::span<const float> right = out.row(rule.right);
            for (std::uint32_t c = 0; c < out.cols; ++c) {
                dst[c] = 0.5f * (left[c] + right[c]);
            }
        } else {
            for (const std::string& part : rule.parts) {
                std::span<const float> src = out.row(table.base_vocab().id_of(part));
                for (std::uint32_t c = 0; c < out.cols; ++c) dst[c] += src[c];
            }
            const float inv = 1.0f / static_cast<float>(rule.parts.size());
            for (std::uint32_t c = 0; c < out.cols; ++c) dst[c] *= inv;
        }
    }
    return out;
}

namespace {

constexpr char kMagic[4] = {'S', 'T', 'E', 'B'};

void write_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char bytes[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32_le(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    return std::uint32_t{bytes[0]} | (std::uint32_t{bytes[1]} << 8) |
           (std::uint32_t{bytes[2]} << 16) | (std::uint32_t{bytes[3]} << 24);
}

}  // namespace

void save_embeddings_binary(const std::filesystem::path& path, const EmbeddingMatrix& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(kMagic, 4);
    write_u32_le(out, m.rows);
    write_u32_le(out, m.cols);
    static_assert(sizeof(float) == 4);
    for (float v : m.data) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        write_u32_le(out, bits);
    }
    if (!out) throw IoError("failed writing " + path.string());
}

EmbeddingMatrix load_embeddings_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw ValidationError(path.string() + ": not an embedding matrix file");
    }
    EmbeddingMatrix m;
    m.rows = read_u32_le(in);
    m.cols = read_u32_le(in);
    m.data.resize(std::size_t{m.rows} * m.cols);
    for (float& v : m.data) {
        std::uint32_t bits = read_u32_le(in);
        std::memcpy(&v, &bits, 4);
    }
    if (!in) throw ValidationError(path.string() + ": truncated embedding matrix");
    return m;
}

void save_embeddings_text(const std::filesystem::path& path, const EmbeddingMatrix& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << m.rows << ' ' << m.cols << '\n';
    out << std::setprecision(9);
    for (std::uint32_t r = 0; r < m.rows; ++r) {
        std::span<const float> row = m.row(r);
        for (std::uint32_t c = 0; c < m.cols; ++c) {
            if (c) out << ' ';
            out << row[c];
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

EmbeddingMatrix load_embeddings_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    EmbeddingMatrix m;
    if (!(in >> m.rows >> m.cols)) {
        throw ValidationError(path.string() + ": missing matrix header");
    }
    m.data.resize(std::size_t{m.rows} * m.cols);
    for (float& v : m.data) {
        if (!(in >> v)) throw ValidationError(path.string() + ": truncated embedding matrix");
    }
    return m;
}

}  // namespace supertok
