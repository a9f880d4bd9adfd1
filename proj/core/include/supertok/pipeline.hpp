#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "supertok/entropy.hpp"
#include "supertok/filter.hpp"

namespace supertok {

struct PipelineConfig {
    std::filesystem::path corpus;
    std::filesystem::path out_dir;
    std::uint32_t budget = 250;
    std::uint64_t cap = 10;
    bool filter = true;
    std::uint32_t base_vocab_size = 0;  // 0: derive from corpus
    double log2_vocab = kDefaultLog2Vocab;
    std::uint32_t render_samples = 2;
};

struct ManifestEntry {
    std::string name;
    std::string path;  // relative to out_dir
    std::string sha256;
};

struct ManifestStep {
    std::string name;
    std::string status;  // "ok" | "skipped"
    std::string reason;  // set when skipped
};

struct Manifest {
    std::vector<ManifestStep> steps;
    std::vector<ManifestEntry> artifacts;

    std::string to_json() const;  // canonical serialization, written to manifest.json
};

// train -> apply -> classify -> entropy (when every trace carries entropies)
// -> transitions (when correctness labels are present) -> render samples.
// Writes every artifact plus manifest.json under out_dir; re-running with
// identical inputs reproduces byte-identical artifacts.
Manifest run_pipeline(const PipelineConfig& config);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace supertok
