#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "supertok/corpus.hpp"

namespace supertok {

struct MergeRule {
    std::uint32_t rank = 0;
    TokenId left = 0;
    TokenId right = 0;
    TokenId new_id = 0;
    std::string surface;             // flattened text, == concatenation of parts
    std::vector<std::string> parts;  // base-token decomposition, len >= 2
    std::uint64_t frequency = 0;     // capped count at adoption time
};

class MergeTable {
public:
    MergeTable() = default;
    MergeTable(Vocab base_vocab, std::uint32_t base_vocab_size, std::uint32_t budget);

    const Vocab& base_vocab() const { return base_vocab_; }
    std::uint32_t base_vocab_size() const { return base_vocab_size_; }
    std::uint32_t budget() const { return budget_; }
    const std::vector<MergeRule>& merges() const { return merges_; }
    std::size_t vocab_size() const { return base_vocab_size_ + merges_.size(); }

    bool is_super(TokenId id) const { return id >= base_vocab_size_; }
    const MergeRule& rule_of(TokenId id) const;  // throws InconsistentTable

    // Surface text of any id (base or super). Throws InconsistentTable for
    // ids outside the vocabulary.
    std::string_view surface_of(TokenId id) const;

    // Base-token decomposition of any id, appended to `out`.
    void flatten(TokenId id, std::vector<std::string>& out) const;

    // Appends one rule; new_id must equal base_vocab_size + merges.size().
    void adopt(MergeRule rule);

    bool operator==(const MergeTable& other) const;

private:
    Vocab base_vocab_;
    std::uint32_t base_vocab_size_ = 0;
    std::uint32_t budget_ = 0;
    std::vector<MergeRule> merges_;
};

// JSON: {format_version, base_vocab_size, budget, base_vocab: [...],
//        merges: [{rank,left,right,new_id,surface,parts,frequency}, ...]}
void save_merge_table(const std::filesystem::path& path, const MergeTable& table);
MergeTable load_merge_table(const std::filesystem::path& path);

}  // namespace supertok
