#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace supertok {

using TokenId = std::uint32_t;

// One base token with its byte span into the owning trace text.
struct BaseToken {
    std::string text;
    std::size_t start = 0;  // byte offset, inclusive
    std::size_t end = 0;    // byte offset, exclusive
};

struct Trace {
    std::string id;
    std::string text;
    std::vector<BaseToken> tokens;
    std::optional<std::vector<double>> entropy;  // bits, one per token
    std::optional<bool> correct;
};

// Checks offset tiling, text slices and entropy alignment.
void validate_trace(const Trace& trace);

// JSONL, one record per line:
//   {"id": ..., "text": ..., "tokens": [[text, start, end], ...],
//    "entropy": [...]?, "correct": bool?}
std::vector<Trace> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, std::span<const Trace> traces);

// Distinct base-token surfaces, ids assigned in lexicographic order.
class Vocab {
public:
    Vocab() = default;
    static Vocab build(std::span<const Trace> traces);

    TokenId id_of(std::string_view text) const;         // throws UnknownBaseToken
    std::optional<TokenId> find(std::string_view text) const;
    const std::string& text_of(TokenId id) const;
    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    static Vocab from_tokens(std::vector<std::string> tokens);

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> index_;
    void rebuild_index();
};

std::vector<TokenId> encode_base(const Trace& trace, const Vocab& vocab);

inline constexpr std::uint64_t kUncapped = ~std::uint64_t{0};

struct PairKey {
    TokenId left = 0;
    TokenId right = 0;
    bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const {
        std::uint64_t packed = (std::uint64_t{k.left} << 32) | k.right;
        packed *= 0x9e3779b97f4a7c15ull;
        return static_cast<std::size_t>(packed ^ (packed >> 29));
    }
};

struct PairCountTable {
    std::unordered_map<PairKey, std::uint64_t, PairKeyHash> counts;
    std::uint64_t cap = 10;
};

// Adjacent-pair counts over the given segmentations. Occurrences are counted
// non-overlapping left-to-right (matching replacement semantics), and every
// trace contributes at most `cap` to any single pair.
PairCountTable count_pairs(std::span<const std::vector<TokenId>> segmentations, std::uint64_t cap);

}  // namespace supertok
