#include "supertok/merge_table.hpp"

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "supertok/errors.hpp"

namespace supertok {

MergeTable::MergeTable(Vocab base_vocab, std::uint32_t base_vocab_size, std::uint32_t budget)
    : base_vocab_(std::move(base_vocab)), base_vocab_size_(base_vocab_size), budget_(budget) {
    if (base_vocab_size_ < base_vocab_.size()) {
        throw ValidationError("base_vocab_size " + std::to_string(base_vocab_size_) +
                              " smaller than the " + std::to_string(base_vocab_.size()) +
                              " distinct base tokens");
    }
}

const MergeRule& MergeTable::rule_of(TokenId id) const {
    if (!is_super(id) || id - base_vocab_size_ >= merges_.size()) {
        throw InconsistentTable("token id " + std::to_string(id) + " is not in the merge table");
    }
    return merges_[id - base_vocab_size_];
}

std::string_view MergeTable::surface_of(TokenId id) const {
    if (is_super(id)) return rule_of(id).surface;
    if (id >= base_vocab_.size()) {
        throw InconsistentTable("base token id " + std::to_string(id) +
                                " is not in the vocabulary");
    }
    return base_vocab_.text_of(id);
}

void MergeTable::flatten(TokenId id, std::vector<std::string>& out) const {
    if (is_super(id)) {
        const MergeRule& rule = rule_of(id);
        out.insert(out.end(), rule.parts.begin(), rule.parts.end());
    } else {
        out.push_back(std::string(surface_of(id)));
    }
}

void MergeTable::adopt(MergeRule rule) {
    if (merges_.size() >= budget_) {
        throw ValidationError("merge budget " + std::to_string(budget_) + " exceeded");
    }
    if (rule.new_id != vocab_size()) {
        throw ValidationError("merge new_id " + std::to_string(rule.new_id) +
                              " is not the next vocabulary slot");
    }
    if (rule.rank != merges_.size()) {
        throw ValidationError("merge rank " + std::to_string(rule.rank) + " out of order");
    }
    if (rule.parts.size() < 2) {
        throw ValidationError("merge rank " + std::to_string(rule.rank) +
                              " has fewer than two parts");
    }
    merges_.push_back(std::move(rule));
}

bool MergeTable::operator==(const MergeTable& other) const {
    if (base_vocab_size_ != other.base_vocab_size_ || budget_ != other.budget_ ||
        base_vocab_.tokens() != other.base_vocab_.tokens() ||
        merges_.size() != other.merges_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < merges_.size(); ++i) {
        const MergeRule& a = merges_[i];
        const MergeRule& b = other.merges_[i];
        if (a.rank != b.rank || a.left != b.left || a.right != b.right || a.new_id != b.new_id ||
            a.surface != b.surface || a.parts != b.parts || a.frequency != b.frequency) {
            return false;
        }
    }
    return true;
}

void save_merge_table(const std::filesystem::path& path, const MergeTable& table) {
    nlohmann::json merges = nlohmann::json::array();
    for (const MergeRule& rule : table.merges()) {
        merges.push_back({{"rank", rule.rank},
                          {"left", rule.left},
                          {"right", rule.right},
                          {"new_id", rule.new_id},
                          {"surface", rule.surface},
                          {"parts", rule.parts},
                          {"frequency", rule.frequency}});
    }
    nlohmann::json j{{"format_version", detail::kFormatVersion},
                     {"base_vocab_size", table.base_vocab_size()},
                     {"budget", table.budget()},
                     {"base_vocab", table.base_vocab().tokens()},
                     {"merges", std::move(merges)}};
    detail::write_json_file(path, j);
}

MergeTable load_merge_table(const std::filesystem::path& path) {
    nlohmann::json j = detail::read_json_file(path);
    detail::check_format_version(j, path);
    try {
        Vocab vocab = Vocab::from_tokens(j.at("base_vocab").get<std::vector<std::string>>());
        MergeTable table(std::move(vocab), j.at("base_vocab_size").get<std::uint32_t>(),
                         j.at("budget").get<std::uint32_t>());
        for (const auto& m : j.at("merges")) {
            MergeRule rule;
            rule.rank = m.at("rank").get<std::uint32_t>();
            rule.left = m.at("left").get<TokenId>();
            rule.right = m.at("right").get<TokenId>();
            rule.new_id = m.at("new_id").get<TokenId>();
            rule.surface = m.at("surface").get<std::string>();
            rule.parts = m.at("parts").get<std::vector<std::string>>();
            rule.frequency = m.at("frequency").get<std::uint64_t>();
            table.adopt(std::move(rule));
        }
        return table;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace supertok
