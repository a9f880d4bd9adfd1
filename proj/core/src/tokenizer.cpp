#include "supertok/tokenizer.hpp"

#include <fstream>
#include <numeric>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "supertok/errors.hpp"
#include "supertok/parallel.hpp"

namespace supertok {

std::size_t Segmentation::base_token_count() const {
    std::size_t n = 0;
    for (const TokenSpan& s : spans) n += s.len;
    return n;
}

namespace {

// One left-to-right pass of (left, right) -> new_id, folding spans.
std::size_t replace_pair_spans(std::vector<TokenId>& seq, std::vector<TokenSpan>& spans,
                               TokenId left, TokenId right, TokenId new_id) {
    std::size_t read = 0;
    std::size_t write = 0;
    std::size_t replaced = 0;
    const std::size_t n = seq.size();
    while (read < n) {
        if (read + 1 < n && seq[read] == left && seq[read + 1] == right) {
            seq[write] = new_id;
            spans[write] = TokenSpan{spans[read].start, spans[read].len + spans[read + 1].len};
            ++write;
            read += 2;
            ++replaced;
        } else {
            seq[write] = seq[read];
            spans[write] = spans[read];
            ++write;
            ++read;
        }
    }
    seq.resize(write);
    spans.resize(write);
    return replaced;
}

Segmentation apply_ids(std::vector<TokenId> ids, const MergeTable& table, std::uint64_t prefix) {
    Segmentation seg;
    seg.token_ids = std::move(ids);
    seg.spans.resize(seg.token_ids.size());
    for (std::uint32_t i = 0; i < seg.spans.size(); ++i) seg.spans[i] = TokenSpan{i, 1};

    std::unordered_set<TokenId> present(seg.token_ids.begin(), seg.token_ids.end());
    const std::size_t n_rules = std::min<std::uint64_t>(prefix, table.merges().size());
    for (std::size_t r = 0; r < n_rules; ++r) {
        const MergeRule& rule = table.merges()[r];
        if (!present.contains(rule.left) || !present.contains(rule.right)) continue;
        if (replace_pair_spans(seg.token_ids, seg.spans, rule.left, rule.right, rule.new_id) > 0) {
            present.insert(rule.new_id);
        }
    }
    return seg;
}

}  // namespace

Segmentation apply_tokens(std::span<const std::string> token_texts, const MergeTable& table,
                          std::uint64_t prefix) {
    std::vector<TokenId> ids;
    ids.reserve(token_texts.size());
    for (std::size_t i = 0; i < token_texts.size(); ++i) {
        std::optional<TokenId> id = table.base_vocab().find(token_texts[i]);
        if (!id) throw UnknownBaseToken(i, token_texts[i]);
        ids.push_back(*id);
    }
    return apply_ids(std::move(ids), table, prefix);
}

Segmentation apply(const Trace& trace, const MergeTable& table, std::uint64_t prefix) {
    std::vector<TokenId> ids;
    ids.reserve(trace.tokens.size());
    for (std::size_t i = 0; i < trace.tokens.size(); ++i) {
        std::optional<TokenId> id = table.base_vocab().find(trace.tokens[i].text);
        if (!id) throw UnknownBaseToken(i, trace.tokens[i].text);
        ids.push_back(*id);
    }
    Segmentation seg = apply_ids(std::move(ids), table, prefix);
    seg.trace_id = trace.id;
    return seg;
}

std::vector<Segmentation> apply_corpus(std::span<const Trace> traces, const MergeTable& table) {
    std::vector<Segmentation> segs(traces.size());
    parallel_for(traces.size(), [&](std::size_t i) { segs[i] = apply(traces[i], table); });
    return segs;
}

std::string decode(const Segmentation& seg, const MergeTable& table) {
    std::string text;
    for (TokenId id : seg.token_ids) {
        text += table.surface_of(id);
    }
    return text;
}

double adoption_rate(const Segmentation& seg, const MergeTable& table) {
    if (seg.token_ids.empty()) return 0.0;
    std::size_t supers = 0;
    for (TokenId id : seg.token_ids) {
        if (table.is_super(id)) ++supers;
    }
    return static_cast<double>(supers) / static_cast<double>(seg.token_ids.size());
}

double merged_position_fraction(const Segmentation& seg) {
    std::size_t base = 0;
    std::size_t merged = 0;
    for (const TokenSpan& s : seg.spans) {
        base += s.len;
        if (s.len >= 2) merged += s.len;
    }
    if (base == 0) return 0.0;
    return static_cast<double>(merged) / static_cast<double>(base);
}

void save_segmentations(const std::filesystem::path& path, std::span<const Segmentation> segs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const Segmentation& seg : segs) {
        nlohmann::json spans = nlohmann::json::array();
        for (const TokenSpan& s : seg.spans) spans.push_back({s.start, s.len});
        nlohmann::json j{{"id", seg.trace_id},
                         {"token_ids", seg.token_ids},
                         {"spans", std::move(spans)}};
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<Segmentation> load_segmentations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<Segmentation> segs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw MalformedRecord(line_no, "invalid JSON");
        try {
            Segmentation seg;
            seg.trace_id = j.at("id").get<std::string>();
            seg.token_ids = j.at("token_ids").get<std::vector<TokenId>>();
            for (const auto& s : j.at("spans")) {
                if (!s.is_array() || s.size() != 2) {
                    throw MalformedRecord(line_no, "span entry is not [start, len]");
                }
                seg.spans.push_back(TokenSpan{s[0].get<std::uint32_t>(), s[1].get<std::uint32_t>()});
            }
            if (seg.spans.size() != seg.token_ids.size()) {
                throw MalformedRecord(line_no, "spans and token_ids differ in length");
            }
            segs.push_back(std::move(seg));
        } catch (const MalformedRecord&) {
            throw;
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecord(line_no, e.what());
        }
    }
    return segs;
}

}  // namespace supertok
