#include "supertok/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "supertok/errors.hpp"

namespace supertok {

void validate_trace(const Trace& trace) {
    std::size_t cursor = 0;
    for (const BaseToken& tok : trace.tokens) {
        if (tok.start != cursor) {
            throw OffsetMismatch(trace.id, "token offsets do not tile the text at byte " +
                                               std::to_string(cursor));
        }
        if (tok.end < tok.start || tok.end > trace.text.size()) {
            throw OffsetMismatch(trace.id, "token range [" + std::to_string(tok.start) + ", " +
                                               std::to_string(tok.end) + ") out of bounds");
        }
        if (trace.text.compare(tok.start, tok.end - tok.start, tok.text) != 0) {
            throw OffsetMismatch(trace.id, "token text does not match its slice at byte " +
                                               std::to_string(tok.start));
        }
        cursor = tok.end;
    }
    if (cursor != trace.text.size()) {
        throw OffsetMismatch(trace.id, "tokens cover " + std::to_string(cursor) + " of " +
                                           std::to_string(trace.text.size()) + " bytes");
    }
    if (trace.entropy && trace.entropy->size() != trace.tokens.size()) {
        throw EntropyLengthMismatch(trace.id, trace.entropy->size(), trace.tokens.size());
    }
}

namespace {

Trace parse_trace_record(const nlohmann::json& j, std::size_t line_no) {
    if (!j.is_object()) throw MalformedRecord(line_no, "record is not an object");
    Trace trace;
    try {
        trace.id = j.at("id").get<std::string>();
        trace.text = j.at("text").get<std::string>();
        for (const auto& t : j.at("tokens")) {
            if (!t.is_array() || t.size() != 3) {
                throw MalformedRecord(line_no, "token entry is not [text, start, end]");
            }
            BaseToken tok;
            tok.text = t[0].get<std::string>();
            tok.start = t[1].get<std::size_t>();
            tok.end = t[2].get<std::size_t>();
            trace.tokens.push_back(std::move(tok));
        }
        if (j.contains("entropy") && !j["entropy"].is_null()) {
            std::vector<double> values = j["entropy"].get<std::vector<double>>();
            for (double v : values) {
                if (!(v >= 0.0)) throw MalformedRecord(line_no, "negative entropy value");
            }
            trace.entropy = std::move(values);
        }
        if (j.contains("correct") && !j["correct"].is_null()) {
            trace.correct = j["correct"].get<bool>();
        }
    } catch (const MalformedRecord&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(line_no, e.what());
    }
    return trace;
}

}  // namespace

std::vector<Trace> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<Trace> traces;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw MalformedRecord(line_no, "invalid JSON");
        Trace trace = parse_trace_record(j, line_no);
        if (!seen_ids.insert(trace.id).second) {
            throw MalformedRecord(line_no, "duplicate trace id '" + trace.id + "'");
        }
        validate_trace(trace);
        traces.push_back(std::move(trace));
    }
    return traces;
}

void save_corpus(const std::filesystem::path& path, std::span<const Trace> traces) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const Trace& trace : traces) {
        nlohmann::json tokens = nlohmann::json::array();
        for (const BaseToken& t : trace.tokens) {
            tokens.push_back({t.text, t.start, t.end});
        }
        nlohmann::json j{{"id", trace.id}, {"text", trace.text}, {"tokens", std::move(tokens)}};
        if (trace.entropy) j["entropy"] = *trace.entropy;
        if (trace.correct) j["correct"] = *trace.correct;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

Vocab Vocab::build(std::span<const Trace> traces) {
    std::unordered_set<std::string_view> seen;
    std::vector<std::string> tokens;
    for (const Trace& trace : traces) {
        for (const BaseToken& tok : trace.tokens) {
            if (seen.insert(tok.text).second) tokens.push_back(tok.text);
        }
    }
    std::sort(tokens.begin(), tokens.end());
    return from_tokens(std::move(tokens));
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
    Vocab v;
    v.tokens_ = std::move(tokens);
    v.rebuild_index();
    return v;
}

void Vocab::rebuild_index() {
    index_.clear();
    index_.reserve(tokens_.size());
    for (TokenId id = 0; id < tokens_.size(); ++id) {
        index_.emplace(tokens_[id], id);
    }
}

TokenId Vocab::id_of(std::string_view text) const {
    auto it = index_.find(text);
    if (it == index_.end()) throw UnknownBaseToken(0, std::string(text));
    return it->second;
}

std::optional<TokenId> Vocab::find(std::string_view text) const {
    auto it = index_.find(text);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocab::text_of(TokenId id) const {
    if (id >= tokens_.size()) {
        throw InternalError("base token id " + std::to_string(id) + " out of range");
    }
    return tokens_[id];
}

std::vector<TokenId> encode_base(const Trace& trace, const Vocab& vocab) {
    std::vector<TokenId> ids;
    ids.reserve(trace.tokens.size());
    for (std::size_t i = 0; i < trace.tokens.size(); ++i) {
        std::optional<TokenId> id = vocab.find(trace.tokens[i].text);
        if (!id) throw UnknownBaseToken(i, trace.tokens[i].text);
        ids.push_back(*id);
    }
    return ids;
}

namespace {

// Per-trace capped counts merged into `out`. Within a run of identical
// tokens, only every other pair position counts: occurrences are
// non-overlapping left-to-right, matching replacement.
void count_trace(const std::vector<TokenId>& seq, std::uint64_t cap,
                 std::unordered_map<PairKey, std::uint64_t, PairKeyHash>& scratch,
                 std::unordered_map<PairKey, std::uint64_t, PairKeyHash>& out) {
    if (seq.size() < 2) return;
    scratch.clear();
    std::size_t run_start = 0;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (i > 0 && seq[i] != seq[i - 1]) run_start = i;
        if (seq[i] == seq[i + 1] && (i - run_start) % 2 != 0) continue;
        ++scratch[PairKey{seq[i], seq[i + 1]}];
    }
    for (const auto& [key, count] : scratch) {
        out[key] += std::min(cap, count);
    }
}

}  // namespace

PairCountTable count_pairs(std::span<const std::vector<TokenId>> segmentations,
                           std::uint64_t cap) {
    PairCountTable table;
    table.cap = cap;
    std::unordered_map<PairKey, std::uint64_t, PairKeyHash> scratch;
    for (const auto& seq : segmentations) {
        count_trace(seq, cap, scratch, table.counts);
    }
    return table;
}

}  // namespace supertok
