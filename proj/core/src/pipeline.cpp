#include "supertok/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "json_util.hpp"
#include "supertok/diagnostics.hpp"
#include "supertok/errors.hpp"
#include "supertok/merge_table.hpp"
#include "supertok/render.hpp"
#include "supertok/reports.hpp"
#include "supertok/taxonomy.hpp"
#include "supertok/tokenizer.hpp"
#include "supertok/trainer.hpp"

namespace supertok {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw InternalError("sha256 init failed");
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string Manifest::to_json() const {
    nlohmann::json steps_json = nlohmann::json::array();
    for (const ManifestStep& s : steps) {
        nlohmann::json j{{"name", s.name}, {"status", s.status}};
        if (!s.reason.empty()) j["reason"] = s.reason;
        steps_json.push_back(std::move(j));
    }
    nlohmann::json artifacts_json = nlohmann::json::array();
    for (const ManifestEntry& a : artifacts) {
        artifacts_json.push_back({{"name", a.name}, {"path", a.path}, {"sha256", a.sha256}});
    }
    nlohmann::json j{{"format_version", detail::kFormatVersion},
                     {"steps", std::move(steps_json)},
                     {"artifacts", std::move(artifacts_json)}};
    return j.dump(2) + "\n";
}

namespace {

std::string sanitize_for_filename(std::string_view id) {
    std::string out;
    out.reserve(id.size());
    for (char c : id) {
        const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        out += safe ? c : '_';
    }
    return out;
}

std::vector<std::uint32_t> curve_prefixes(std::size_t n_merges) {
    std::vector<std::uint32_t> prefixes{0, 1, 2, 5, 10, 25, 50, 100, 150, 200, 250};
    std::erase_if(prefixes, [&](std::uint32_t k) { return k > n_merges; });
    if (prefixes.empty() || prefixes.back() != n_merges) {
        prefixes.push_back(static_cast<std::uint32_t>(n_merges));
    }
    return prefixes;
}

}  // namespace

Manifest run_pipeline(const PipelineConfig& config) {
    std::filesystem::create_directories(config.out_dir);
    Manifest manifest;
    auto emit = [&](const std::string& name, const std::string& rel_path) {
        manifest.artifacts.push_back(
            ManifestEntry{name, rel_path, sha256_file(config.out_dir / rel_path)});
    };
    auto ok = [&](const std::string& step) {
        manifest.steps.push_back(ManifestStep{step, "ok", ""});
    };
    auto skipped = [&](const std::string& step, const std::string& reason) {
        manifest.steps.push_back(ManifestStep{step, "skipped", reason});
    };

    const std::vector<Trace> traces = load_corpus(config.corpus);

    TrainConfig train_config;
    train_config.budget = config.budget;
    train_config.cap = config.cap;
    train_config.filter = config.filter ? FilterSet::all() : FilterSet::none();
    train_config.base_vocab_size = config.base_vocab_size;
    const MergeTable table = train(traces, train_config);
    save_merge_table(config.out_dir / "merges.json", table);
    ok("train");
    emit("merges", "merges.json");

    const std::vector<Segmentation> segs = apply_corpus(traces, table);
    save_segmentations(config.out_dir / "segmentations.jsonl", segs);
    ok("apply");
    emit("segmentations", "segmentations.jsonl");

    // Corpus-level adoption/compression summary.
    {
        std::uint64_t base_tokens = 0;
        std::uint64_t output_tokens = 0;
        std::uint64_t super_tokens = 0;
        for (const Segmentation& seg : segs) {
            base_tokens += seg.base_token_count();
            output_tokens += seg.token_ids.size();
            for (TokenId id : seg.token_ids) {
                if (table.is_super(id)) ++super_tokens;
            }
        }
        const auto prefixes = curve_prefixes(table.merges().size());
        nlohmann::json curve = nlohmann::json::array();
        for (const auto& [k, reduction] : compression_curve(traces, table, prefixes)) {
            curve.push_back({{"merges", k}, {"reduction", reduction}});
        }
        nlohmann::json summary{
            {"format_version", detail::kFormatVersion},
            {"n_traces", traces.size()},
            {"base_tokens", base_tokens},
            {"output_tokens", output_tokens},
            {"adoption_rate",
             output_tokens == 0 ? 0.0 : static_cast<double>(super_tokens) / output_tokens},
            {"token_reduction",
             base_tokens == 0 ? 0.0 : 1.0 - static_cast<double>(output_tokens) / base_tokens},
            {"compression_curve", std::move(curve)}};
        detail::write_json_file(config.out_dir / "summary.json", summary);
        ok("summary");
        emit("summary", "summary.json");
    }

    const CategoryMap cmap = classify_table(table);
    save_category_map(config.out_dir / "categories.json", cmap);
    ok("classify");
    emit("categories", "categories.json");

    const bool all_entropies = std::all_of(traces.begin(), traces.end(),
                                           [](const Trace& t) { return t.entropy.has_value(); });
    if (all_entropies && !traces.empty()) {
        EntropyReport report = build_entropy_report(traces, segs, config.log2_vocab);
        detail::write_text_file(config.out_dir / "entropy.json", report.to_json());
        ok("entropy");
        emit("entropy", "entropy.json");
    } else {
        skipped("entropy", "missing entropy fields");
    }

    const bool any_labels = std::any_of(traces.begin(), traces.end(),
                                        [](const Trace& t) { return t.correct.has_value(); });
    if (any_labels) {
        std::vector<CategorySequence> sequences(traces.size());
        for (std::size_t i = 0; i < traces.size(); ++i) {
            sequences[i].events = event_sequence(segs[i], cmap);
            sequences[i].correct = traces[i].correct;
        }
        const bool any_transitions = std::any_of(
            sequences.begin(), sequences.end(),
            [](const CategorySequence& s) { return s.events.size() >= 2; });
        if (any_transitions) {
            TransitionReport report = build_transition_report(sequences);
            detail::write_text_file(config.out_dir / "transitions.json", report.to_json());
            ok("transitions");
            emit("transitions", "transitions.json");
        } else {
            skipped("transitions", "no category transitions");
        }
    } else {
        skipped("transitions", "missing correctness labels");
    }

    if (config.render_samples > 0 && !traces.empty()) {
        std::filesystem::create_directories(config.out_dir / "render");
        const std::size_t n = std::min<std::size_t>(config.render_samples, traces.size());
        for (std::size_t i = 0; i < n; ++i) {
            RenderPlan plan;
            plan.windows = auto_windows(segs[i], cmap, 3);
            plan.format = RenderFormat::Html;
            const std::string doc = render_trace(traces[i], segs[i], cmap, plan);
            const std::string rel = "render/trace_" + sanitize_for_filename(traces[i].id) + ".html";
            detail::write_text_file(config.out_dir / rel, doc);
            emit("render_" + traces[i].id, rel);
        }
        ok("render");
    } else {
        skipped("render", traces.empty() ? "empty corpus" : "render_samples is 0");
    }

    detail::write_text_file(config.out_dir / "manifest.json", manifest.to_json());
    return manifest;
}

}  // namespace supertok
