// supertok: learn cross-word merge tables from base-tokenized reasoning
// traces, apply them losslessly, and analyze the results.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "supertok/corpus.hpp"
#include "supertok/diagnostics.hpp"
#include "supertok/embeddings.hpp"
#include "supertok/entropy.hpp"
#include "supertok/errors.hpp"
#include "supertok/filter.hpp"
#include "supertok/merge_table.hpp"
#include "supertok/pipeline.hpp"
#include "supertok/render.hpp"
#include "supertok/reports.hpp"
#include "supertok/taxonomy.hpp"
#include "supertok/tokenizer.hpp"
#include "supertok/trainer.hpp"

namespace {

using namespace supertok;

struct FilterFlags {
    bool no_filter = false;
    std::string config_path;

    FilterSet resolve() const {
        if (no_filter) return FilterSet::none();
        if (!config_path.empty()) return load_filter_config(config_path);
        return FilterSet::all();
    }
};

void add_filter_flags(CLI::App* cmd, FilterFlags& flags) {
    cmd->add_flag("--no-filter", flags.no_filter, "Disable the structural filter (constant-true gate)");
    cmd->add_option("--filter-config", flags.config_path,
                    "JSON filter configuration: {\"enabled\": [rule...]}");
}

std::vector<std::uint32_t> parse_prefixes(const std::string& csv, std::size_t n_merges) {
    std::vector<std::uint32_t> prefixes;
    if (csv.empty()) {
        for (std::uint32_t k : {0u, 1u, 2u, 5u, 10u, 25u, 50u, 100u, 150u, 200u, 250u}) {
            if (k <= n_merges) prefixes.push_back(k);
        }
        if (prefixes.empty() || prefixes.back() != n_merges) {
            prefixes.push_back(static_cast<std::uint32_t>(n_merges));
        }
        return prefixes;
    }
    std::size_t pos = 0;
    while (pos < csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        const std::string item = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        prefixes.push_back(static_cast<std::uint32_t>(std::stoul(item)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return prefixes;
}

int cmd_train(const std::string& in, const std::string& out, std::uint32_t budget,
              std::uint64_t cap, std::uint32_t base_vocab_size, const FilterFlags& filter,
              const std::string& curve_path, const std::string& curve_points) {
    const auto traces = load_corpus(in);
    TrainConfig config;
    config.budget = budget;
    config.cap = cap;
    config.base_vocab_size = base_vocab_size;
    config.filter = filter.resolve();
    const MergeTable table = train(traces, config);
    save_merge_table(out, table);
    std::fprintf(stderr, "adopted %zu merges over %zu traces (vocab %u -> %zu)\n",
                 table.merges().size(), traces.size(), table.base_vocab_size(),
                 table.vocab_size());

    if (!curve_path.empty()) {
        const auto prefixes = parse_prefixes(curve_points, table.merges().size());
        const auto curve = compression_curve(traces, table, prefixes);
        std::string json = "{\n  \"format_version\": 1,\n  \"curve\": [";
        for (std::size_t i = 0; i < curve.size(); ++i) {
            json += i ? ", " : "";
            json += "{\"merges\": " + std::to_string(curve[i].first) +
                    ", \"reduction\": " + std::to_string(curve[i].second) + "}";
        }
        json += "]\n}\n";
        std::ofstream f(curve_path, std::ios::binary);
        if (!f) throw IoError("cannot open " + curve_path);
        f << json;
    }
    return 0;
}

int cmd_apply(const std::string& merges, const std::string& in, const std::string& out) {
    const MergeTable table = load_merge_table(merges);
    const auto traces = load_corpus(in);
    const auto segs = apply_corpus(traces, table);
    save_segmentations(out, segs);

    std::size_t base = 0;
    std::size_t output = 0;
    for (const Segmentation& seg : segs) {
        base += seg.base_token_count();
        output += seg.token_ids.size();
    }
    std::fprintf(stderr, "%zu traces: %zu base tokens -> %zu output tokens (%.2f%% reduction)\n",
                 segs.size(), base, output,
                 base == 0 ? 0.0 : 100.0 * (1.0 - static_cast<double>(output) / base));
    return 0;
}

int cmd_classify(const std::string& merges, const std::string& out) {
    const MergeTable table = load_merge_table(merges);
    const CategoryMap map = classify_table(table);
    save_category_map(out, map);
    const auto counts = map.counts();
    for (Category c : kAllCategories) {
        std::fprintf(stderr, "%-16s %llu\n", to_string(c),
                     static_cast<unsigned long long>(counts[static_cast<std::size_t>(c)]));
    }
    if (!map.unclassified.empty()) {
        std::fprintf(stderr, "%-16s %zu\n", "(unclassified)", map.unclassified.size());
    }
    return 0;
}

int cmd_entropy(const std::string& merges, const std::string& in, const std::string& report_path,
                double log2_vocab, const std::string& cross_path) {
    const MergeTable table = load_merge_table(merges);
    const auto traces = load_corpus(in);
    const auto segs = apply_corpus(traces, table);
    std::vector<Trace> cross;
    if (!cross_path.empty()) cross = load_corpus(cross_path);
    const EntropyReport report = build_entropy_report(traces, segs, log2_vocab, cross);
    std::ofstream f(report_path, std::ios::binary);
    if (!f) throw IoError("cannot open " + report_path);
    f << report.to_json();
    std::fprintf(stderr,
                 "rho %.4f, means (bits): non-merged %.4f, first %.4f, continuation %.4f, "
                 "ceiling %.4f\n",
                 report.roles.rho, report.roles.non_merged.mean_bits,
                 report.roles.first.mean_bits, report.roles.continuation.mean_bits,
                 report.ceiling.delta);
    return 0;
}

int cmd_transitions(const std::string& seg_path, const std::string& categories_path,
                    const std::string& labels_path, const std::string& report_path,
                    bool signposts_only, bool per_trace_rows) {
    const auto segs = load_segmentations(seg_path);
    const CategoryMap cmap = load_category_map(categories_path);

    std::map<std::string, bool> labels;
    if (!labels_path.empty()) {
        std::ifstream f(labels_path, std::ios::binary);
        if (!f) throw IoError("cannot open " + labels_path);
        nlohmann::json j;
        f >> j;
        const nlohmann::json& entries = j.contains("labels") ? j["labels"] : j;
        for (const auto& [id, value] : entries.items()) {
            labels.emplace(id, value.get<bool>());
        }
    }

    std::vector<CategorySequence> sequences;
    sequences.reserve(segs.size());
    for (const Segmentation& seg : segs) {
        CategorySequence s;
        s.events = event_sequence(seg, cmap, signposts_only);
        if (auto it = labels.find(seg.trace_id); it != labels.end()) s.correct = it->second;
        sequences.push_back(std::move(s));
    }
    const TransitionReport report = build_transition_report(
        sequences, signposts_only,
        per_trace_rows ? PoolingMode::MeanOfTraceRows : PoolingMode::PooledCounts);
    std::ofstream f(report_path, std::ios::binary);
    if (!f) throw IoError("cannot open " + report_path);
    f << report.to_json();

    for (const auto& [group, metrics] : report.composite) {
        std::fprintf(stderr,
                     "%-9s recovery %.3f, confusion %.3f, verification inflow %.3f (%llu "
                     "transitions)\n",
                     group.c_str(), metrics.productive_recovery_rate,
                     metrics.confusion_cycle_rate, metrics.verification_inflow_rate,
                     static_cast<unsigned long long>(metrics.total_transitions));
    }
    return 0;
}

int cmd_ci(const std::string& mode, double base, double sft, std::uint64_t n) {
    IntervalEstimate estimate;
    if (mode == "accuracy") {
        estimate = accuracy_ci(base, sft, n);
    } else if (mode == "tokens") {
        estimate = paired_token_ci(base, sft, n);
    } else {
        throw ValidationError("--mode must be 'accuracy' or 'tokens'");
    }
    std::cout << interval_to_json(estimate);
    return 0;
}

int cmd_render(const std::string& trace_id, const std::string& in, const std::string& seg_path,
               const std::string& categories_path, const std::string& format,
               const std::string& out, std::uint32_t windows, std::uint32_t window_len) {
    const auto traces = load_corpus(in);
    const auto segs = load_segmentations(seg_path);
    const CategoryMap cmap = load_category_map(categories_path);

    const Trace* trace = nullptr;
    for (const Trace& t : traces) {
        if (t.id == trace_id) trace = &t;
    }
    if (!trace) throw ValidationError("trace '" + trace_id + "' not found in " + in);
    const Segmentation* seg = nullptr;
    for (const Segmentation& s : segs) {
        if (s.trace_id == trace_id) seg = &s;
    }
    if (!seg) throw ValidationError("trace '" + trace_id + "' not found in " + seg_path);

    RenderPlan plan;
    plan.format = format == "ansi" ? RenderFormat::Ansi : RenderFormat::Html;
    plan.windows = auto_windows(*seg, cmap, windows, window_len);
    const std::string doc = render_trace(*trace, *seg, cmap, plan);
    if (out == "-") {
        std::cout << doc;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw IoError("cannot open " + out);
        f << doc;
    }
    return 0;
}

int cmd_pipeline(const PipelineConfig& config) {
    const Manifest manifest = run_pipeline(config);
    for (const ManifestStep& step : manifest.steps) {
        std::fprintf(stderr, "%-12s %s%s%s\n", step.name.c_str(), step.status.c_str(),
                     step.reason.empty() ? "" : ": ", step.reason.c_str());
    }
    std::fprintf(stderr, "%zu artifacts under %s\n", manifest.artifacts.size(),
                 config.out_dir.string().c_str());
    return 0;
}

int cmd_extend_embeddings(const std::string& merges, const std::string& in,
                          const std::string& out, const std::string& mode, bool text) {
    const MergeTable table = load_merge_table(merges);
    const EmbeddingMatrix matrix =
        text ? load_embeddings_text(in) : load_embeddings_binary(in);
    const ExtendMode extend_mode =
        mode == "flat" ? ExtendMode::FlatAverage : ExtendMode::Chained;
    const EmbeddingMatrix extended = extend_embeddings(matrix, table, extend_mode);
    if (text) {
        save_embeddings_text(out, extended);
    } else {
        save_embeddings_binary(out, extended);
    }
    std::fprintf(stderr, "%u x %u -> %u x %u\n", matrix.rows, matrix.cols, extended.rows,
                 extended.cols);
    return 0;
}

int cmd_filter_report(const std::string& in, std::uint64_t cap, std::size_t top,
                      const FilterFlags& filter) {
    const auto traces = load_corpus(in);
    const Vocab vocab = Vocab::build(traces);
    std::vector<std::vector<TokenId>> segs;
    segs.reserve(traces.size());
    for (const Trace& t : traces) segs.push_back(encode_base(t, vocab));
    const PairCountTable table = count_pairs(segs, cap);
    const FilterSet rules = filter.resolve();

    struct Row {
        std::string surface;
        std::uint64_t count;
        Eligibility eligibility;
    };
    std::vector<Row> rows;
    rows.reserve(table.counts.size());
    for (const auto& [pair, count] : table.counts) {
        Row row;
        row.surface = vocab.text_of(pair.left) + vocab.text_of(pair.right);
        row.count = count;
        row.eligibility = is_eligible(row.surface, rules);
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.surface < b.surface;
    });
    if (rows.size() > top) rows.resize(top);

    std::printf("%-10s %-10s %-26s %s\n", "count", "eligible", "rule", "surface");
    for (const Row& row : rows) {
        std::string display;
        for (char c : row.surface) {
            if (c == '\n') {
                display += "\\n";
            } else {
                display += c;
            }
        }
        std::printf("%-10llu %-10s %-26s \"%s\"\n", static_cast<unsigned long long>(row.count),
                    row.eligibility.eligible ? "yes" : "no",
                    row.eligibility.rule ? to_string(*row.eligibility.rule) : "-",
                    display.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"supertoken toolkit: cross-word merge tables for reasoning traces"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "Learn a merge table from a trace corpus");
    std::string train_in, train_out = "merges.json", curve_path, curve_points;
    std::uint32_t budget = 250;
    std::uint64_t cap = 10;
    std::uint32_t base_vocab_size = 0;
    FilterFlags train_filter;
    train_cmd->add_option("--in", train_in, "Trace corpus (JSONL)")->required();
    train_cmd->add_option("--out", train_out, "Merge table output (JSON)");
    train_cmd->add_option("--budget", budget, "Merge budget (default 250)");
    train_cmd->add_option("--cap", cap, "Per-trace pair count cap (default 10)");
    train_cmd->add_option("--base-vocab-size", base_vocab_size,
                          "Override the base vocabulary size (ids for new tokens start here)");
    train_cmd->add_option("--curve", curve_path, "Also write a compression curve (JSON)");
    train_cmd->add_option("--curve-points", curve_points, "Comma-separated prefix sizes");
    add_filter_flags(train_cmd, train_filter);

    // apply
    auto* apply_cmd = app.add_subcommand("apply", "Apply a merge table to a corpus");
    std::string apply_merges, apply_in, apply_out = "segmentations.jsonl";
    apply_cmd->add_option("--merges", apply_merges, "Merge table (JSON)")->required();
    apply_cmd->add_option("--in", apply_in, "Trace corpus (JSONL)")->required();
    apply_cmd->add_option("--out", apply_out, "Segmentation output (JSONL)");

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Assign structural categories to merges");
    std::string classify_merges, classify_out = "categories.json";
    classify_cmd->add_option("--merges", classify_merges, "Merge table (JSON)")->required();
    classify_cmd->add_option("--out", classify_out, "Category map output (JSON)");

    // entropy
    auto* entropy_cmd = app.add_subcommand("entropy", "Role-aligned entropy statistics");
    std::string entropy_merges, entropy_in, entropy_report = "entropy.json", entropy_cross;
    double log2_vocab = kDefaultLog2Vocab;
    entropy_cmd->add_option("--merges", entropy_merges, "Merge table (JSON)")->required();
    entropy_cmd->add_option("--in", entropy_in, "Trace corpus with entropies (JSONL)")->required();
    entropy_cmd->add_option("--report", entropy_report, "Report output (JSON)");
    entropy_cmd->add_option("--log2-vocab", log2_vocab, "log2 of the vocabulary size in bits");
    entropy_cmd->add_option("--cross", entropy_cross,
                            "Same corpus re-scored by a different model (JSONL)");

    // transitions
    auto* transitions_cmd = app.add_subcommand("transitions", "Category transition diagnostics");
    std::string tr_seg, tr_categories, tr_labels, tr_report = "transitions.json";
    bool signposts_only = false;
    bool per_trace_rows = false;
    transitions_cmd->add_option("--seg", tr_seg, "Segmentations (JSONL)")->required();
    transitions_cmd->add_option("--categories", tr_categories, "Category map (JSON)")->required();
    transitions_cmd->add_option("--labels", tr_labels,
                                "Correctness labels (JSON: {\"labels\": {id: bool}})");
    transitions_cmd->add_option("--report", tr_report, "Report output (JSON)");
    transitions_cmd->add_flag("--signposts-only", signposts_only,
                              "Drop Reasoning/Computation events");
    transitions_cmd->add_flag("--per-trace-rows", per_trace_rows,
                              "Normalize per trace, then average rows (instead of pooling counts)");

    // ci
    auto* ci_cmd = app.add_subcommand("ci", "95% confidence intervals");
    std::string ci_mode;
    double ci_base = 0.0, ci_sft = 0.0;
    std::uint64_t ci_n = 0;
    ci_cmd->add_option("--mode", ci_mode, "accuracy | tokens")->required();
    ci_cmd->add_option("--base", ci_base, "Baseline value")->required();
    ci_cmd->add_option("--sft", ci_sft, "Fine-tuned value")->required();
    ci_cmd->add_option("--n", ci_n, "Sample size")->required();

    // render
    auto* render_cmd = app.add_subcommand("render", "Static trace visualization");
    std::string render_trace_id, render_in, render_seg, render_categories;
    std::string render_format = "html", render_out = "-";
    std::uint32_t render_windows = 3, render_window_len = 48;
    render_cmd->add_option("--trace", render_trace_id, "Trace id")->required();
    render_cmd->add_option("--in", render_in, "Trace corpus (JSONL)")->required();
    render_cmd->add_option("--seg", render_seg, "Segmentations (JSONL)")->required();
    render_cmd->add_option("--categories", render_categories, "Category map (JSON)")->required();
    render_cmd->add_option("--format", render_format, "html | ansi");
    render_cmd->add_option("--out", render_out, "Output file, or - for stdout");
    render_cmd->add_option("--windows", render_windows, "Zoom window count");
    render_cmd->add_option("--window-len", render_window_len, "Zoom window length in tokens");

    // pipeline
    auto* pipeline_cmd = app.add_subcommand("pipeline", "One-shot end-to-end run");
    PipelineConfig pipeline_config;
    std::string pipeline_in, pipeline_out;
    bool pipeline_no_filter = false;
    pipeline_cmd->add_option("--in", pipeline_in, "Trace corpus (JSONL)")->required();
    pipeline_cmd->add_option("--out", pipeline_out, "Output directory")->required();
    pipeline_cmd->add_option("--budget", pipeline_config.budget, "Merge budget (default 250)");
    pipeline_cmd->add_option("--cap", pipeline_config.cap, "Per-trace pair count cap");
    pipeline_cmd->add_flag("--no-filter", pipeline_no_filter, "Disable the structural filter");
    pipeline_cmd->add_option("--base-vocab-size", pipeline_config.base_vocab_size,
                             "Override the base vocabulary size");
    pipeline_cmd->add_option("--log2-vocab", pipeline_config.log2_vocab,
                             "log2 of the vocabulary size in bits");
    pipeline_cmd->add_option("--render-samples", pipeline_config.render_samples,
                             "Traces to render (default 2)");

    // extend-embeddings
    auto* embed_cmd = app.add_subcommand("extend-embeddings",
                                         "Append one embedding row per merge by averaging");
    std::string embed_merges, embed_in, embed_out;
    std::string embed_mode = "chained";
    bool embed_text = false;
    embed_cmd->add_option("--merges", embed_merges, "Merge table (JSON)")->required();
    embed_cmd->add_option("--in", embed_in, "Base embedding matrix")->required();
    embed_cmd->add_option("--out", embed_out, "Extended matrix output")->required();
    embed_cmd->add_option("--mode", embed_mode, "chained | flat (default chained)");
    embed_cmd->add_flag("--text", embed_text, "Read and write the textual matrix format");

    // filter-report
    auto* filter_cmd =
        app.add_subcommand("filter-report", "Eligible/rejected merge candidates with rules");
    std::string filter_in;
    std::uint64_t filter_cap = 10;
    std::size_t filter_top = 50;
    FilterFlags filter_flags;
    filter_cmd->add_option("--in", filter_in, "Trace corpus (JSONL)")->required();
    filter_cmd->add_option("--cap", filter_cap, "Per-trace pair count cap");
    filter_cmd->add_option("--top", filter_top, "Rows to print");
    add_filter_flags(filter_cmd, filter_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (train_cmd->parsed()) {
            return cmd_train(train_in, train_out, budget, cap, base_vocab_size, train_filter,
                             curve_path, curve_points);
        }
        if (apply_cmd->parsed()) return cmd_apply(apply_merges, apply_in, apply_out);
        if (classify_cmd->parsed()) return cmd_classify(classify_merges, classify_out);
        if (entropy_cmd->parsed()) {
            return cmd_entropy(entropy_merges, entropy_in, entropy_report, log2_vocab,
                               entropy_cross);
        }
        if (transitions_cmd->parsed()) {
            return cmd_transitions(tr_seg, tr_categories, tr_labels, tr_report, signposts_only,
                                   per_trace_rows);
        }
        if (ci_cmd->parsed()) return cmd_ci(ci_mode, ci_base, ci_sft, ci_n);
        if (render_cmd->parsed()) {
            return cmd_render(render_trace_id, render_in, render_seg, render_categories,
                              render_format, render_out, render_windows, render_window_len);
        }
        if (pipeline_cmd->parsed()) {
            pipeline_config.corpus = pipeline_in;
            pipeline_config.out_dir = pipeline_out;
            pipeline_config.filter = !pipeline_no_filter;
            return cmd_pipeline(pipeline_config);
        }
        if (embed_cmd->parsed()) {
            return cmd_extend_embeddings(embed_merges, embed_in, embed_out, embed_mode,
                                         embed_text);
        }
        if (filter_cmd->parsed()) {
            return cmd_filter_report(filter_in, filter_cap, filter_top, filter_flags);
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
