#include "supertok/reports.hpp"

#include <unordered_map>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "supertok/errors.hpp"

namespace supertok {

namespace {

nlohmann::json role_to_json(const RoleStats& s) {
    return {{"mean_bits", s.mean_bits}, {"fraction", s.fraction}, {"count", s.count}};
}

nlohmann::json means_to_json(const RoleMeans& m) {
    return {{"non_merged", m.non_merged}, {"first", m.first}, {"continuation", m.continuation}};
}

nlohmann::json ceiling_to_json(const CeilingReport& c) {
    nlohmann::json j{{"rho", c.rho},
                     {"h_merged_bits", c.mean_entropy_bits},
                     {"log2_vocab", c.log2_vocab},
                     {"delta", c.delta},
                     {"delta_over_rho", c.delta_over_rho}};
    if (c.first && c.continuation) {
        j["by_role"] = {{"first",
                         {{"rho", c.first->rho},
                          {"mean_bits", c.first->mean_bits},
                          {"delta", c.first->delta}}},
                        {"continuation",
                         {{"rho", c.continuation->rho},
                          {"mean_bits", c.continuation->mean_bits},
                          {"delta", c.continuation->delta}}}};
    }
    return j;
}

RoleMeans means_of(const RoleStatsReport& r) {
    return RoleMeans{r.non_merged.mean_bits, r.first.mean_bits, r.continuation.mean_bits};
}

nlohmann::json matrix_to_json(const TransitionMatrix& m) {
    nlohmann::json counts = nlohmann::json::array();
    nlohmann::json probs = nlohmann::json::array();
    for (std::size_t i = 0; i < kNumCategories; ++i) {
        counts.push_back(m.counts[i]);
        probs.push_back(m.probs[i]);
    }
    nlohmann::json empty_rows = nlohmann::json::array();
    for (Category c : kAllCategories) {
        if (m.row_empty[static_cast<std::size_t>(c)]) empty_rows.push_back(to_string(c));
    }
    return {{"n_events", m.n_events},
            {"counts", std::move(counts)},
            {"probs", std::move(probs)},
            {"empty_rows", std::move(empty_rows)}};
}

nlohmann::json composite_to_json(const CompositeMetrics& c) {
    return {{"productive_recovery_rate", c.productive_recovery_rate},
            {"confusion_cycle_rate", c.confusion_cycle_rate},
            {"verification_inflow_rate", c.verification_inflow_rate},
            {"post_difficulty_transitions", c.post_difficulty_transitions},
            {"total_transitions", c.total_transitions}};
}

}  // namespace

EntropyReport build_entropy_report(std::span<const Trace> traces,
                                   std::span<const Segmentation> segs, double log2_vocab,
                                   std::span<const Trace> cross) {
    if (traces.size() != segs.size()) {
        throw InternalError("segmentations do not align with the corpus");
    }
    std::vector<std::vector<RoleAnnotation>> roles(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) roles[i] = assign_roles(segs[i]);

    EntropyReport report;
    report.n_traces = traces.size();
    report.roles = role_stats(traces, roles);
    report.bins = length_binned_stats(traces, roles);
    report.ceiling = compression_ceiling_by_role(
        report.roles.first.fraction, report.roles.first.mean_bits,
        report.roles.continuation.fraction, report.roles.continuation.mean_bits, log2_vocab);

    if (!cross.empty()) {
        if (cross.size() != traces.size()) {
            throw RoleMismatch("cross-scored corpus does not align with the corpus");
        }
        std::unordered_map<std::string_view, const Trace*> by_id;
        for (const Trace& t : cross) by_id.emplace(t.id, &t);
        std::vector<Trace> aligned;
        aligned.reserve(traces.size());
        for (std::size_t i = 0; i < traces.size(); ++i) {
            auto it = by_id.find(traces[i].id);
            if (it == by_id.end()) {
                throw RoleMismatch("cross-scored corpus lacks trace '" + traces[i].id + "'");
            }
            if (it->second->tokens.size() != traces[i].tokens.size()) {
                throw RoleMismatch("cross-scored trace '" + traces[i].id +
                                   "' has a different token count");
            }
            aligned.push_back(*it->second);
        }
        RoleStatsReport cross_stats = role_stats(aligned, roles);
        report.cross_means = means_of(cross_stats);
        report.gap = cross_model_gap(means_of(report.roles), *report.cross_means);
    }
    return report;
}

std::string EntropyReport::to_json() const {
    nlohmann::json j{{"format_version", detail::kFormatVersion},
                     {"n_traces", n_traces},
                     {"n_tokens", roles.n_tokens},
                     {"roles",
                      {{"non_merged", role_to_json(roles.non_merged)},
                       {"first", role_to_json(roles.first)},
                       {"continuation", role_to_json(roles.continuation)},
                       {"merged", {{"mean_bits", roles.merged_mean_bits}, {"fraction", roles.rho}}}}},
                     {"ceiling", ceiling_to_json(ceiling)}};
    nlohmann::json bins_json = nlohmann::json::array();
    for (const LengthBin& bin : bins) {
        bins_json.push_back({{"length", bin.length},
                             {"open_ended", bin.open_ended},
                             {"count", bin.count},
                             {"mean_continuation_bits", bin.mean_continuation_bits},
                             {"reduction", bin.reduction}});
    }
    j["length_bins"] = std::move(bins_json);
    if (cross_means && gap) {
        j["cross_model"] = {{"cross", means_to_json(*cross_means)},
                            {"delta", means_to_json(gap->delta)},
                            {"gap", {{"self", gap->self_gap}, {"cross", gap->cross_gap}}}};
    }
    return j.dump(2) + "\n";
}

TransitionReport build_transition_report(std::span<const CategorySequence> sequences,
                                         bool signposts_only, PoolingMode pooling) {
    TransitionReport report;
    report.signposts_only = signposts_only;
    report.pooling = pooling;
    const auto build = pooling == PoolingMode::PooledCounts ? transition_matrix
                                                            : transition_matrix_mean_of_traces;
    report.all = build(sequences, TraceGroup::All);

    bool any_correct = false;
    bool any_incorrect = false;
    for (const CategorySequence& s : sequences) {
        if (s.events.size() < 2 || !s.correct) continue;
        (*s.correct ? any_correct : any_incorrect) = true;
    }
    if (any_correct) report.correct = build(sequences, TraceGroup::Correct);
    if (any_incorrect) report.incorrect = build(sequences, TraceGroup::Incorrect);
    if (report.correct && report.incorrect) {
        report.ratio_cells = ratio_table(*report.correct, *report.incorrect);
    }

    report.composite.emplace(to_string(TraceGroup::All), composite_metrics(report.all));
    if (report.correct) {
        report.composite.emplace(to_string(TraceGroup::Correct), composite_metrics(*report.correct));
    }
    if (report.incorrect) {
        report.composite.emplace(to_string(TraceGroup::Incorrect),
                                 composite_metrics(*report.incorrect));
    }
    return report;
}

std::string TransitionReport::to_json() const {
    nlohmann::json categories = nlohmann::json::array();
    for (Category c : kAllCategories) categories.push_back(to_string(c));

    nlohmann::json groups{{to_string(TraceGroup::All), matrix_to_json(all)}};
    if (correct) groups[to_string(TraceGroup::Correct)] = matrix_to_json(*correct);
    if (incorrect) groups[to_string(TraceGroup::Incorrect)] = matrix_to_json(*incorrect);

    nlohmann::json cells = nlohmann::json::array();
    for (const RatioCell& cell : ratio_cells) {
        cells.push_back({{"from", to_string(cell.from)},
                         {"to", to_string(cell.to)},
                         {"ratio", cell.ratio},
                         {"direction", cell.problematic ? "problematic" : "productive"}});
    }

    nlohmann::json composites = nlohmann::json::object();
    for (const auto& [name, metrics] : composite) {
        composites[name] = composite_to_json(metrics);
    }

    nlohmann::json j{{"format_version", detail::kFormatVersion},
                     {"categories", std::move(categories)},
                     {"signposts_only", signposts_only},
                     {"pooling", pooling == PoolingMode::PooledCounts ? "pooled_counts"
                                                                      : "mean_of_trace_rows"},
                     {"groups", std::move(groups)},
                     {"ratio_cells", std::move(cells)},
                     {"composite", std::move(composites)}};
    return j.dump(2) + "\n";
}

std::string interval_to_json(const IntervalEstimate& e) {
    nlohmann::json j{{"format_version", detail::kFormatVersion},
                     {"kind", e.kind == IntervalEstimate::Kind::Accuracy ? "accuracy" : "tokens"},
                     {"delta", e.delta},
                     {"lo", e.lo},
                     {"hi", e.hi},
                     {"n", e.n},
                     {"significant", e.significant()}};
    return j.dump(2) + "\n";
}

}  // namespace supertok
