#include "supertok/render.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "supertok/errors.hpp"

namespace supertok {

Palette Palette::standard() {
    Palette p;
    p.category = {{
        {231, 76, 60},    // Backtracking
        {243, 156, 18},   // Hedging
        {46, 204, 113},   // Verification
        {52, 152, 219},   // ProblemRef
        {155, 89, 182},   // StrategyShift
        {26, 188, 156},   // Sequencing
        {189, 195, 199},  // Computation
        {230, 126, 34},   // Counterargument
        {149, 165, 166},  // Reasoning
    }};
    p.neutral = {235, 235, 235};
    return p;
}

namespace {

std::string hex_color(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

std::string html_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Category of an output token, or nullopt for non-merged / residual tokens.
std::optional<Category> token_category(TokenId id, const CategoryMap& cmap) {
    if (id < cmap.base_vocab_size) return std::nullopt;
    auto it = cmap.assignments.find(id);
    if (it != cmap.assignments.end()) return it->second.category;
    if (std::find(cmap.unclassified.begin(), cmap.unclassified.end(), id) !=
        cmap.unclassified.end()) {
        return std::nullopt;
    }
    throw UnmappedSupertoken(id);
}

std::string_view token_text(const Trace& trace, const Segmentation& seg, std::size_t index) {
    const TokenSpan& span = seg.spans[index];
    const std::size_t begin = trace.tokens[span.start].start;
    const std::size_t end = trace.tokens[span.start + span.len - 1].end;
    return std::string_view(trace.text).substr(begin, end - begin);
}

void check_plan(const Segmentation& seg, const RenderPlan& plan) {
    for (const Window& w : plan.windows) {
        if (w.begin > w.end || w.end > seg.token_ids.size()) {
            throw WindowOutOfRange("window [" + std::to_string(w.begin) + ", " +
                                   std::to_string(w.end) + ") exceeds the " +
                                   std::to_string(seg.token_ids.size()) + " output tokens");
        }
    }
}

std::string render_html(const Trace& trace, const Segmentation& seg, const CategoryMap& cmap,
                        const RenderPlan& plan) {
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>trace "
        << html_escape(trace.id) << "</title>\n<style>\n"
        << "body { font-family: sans-serif; margin: 24px; }\n"
        << ".ribbon { font-size: 0; line-height: 0; margin: 8px 0 20px 0; }\n"
        << ".ribbon span { display: inline-block; width: 3px; height: 16px; }\n"
        << ".legend span.swatch { display: inline-block; width: 11px; height: 11px;"
        << " margin: 0 4px 0 10px; }\n"
        << ".window { margin: 16px 0; }\n"
        << ".tokens { white-space: pre-wrap; font-family: monospace; background: #fafafa;"
        << " padding: 10px; border: 1px solid #ddd; }\n"
        << "</style>\n</head>\n<body>\n";
    out << "<h1>trace " << html_escape(trace.id) << "</h1>\n";

    out << "<div class=\"legend\">";
    for (Category c : kAllCategories) {
        out << "<span class=\"swatch\" style=\"background:"
            << hex_color(plan.palette.color_of(c)) << "\"></span>" << to_string(c);
    }
    out << "<span class=\"swatch\" style=\"background:" << hex_color(plan.palette.neutral)
        << "\"></span>non-merged</div>\n";

    out << "<div class=\"ribbon\">";
    for (std::size_t i = 0; i < seg.token_ids.size(); ++i) {
        std::optional<Category> c = token_category(seg.token_ids[i], cmap);
        const Rgb& color = c ? plan.palette.color_of(*c) : plan.palette.neutral;
        out << "<span style=\"background:" << hex_color(color) << "\"></span>";
    }
    out << "</div>\n";

    for (const Window& w : plan.windows) {
        out << "<div class=\"window\">\n<h2>tokens " << w.begin << "&ndash;" << w.end
            << "</h2>\n<p class=\"tokens\">";
        for (std::size_t i = w.begin; i < w.end; ++i) {
            std::optional<Category> c = token_category(seg.token_ids[i], cmap);
            const std::string text = html_escape(token_text(trace, seg, i));
            if (c) {
                out << "<span style=\"background:" << hex_color(plan.palette.color_of(*c))
                    << "\">" << text << "</span>";
            } else {
                out << text;
            }
        }
        out << "</p>\n</div>\n";
    }
    out << "</body>\n</html>\n";
    return out.str();
}

std::string ansi_bg(const Rgb& c) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "\x1b[48;2;%d;%d;%dm", c.r, c.g, c.b);
    return buf;
}

constexpr std::string_view kAnsiReset = "\x1b[0m";
constexpr std::size_t kRibbonCellsPerLine = 80;

std::string render_ansi(const Trace& trace, const Segmentation& seg, const CategoryMap& cmap,
                        const RenderPlan& plan) {
    std::ostringstream out;
    out << "trace " << trace.id << "\n\n";
    for (std::size_t i = 0; i < seg.token_ids.size(); ++i) {
        std::optional<Category> c = token_category(seg.token_ids[i], cmap);
        out << ansi_bg(c ? plan.palette.color_of(*c) : plan.palette.neutral) << ' ' << kAnsiReset;
        if ((i + 1) % kRibbonCellsPerLine == 0) out << '\n';
    }
    out << "\n";
    for (const Window& w : plan.windows) {
        out << "\n-- tokens " << w.begin << ".." << w.end << " --\n";
        for (std::size_t i = w.begin; i < w.end; ++i) {
            std::optional<Category> c = token_category(seg.token_ids[i], cmap);
            std::string_view text = token_text(trace, seg, i);
            if (c) {
                out << ansi_bg(plan.palette.color_of(*c)) << text << kAnsiReset;
            } else {
                out << text;
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace

std::string render_trace(const Trace& trace, const Segmentation& seg, const CategoryMap& cmap,
                         const RenderPlan& plan) {
    if (seg.base_token_count() != trace.tokens.size()) {
        throw ValidationError("segmentation does not align with trace '" + trace.id + "'");
    }
    check_plan(seg, plan);
    return plan.format == RenderFormat::Html ? render_html(trace, seg, cmap, plan)
                                             : render_ansi(trace, seg, cmap, plan);
}

std::vector<Window> auto_windows(const Segmentation& seg, const CategoryMap& cmap, std::uint32_t k,
                                 std::uint32_t window_len) {
    const std::size_t n = seg.token_ids.size();
    if (n == 0 || k == 0 || window_len == 0) return {};
    const std::uint32_t len = static_cast<std::uint32_t>(std::min<std::size_t>(window_len, n));

    std::vector<std::uint32_t> prefix(n + 1, 0);  // signpost-token counts
    for (std::size_t i = 0; i < n; ++i) {
        std::optional<Category> c = token_category(seg.token_ids[i], cmap);
        const bool signpost = c && *c != Category::Reasoning && *c != Category::Computation;
        prefix[i + 1] = prefix[i] + (signpost ? 1u : 0u);
    }

    const std::size_t n_starts = n - len + 1;
    std::vector<bool> blocked(n, false);
    std::vector<Window> windows;
    auto overlaps_blocked = [&](std::uint32_t start) {
        return blocked[start] || blocked[start + len - 1];
    };

    while (windows.size() < k) {
        std::uint32_t best_start = 0;
        std::uint32_t best_density = 0;
        bool found = false;
        for (std::size_t s = 0; s < n_starts; ++s) {
            if (overlaps_blocked(static_cast<std::uint32_t>(s))) continue;
            const std::uint32_t density = prefix[s + len] - prefix[s];
            if (!found || density > best_density) {
                found = true;
                best_density = density;
                best_start = static_cast<std::uint32_t>(s);
            }
        }
        if (!found || best_density == 0) break;

        // Center the window on its signpost mass; keep the earliest-start
        // choice when re-centering would collide with an earlier window.
        std::uint64_t mass_sum = 0;
        for (std::size_t i = best_start; i < best_start + len; ++i) {
            if (prefix[i + 1] > prefix[i]) mass_sum += i;
        }
        const auto centroid = static_cast<std::uint32_t>(mass_sum / best_density);
        std::uint32_t centered = centroid >= len / 2 ? centroid - len / 2 : 0;
        centered = static_cast<std::uint32_t>(std::min<std::size_t>(centered, n_starts - 1));
        const std::uint32_t start = overlaps_blocked(centered) ? best_start : centered;

        windows.push_back(Window{start, start + len});
        for (std::size_t i = start; i < start + len; ++i) blocked[i] = true;
    }
    std::sort(windows.begin(), windows.end(),
              [](const Window& a, const Window& b) { return a.begin < b.begin; });
    return windows;
}

}  // namespace supertok
