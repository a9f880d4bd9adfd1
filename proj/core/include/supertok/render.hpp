#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "supertok/taxonomy.hpp"
#include "supertok/tokenizer.hpp"

namespace supertok {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

struct Palette {
    std::array<Rgb, kNumCategories> category{};
    Rgb neutral{235, 235, 235};  // non-merged tokens

    static Palette standard();
    const Rgb& color_of(Category c) const { return category[static_cast<std::size_t>(c)]; }
};

enum class RenderFormat { Html, Ansi };

// Output-token index range [begin, end).
struct Window {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    bool operator==(const Window&) const = default;
};

struct RenderPlan {
    Palette palette = Palette::standard();
    std::vector<Window> windows;
    RenderFormat format = RenderFormat::Html;
};

// Self-contained document: a ribbon with one fixed-width cell per output
// token colored by category (neutral for non-merged), then each window as
// flowing text with merged spans highlighted.
std::string render_trace(const Trace& trace, const Segmentation& seg, const CategoryMap& cmap,
                         const RenderPlan& plan);

// Up to k non-overlapping windows over regions of maximal structural-token
// density (signpost categories only, i.e. excluding Reasoning/Computation).
// Deterministic; returns fewer windows when the trace runs out of signposts.
std::vector<Window> auto_windows(const Segmentation& seg, const CategoryMap& cmap, std::uint32_t k,
                                 std::uint32_t window_len = 48);

}  // namespace supertok
