#pragma once

#include <string>
#include <vector>

#include "scherk/domains.hpp"
#include "scherk/io.hpp"

namespace scherk {

struct SvgStyle {
    int size = 1000;
    std::string a_stroke = "#c0392b";
    std::string b_stroke = "#1f4e79";
    std::string rim_stroke = "#777777";
    double stroke_width = 3.0;
};

// Sides as circular arcs (straight chords when the carrier is a line), the
// boundary of the disc as a circle, and optionally a node heatmap.
std::string render_svg(const ScherkPolygon& polygon, const std::vector<CsvSample>* heat = nullptr,
                       const SvgStyle& style = {});

// Diverging blue-white-red color for t in [-1, 1].
std::string heat_color(double t);

}  // namespace scherk
