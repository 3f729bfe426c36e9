#include "scherk/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace scherk {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::string heat_color(double t) {
    t = std::clamp(t, -1.0, 1.0);
    int r, g, b;
    if (t >= 0) {
        r = 255;
        g = b = static_cast<int>(std::lround(255 * (1 - t)));
    } else {
        b = 255;
        r = g = static_cast<int>(std::lround(255 * (1 + t)));
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string render_svg(const ScherkPolygon& polygon, const std::vector<CsvSample>* heat, const SvgStyle& style) {
    const double half = 0.5 * style.size;
    const double R = polygon.disc.model_radius;
    const double k = half / (1.05 * R);
    auto X = [&](double x) { return half + k * x; };
    auto Y = [&](double y) { return half - k * y; };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.size) +
                      "\" height=\"" + std::to_string(style.size) + "\" viewBox=\"0 0 " +
                      std::to_string(style.size) + " " + std::to_string(style.size) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (heat && !heat->empty()) {
        double m = 0.0;
        for (const auto& s : *heat) m = std::max(m, std::abs(s.u));
        if (m == 0.0) m = 1.0;
        out += "<g class=\"heat\">\n";
        for (const auto& s : *heat) {
            out += "<circle cx=\"" + num(X(s.p.x)) + "\" cy=\"" + num(Y(s.p.y)) + "\" r=\"4\" fill=\"" +
                   heat_color(s.u / m) + "\"/>\n";
        }
        out += "</g>\n";
    }
    out += "<circle class=\"boundary\" cx=\"" + num(X(0)) + "\" cy=\"" + num(Y(0)) + "\" r=\"" + num(k * R) +
           "\" fill=\"none\" stroke=\"" + style.rim_stroke + "\" stroke-width=\"1.5\"/>\n";
    const GeodesicPolygon poly = polygon.polygon();
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Vec2 a = poly.vertices[i];
        const Vec2 b = poly.vertices[polygon.next(i)];
        const bool is_a = polygon.labels[i] == SideLabel::A;
        std::string d = "M " + num(X(a.x)) + " " + num(Y(a.y)) + " ";
        const auto carrier = geodesic_carrier(polygon.disc.model, a, b);
        if (carrier) {
            const int sweep = cross(a - carrier->center, b - carrier->center) > 0 ? 1 : 0;
            d += "A " + num(k * carrier->radius) + " " + num(k * carrier->radius) + " 0 0 " + std::to_string(sweep) +
                 " " + num(X(b.x)) + " " + num(Y(b.y));
        } else {
            d += "L " + num(X(b.x)) + " " + num(Y(b.y));
        }
        out += "<path class=\"side " + std::string(is_a ? "A" : "B") + "\" d=\"" + d + "\" fill=\"none\" stroke=\"" +
               (is_a ? style.a_stroke : style.b_stroke) + "\" stroke-width=\"" + num(style.stroke_width) + "\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace scherk
