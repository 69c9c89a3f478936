#pragma once

// Deterministic SVG drawings in the developed chart of cone 0. Coordinates
// are computed exactly and rounded to integers only when written out.

#include "cylinders/scattering.hpp"
#include "cylinders/spine.hpp"

#include <sstream>
#include <string>

namespace cylinders::svg {

class Canvas {
public:
    void line(const RatVec& a, const RatVec& b, const std::string& style)
    {
        items_.push_back({Kind::Line, {a, b}, style, {}});
        grow(a);
        grow(b);
    }
    void dot(const RatVec& p, const std::string& style)
    {
        items_.push_back({Kind::Dot, {p}, style, {}});
        grow(p);
    }
    void square(const RatVec& p, const std::string& style)
    {
        items_.push_back({Kind::Square, {p}, style, {}});
        grow(p);
    }
    void cross(const RatVec& p, const std::string& style)
    {
        items_.push_back({Kind::Cross, {p}, style, {}});
        grow(p);
    }
    void text(const RatVec& p, const std::string& s)
    {
        items_.push_back({Kind::Text, {p}, "", s});
        grow(p);
    }

    std::string str(int size = 800) const
    {
        const int margin = 40;
        Rational span = std::max(Rational(hi_.x - lo_.x), Rational(hi_.y - lo_.y));
        if (span == 0)
            span = 1;
        Rational scale = Rational(size) / span;
        auto X = [&](const Rational& x) { return round(Rational((x - lo_.x) * scale)) + margin; };
        auto Y = [&](const Rational& y) { return round(Rational((hi_.y - y) * scale)) + margin; };
        int total = size + 2 * margin;

        std::ostringstream o;
        o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total << "\" height=\"" << total
          << "\" viewBox=\"0 0 " << total << " " << total << "\">\n";
        o << "<rect width=\"" << total << "\" height=\"" << total << "\" fill=\"white\"/>\n";
        for (const auto& it : items_) {
            const RatVec& p = it.pts[0];
            switch (it.kind) {
            case Kind::Line:
                o << "<line x1=\"" << X(p.x) << "\" y1=\"" << Y(p.y) << "\" x2=\"" << X(it.pts[1].x) << "\" y2=\""
                  << Y(it.pts[1].y) << "\" " << it.style << "/>\n";
                break;
            case Kind::Dot:
                o << "<circle cx=\"" << X(p.x) << "\" cy=\"" << Y(p.y) << "\" r=\"4\" " << it.style << "/>\n";
                break;
            case Kind::Square:
                o << "<rect x=\"" << X(p.x) - 6 << "\" y=\"" << Y(p.y) - 6 << "\" width=\"12\" height=\"12\" "
                  << it.style << "/>\n";
                break;
            case Kind::Cross: {
                Integer x = X(p.x), y = Y(p.y);
                o << "<path d=\"M" << x - 5 << " " << y - 5 << " L" << x + 5 << " " << y + 5 << " M" << x - 5 << " "
                  << y + 5 << " L" << x + 5 << " " << y - 5 << "\" " << it.style << "/>\n";
                break;
            }
            case Kind::Text:
                o << "<text x=\"" << X(p.x) + 6 << "\" y=\"" << Y(p.y) - 6
                  << "\" font-family=\"monospace\" font-size=\"12\">" << escape(it.text) << "</text>\n";
                break;
            }
        }
        o << "</svg>\n";
        return o.str();
    }

private:
    enum class Kind { Line, Dot, Square, Cross, Text };
    struct Item {
        Kind kind;
        std::vector<RatVec> pts;
        std::string style;
        std::string text;
    };

    static Integer round(const Rational& r)
    {
        Rational h = r + Rational(1, 2);
        Integer q = numerator(h) / denominator(h);
        if (q * denominator(h) > numerator(h))
            --q;
        return q;
    }

    static std::string escape(const std::string& s)
    {
        std::string out;
        for (char c : s) {
            if (c == '<')
                out += "&lt;";
            else if (c == '>')
                out += "&gt;";
            else if (c == '&')
                out += "&amp;";
            else
                out += c;
        }
        return out;
    }

    void grow(const RatVec& p)
    {
        if (!any_) {
            lo_ = hi_ = p;
            any_ = true;
            return;
        }
        lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
        hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
    }

    std::vector<Item> items_;
    RatVec lo_, hi_;
    bool any_ = false;
};

inline const char* ray_style = "stroke=\"#bbbbbb\" stroke-width=\"1\"";
inline const char* seed_style = "stroke=\"#cc3333\" stroke-width=\"2\"";
inline const char* wall_style = "stroke=\"#3366cc\" stroke-width=\"1.5\"";
inline const char* edge_style = "stroke=\"black\" stroke-width=\"2\"";
inline const char* end_style = "stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"";
inline const char* vertex_style = "fill=\"black\"";
inline const char* junction_style = "fill=\"none\" stroke=\"#cc3333\" stroke-width=\"2\"";
inline const char* cut_style = "stroke=\"#ff8800\" stroke-width=\"2\"";

inline void draw_rays(const Base& base, Canvas& cv, const Rational& len)
{
    const auto& rays = base.developed_rays();
    for (int i = 0; i <= base.l(); ++i) {
        RatVec r(rays[i]);
        cv.line({0, 0}, len * r, ray_style);
        cv.text(len * r, "r" + std::to_string(i % base.l() + 1));
    }
}

/// Draws a walk piece by piece; crossing from the last cone into cone 0 is
/// where the developed picture is cut, marked with a cross.
inline void draw_walk(const Base& base, Canvas& cv, const StraightWalk& w, const std::string& style,
                      const Rational& tail)
{
    for (std::size_t k = 0; k < w.pieces.size(); ++k) {
        const auto& p = w.pieces[k];
        RatVec a = base.develop(p.cone, p.from);
        RatVec b = p.unbounded ? a + tail * RatVec(base.develop(p.cone, p.dir)) : base.develop(p.cone, p.to);
        cv.line(a, b, style);
        if (k > 0 && w.pieces[k - 1].cone == base.l() - 1 && p.cone == 0)
            cv.cross(a, cut_style);
    }
}

inline RatVec developed(const Base& base, const BasePoint& p) { return base.develop(p.cone, p.coords); }

/// Spines with their straight extensions; `junctions` lists vertex indices
/// drawn as gluing points.
inline std::string render_spines(const Base& base, const std::vector<Spine>& spines,
                                 const std::vector<std::vector<std::size_t>>& junctions = {})
{
    Canvas cv;
    Rational reach = 1;
    for (const auto& s : spines)
        for (const auto& v : s.vertices)
            reach = std::max(reach, Rational(v.coords.x + v.coords.y));
    draw_rays(base, cv, reach * 2);
    cv.dot({0, 0}, "fill=\"#888888\"");
    cv.text({0, 0}, "O");

    for (std::size_t i = 0; i < spines.size(); ++i) {
        Spine s = normalize_spine(base, spines[i]);
        for (std::size_t k = 0; k < s.edges.size(); ++k)
            draw_walk(base, cv, edge_walk(base, s, k), edge_style, 0);
        draw_walk(base, cv, base.walk(s.vertices.front(), -s.edges.front().dir), end_style, reach);
        draw_walk(base, cv, base.walk(s.vertices.back(), primitive(-weight_at_head(base, s, s.edges.size() - 1))),
                  end_style, reach);
        for (std::size_t v = 0; v < s.vertices.size(); ++v) {
            cv.dot(developed(base, s.vertices[v]), vertex_style);
            cv.text(developed(base, s.vertices[v]),
                    (spines.size() > 1 ? "L" + std::to_string(i + 1) + "." : std::string("v")) +
                        std::to_string(v + 1));
        }
        if (i < junctions.size())
            for (std::size_t v : junctions[i])
                cv.square(developed(base, s.vertices.at(v)), junction_style);
    }
    return cv.str();
}

inline std::string render_diagram(const Base& base, const ScatteringDiagram& d)
{
    Canvas cv;
    Rational len = 6;
    draw_rays(base, cv, len);
    for (std::size_t i = 0; i < d.walls.size(); ++i) {
        const Wall& w = d.walls[i];
        RatVec u = developed(base, w.dir);
        Rational scale = len / std::max(Rational(abs(u.x)), Rational(abs(u.y)));
        cv.line({0, 0}, scale * u, w.line ? seed_style : wall_style);
        if (w.line)
            cv.line({0, 0}, -scale * u, seed_style);
        std::string label = "w" + std::to_string(i + 1);
        if (!w.terms.empty())
            label += " " + w.terms.front().coeff.str() + "*" + w.terms.front().cls.str() +
                     (w.terms.size() > 1 ? " +" + std::to_string(w.terms.size() - 1) : "");
        cv.text(scale * u, label);
    }
    cv.dot({0, 0}, "fill=\"black\"");
    return cv.str();
}

} // namespace cylinders::svg
