#pragma once

// Spines: chain-shaped piecewise-linear immersions into B \ O, their weight
// vectors, straight extension to infinity, and gluing/splitting at endpoints.

#include "cylinders/base.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cylinders {

/// Edge of a spine from vertices[k] to vertices[k+1]. `dir` is primitive in
/// the chart of the tail vertex's canonical cone; the weight at the tail is
/// speed * dir.
struct SpineEdge {
    IntVec dir;
    Integer speed{1};

    friend bool operator==(const SpineEdge&, const SpineEdge&) = default;
};

struct Spine {
    std::vector<BasePoint> vertices;
    std::vector<SpineEdge> edges;

    friend bool operator==(const Spine&, const Spine&) = default;
};

struct SpineViolation {
    int condition = 0;  // 0 = malformed / not an immersion, 1..4 as in the spine definition
    int index = 0;      // offending vertex or edge (0-based)
    std::string detail;
};

inline std::string describe(const std::vector<SpineViolation>& vs)
{
    std::string s;
    for (const auto& v : vs) {
        if (!s.empty())
            s += "; ";
        s += "(" + std::to_string(v.condition) + ") at " + std::to_string(v.index) + ": " + v.detail;
    }
    return s;
}

/// Express a tangent vector given in cone `cone` at `coords` in the chart of
/// the point's canonical cone.
inline IntVec to_canonical_chart(const Base& base, int cone, const RatVec& coords, const IntVec& v)
{
    BasePoint c = base.canonical({cone, coords});
    if (c.cone == base.wrap(cone))
        return v;
    return base.chart_transition(c.cone)(v);
}

/// Canonicalize all vertices and re-express edge directions in the canonical
/// chart of their tails.
inline Spine normalize_spine(const Base& base, const Spine& s)
{
    Spine out = s;
    for (std::size_t k = 0; k < s.vertices.size(); ++k) {
        out.vertices[k] = base.canonical(s.vertices[k]);
        if (k < s.edges.size() && !s.vertices[k].is_origin())
            out.edges[k].dir = to_canonical_chart(base, s.vertices[k].cone, s.vertices[k].coords, s.edges[k].dir);
    }
    return out;
}

/// The straight path of edge k, ending at its head.
inline StraightWalk edge_walk(const Base& base, const Spine& s, std::size_t k)
{
    return base.walk(s.vertices[k], s.edges[k].dir, std::nullopt, s.vertices[k + 1]);
}

/// Weight vector of edge k at its tail (in the tail's canonical chart).
inline IntVec weight_at_tail(const Spine& s, std::size_t k) { return s.edges[k].speed * s.edges[k].dir; }

/// Weight vector of edge k at its head, pointing back along the edge, in the
/// head's canonical chart.
inline IntVec weight_at_head(const Base& base, const Spine& s, std::size_t k)
{
    if (base.canonical(s.vertices[k + 1]).is_origin())
        throw Error(ErrorKind::OriginVertex, "weight vector at the origin");
    StraightWalk w = edge_walk(base, s, k);
    if (w.end != WalkEnd::ReachedTarget)
        throw Error(ErrorKind::InvalidSpine, "edge " + std::to_string(k) + " does not reach its head");
    const auto& last = w.pieces.back();
    IntVec dir = to_canonical_chart(base, last.cone, last.to, w.final_dir);
    return -(s.edges[k].speed * dir);
}

/// Weight vector of an edge at one of its endpoints, by vertex index.
inline IntVec weight_vector(const Base& base, const Spine& s, std::size_t vertex, std::size_t edge)
{
    if (base.canonical(s.vertices[vertex]).is_origin())
        throw Error(ErrorKind::OriginVertex, "weight vector at the origin");
    if (edge == vertex)
        return weight_at_tail(s, edge);
    if (edge + 1 == vertex)
        return weight_at_head(base, s, edge);
    throw Error(ErrorKind::InvalidData, "edge " + std::to_string(edge) + " is not incident to vertex " +
                                            std::to_string(vertex));
}

/// Affine length of edge k in the tree: the walk length divided by the speed.
inline Rational edge_length(const Base& base, const Spine& s, std::size_t k)
{
    StraightWalk w = edge_walk(base, s, k);
    if (w.end != WalkEnd::ReachedTarget)
        throw Error(ErrorKind::InvalidSpine, "edge " + std::to_string(k) + " does not reach its head");
    return w.pieces.back().s_to / Rational(s.edges[k].speed);
}

inline bool is_balanced(const std::vector<IntVec>& weights)
{
    IntVec sum;
    for (const auto& w : weights)
        sum += w;
    return sum.is_zero();
}

/// Sum of the two weights at an interior vertex, in its canonical chart.
inline IntVec bend_sum(const Base& base, const Spine& s, std::size_t vertex)
{
    return weight_at_head(base, s, vertex - 1) + weight_at_tail(s, vertex);
}

inline std::vector<SpineViolation> validate_spine(const Base& base, const Spine& s0)
{
    std::vector<SpineViolation> out;
    if (s0.vertices.size() < 2) {
        out.push_back({0, 0, "a spine needs two endpoints"});
        return out;
    }
    if (s0.edges.size() + 1 != s0.vertices.size()) {
        out.push_back({0, 0, "edge count must be vertex count minus one"});
        return out;
    }
    for (std::size_t k = 0; k < s0.vertices.size(); ++k) {
        const auto& c = s0.vertices[k].coords;
        if (c.x < 0 || c.y < 0) {
            out.push_back({0, static_cast<int>(k), "vertex outside its cone"});
            return out;
        }
        if (s0.vertices[k].is_origin())
            out.push_back({1, static_cast<int>(k), "vertex maps to the origin"});
    }
    if (!out.empty())
        return out;
    Spine s = normalize_spine(base, s0);
    bool edges_ok = true;
    for (std::size_t k = 0; k < s.edges.size(); ++k) {
        const auto& e = s.edges[k];
        int ki = static_cast<int>(k);
        if (e.dir.is_zero() || !is_primitive(e.dir)) {
            out.push_back({0, ki, "edge direction must be primitive"});
            edges_ok = false;
            continue;
        }
        if (e.speed < 1) {
            out.push_back({0, ki, "edge speed must be a positive integer"});
            edges_ok = false;
            continue;
        }
        if (s.vertices[k] == s.vertices[k + 1]) {
            out.push_back({0, ki, "edge contracted to a point"});
            edges_ok = false;
            continue;
        }
        if (det(s.vertices[k].coords, RatVec(e.dir)) == 0)
            out.push_back({3, ki, "edge lies in a ray from the origin"});
        StraightWalk w = edge_walk(base, s, k);
        if (w.end == WalkEnd::HitOrigin) {
            out.push_back({1, ki, "edge passes through the origin"});
            edges_ok = false;
        } else if (w.end != WalkEnd::ReachedTarget) {
            out.push_back({0, ki, "edge direction does not lead to its head"});
            edges_ok = false;
        }
    }
    if (!edges_ok)
        return out;
    for (std::size_t v = 1; v + 1 < s.vertices.size(); ++v) {
        IntVec sum = bend_sum(base, s, v);
        if (sum.is_zero())
            continue;
        const RatVec& p = s.vertices[v].coords;
        RatVec sr(sum);
        if (det(sr, p) != 0 || dot(sr, p) <= 0)
            out.push_back({4, static_cast<int>(v), "bend " + sum.str() + " does not point away from the origin"});
    }
    return out;
}

inline void require_valid(const Base& base, const Spine& s)
{
    auto vs = validate_spine(base, s);
    if (!vs.empty())
        throw Error(ErrorKind::InvalidSpine, describe(vs));
}

inline bool is_straight(const Base& base, const Spine& s0)
{
    Spine s = normalize_spine(base, s0);
    for (std::size_t v = 1; v + 1 < s.vertices.size(); ++v)
        if (!bend_sum(base, s, v).is_zero())
            return false;
    return true;
}

/// Remove balanced 2-valent vertices, merging their edges.
inline Spine simplify(const Base& base, const Spine& s0)
{
    Spine s = normalize_spine(base, s0);
    Spine out;
    out.vertices.push_back(s.vertices.front());
    out.edges.push_back(s.edges.front());
    for (std::size_t v = 1; v + 1 < s.vertices.size(); ++v) {
        if (bend_sum(base, s, v).is_zero())
            continue;
        out.vertices.push_back(s.vertices[v]);
        out.edges.push_back(s.edges[v]);
    }
    out.vertices.push_back(s.vertices.back());
    return out;
}

/// A spine extended straight to infinity at both ends. end1 starts at the
/// first vertex and runs away from the spine; likewise end2 at the last vertex.
struct ExtendedSpine {
    Spine core;
    Continuation end1;
    Continuation end2;
    Integer speed1{1};  // multiplicities of the two unbounded edges
    Integer speed2{1};

    /// Asymptotic direction of end1 as an integral point of B (a cone and
    /// nonnegative coordinates), including the multiplicity.
    BasePoint asymptotic1() const { return {end1.final_cone, RatVec(speed1 * end1.final_dir)}; }
    BasePoint asymptotic2() const { return {end2.final_cone, RatVec(speed2 * end2.final_dir)}; }
};

struct ExtendResult {
    std::optional<ExtendedSpine> spine;
    int failed_end = 0;  // 1 or 2 when not extendable
    Continuation failed;

    bool extendable() const { return spine.has_value(); }
};

/// Extend both ends straight. Only the structural conditions are enforced
/// here so that a radial end edge reports its collision with O as a result.
inline ExtendResult extend_spine(const Base& base, const Spine& s0)
{
    std::vector<SpineViolation> structural;
    for (const auto& v : validate_spine(base, s0))
        if (v.condition <= 1)
            structural.push_back(v);
    if (!structural.empty())
        throw Error(ErrorKind::InvalidSpine, describe(structural));
    Spine s = normalize_spine(base, s0);
    ExtendResult r;
    Continuation c1 = straight_continue(base, s.vertices.front(), -s.edges.front().dir);
    if (!c1.extendable()) {
        r.failed_end = 1;
        r.failed = c1;
        return r;
    }
    std::size_t last = s.edges.size() - 1;
    IntVec out2 = -weight_at_head(base, s, last);
    Integer sp2 = lattice_length(out2);
    Continuation c2 = straight_continue(base, s.vertices.back(), primitive(out2));
    if (!c2.extendable()) {
        r.failed_end = 2;
        r.failed = c2;
        return r;
    }
    r.spine = ExtendedSpine{s, c1, c2, s.edges.front().speed, sp2};
    return r;
}

/// Truncate the unbounded ends of an extended spine after walking `len` units
/// (of the primitive end direction) past the last ray crossing, giving a spine
/// with the ends as new vertices.
inline Spine truncate_extension(const Base& base, const ExtendedSpine& e, const Rational& len)
{
    auto far_point = [&](const Continuation& c) {
        BasePoint from = c.polyline.back();
        StraightWalk w = base.walk({c.final_cone, base.coords_in(from, c.final_cone).value()}, c.final_dir, len);
        return base.canonical(w.end_point());
    };
    Spine out;
    BasePoint p1 = far_point(e.end1);
    IntVec dir1 = to_canonical_chart(base, e.end1.final_cone, base.coords_in(p1, e.end1.final_cone).value(),
                                     -e.end1.final_dir);
    out.vertices.push_back(p1);
    out.edges.push_back({dir1, e.speed1});
    for (std::size_t k = 0; k < e.core.edges.size(); ++k) {
        out.vertices.push_back(e.core.vertices[k]);
        out.edges.push_back(e.core.edges[k]);
    }
    out.vertices.push_back(e.core.vertices.back());
    IntVec out2 = -weight_at_head(base, e.core, e.core.edges.size() - 1);
    out.edges.push_back({primitive(out2), lattice_length(out2)});
    out.vertices.push_back(far_point(e.end2));
    return normalize_spine(base, out);
}

inline Spine glue_spines(const Base& base, const Spine& a0, const Spine& b0)
{
    require_valid(base, a0);
    require_valid(base, b0);
    Spine a = normalize_spine(base, a0);
    Spine b = normalize_spine(base, b0);
    if (a.vertices.back() != b.vertices.front())
        throw Error(ErrorKind::JunctionMismatch,
                    "junction points differ: " + a.vertices.back().str() + " vs " + b.vertices.front().str());
    IntVec wa = weight_at_head(base, a, a.edges.size() - 1);
    IntVec wb = weight_at_tail(b, 0);
    if (!(wa + wb).is_zero())
        throw Error(ErrorKind::WeightMismatch, "junction weights " + wa.str() + " and " + wb.str() + " are not opposite");
    Spine out = a;
    for (std::size_t k = 0; k < b.edges.size(); ++k) {
        out.edges.push_back(b.edges[k]);
        out.vertices.push_back(b.vertices[k + 1]);
    }
    return out;
}

/// Locate a point on the image of a spine: the index of a vertex equal to it,
/// or of an edge containing it in its interior.
struct SpineLocation {
    bool at_vertex = false;
    std::size_t index = 0;
};

inline std::optional<SpineLocation> locate_on_spine(const Base& base, const Spine& s0, const BasePoint& p0)
{
    Spine s = normalize_spine(base, s0);
    BasePoint p = base.canonical(p0);
    for (std::size_t v = 0; v < s.vertices.size(); ++v)
        if (s.vertices[v] == p)
            return SpineLocation{true, v};
    for (std::size_t k = 0; k < s.edges.size(); ++k) {
        StraightWalk w = base.walk(s.vertices[k], s.edges[k].dir, std::nullopt, p);
        if (w.end != WalkEnd::ReachedTarget)
            continue;
        StraightWalk full = edge_walk(base, s, k);
        if (full.end == WalkEnd::ReachedTarget && w.pieces.back().s_to < full.pieces.back().s_to)
            return SpineLocation{false, k};
    }
    return std::nullopt;
}

/// Split a spine at an interior point that is not a bend.
inline std::pair<Spine, Spine> split_spine(const Base& base, const Spine& s0, const BasePoint& p0)
{
    require_valid(base, s0);
    Spine s = normalize_spine(base, s0);
    BasePoint p = base.canonical(p0);
    auto loc = locate_on_spine(base, s, p);
    if (!loc)
        throw Error(ErrorKind::InvalidData, "point " + p.str() + " is not on the spine");
    Spine a, b;
    if (loc->at_vertex) {
        std::size_t v = loc->index;
        if (v == 0 || v + 1 == s.vertices.size())
            throw Error(ErrorKind::InvalidData, "cannot split at an endpoint");
        if (!bend_sum(base, s, v).is_zero())
            throw Error(ErrorKind::BendPoint, "point " + p.str() + " is a bend");
        a.vertices.assign(s.vertices.begin(), s.vertices.begin() + static_cast<long>(v) + 1);
        a.edges.assign(s.edges.begin(), s.edges.begin() + static_cast<long>(v));
        b.vertices.assign(s.vertices.begin() + static_cast<long>(v), s.vertices.end());
        b.edges.assign(s.edges.begin() + static_cast<long>(v), s.edges.end());
        return {a, b};
    }
    std::size_t k = loc->index;
    StraightWalk w = base.walk(s.vertices[k], s.edges[k].dir, std::nullopt, p);
    const auto& last = w.pieces.back();
    IntVec dir_at_p = to_canonical_chart(base, last.cone, last.to, w.final_dir);
    a.vertices.assign(s.vertices.begin(), s.vertices.begin() + static_cast<long>(k) + 1);
    a.edges.assign(s.edges.begin(), s.edges.begin() + static_cast<long>(k) + 1);
    a.vertices.push_back(p);
    b.vertices.push_back(p);
    b.edges.push_back({dir_at_p, s.edges[k].speed});
    b.vertices.insert(b.vertices.end(), s.vertices.begin() + static_cast<long>(k) + 1, s.vertices.end());
    b.edges.insert(b.edges.end(), s.edges.begin() + static_cast<long>(k) + 1, s.edges.end());
    return {a, b};
}

/// The point at fraction t in (0,1) along edge k.
inline BasePoint point_on_edge(const Base& base, const Spine& s0, std::size_t k, const Rational& t)
{
    Spine s = normalize_spine(base, s0);
    StraightWalk full = edge_walk(base, s, k);
    if (full.end != WalkEnd::ReachedTarget)
        throw Error(ErrorKind::InvalidSpine, "edge does not reach its head");
    StraightWalk w = base.walk(s.vertices[k], s.edges[k].dir, t * full.pieces.back().s_to);
    return base.canonical(w.end_point());
}

/// Reverse the orientation of a spine.
inline Spine reversed(const Base& base, const Spine& s0)
{
    Spine s = normalize_spine(base, s0);
    Spine out;
    for (std::size_t v = s.vertices.size(); v-- > 0;)
        out.vertices.push_back(s.vertices[v]);
    for (std::size_t k = s.edges.size(); k-- > 0;) {
        IntVec w = weight_at_head(base, s, k);
        out.edges.push_back({primitive(w), lattice_length(w)});
    }
    return out;
}

} // namespace cylinders
