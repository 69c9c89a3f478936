#pragma once

// Tropical curves in B and in B_f: pointed cylinders and double cylinders
// built from extended spines, their retraction into B_f, membership in the
// distinguished subsets, the twig property, local rigidity, and the two
// degenerations of a five-pointed rational curve.

#include "cylinders/bf_region.hpp"

#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace cylinders {

struct TropEdge {
    int tail = 0;
    int head = 0;
    IntVec dir;          // primitive, in the tail's canonical chart; the tail is never O
    Integer speed{1};

    friend bool operator==(const TropEdge&, const TropEdge&) = default;
};

struct TropLeg {
    int at = 0;
    IntVec dir;
    Integer speed{1};

    friend bool operator==(const TropLeg&, const TropLeg&) = default;
};

/// A tree mapped into B. Cylinders carry their unbounded ends as legs and one
/// marked vertex; curves in B_f have no legs, and their marks list the
/// boundary points first and the interior mark last.
struct TropCurve {
    std::vector<BasePoint> vertices;
    std::vector<TropEdge> edges;
    std::vector<TropLeg> legs;
    std::vector<int> marks;

    int interior_mark() const { return marks.back(); }
};

struct TropViolation {
    int item = 0;     // 0 structure, 1 boundary marks, 2 interior balancing, 3 boundary balancing
    int vertex = -1;
    std::string detail;
};

namespace trop {

inline StraightWalk edge_walk(const Base& base, const TropCurve& c, const TropEdge& e)
{
    return base.walk(c.vertices[e.tail], e.dir, std::nullopt, c.vertices[e.head]);
}

inline bool reaches(const Base& base, const TropCurve& c, const TropEdge& e)
{
    if (e.dir.is_zero() || e.speed <= 0 || base.canonical(c.vertices[e.tail]).is_origin())
        return false;
    return edge_walk(base, c, e).end == WalkEnd::ReachedTarget;
}

/// Weight at the head, pointing back along the edge, in the head's chart.
inline IntVec head_weight(const Base& base, const TropCurve& c, const TropEdge& e)
{
    StraightWalk w = edge_walk(base, c, e);
    const auto& last = w.pieces.back();
    return -(e.speed * to_canonical_chart(base, last.cone, last.to, w.final_dir));
}

/// Weights of all edges and legs at a vertex not at O.
inline std::vector<IntVec> weights_at(const Base& base, const TropCurve& c, int v,
                                      const std::vector<bool>* edge_mask = nullptr)
{
    std::vector<IntVec> out;
    for (std::size_t k = 0; k < c.edges.size(); ++k) {
        if (edge_mask && !(*edge_mask)[k])
            continue;
        const auto& e = c.edges[k];
        if (e.tail == v)
            out.push_back(e.speed * e.dir);
        if (e.head == v)
            out.push_back(head_weight(base, c, e));
    }
    if (!edge_mask)
        for (const auto& l : c.legs)
            if (l.at == v)
                out.push_back(l.speed * l.dir);
    return out;
}

inline IntVec weight_sum(const std::vector<IntVec>& ws)
{
    IntVec s;
    for (const auto& w : ws)
        s += w;
    return s;
}

inline bool is_tree(const TropCurve& c)
{
    int n = static_cast<int>(c.vertices.size());
    if (n == 0 || static_cast<int>(c.edges.size()) != n - 1)
        return false;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& e : c.edges) {
        if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n)
            return false;
        int a = find(e.tail), b = find(e.head);
        if (a == b)
            return false;
        parent[a] = b;
    }
    return true;
}

inline std::vector<std::vector<int>> adjacency(const TropCurve& c)
{
    std::vector<std::vector<int>> adj(c.vertices.size());
    for (std::size_t k = 0; k < c.edges.size(); ++k) {
        adj[c.edges[k].tail].push_back(static_cast<int>(k));
        adj[c.edges[k].head].push_back(static_cast<int>(k));
    }
    return adj;
}

inline int other_end(const TropEdge& e, int v) { return e.tail == v ? e.head : e.tail; }

/// Edges on the tree path between two vertices.
inline std::vector<int> path_edges(const TropCurve& c, int from, int to)
{
    auto adj = adjacency(c);
    std::vector<int> via(c.vertices.size(), -2);
    std::vector<int> queue{from};
    via[from] = -1;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        int v = queue[i];
        for (int k : adj[v]) {
            int u = other_end(c.edges[k], v);
            if (via[u] == -2) {
                via[u] = k;
                queue.push_back(u);
            }
        }
    }
    std::vector<int> out;
    if (via[to] == -2)
        return out;
    for (int v = to; v != from;) {
        int k = via[v];
        out.push_back(k);
        v = other_end(c.edges[k], v);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline std::set<int> vertices_of(const TropCurve& c, const std::vector<int>& edges, int start)
{
    std::set<int> out{start};
    for (int k : edges) {
        out.insert(c.edges[k].tail);
        out.insert(c.edges[k].head);
    }
    return out;
}

/// Direction and speed of edge k as seen from its endpoint v (v not at O).
inline std::pair<IntVec, Integer> leaving(const Base& base, const TropCurve& c, int k, int v)
{
    const auto& e = c.edges[k];
    if (e.tail == v)
        return {e.dir, e.speed};
    IntVec w = head_weight(base, c, e);
    return {primitive(w), lattice_length(w)};
}

} // namespace trop

inline TropCurve canonical_curve(const Base& base, const TropCurve& c0)
{
    TropCurve c = c0;
    for (std::size_t v = 0; v < c.vertices.size(); ++v)
        c.vertices[v] = base.canonical(c0.vertices[v]);
    for (auto& e : c.edges)
        if (!c0.vertices[e.tail].is_origin())
            e.dir = to_canonical_chart(base, c0.vertices[e.tail].cone, c0.vertices[e.tail].coords, e.dir);
    for (auto& l : c.legs)
        if (!c0.vertices[l.at].is_origin())
            l.dir = to_canonical_chart(base, c0.vertices[l.at].cone, c0.vertices[l.at].coords, l.dir);
    return c;
}

/// Structure and balancing of a cylinder (2 legs) or double cylinder (4 legs).
inline std::vector<TropViolation> validate_cylinder(const Base& base, const TropCurve& c0, std::size_t legs)
{
    std::vector<TropViolation> out;
    TropCurve c = canonical_curve(base, c0);
    if (!trop::is_tree(c))
        out.push_back({0, -1, "not a tree"});
    if (c.legs.size() != legs)
        out.push_back({0, -1, "expected " + std::to_string(legs) + " unbounded ends"});
    if (c.marks.size() != 1 || c.marks[0] < 0 || c.marks[0] >= static_cast<int>(c.vertices.size()))
        out.push_back({0, -1, "expected one marked vertex"});
    if (!out.empty())
        return out;
    for (std::size_t k = 0; k < c.edges.size(); ++k)
        if (!trop::reaches(base, c, c.edges[k]))
            out.push_back({0, c.edges[k].tail, "edge " + std::to_string(k + 1) + " does not reach its head"});
    for (std::size_t k = 0; k < c.legs.size(); ++k) {
        const auto& l = c.legs[k];
        if (c.vertices[l.at].is_origin() || l.dir.is_zero() ||
            base.walk(c.vertices[l.at], l.dir).end != WalkEnd::Escaped)
            out.push_back({0, l.at, "end " + std::to_string(k + 1) + " does not escape"});
    }
    if (!out.empty())
        return out;
    for (std::size_t v = 0; v < c.vertices.size(); ++v)
        if (!c.vertices[v].is_origin() && !trop::weight_sum(trop::weights_at(base, c, static_cast<int>(v))).is_zero())
            out.push_back({2, static_cast<int>(v), "unbalanced at " + c.vertices[v].str()});
    return out;
}

namespace trop {

/// Radial edges from the bends of a spine to O, balancing them.
inline void add_twigs(const Base& base, TropCurve& c, const Spine& s, int offset)
{
    for (std::size_t v = 1; v + 1 < s.vertices.size(); ++v) {
        IntVec b = bend_sum(base, s, v);
        if (b.is_zero())
            continue;
        int o = static_cast<int>(c.vertices.size());
        c.vertices.push_back(BasePoint{0, {}});
        c.edges.push_back({offset + static_cast<int>(v), o, primitive(-b), lattice_length(b)});
    }
}

inline ExtendedSpine require_extension(const Base& base, const Spine& s)
{
    ExtendResult e = extend_spine(base, s);
    if (!e.extendable())
        throw Error(ErrorKind::NotExtendableSpine, "spine end " + std::to_string(e.failed_end) + " does not escape");
    return *e.spine;
}

} // namespace trop

/// The cylinder of an extended spine, with a twig to O at every bend and the
/// mark on spine vertex `mark`.
inline TropCurve make_cylinder(const Base& base, const Spine& s0, std::size_t mark)
{
    require_valid(base, s0);
    ExtendedSpine e = trop::require_extension(base, s0);
    const Spine& s = e.core;
    if (mark >= s.vertices.size())
        throw Error(ErrorKind::InvalidData, "mark beyond the spine");
    TropCurve c;
    c.vertices = s.vertices;
    for (std::size_t k = 0; k < s.edges.size(); ++k)
        c.edges.push_back({static_cast<int>(k), static_cast<int>(k + 1), s.edges[k].dir, s.edges[k].speed});
    IntVec out2 = -weight_at_head(base, s, s.edges.size() - 1);
    c.legs.push_back({0, -s.edges.front().dir, s.edges.front().speed});
    c.legs.push_back({static_cast<int>(s.vertices.size() - 1), primitive(out2), lattice_length(out2)});
    trop::add_twigs(base, c, s, 0);
    c.marks = {static_cast<int>(mark)};
    return c;
}

/// The double cylinder of two gluable spines: their extensions joined at the
/// junction. Legs come in the order (start of L1, continuation of L1 past the
/// junction, continuation of L2 back past the junction, end of L2).
inline TropCurve make_double_cylinder(const Base& base, const Spine& l1, const Spine& l2)
{
    glue_spines(base, l1, l2);
    ExtendedSpine e1 = trop::require_extension(base, l1);
    ExtendedSpine e2 = trop::require_extension(base, l2);
    const Spine& a = e1.core;
    const Spine& b = e2.core;
    TropCurve c;
    c.vertices = a.vertices;
    int j = static_cast<int>(a.vertices.size() - 1);
    for (std::size_t k = 0; k < a.edges.size(); ++k)
        c.edges.push_back({static_cast<int>(k), static_cast<int>(k + 1), a.edges[k].dir, a.edges[k].speed});
    for (std::size_t v = 1; v < b.vertices.size(); ++v)
        c.vertices.push_back(b.vertices[v]);
    for (std::size_t k = 0; k < b.edges.size(); ++k)
        c.edges.push_back({j + static_cast<int>(k), j + static_cast<int>(k + 1), b.edges[k].dir, b.edges[k].speed});
    IntVec wj = weight_at_tail(b, 0);
    IntVec out2 = -weight_at_head(base, b, b.edges.size() - 1);
    c.legs.push_back({0, -a.edges.front().dir, a.edges.front().speed});
    c.legs.push_back({j, primitive(wj), lattice_length(wj)});
    c.legs.push_back({j, primitive(-wj), lattice_length(wj)});
    c.legs.push_back({static_cast<int>(c.vertices.size() - 1), primitive(out2), lattice_length(out2)});
    trop::add_twigs(base, c, a, 0);
    trop::add_twigs(base, c, b, j);
    c.marks = {j};
    return c;
}

/// Remove balanced 2-valent unmarked vertices away from O, merging their edges.
inline TropCurve make_simple(const Base& base, const TropCurve& c0)
{
    TropCurve c = canonical_curve(base, c0);
    while (true) {
        auto adj = trop::adjacency(c);
        int victim = -1;
        for (std::size_t v = 0; v < c.vertices.size() && victim < 0; ++v) {
            int vi = static_cast<int>(v);
            if (c.vertices[v].is_origin() || adj[v].size() != 2 ||
                std::find(c.marks.begin(), c.marks.end(), vi) != c.marks.end())
                continue;
            bool has_leg = false;
            for (const auto& l : c.legs)
                has_leg = has_leg || l.at == vi;
            if (!has_leg && trop::weight_sum(trop::weights_at(base, c, vi)).is_zero())
                victim = vi;
        }
        if (victim < 0)
            return c;
        int k1 = adj[victim][0], k2 = adj[victim][1];
        int a = trop::other_end(c.edges[k1], victim), b = trop::other_end(c.edges[k2], victim);
        TropEdge merged;
        if (!c.vertices[a].is_origin()) {
            auto [d, sp] = trop::leaving(base, c, k1, a);
            merged = {a, b, d, sp};
        } else {
            auto [d, sp] = trop::leaving(base, c, k2, b);
            merged = {b, a, d, sp};
        }
        std::vector<TropEdge> edges;
        for (std::size_t k = 0; k < c.edges.size(); ++k)
            if (static_cast<int>(k) != k1 && static_cast<int>(k) != k2)
                edges.push_back(c.edges[k]);
        edges.push_back(merged);
        auto shift = [victim](int v) { return v > victim ? v - 1 : v; };
        for (auto& e : edges) {
            e.tail = shift(e.tail);
            e.head = shift(e.head);
        }
        for (auto& l : c.legs)
            l.at = shift(l.at);
        for (auto& m : c.marks)
            m = shift(m);
        c.vertices.erase(c.vertices.begin() + victim);
        c.edges = std::move(edges);
    }
}

/// Sum of the lattice lengths of the edge images.
inline Rational total_image_length(const Base& base, const TropCurve& c)
{
    Rational s = 0;
    for (const auto& e : c.edges)
        s += trop::edge_walk(base, c, e).pieces.back().s_to;
    return s;
}

/// Conditions on a pointed rational tropical curve in B_f with `n` boundary
/// points: boundary placement, balancing inside, and balancing modulo the
/// strip direction on boundary segments.
inline std::vector<TropViolation> validate_trop_curve(const Base& base, const BfRegion& bf, const TropCurve& c0,
                                                      std::size_t n)
{
    require_valid_bf(base, bf);
    std::vector<TropViolation> out;
    TropCurve c = canonical_curve(base, c0);
    if (!trop::is_tree(c))
        out.push_back({0, -1, "not a tree"});
    if (!c.legs.empty())
        out.push_back({0, -1, "a curve in B_f has no unbounded ends"});
    if (c.marks.size() != n + 1)
        out.push_back({0, -1, "expected " + std::to_string(n + 1) + " marked points"});
    if (!out.empty())
        return out;
    for (std::size_t v = 0; v < c.vertices.size(); ++v)
        if (!in_bf(base, bf, c.vertices[v]))
            out.push_back({0, static_cast<int>(v), "vertex outside B_f"});
    for (std::size_t k = 0; k < c.edges.size(); ++k) {
        const auto& e = c.edges[k];
        if (!trop::reaches(base, c, e)) {
            out.push_back({0, e.tail, "edge " + std::to_string(k + 1) + " does not reach its head"});
            continue;
        }
        for (const auto& piece : trop::edge_walk(base, c, e).pieces)
            if (!in_bf(base, bf, {piece.cone, piece.to}))
                out.push_back({0, e.tail, "edge " + std::to_string(k + 1) + " leaves B_f"});
    }
    if (!out.empty())
        return out;
    for (std::size_t i = 0; i < n; ++i)
        if (!boundary_cell(base, bf, c.vertices[c.marks[i]]))
            out.push_back({1, c.marks[i], "boundary mark " + std::to_string(i + 1) + " is not on the boundary"});
    for (std::size_t v = 0; v < c.vertices.size(); ++v) {
        const BasePoint& p = c.vertices[v];
        if (p.is_origin())
            continue;
        IntVec sum = trop::weight_sum(trop::weights_at(base, c, static_cast<int>(v)));
        auto cell = boundary_cell(base, bf, p);
        if (!cell) {
            if (!sum.is_zero())
                out.push_back({2, static_cast<int>(v), "unbalanced at " + p.str() + " by " + sum.str()});
        } else if (!cell->corner && cell->strip && det(sum, *cell->strip) != 0) {
            out.push_back({3, static_cast<int>(v), "weight sum " + sum.str() + " is transverse to the strip " +
                                                       cell->strip->str()});
        } else if (!cell->corner && !cell->strip && !sum.is_zero()) {
            out.push_back({3, static_cast<int>(v), "unbalanced on a boundary cell facing a wedge"});
        }
    }
    return out;
}

/// The curve induced in B_f: each unbounded end is cut where it leaves B_f,
/// that point becoming a boundary mark. Ends must leave through a strip
/// parallel to them.
inline TropCurve cylinder_to_Bf(const Base& base, const BfRegion& bf, const TropCurve& cyl0)
{
    require_valid_bf(base, bf);
    TropCurve cyl = canonical_curve(base, cyl0);
    for (const auto& e : cyl.edges)
        for (const auto& piece : trop::edge_walk(base, cyl, e).pieces)
            if (!in_bf_interior(base, bf, {piece.cone, piece.from}) || !in_bf_interior(base, bf, {piece.cone, piece.to}))
                throw Error(ErrorKind::HypothesisViolated, "a bounded edge reaches the boundary of B_f");
    TropCurve out;
    out.vertices = cyl.vertices;
    out.edges = cyl.edges;
    std::vector<int> boundary;
    for (std::size_t k = 0; k < cyl.legs.size(); ++k) {
        const auto& l = cyl.legs[k];
        StraightWalk w = base.walk(cyl.vertices[l.at], l.dir);
        auto x = exit_point(base, bf, w);
        if (!x)
            throw Error(ErrorKind::HypothesisViolated, "end " + std::to_string(k + 1) + " never leaves B_f");
        if (!(retract_end(base, bf, cyl.vertices[l.at], l.dir) == *x))
            throw Error(ErrorKind::HypothesisViolated,
                        "end " + std::to_string(k + 1) + " does not run inside a strip parallel to it");
        int idx = static_cast<int>(out.vertices.size());
        out.vertices.push_back(*x);
        out.edges.push_back({l.at, idx, l.dir, l.speed});
        boundary.push_back(idx);
    }
    out.marks = boundary;
    for (int m : cyl.marks)
        out.marks.push_back(m);
    return make_simple(base, out);
}

/// A region holding the bounded parts of the given cylinders, with a strip
/// parallel to each of their ends.
inline BfRegion bf_for_cylinders(const Base& base, const std::vector<TropCurve>& cylinders)
{
    std::vector<BasePoint> points;
    std::vector<EndRay> ends;
    for (const auto& c0 : cylinders) {
        TropCurve c = canonical_curve(base, c0);
        for (const auto& v : c.vertices)
            points.push_back(v);
        for (const auto& e : c.edges)
            for (const auto& piece : trop::edge_walk(base, c, e).pieces) {
                points.push_back({piece.cone, piece.from});
                points.push_back({piece.cone, piece.to});
            }
        for (const auto& l : c.legs) {
            for (const auto& piece : base.walk(c.vertices[l.at], l.dir).pieces)
                points.push_back({piece.cone, piece.from});
            ends.push_back(end_ray(base, c.vertices[l.at], l.dir));
        }
    }
    return bf_covering(base, points, ends);
}

namespace trop {

/// Canonical string of the subtree spanned by `edge_mask`, rooted at `root`.
/// Vertices are labelled by image and marks, edges by their weight at the
/// parent; straight 2-valent unlabelled vertices are passed through.
inline std::string canonical_string(const Base& base, const TropCurve& c, int root, const std::vector<bool>& edge_mask,
                                    const std::map<int, std::string>& labels)
{
    auto adj = adjacency(c);
    auto degree = [&](int v) {
        int d = 0;
        for (int k : adj[v])
            d += edge_mask[k] ? 1 : 0;
        return d;
    };
    auto passable = [&](int v) {
        return !c.vertices[v].is_origin() && !labels.count(v) && degree(v) == 2 &&
               weight_sum(weights_at(base, c, v, &edge_mask)).is_zero();
    };
    std::function<std::string(int, int)> rec = [&](int v, int from_edge) -> std::string {
        std::string s = "(" + c.vertices[v].str();
        auto it = labels.find(v);
        if (it != labels.end())
            s += "#" + it->second;
        std::vector<std::string> kids;
        for (int k : adj[v]) {
            if (!edge_mask[k] || k == from_edge)
                continue;
            std::string w = c.vertices[v].is_origin() ? "O" : leaving(base, c, k, v).first.str() + "x" +
                                                                 leaving(base, c, k, v).second.str();
            int u = other_end(c.edges[k], v);
            int via = k;
            while (passable(u)) {
                int next = -1;
                for (int k2 : adj[u])
                    if (edge_mask[k2] && k2 != via)
                        next = k2;
                via = next;
                u = other_end(c.edges[next], u);
            }
            kids.push_back(w + "->" + rec(u, via));
        }
        std::sort(kids.begin(), kids.end());
        for (const auto& k : kids)
            s += " " + k;
        return s + ")";
    };
    return rec(root, -1);
}

/// Edges of the convex hull of the given vertices.
inline std::vector<bool> hull_mask(const TropCurve& c, const std::vector<int>& vs)
{
    std::vector<bool> mask(c.edges.size(), false);
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j)
            for (int k : path_edges(c, vs[i], vs[j]))
                mask[k] = true;
    return mask;
}

inline std::string hull_signature(const Base& base, const TropCurve& c)
{
    std::vector<int> boundary(c.marks.begin(), c.marks.end() - 1);
    std::vector<bool> mask = hull_mask(c, boundary);
    std::map<int, std::string> labels;
    for (std::size_t i = 0; i < c.marks.size(); ++i)
        labels[c.marks[i]] += (labels[c.marks[i]].empty() ? "" : ",") + std::to_string(i + 1);
    return canonical_string(base, c, c.interior_mark(), mask, labels);
}

} // namespace trop

/// Whether a simple curve in B_f belongs to the subset defined by a reference
/// cylinder: same interior mark image and, as a mapped tree, the same hull of
/// the boundary marks.
inline bool is_in_T(const Base& base, const BfRegion& bf, const TropCurve& curve, const TropCurve& reference)
{
    TropCurve ref = cylinder_to_Bf(base, bf, reference);
    TropCurve c = canonical_curve(base, curve);
    if (c.marks.size() != ref.marks.size())
        return false;
    if (!(c.vertices[c.interior_mark()] == ref.vertices[ref.interior_mark()]))
        return false;
    std::vector<int> boundary(c.marks.begin(), c.marks.end() - 1);
    std::vector<bool> mask = trop::hull_mask(c, boundary);
    std::set<int> hull;
    for (std::size_t k = 0; k < mask.size(); ++k)
        if (mask[k]) {
            hull.insert(c.edges[k].tail);
            hull.insert(c.edges[k].head);
        }
    if (boundary.size() > 1 && !hull.count(c.interior_mark()))
        return false;
    return trop::hull_signature(base, c) == trop::hull_signature(base, ref);
}

/// In M^d: the path from mark 1 to mark 3 meets the path from mark 2 to mark
/// 4, and the interior mark lies on both.
inline bool in_Md(const TropCurve& c)
{
    if (c.marks.size() != 5)
        return false;
    auto p13 = trop::vertices_of(c, trop::path_edges(c, c.marks[0], c.marks[2]), c.marks[0]);
    auto p24 = trop::vertices_of(c, trop::path_edges(c, c.marks[1], c.marks[3]), c.marks[1]);
    return p13.count(c.marks[4]) && p24.count(c.marks[4]);
}

// ---------------------------------------------------------------------------
// Twigs

struct TwigResult {
    bool ok = false;
    BasePoint ray;       // primitive direction of the ray through O holding the image
    int witness = -1;
    std::string reason;
};

/// The image of a tree balanced away from its root and O lies on one ray
/// from O. Propagates from the leaves to the root; a failed hypothesis is
/// reported with the offending vertex.
inline TwigResult twig_check(const Base& base, const TropCurve& tree0, int root)
{
    TwigResult r;
    TropCurve t = canonical_curve(base, tree0);
    if (!trop::is_tree(t) || root < 0 || root >= static_cast<int>(t.vertices.size())) {
        r.reason = "not a rooted tree";
        return r;
    }
    for (const auto& e : t.edges)
        if (!trop::reaches(base, t, e)) {
            r.witness = e.tail;
            r.reason = "an edge does not reach its head";
            return r;
        }
    if (t.vertices[root].is_origin()) {
        r.witness = root;
        r.reason = "the root maps to O";
        return r;
    }
    for (std::size_t v = 0; v < t.vertices.size(); ++v) {
        if (static_cast<int>(v) == root || t.vertices[v].is_origin())
            continue;
        if (!trop::weight_sum(trop::weights_at(base, t, static_cast<int>(v))).is_zero()) {
            r.witness = static_cast<int>(v);
            r.reason = "unbalanced at " + t.vertices[v].str();
            return r;
        }
    }
    // leaves first: order vertices by distance from the root, then reverse
    auto adj = trop::adjacency(t);
    std::vector<int> order{root}, parent_edge(t.vertices.size(), -1);
    std::vector<bool> seen(t.vertices.size(), false);
    seen[root] = true;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int k : adj[order[i]]) {
            int u = trop::other_end(t.edges[k], order[i]);
            if (!seen[u]) {
                seen[u] = true;
                parent_edge[u] = k;
                order.push_back(u);
            }
        }
    auto radial = [&](int k) {
        const auto& e = t.edges[k];
        // the tail is never O; the edge is radial iff it points along the tail's position
        return det(t.vertices[e.tail].coords, RatVec(e.dir)) == 0;
    };
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        for (int k : adj[v]) {
            if (k == parent_edge[v])
                continue;
            if (!radial(k)) {
                r.witness = v;
                r.reason = "a child edge is not radial";
                return r;
            }
        }
    }
    r.ray = base.canonical({t.vertices[root].cone, RatVec(primitive_direction(t.vertices[root].coords))});
    for (std::size_t v = 0; v < t.vertices.size(); ++v) {
        const auto& p = t.vertices[v];
        if (p.is_origin())
            continue;
        if (p.cone != r.ray.cone || det(p.coords, r.ray.coords) != 0) {
            r.witness = static_cast<int>(v);
            r.reason = "vertex off the ray";
            return r;
        }
    }
    r.ok = true;
    return r;
}

// ---------------------------------------------------------------------------
// Rigidity

namespace trop {

using RatMatrix = std::vector<std::vector<Rational>>;

/// Basis of the kernel of m (ncols columns), by reduced row echelon form.
inline std::vector<std::vector<Rational>> nullspace(RatMatrix m, std::size_t ncols)
{
    std::vector<int> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < ncols && row < m.size(); ++col) {
        std::size_t p = row;
        while (p < m.size() && m[p][col] == 0)
            ++p;
        if (p == m.size())
            continue;
        std::swap(m[p], m[row]);
        Rational inv = 1 / m[row][col];
        for (auto& x : m[row])
            x *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == row || m[i][col] == 0)
                continue;
            Rational f = m[i][col];
            for (std::size_t j = 0; j < ncols; ++j)
                m[i][j] -= f * m[row][j];
        }
        pivot_col.push_back(static_cast<int>(col));
        ++row;
    }
    std::vector<bool> is_pivot(ncols, false);
    for (int c : pivot_col)
        is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f])
            continue;
        std::vector<Rational> v(ncols, Rational(0));
        v[f] = 1;
        for (std::size_t i = 0; i < pivot_col.size(); ++i)
            v[pivot_col[i]] = -m[i][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

inline std::size_t rank_of(RatMatrix m, std::size_t ncols)
{
    return ncols - nullspace(std::move(m), ncols).size();
}

} // namespace trop

struct RigidityReport {
    std::size_t unknowns = 0;
    std::size_t deformations = 0;   // dimension of the admissible first-order deformations
    std::size_t path_moves = 0;     // of those, the dimension seen on the hull of the boundary marks
    int trials = 0;
    int trials_moved = 0;           // sampled deformations that moved the hull and stayed admissible
    bool rigid() const { return path_moves == 0; }
};

/// Moving vertex images with fixed edge directions: each edge keeps its
/// direction, edges into O stay radial, boundary points stay on their
/// boundary cell, and the interior mark stays put unless released.
inline RigidityReport rigidity_report(const Base& base, const BfRegion& bf, const TropCurve& c0, std::size_t n,
                                      bool fix_mark = true, int trials = 8, unsigned seed = 1,
                                      const Rational& step = Rational(1, 1000))
{
    TropCurve c = canonical_curve(base, c0);
    auto bad = validate_trop_curve(base, bf, c, n);
    if (!bad.empty())
        throw Error(ErrorKind::HypothesisViolated, bad.front().detail);
    std::size_t nv = c.vertices.size();
    std::vector<int> col(nv, -1);
    std::size_t ncols = 0;
    for (std::size_t v = 0; v < nv; ++v)
        if (!c.vertices[v].is_origin()) {
            col[v] = static_cast<int>(ncols);
            ncols += 2;
        }
    trop::RatMatrix m;
    auto row = [&]() -> std::vector<Rational>& { return m.emplace_back(ncols, Rational(0)); };
    auto pin = [&](int v) {
        if (col[v] < 0)
            return;
        row()[col[v]] = 1;
        row()[col[v] + 1] = 1;
    };
    if (fix_mark)
        pin(c.interior_mark());
    for (std::size_t v = 0; v < nv; ++v) {
        auto cell = boundary_cell(base, bf, c.vertices[v]);
        if (!cell)
            continue;
        if (cell->corner) {
            pin(static_cast<int>(v));
            continue;
        }
        auto& r = row();
        r[col[v]] = 1 / bf.cutoff[cell->index];
        r[col[v] + 1] = 1 / bf.cutoff[base.wrap(cell->index + 1)];
    }
    for (const auto& e : c.edges) {
        const RatVec& pt = c.vertices[e.tail].coords;
        if (c.vertices[e.head].is_origin()) {
            // det(position, delta) = 0
            auto& r = row();
            r[col[e.tail]] = -pt.y;
            r[col[e.tail] + 1] = pt.x;
            continue;
        }
        StraightWalk w = trop::edge_walk(base, c, e);
        const auto& last = w.pieces.back();
        UniMatrix t = w.transport;
        BasePoint h = base.canonical({last.cone, last.to});
        if (h.cone != last.cone)
            t = base.chart_transition(h.cone) * t;
        IntVec dh = t(e.dir);
        // det(dh, delta_head - t * delta_tail) = 0
        RatVec nrm{Rational(-dh.y), Rational(dh.x)};
        auto& r = row();
        r[col[e.head]] += nrm.x;
        r[col[e.head] + 1] += nrm.y;
        // nrm . (t delta) = (t^T nrm) . delta
        r[col[e.tail]] -= nrm.x * Rational(t.a()) + nrm.y * Rational(t.c());
        r[col[e.tail] + 1] -= nrm.x * Rational(t.b()) + nrm.y * Rational(t.d());
    }
    auto basis = trop::nullspace(m, ncols);
    RigidityReport rep;
    rep.unknowns = ncols;
    rep.deformations = basis.size();

    std::vector<int> boundary(c.marks.begin(), c.marks.end() - 1);
    std::vector<bool> mask = trop::hull_mask(c, boundary);
    std::set<int> hull{c.interior_mark()};
    for (std::size_t k = 0; k < mask.size(); ++k)
        if (mask[k]) {
            hull.insert(c.edges[k].tail);
            hull.insert(c.edges[k].head);
        }
    trop::RatMatrix restricted;
    for (const auto& b : basis) {
        std::vector<Rational> r;
        for (int v : hull)
            if (col[v] >= 0) {
                r.push_back(b[col[v]]);
                r.push_back(b[col[v] + 1]);
            }
        restricted.push_back(r);
    }
    rep.path_moves = restricted.empty() ? 0 : trop::rank_of(restricted, restricted.front().size());

    // Sampled finite moves: a deformation is realised when every edge still
    // reaches its moved head and the curve stays admissible.
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (int trial = 0; trial < trials && !basis.empty(); ++trial) {
        ++rep.trials;
        std::vector<Rational> delta(ncols, Rational(0));
        for (const auto& b : basis) {
            int k = coef(rng);
            for (std::size_t i = 0; i < ncols; ++i)
                delta[i] += Rational(k) * b[i];
        }
        TropCurve moved = c;
        std::vector<UniMatrix> moved_chart(nv);
        bool ok = true;
        for (std::size_t v = 0; v < nv && ok; ++v) {
            if (col[v] < 0)
                continue;
            RatVec d{step * delta[col[v]], step * delta[col[v] + 1]};
            if (d.is_zero())
                continue;
            Integer den = boost::multiprecision::lcm(denominator(d.x), denominator(d.y));
            IntVec di{numerator(Rational(d.x * den)), numerator(Rational(d.y * den))};
            try {
                StraightWalk w = base.walk(c.vertices[v], primitive(di), Rational(lattice_length(di)) / Rational(den));
                const auto& last = w.pieces.back();
                moved.vertices[v] = base.canonical({last.cone, last.to});
                UniMatrix t = w.transport;
                if (moved.vertices[v].cone != last.cone)
                    t = base.chart_transition(moved.vertices[v].cone) * t;
                moved_chart[v] = t;
            } catch (const Error&) {
                ok = false;
            }
        }
        if (!ok)
            continue;
        for (auto& e : moved.edges)
            e.dir = moved_chart[e.tail](e.dir);
        bool admissible = validate_trop_curve(base, bf, moved, n).empty() &&
                          (!fix_mark || moved.vertices[c.interior_mark()] == c.vertices[c.interior_mark()]);
        bool changed = false;
        for (int v : hull)
            changed = changed || !(moved.vertices[v] == c.vertices[v]);
        if (admissible && changed)
            ++rep.trials_moved;
    }
    return rep;
}

inline bool rigidity_probe(const Base& base, const BfRegion& bf, const TropCurve& c, std::size_t n,
                           bool fix_mark = true)
{
    return rigidity_report(base, bf, c, n, fix_mark).rigid();
}

// ---------------------------------------------------------------------------
// The five-pointed curves G_r and G'_r

/// A value in [0, +inf].
struct ExtRational {
    std::optional<Rational> value;

    static ExtRational infinity() { return {}; }
    static ExtRational of(const Rational& r)
    {
        if (r < 0)
            throw Error(ErrorKind::InvalidData, "negative length");
        return {r};
    }
    bool is_infinite() const { return !value.has_value(); }
    bool is_zero() const { return value && *value == 0; }
    std::string str() const { return value ? to_string(*value) : "inf"; }

    friend bool operator==(const ExtRational&, const ExtRational&) = default;
};

enum class DeltaGraph { G, Gprime };

inline const char* to_string(DeltaGraph g) { return g == DeltaGraph::G ? "G" : "G'"; }

/// Legs l^i_j are named "i.j"; "5" is the fifth leg.
struct FiveMarkedCurve {
    std::vector<std::set<std::string>> legs;                   // per vertex
    std::vector<std::tuple<int, int, ExtRational>> edges;

    /// Leg groups of the outer vertices; empty when the curve is the star.
    std::set<std::set<std::string>> leg_partition() const
    {
        std::set<std::set<std::string>> out;
        for (const auto& l : legs)
            if (!l.count("5"))
                out.insert(l);
        return out;
    }

    std::string str() const
    {
        std::vector<std::string> parts;
        for (std::size_t v = 0; v < legs.size(); ++v) {
            std::string s = "{";
            for (const auto& l : legs[v])
                s += (s.size() > 1 ? "," : "") + l;
            s += "}";
            for (const auto& [a, b, len] : edges)
                if (static_cast<std::size_t>(a) == v || static_cast<std::size_t>(b) == v)
                    if (!legs[v].count("5"))
                        s += ":" + len.str();
            parts.push_back(s);
        }
        std::sort(parts.begin(), parts.end());
        std::string out;
        for (const auto& p : parts)
            out += p;
        return out;
    }

    friend bool operator==(const FiveMarkedCurve& a, const FiveMarkedCurve& b) { return a.str() == b.str(); }
};

/// G_r or G'_r; at r = 0 both vertical edges contract to the common star.
inline FiveMarkedCurve delta_curve(const ExtRational& r, DeltaGraph which)
{
    FiveMarkedCurve c;
    if (r.is_zero()) {
        c.legs.push_back({"1.1", "1.2", "2.1", "2.2", "5"});
        return c;
    }
    if (which == DeltaGraph::G) {
        c.legs.push_back({"2.1", "1.2"});
        c.legs.push_back({"1.1", "2.2"});
    } else {
        c.legs.push_back({"1.1", "1.2"});
        c.legs.push_back({"2.1", "2.2"});
    }
    c.legs.push_back({"5"});
    c.edges.push_back({0, 2, r});
    c.edges.push_back({1, 2, r});
    return c;
}

// ---------------------------------------------------------------------------
// Splitting double cylinders

namespace trop {

/// Leg index of "i.j" in the order (1.1, 1.2, 2.1, 2.2).
inline int leg_index(const std::string& name)
{
    static const std::map<std::string, int> idx{{"1.1", 0}, {"1.2", 1}, {"2.1", 2}, {"2.2", 3}};
    return idx.at(name);
}

/// Pairs of leg indices, each ordered by the lower index j of l^i_j.
inline std::vector<std::pair<int, int>> leg_pairs(DeltaGraph which)
{
    std::vector<std::pair<int, int>> out;
    for (const auto& group : delta_curve(ExtRational::infinity(), which).leg_partition()) {
        std::vector<std::string> g(group.begin(), group.end());
        std::sort(g.begin(), g.end(), [](const std::string& a, const std::string& b) {
            return std::make_pair(a.substr(2), a) < std::make_pair(b.substr(2), b);
        });
        out.push_back({leg_index(g[0]), leg_index(g[1])});
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace trop

/// The two cylinders through the junction: for G' the extensions of L1 and
/// L2, for G the glued spine L3 and the straight line L4 through the junction.
inline std::pair<TropCurve, TropCurve> split_double_cylinder(const Base& base, const TropCurve& dc0, DeltaGraph which)
{
    TropCurve dc = canonical_curve(base, dc0);
    if (!validate_cylinder(base, dc, 4).empty())
        throw Error(ErrorKind::NotInTd, "not a double cylinder");
    int v5 = dc.marks[0];
    auto pairs = trop::leg_pairs(which);
    std::vector<std::vector<int>> paths;
    std::vector<std::set<int>> verts;
    for (const auto& [a, b] : pairs) {
        paths.push_back(trop::path_edges(dc, dc.legs[a].at, dc.legs[b].at));
        verts.push_back(trop::vertices_of(dc, paths.back(), dc.legs[a].at));
    }
    std::set<int> common;
    for (int v : verts[0])
        if (verts[1].count(v))
            common.insert(v);
    if (common != std::set<int>{v5})
        throw Error(ErrorKind::NotInTd, "the two paths do not meet exactly at the marked point");

    // every other edge hangs off one path; assign it by flooding away from the paths
    std::vector<int> owner(dc.edges.size(), -1);
    std::vector<int> vowner(dc.vertices.size(), -1);
    for (int side = 0; side < 2; ++side) {
        for (int k : paths[side])
            owner[k] = side;
        for (int v : verts[side])
            if (vowner[v] < 0)
                vowner[v] = side;
    }
    vowner[v5] = 0;
    auto adj = trop::adjacency(dc);
    bool grew = true;
    while (grew) {
        grew = false;
        for (std::size_t k = 0; k < dc.edges.size(); ++k) {
            if (owner[k] >= 0)
                continue;
            int s = vowner[dc.edges[k].tail] >= 0 ? vowner[dc.edges[k].tail] : vowner[dc.edges[k].head];
            if (s < 0)
                continue;
            owner[k] = s;
            vowner[dc.edges[k].tail] = vowner[dc.edges[k].head] = s;
            grew = true;
        }
    }
    auto extract = [&](int side) {
        TropCurve out;
        std::map<int, int> re;
        auto take = [&](int v) {
            auto it = re.find(v);
            if (it != re.end())
                return it->second;
            int i = static_cast<int>(out.vertices.size());
            out.vertices.push_back(dc.vertices[v]);
            re[v] = i;
            return i;
        };
        take(v5);
        for (std::size_t k = 0; k < dc.edges.size(); ++k)
            if (owner[k] == side) {
                const auto& e = dc.edges[k];
                out.edges.push_back({take(e.tail), take(e.head), e.dir, e.speed});
            }
        for (int li : {pairs[side].first, pairs[side].second}) {
            const auto& l = dc.legs[li];
            out.legs.push_back({take(l.at), l.dir, l.speed});
        }
        out.marks = {re.at(v5)};
        return out;
    };
    return {extract(0), extract(1)};
}

/// Inverse of split_double_cylinder: identify the marked vertices and put the
/// legs back in the order (1.1, 1.2, 2.1, 2.2).
inline TropCurve join_cylinders(const TropCurve& a, const TropCurve& b, DeltaGraph which)
{
    auto pairs = trop::leg_pairs(which);
    TropCurve out = a;
    std::map<int, int> re;
    re[b.marks[0]] = a.marks[0];
    for (std::size_t v = 0; v < b.vertices.size(); ++v)
        if (!re.count(static_cast<int>(v))) {
            re[static_cast<int>(v)] = static_cast<int>(out.vertices.size());
            out.vertices.push_back(b.vertices[v]);
        }
    for (const auto& e : b.edges)
        out.edges.push_back({re.at(e.tail), re.at(e.head), e.dir, e.speed});
    std::vector<TropLeg> legs(4);
    legs[pairs[0].first] = a.legs[0];
    legs[pairs[0].second] = a.legs[1];
    legs[pairs[1].first] = {re.at(b.legs[0].at), b.legs[0].dir, b.legs[0].speed};
    legs[pairs[1].second] = {re.at(b.legs[1].at), b.legs[1].dir, b.legs[1].speed};
    out.legs = legs;
    return out;
}

/// Structural equality of cylinders: same mapped tree with the same labelled
/// ends and mark, up to relabelling vertices.
inline bool same_cylinder(const Base& base, const TropCurve& a0, const TropCurve& b0)
{
    TropCurve a = canonical_curve(base, a0), b = canonical_curve(base, b0);
    if (a.legs.size() != b.legs.size() || a.marks.size() != 1 || b.marks.size() != 1)
        return false;
    auto sig = [&](const TropCurve& c) {
        std::map<int, std::string> labels;
        labels[c.marks[0]] = "m";
        for (std::size_t i = 0; i < c.legs.size(); ++i)
            labels[c.legs[i].at] += ",e" + std::to_string(i + 1) + ":" + c.legs[i].dir.str() + "x" +
                                    c.legs[i].speed.str();
        return trop::canonical_string(base, c, c.marks[0], std::vector<bool>(c.edges.size(), true), labels);
    };
    return sig(a) == sig(b);
}

} // namespace cylinders
