#pragma once

// The bounded region B_f and the unbounded cells around it.
//
// In cone c the region is the triangle a / R_c + b / R_{c+1} <= 1, where R_i
// is the cutoff on ray i. The boundary segment of cone c is parametrised by
// t in [0, 1], from the corner on ray c to the corner on ray c + 1. Beyond it
// lie strips, each swept from a sub-interval [t0, t1] by a fixed direction of
// the cone, and wedges filling the gaps between strips and rays.

#include "cylinders/spine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cylinders {

struct Strip {
    IntVec dir;     // primitive, in the cone's chart
    Rational t0{0};
    Rational t1{0};

    friend bool operator==(const Strip&, const Strip&) = default;
};

struct BfRegion {
    std::vector<Rational> cutoff;             // per ray
    std::vector<std::vector<Strip>> strips;   // per cone, ordered by t

    static BfRegion uniform(int l, const Rational& r)
    {
        return {std::vector<Rational>(l, r), std::vector<std::vector<Strip>>(l)};
    }
};

inline void require_valid_bf(const Base& base, const BfRegion& bf)
{
    if (static_cast<int>(bf.cutoff.size()) != base.l() || static_cast<int>(bf.strips.size()) != base.l())
        throw Error(ErrorKind::InvalidData, "B_f needs one cutoff per ray and a strip list per cone");
    for (const auto& r : bf.cutoff)
        if (r <= 0)
            throw Error(ErrorKind::InvalidData, "cutoffs must be positive");
    for (int c = 0; c < base.l(); ++c) {
        IntVec prev{1, 0};
        Rational last_t = 0;
        bool first = true;
        for (const auto& s : bf.strips[c]) {
            const IntVec& w = s.dir;
            if (w.is_zero() || w.x < 0 || w.y < 0 || !is_primitive(w))
                throw Error(ErrorKind::InvalidData, "strip direction " + w.str() + " is not a primitive vector of its cone");
            if (s.t0 < 0 || s.t1 > 1 || s.t0 > s.t1 || (!first && s.t0 <= last_t))
                throw Error(ErrorKind::InvalidData, "strips of cone " + std::to_string(c + 1) + " overlap or leave the segment");
            if (det(prev, w) < 0 || (!first && det(prev, w) == 0))
                throw Error(ErrorKind::InvalidData, "strips of cone " + std::to_string(c + 1) + " would meet beyond B_f");
            prev = w;
            last_t = s.t1;
            first = false;
        }
        if (det(prev, IntVec{0, 1}) < 0)
            throw Error(ErrorKind::InvalidData, "strip direction outside its cone");
    }
}

namespace bfdetail {

inline Rational level(const Rational& r1, const Rational& r2, const RatVec& p) { return p.x / r1 + p.y / r2; }

/// An edge of an unbounded cell: the ray from `at` in direction `dir`.
struct Border {
    RatVec at;
    IntVec dir;
};

/// Borders of the unbounded cells of cone c, in counterclockwise order: ray
/// c beyond its corner, both edges of every strip, ray c + 1 beyond its corner.
inline std::vector<Border> borders(const Base& base, const BfRegion& bf, int c)
{
    c = base.wrap(c);
    Rational r1 = bf.cutoff[c], r2 = bf.cutoff[base.wrap(c + 1)];
    auto at = [&](const Rational& t) { return RatVec{(1 - t) * r1, t * r2}; };
    std::vector<Border> out{{at(0), {1, 0}}};
    for (const auto& s : bf.strips[c]) {
        out.push_back({at(s.t0), s.dir});
        out.push_back({at(s.t1), s.dir});
    }
    out.push_back({at(1), {0, 1}});
    return out;
}

/// Onto the boundary segment of cone c from inside the cell between borders
/// k and k + 1: along the strip direction, or centrally from the apex of a wedge.
inline RatVec project_in_cell(const Base& base, const BfRegion& bf, int c, const std::vector<Border>& bd,
                              std::size_t k, const RatVec& p)
{
    Rational r1 = bf.cutoff[base.wrap(c)], r2 = bf.cutoff[base.wrap(c + 1)];
    const Border& a = bd[k];
    const Border& b = bd[k + 1];
    if (det(a.dir, b.dir) == 0) {
        RatVec w(a.dir);
        return p - ((level(r1, r2, p) - 1) / level(r1, r2, w)) * w;
    }
    // apex: a.at + s a.dir = b.at + u b.dir
    RatVec da(a.dir), db(b.dir);
    Rational s = det(b.at - a.at, db) / det(da, db);
    RatVec apex = a.at + s * da;
    Rational la = level(r1, r2, apex);
    Rational r = (1 - la) / (level(r1, r2, p) - la);
    return apex + r * (p - apex);
}

/// Cell holding p (beyond the segment of cone c), as an index k.
inline std::size_t cell_of(const std::vector<Border>& bd, const RatVec& p)
{
    for (std::size_t k = 0; k + 1 < bd.size(); ++k)
        if (det(RatVec(bd[k].dir), p - bd[k].at) >= 0 && det(RatVec(bd[k + 1].dir), p - bd[k + 1].at) <= 0)
            return k;
    return bd.size() - 2;
}

/// Cell eventually holding the ray from p in direction u.
inline std::size_t asymptotic_cell(const std::vector<Border>& bd, const RatVec& p, const IntVec& u)
{
    auto side = [&](std::size_t k) {
        Integer d = det(bd[k].dir, u);
        if (d != 0)
            return d > 0 ? 1 : -1;
        Rational e = det(RatVec(bd[k].dir), p - bd[k].at);
        return e > 0 ? 1 : (e < 0 ? -1 : 0);
    };
    for (std::size_t k = 0; k + 1 < bd.size(); ++k)
        if (side(k) >= 0 && side(k + 1) <= 0)
            return k;
    return bd.size() - 2;
}

} // namespace bfdetail

/// a / R_c + b / R_{c+1}; 1 on the boundary.
inline Rational bf_level(const Base& base, const BfRegion& bf, const BasePoint& p0)
{
    BasePoint p = base.canonical(p0);
    if (p.is_origin())
        return 0;
    int c = p.cone;
    return bfdetail::level(bf.cutoff[c], bf.cutoff[base.wrap(c + 1)], p.coords);
}

inline bool in_bf(const Base& base, const BfRegion& bf, const BasePoint& p) { return bf_level(base, bf, p) <= 1; }
inline bool in_bf_interior(const Base& base, const BfRegion& bf, const BasePoint& p)
{
    return bf_level(base, bf, p) < 1;
}

/// Position of a point of the boundary segment of cone c.
inline Rational segment_parameter(const Base& base, const BfRegion& bf, int c, const RatVec& q)
{
    return q.y / bf.cutoff[base.wrap(c + 1)];
}

/// A cell of the boundary: a 0-cell (a corner on ray `index`, or a strip
/// edge on the segment of cone `index`), or the relative interior of a
/// 1-cell of the segment of cone `index`, facing a strip or a wedge.
struct BoundaryCell {
    bool corner = false;
    int index = 0;
    std::optional<IntVec> strip;   // direction of the strip beyond a 1-cell

    friend bool operator==(const BoundaryCell&, const BoundaryCell&) = default;
};

inline std::optional<BoundaryCell> boundary_cell(const Base& base, const BfRegion& bf, const BasePoint& p0)
{
    if (bf_level(base, bf, p0) != 1)
        return std::nullopt;
    BasePoint p = base.canonical(p0);
    if (p.coords.y == 0)
        return BoundaryCell{true, p.cone, std::nullopt};
    Rational t = segment_parameter(base, bf, p.cone, p.coords);
    for (const auto& s : bf.strips[p.cone]) {
        if (t == s.t0 || t == s.t1)
            return BoundaryCell{true, p.cone, std::nullopt};
        if (s.t0 < t && t < s.t1)
            return BoundaryCell{false, p.cone, s.dir};
    }
    return BoundaryCell{false, p.cone, std::nullopt};
}

inline BasePoint bf_corner(const Base& base, const BfRegion& bf, int ray)
{
    return {base.wrap(ray), {bf.cutoff[base.wrap(ray)], 0}};
}

inline BasePoint retract_to_Bf(const Base& base, const BfRegion& bf, const BasePoint& p0)
{
    BasePoint p = base.canonical(p0);
    if (in_bf(base, bf, p))
        return p;
    if (p.coords.y == 0)
        return bf_corner(base, bf, p.cone);
    auto bd = bfdetail::borders(base, bf, p.cone);
    std::size_t k = bfdetail::cell_of(bd, p.coords);
    return base.canonical({p.cone, bfdetail::project_in_cell(base, bf, p.cone, bd, k, p.coords)});
}

/// Limit of the retraction along the straight continuation from `start` in
/// direction `dir`.
inline BasePoint retract_end(const Base& base, const BfRegion& bf, const BasePoint& start, const IntVec& dir)
{
    StraightWalk w = base.walk(start, dir);
    if (w.end != WalkEnd::Escaped)
        throw Error(ErrorKind::PathThroughOrigin, "the continuation does not escape");
    const auto& last = w.pieces.back();
    int c = last.cone;
    auto bd = bfdetail::borders(base, bf, c);
    std::size_t k = bfdetail::asymptotic_cell(bd, last.from, last.dir);
    if (det(bd[k].dir, bd[k + 1].dir) == 0)
        return base.canonical({c, bfdetail::project_in_cell(base, bf, c, bd, k, last.from)});
    // far along the ray the central projection tends to the apex line parallel to it
    Rational r1 = bf.cutoff[c], r2 = bf.cutoff[base.wrap(c + 1)];
    RatVec da(bd[k].dir), db(bd[k + 1].dir);
    RatVec apex = bd[k].at + (det(bd[k + 1].at - bd[k].at, db) / det(da, db)) * da;
    RatVec u(last.dir);
    Rational r = (1 - bfdetail::level(r1, r2, apex)) / bfdetail::level(r1, r2, u);
    return base.canonical({c, apex + r * u});
}

/// Whether the end from `start` in direction `dir` eventually runs inside a
/// strip parallel to it.
inline bool end_in_parallel_strip(const Base& base, const BfRegion& bf, const BasePoint& start, const IntVec& dir)
{
    StraightWalk w = base.walk(start, dir);
    if (w.end != WalkEnd::Escaped)
        return false;
    const auto& last = w.pieces.back();
    auto bd = bfdetail::borders(base, bf, last.cone);
    std::size_t k = bfdetail::asymptotic_cell(bd, last.from, last.dir);
    return k % 2 == 1 && det(bd[k].dir, last.dir) == 0;
}

/// First point where a walk leaves B_f, if it does.
inline std::optional<BasePoint> exit_point(const Base& base, const BfRegion& bf, const StraightWalk& w)
{
    for (const auto& piece : w.pieces) {
        int c = piece.cone;
        Rational r1 = bf.cutoff[c], r2 = bf.cutoff[base.wrap(c + 1)];
        Rational g0 = piece.from.x / r1 + piece.from.y / r2;
        Rational rate = Rational(piece.dir.x) / r1 + Rational(piece.dir.y) / r2;
        if (g0 >= 1) {
            if (rate > 0 || g0 > 1)
                return base.canonical({c, piece.from});
            continue;
        }
        if (rate <= 0)
            continue;
        Rational t = (1 - g0) / rate;
        if (piece.unbounded || piece.s_from + t <= piece.s_to)
            return base.canonical({c, piece.from + t * RatVec(piece.dir)});
    }
    return std::nullopt;
}

/// An unbounded end: the straight ray from `from` in direction `dir`, both
/// in the chart of cone `cone`, after its last ray crossing.
struct EndRay {
    int cone = 0;
    RatVec from;
    IntVec dir;
};

inline EndRay end_ray(const Base& base, const BasePoint& start, const IntVec& dir)
{
    StraightWalk w = base.walk(start, dir);
    if (w.end != WalkEnd::Escaped)
        throw Error(ErrorKind::PathThroughOrigin, "an end does not escape");
    const auto& last = w.pieces.back();
    return {last.cone, last.from, last.dir};
}

/// Uniform cutoffs with margin around the given points and around every
/// meeting of two ends in a common cone; a strip around each group of
/// parallel ends where they leave.
inline BfRegion bf_covering(const Base& base, const std::vector<BasePoint>& points, const std::vector<EndRay>& ends)
{
    Rational m = 1;
    auto see = [&](const BasePoint& p0) {
        BasePoint p = base.canonical(p0);
        m = std::max(m, Rational(p.coords.x + p.coords.y));
    };
    for (const auto& p : points)
        see(p);
    for (const auto& e : ends)
        see({e.cone, e.from});
    for (std::size_t i = 0; i < ends.size(); ++i)
        for (std::size_t j = i + 1; j < ends.size(); ++j) {
            const EndRay& a = ends[i];
            const EndRay& b = ends[j];
            if (a.cone != b.cone || det(a.dir, b.dir) == 0)
                continue;
            RatVec da(a.dir), db(b.dir);
            Rational s = det(b.from - a.from, db) / det(da, db);
            Rational u = det(b.from - a.from, da) / det(da, db);
            if (s >= 0 && u >= 0)
                see({a.cone, a.from + s * da});
        }
    BfRegion bf = BfRegion::uniform(base.l(), 2 * m + 2);

    struct Group {
        IntVec dir;
        Rational lo, hi;
    };
    std::vector<std::vector<Group>> groups(base.l());
    for (const auto& e : ends) {
        Rational r1 = bf.cutoff[e.cone], r2 = bf.cutoff[base.wrap(e.cone + 1)];
        RatVec u(e.dir);
        RatVec x = e.from + ((1 - bfdetail::level(r1, r2, e.from)) / bfdetail::level(r1, r2, u)) * u;
        Rational t = x.y / r2;
        IntVec d = primitive(e.dir);
        auto& gs = groups[e.cone];
        auto it = std::find_if(gs.begin(), gs.end(), [&](const Group& g) { return g.dir == d; });
        if (it == gs.end())
            gs.push_back({d, t, t});
        else {
            it->lo = std::min(it->lo, t);
            it->hi = std::max(it->hi, t);
        }
    }
    for (int c = 0; c < base.l(); ++c) {
        auto& gs = groups[c];
        if (gs.empty())
            continue;
        std::sort(gs.begin(), gs.end(), [](const Group& a, const Group& b) { return a.lo < b.lo; });
        Rational gap = 1;
        Rational prev = 0;
        for (const auto& g : gs) {
            if (g.lo < prev)
                throw Error(ErrorKind::InvalidData, "ends of cone " + std::to_string(c + 1) + " interleave");
            if (g.lo > prev)
                gap = std::min(gap, Rational(g.lo - prev));
            prev = g.hi;
        }
        if (prev < 1)
            gap = std::min(gap, Rational(1 - prev));
        Rational delta = gap / 3;
        for (const auto& g : gs)
            bf.strips[c].push_back({g.dir, std::max(Rational(0), Rational(g.lo - delta)),
                                    std::min(Rational(1), Rational(g.hi + delta))});
    }
    require_valid_bf(base, bf);
    return bf;
}

/// The region for a set of extended spines.
inline BfRegion bf_for(const Base& base, const std::vector<ExtendedSpine>& spines)
{
    std::vector<BasePoint> points;
    std::vector<EndRay> ends;
    for (const auto& e : spines) {
        for (const auto& v : e.core.vertices)
            points.push_back(v);
        for (std::size_t k = 0; k < e.core.edges.size(); ++k)
            for (const auto& piece : edge_walk(base, e.core, k).pieces) {
                points.push_back({piece.cone, piece.from});
                points.push_back({piece.cone, piece.to});
            }
        for (const Continuation* c : {&e.end1, &e.end2}) {
            for (const auto& p : c->polyline)
                points.push_back(p);
            BasePoint from = c->polyline.back();
            ends.push_back({c->final_cone, base.coords_in(from, c->final_cone).value(), c->final_dir});
        }
    }
    return bf_covering(base, points, ends);
}

struct SubdivisionReport {
    bool contained = true;      // cores and O strictly inside B_f
    bool parallel_ends = true;  // each end runs inside a strip parallel to it
    bool projection = true;     // the supplied fan contains every required ray
    std::vector<std::string> problems;

    bool pass() const { return contained && parallel_ends && projection; }
};

/// The rays B'_inf and the end directions, as canonical directions on B.
inline std::vector<BasePoint> required_rays(const Base& base, const BfRegion& bf,
                                            const std::vector<ExtendedSpine>& spines)
{
    std::vector<BasePoint> out;
    auto add = [&](int c, const IntVec& v) {
        BasePoint p = base.canonical({c, RatVec(primitive(v))});
        if (std::find(out.begin(), out.end(), p) == out.end())
            out.push_back(p);
    };
    for (int i = 0; i < base.l(); ++i) {
        add(i, {1, 0});
        for (const auto& s : bf.strips[i])
            add(i, s.dir);
    }
    for (const auto& e : spines)
        for (const Continuation* c : {&e.end1, &e.end2})
            add(c->final_cone, c->final_dir);
    return out;
}

inline SubdivisionReport check_subdivision_conditions(const Base& base, const BfRegion& bf,
                                                      const std::vector<ExtendedSpine>& spines,
                                                      const std::optional<std::vector<BasePoint>>& fan = std::nullopt)
{
    require_valid_bf(base, bf);
    SubdivisionReport r;
    for (std::size_t i = 0; i < spines.size(); ++i) {
        const auto& e = spines[i];
        std::string tag = "spine " + std::to_string(i + 1);
        for (std::size_t k = 0; k < e.core.edges.size(); ++k)
            for (const auto& piece : edge_walk(base, e.core, k).pieces)
                for (const RatVec* q : {&piece.from, &piece.to})
                    if (!in_bf_interior(base, bf, {piece.cone, *q})) {
                        r.contained = false;
                        r.problems.push_back(tag + ": point " + BasePoint{piece.cone, *q}.str() +
                                             " is not in the interior of B_f");
                    }
        int end = 0;
        for (const Continuation* c : {&e.end1, &e.end2}) {
            ++end;
            BasePoint from{c->final_cone, base.coords_in(c->polyline.back(), c->final_cone).value()};
            if (!end_in_parallel_strip(base, bf, from, c->final_dir)) {
                r.parallel_ends = false;
                r.problems.push_back(tag + " end " + std::to_string(end) + ": no strip of cone " +
                                     std::to_string(c->final_cone + 1) + " parallel to " + c->final_dir.str() +
                                     " holds it");
            }
        }
    }
    if (fan) {
        for (const auto& req : required_rays(base, bf, spines)) {
            bool found = false;
            for (const auto& p : *fan) {
                BasePoint q = base.canonical(p);
                if (q.cone == req.cone && det(q.coords, req.coords) == 0 && q.coords.x * req.coords.x >= 0 &&
                    q.coords.y * req.coords.y >= 0) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                r.projection = false;
                r.problems.push_back("the fan lacks the ray " + req.str());
            }
        }
    }
    return r;
}

} // namespace cylinders
