#pragma once

// The tropical base B of a Looijenga pair: a cycle of l two-dimensional cones
// glued along rays, with the integral affine structure on B \ O determined by
// the self-intersection numbers of the boundary components.
//
// Every cone sigma_i = cone(rho_i, rho_{i+1}) carries its own linear chart in
// which rho_i = (1,0) and rho_{i+1} = (0,1). Crossing rho_i from sigma_{i-1}
// into sigma_i applies [[-d_i, 1], [-1, 0]], which realizes the relation
// v_{i-1} + v_{i+1} + d_i v_i = 0.

#include "cylinders/lattice.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cylinders {

struct Seed {
    int ray = 0;           // 0-based ray index
    std::string name;      // curve-class generator of the exceptional curve
};

struct LooijengaData {
    std::vector<long long> d;  // self-intersections D_i^2, cyclic
    std::vector<Seed> seeds;

    int l() const { return static_cast<int>(d.size()); }
};

/// A point of B: coefficients on the generators of one cone. Points on a ray
/// are stored in the cone starting at that ray (coords (a, 0)); the origin is
/// (0, 0) in cone 0.
struct BasePoint {
    int cone = 0;
    RatVec coords;

    bool is_origin() const { return coords.is_zero(); }
    friend bool operator==(const BasePoint&, const BasePoint&) = default;
    std::string str() const { return "c" + std::to_string(cone) + coords.str(); }
};

/// Integral tangent vector attached to a point other than O, in the chart of
/// the point's cone.
struct TangentVec {
    BasePoint at;
    IntVec vec;
};

enum class WalkEnd { Escaped, HitOrigin, ReachedTarget, ReachedLength, CrossingLimit };

inline const char* to_string(WalkEnd e)
{
    switch (e) {
    case WalkEnd::Escaped: return "escaped";
    case WalkEnd::HitOrigin: return "origin";
    case WalkEnd::ReachedTarget: return "target";
    case WalkEnd::ReachedLength: return "length";
    case WalkEnd::CrossingLimit: return "crossing-limit";
    }
    return "?";
}

/// A straight path split into the pieces it spends in each cone. Positions are
/// start + s * dir with s measured in units of the (transported) direction.
struct StraightWalk {
    struct Piece {
        int cone = 0;
        RatVec from;
        RatVec to;          // meaningless when the piece is unbounded
        IntVec dir;
        Rational s_from{0};
        Rational s_to{0};
        bool unbounded = false;
    };
    std::vector<Piece> pieces;
    WalkEnd end = WalkEnd::Escaped;
    int final_cone = 0;
    IntVec final_dir;
    UniMatrix transport;   // start chart -> final chart
    int crossings = 0;

    /// End point of the walk (not meaningful for escapes).
    BasePoint end_point() const;
};

class Base {
public:
    explicit Base(LooijengaData data) : data_(std::move(data))
    {
        if (data_.l() < 3)
            throw Error(ErrorKind::InvalidData, "need at least 3 boundary components, got " +
                                                    std::to_string(data_.l()));
        for (const auto& s : data_.seeds)
            if (s.ray < 0 || s.ray >= data_.l())
                throw Error(ErrorKind::InvalidData, "seed '" + s.name + "' references ray " +
                                                        std::to_string(s.ray + 1));
        developed_.push_back({1, 0});
        developed_.push_back({0, 1});
        for (int k = 1; k < data_.l(); ++k)
            developed_.push_back(-developed_[k - 1] - Integer(data_.d[k]) * developed_[k]);
    }

    const LooijengaData& data() const { return data_; }
    int l() const { return data_.l(); }
    int wrap(int i) const { return ((i % l()) + l()) % l(); }

    /// Transition across ray i: chart of cone i-1 -> chart of cone i.
    UniMatrix chart_transition(int i) const
    {
        return UniMatrix(-Integer(data_.d[wrap(i)]), 1, -1, 0);
    }

    /// Product of all transitions around O, starting and ending in the chart
    /// of cone `start`.
    UniMatrix monodromy(int start = 0) const
    {
        UniMatrix m;
        for (int k = 1; k <= l(); ++k)
            m = chart_transition(start + k) * m;
        return m;
    }

    /// Ray directions developed counterclockwise into the chart of cone 0:
    /// entries 0..l; entry l equals entry 0 exactly when the monodromy is trivial.
    const std::vector<IntVec>& developed_rays() const { return developed_; }

    /// Linear map from the chart of cone c to the developed reference chart.
    std::pair<IntVec, IntVec> developed_basis(int c) const
    {
        return {developed_[wrap(c)], developed_[wrap(c) + 1]};
    }

    IntVec develop(int cone, const IntVec& v) const
    {
        auto [e1, e2] = developed_basis(cone);
        return v.x * e1 + v.y * e2;
    }
    RatVec develop(int cone, const RatVec& v) const
    {
        auto [e1, e2] = developed_basis(cone);
        return v.x * RatVec(e1) + v.y * RatVec(e2);
    }

    BasePoint canonical(BasePoint p) const
    {
        p.cone = wrap(p.cone);
        if (p.coords.x < 0 || p.coords.y < 0)
            throw Error(ErrorKind::InvalidData, "point " + p.str() + " lies outside its cone");
        if (p.is_origin())
            return BasePoint{0, {}};
        if (p.coords.x == 0)
            return BasePoint{wrap(p.cone + 1), {p.coords.y, 0}};
        return p;
    }

    /// Coordinates of a point in the chart of cone c, when the point lies in
    /// the closed cone c.
    std::optional<RatVec> coords_in(const BasePoint& p0, int c) const
    {
        BasePoint p = canonical(p0);
        c = wrap(c);
        if (p.is_origin())
            return RatVec{};
        if (p.cone == c)
            return p.coords;
        if (p.cone == wrap(c + 1) && p.coords.y == 0)
            return RatVec{0, p.coords.x};
        return std::nullopt;
    }

    /// A tangent vector at a canonical point, re-expressed in cone c (which
    /// must contain the point).
    IntVec vec_in(const BasePoint& p0, const IntVec& v, int c) const
    {
        BasePoint p = canonical(p0);
        c = wrap(c);
        if (p.cone == c)
            return v;
        if (p.cone == wrap(c + 1))
            return chart_transition(p.cone).inverse()(v);
        throw Error(ErrorKind::InvalidData, "point " + p.str() + " is not in cone " + std::to_string(c));
    }

    /// Parallel transport along a sequence of adjacent cones.
    IntVec parallel_transport(const IntVec& v, const std::vector<int>& cones) const
    {
        IntVec out = v;
        for (std::size_t k = 1; k < cones.size(); ++k) {
            int a = wrap(cones[k - 1]), b = wrap(cones[k]);
            if (b == wrap(a + 1))
                out = chart_transition(b)(out);
            else if (a == wrap(b + 1))
                out = chart_transition(a).inverse()(out);
            else if (a != b)
                throw Error(ErrorKind::PathThroughOrigin,
                            "cones " + std::to_string(a) + " and " + std::to_string(b) + " are not adjacent");
        }
        return out;
    }

    /// Walk straight from `start` in direction `dir` (chart of start's cone).
    /// Stops at `max_s`, at `target`, on hitting O, on escaping to infinity,
    /// or after `max_crossings` ray crossings.
    StraightWalk walk(const BasePoint& start0, const IntVec& dir0,
                      std::optional<Rational> max_s = std::nullopt,
                      std::optional<BasePoint> target = std::nullopt,
                      int max_crossings = -1) const;

    /// Radial direction at a point (its position vector) in the point's chart.
    static RatVec radial(const BasePoint& p) { return p.coords; }

private:
    LooijengaData data_;
    std::vector<IntVec> developed_;
};

inline BasePoint StraightWalk::end_point() const
{
    const Piece& last = pieces.back();
    return BasePoint{last.cone, last.to};
}

inline StraightWalk Base::walk(const BasePoint& start0, const IntVec& dir0, std::optional<Rational> max_s,
                               std::optional<BasePoint> target, int max_crossings) const
{
    if (max_crossings < 0)
        max_crossings = 4 * l() + 8;
    if (dir0.is_zero())
        throw Error(ErrorKind::ZeroVector, "walk direction is zero");
    BasePoint start = canonical(start0);
    if (start.is_origin())
        throw Error(ErrorKind::PathThroughOrigin, "walk starts at the origin");
    int c = start.cone;
    RatVec p = start.coords;
    IntVec u = dir0;
    if (wrap(start0.cone) != start.cone)
        u = chart_transition(start.cone)(dir0);  // start0 was given on the second ray of its cone
    StraightWalk w;
    // Step into the cone the direction actually points into.
    if (p.y == 0 && u.y < 0) {
        UniMatrix t = chart_transition(c).inverse();
        p = t(p);
        u = t(u);
        w.transport = t * w.transport;
        c = wrap(c - 1);
    }
    Rational s{0};
    while (true) {
        std::optional<Rational> s_a, s_b;
        if (u.x < 0)
            s_a = p.x / Rational(-u.x);
        if (u.y < 0)
            s_b = p.y / Rational(-u.y);
        std::optional<Rational> exit;
        if (s_a && s_b)
            exit = std::min(*s_a, *s_b);
        else if (s_a)
            exit = s_a;
        else if (s_b)
            exit = s_b;

        StraightWalk::Piece piece{c, p, {}, u, s, s, false};
        // target on this piece?
        if (target) {
            if (auto tc = coords_in(*target, c)) {
                RatVec diff = *tc - p;
                if (det(diff, RatVec(u)) == 0 && !diff.is_zero()) {
                    Rational t = u.x != 0 ? diff.x / Rational(u.x) : diff.y / Rational(u.y);
                    if (t > 0 && (!exit || t <= *exit) && (!max_s || s + t <= *max_s)) {
                        piece.to = *tc;
                        piece.s_to = s + t;
                        w.pieces.push_back(piece);
                        w.end = WalkEnd::ReachedTarget;
                        w.final_cone = c;
                        w.final_dir = u;
                        return w;
                    }
                }
            }
        }
        if (max_s && (!exit || s + *exit >= *max_s)) {
            Rational t = *max_s - s;
            piece.to = p + t * RatVec(u);
            piece.s_to = *max_s;
            w.pieces.push_back(piece);
            w.end = piece.to.is_zero() ? WalkEnd::HitOrigin : WalkEnd::ReachedLength;
            w.final_cone = c;
            w.final_dir = u;
            return w;
        }
        if (!exit) {
            piece.unbounded = true;
            w.pieces.push_back(piece);
            w.end = WalkEnd::Escaped;
            w.final_cone = c;
            w.final_dir = u;
            return w;
        }
        RatVec q = p + *exit * RatVec(u);
        piece.to = q;
        piece.s_to = s + *exit;
        w.pieces.push_back(piece);
        s += *exit;
        if (q.is_zero()) {
            w.end = WalkEnd::HitOrigin;
            w.final_cone = c;
            w.final_dir = u;
            return w;
        }
        if (w.crossings >= max_crossings) {
            w.end = WalkEnd::CrossingLimit;
            w.final_cone = c;
            w.final_dir = u;
            return w;
        }
        UniMatrix t;
        int next;
        if (q.x == 0) {
            next = wrap(c + 1);
            t = chart_transition(next);
        } else {
            next = wrap(c - 1);
            t = chart_transition(c).inverse();
        }
        p = t(q);
        u = t(u);
        w.transport = t * w.transport;
        c = next;
        ++w.crossings;
    }
}

/// Result of continuing a straight line.
struct Continuation {
    std::vector<BasePoint> polyline;  // start, every ray crossing, and the end when bounded
    WalkEnd outcome = WalkEnd::Escaped;
    int final_cone = 0;
    IntVec final_dir;                 // direction in the chart of final_cone

    bool extendable() const { return outcome == WalkEnd::Escaped; }
};

inline Continuation straight_continue(const Base& base, const BasePoint& start, const IntVec& dir,
                                      int max_crossings = -1)
{
    StraightWalk w = base.walk(start, dir, std::nullopt, std::nullopt, max_crossings);
    Continuation out;
    out.outcome = w.end;
    out.final_cone = w.final_cone;
    out.final_dir = w.final_dir;
    out.polyline.push_back(base.canonical(start));
    for (const auto& piece : w.pieces)
        if (!piece.unbounded)
            out.polyline.push_back(base.canonical({piece.cone, piece.to}));
    return out;
}

} // namespace cylinders
