#pragma once

// Scattering diagrams with radial walls, wall-crossing automorphisms, the
// consistency check around O and order-by-order completion.
//
// A wall with direction u carries f = 1 + sum c * t^cls * z^(-k u). Seed walls
// are full lines through O when the diagram is viewed in the developed chart
// of cone 0; on B they are rays like every other wall.

#include "cylinders/base.hpp"
#include "cylinders/curve_class.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace cylinders {

struct WallTerm {
    int k = 1;           // power of z^(-u)
    CurveClass cls;
    Integer coeff{1};

    friend bool operator==(const WallTerm&, const WallTerm&) = default;
};

struct Wall {
    BasePoint dir;       // canonical cone plus primitive integral coordinates
    bool line = false;   // seed wall: a full line in the developed chart
    std::vector<WallTerm> terms;

    friend bool operator==(const Wall&, const Wall&) = default;
};

struct ScatteringDiagram {
    std::vector<Wall> walls;
    int order = 1;
};

/// Canonical form of a direction on B: cone plus primitive coordinates.
inline BasePoint direction_on_base(const Base& base, int cone, const IntVec& v)
{
    if (v.x < 0 || v.y < 0)
        throw Error(ErrorKind::InvalidData, "direction " + v.str() + " is outside cone " + std::to_string(cone));
    return base.canonical({cone, RatVec(primitive(v))});
}

inline IntVec integral(const RatVec& v)
{
    if (!is_integral(v.x) || !is_integral(v.y))
        throw Error(ErrorKind::InvalidData, "expected an integral vector, got " + v.str());
    return {numerator(v.x), numerator(v.y)};
}

inline ScatteringDiagram initial_diagram(const Base& base, int order)
{
    ScatteringDiagram d;
    d.order = order;
    for (const auto& s : base.data().seeds)
        d.walls.push_back(Wall{BasePoint{s.ray, {1, 0}}, true, {WallTerm{1, CurveClass::generator(s.name), 1}}});
    return d;
}

/// Wall function as a series in a chart where the wall direction is `u`.
inline Series wall_function(const Wall& w, const IntVec& u, int order)
{
    Series f = Series::one(order);
    for (const auto& t : w.terms)
        f.add({t.cls, -(Integer(t.k) * u)}, t.coeff);
    return f;
}

/// Product of the functions of all walls sharing one direction.
inline std::vector<WallTerm> combined_terms(const std::vector<const Wall*>& walls, int order)
{
    Series f = Series::one(order);
    IntVec u{1, 0};
    for (const Wall* w : walls)
        f = f * wall_function(*w, u, order);
    std::vector<WallTerm> out;
    for (const auto& [k, c] : f.terms()) {
        if (k.exp.is_zero())
            continue;
        out.push_back({static_cast<int>(-k.exp.x), k.cls, c});
    }
    return out;
}

struct Monomial {
    Integer coeff{1};
    CurveClass cls;
    IntVec q;

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Terms of c z^q f^p with p = sign * det(u, q), where u is the wall
/// direction in the chart of q. sign = +1 is the orientation in which a
/// broken line travelling along -q picks up a positive power; the no-bend
/// term comes first.
inline std::vector<Monomial> cross_wall(const Monomial& m, const Wall& w, const IntVec& u, int sign, int order)
{
    Integer pairing = det(u, m.q);
    if (pairing == 0)
        throw Error(ErrorKind::TangentToWall, "exponent " + m.q.str() + " is parallel to the wall");
    if (pairing < 0)
        pairing = -pairing;
    long long p = static_cast<long long>(pairing) * sign;
    Series f = wall_function(w, u, order).pow(p);
    std::vector<Monomial> out;
    Monomial pass = m;
    out.push_back(pass);
    for (const auto& [k, c] : f.terms()) {
        if (k.exp.is_zero() && k.cls.is_zero()) {
            out.front().coeff = m.coeff * c;
            continue;
        }
        if (m.cls.degree() + k.cls.degree() > order)
            continue;
        out.push_back({m.coeff * c, m.cls + k.cls, m.q + k.exp});
    }
    if (out.front().coeff == 0)
        out.erase(out.begin());
    return out;
}

// ---------------------------------------------------------------------------
// Consistency in the developed chart of cone 0.

struct DevelopedRay {
    IntVec u;            // primitive, developed
    const Wall* wall;
};

inline bool angle_less(const IntVec& a, const IntVec& b)
{
    auto half = [](const IntVec& v) { return (v.y > 0 || (v.y == 0 && v.x > 0)) ? 0 : 1; };
    int ha = half(a), hb = half(b);
    if (ha != hb)
        return ha < hb;
    return det(a, b) > 0;
}

inline std::vector<DevelopedRay> developed_rays(const Base& base, const ScatteringDiagram& d)
{
    std::vector<DevelopedRay> rays;
    for (const auto& w : d.walls) {
        IntVec u = base.develop(w.dir.cone, integral(w.dir.coords));
        rays.push_back({u, &w});
        if (w.line)
            rays.push_back({-u, &w});
    }
    std::stable_sort(rays.begin(), rays.end(),
                     [](const DevelopedRay& a, const DevelopedRay& b) { return angle_less(a.u, b.u); });
    return rays;
}

/// Apply the counterclockwise crossing of ray u (function f) to a series.
inline Series apply_crossing(const Series& s, const IntVec& u, const Series& f, std::map<long long, Series>& powers)
{
    IntVec n{u.y, -u.x};
    Series out(s.order());
    for (const auto& [k, c] : s.terms()) {
        long long p = static_cast<long long>(dot(n, k.exp));
        auto it = powers.find(p);
        if (it == powers.end())
            it = powers.emplace(p, f.pow(p)).first;
        Series term = Series::monomial(k.cls, k.exp, c, s.order()) * it->second;
        out = out + term;
    }
    return out;
}

/// theta(x)/x - 1 and theta(y)/y - 1 for the path-ordered product around O.
inline std::pair<Series, Series> loop_discrepancy(const Base& base, const ScatteringDiagram& d, int order)
{
    Series x = Series::monomial({}, {1, 0}, 1, order);
    Series y = Series::monomial({}, {0, 1}, 1, order);
    for (const auto& r : developed_rays(base, d)) {
        // the line's second half carries the same function in the same exponents
        IntVec wall_u = base.develop(r.wall->dir.cone, integral(r.wall->dir.coords));
        Series f = wall_function(*r.wall, wall_u, order);
        std::map<long long, Series> powers;
        x = apply_crossing(x, r.u, f, powers);
        y = apply_crossing(y, r.u, f, powers);
    }
    Series one = Series::one(order);
    return {x.shifted({-1, 0}) - one, y.shifted({0, -1}) - one};
}

struct ConsistencyReport {
    bool ok = true;
    std::string joint = "O";
    int degree = 0;
    CurveClass cls;
    IntVec exponent;        // developed exponent of the lowest discrepancy term
    Integer dx{0}, dy{0};   // its coefficients in theta(x)/x and theta(y)/y
};

inline ConsistencyReport check_consistency(const Base& base, const ScatteringDiagram& d, int order)
{
    auto [ex, ey] = loop_discrepancy(base, d, order);
    ConsistencyReport r;
    std::optional<SeriesKey> best;
    for (const Series* s : {&ex, &ey})
        for (const auto& [k, c] : s->terms())
            if (!best || k < *best)
                best = k;
    if (best) {
        r.ok = false;
        r.degree = best->cls.degree();
        r.cls = best->cls;
        r.exponent = best->exp;
        r.dx = ex.coefficient(best->cls, best->exp);
        r.dy = ey.coefficient(best->cls, best->exp);
    }
    return r;
}

/// The cone of B containing a developed direction, found among the developed
/// cones; returns the canonical direction on B.
inline BasePoint undevelop_direction(const Base& base, const IntVec& u)
{
    for (int c = 0; c < base.l(); ++c) {
        auto [e1, e2] = base.developed_basis(c);
        Integer dt = det(e1, e2);  // +1
        Integer a = det(u, e2) * dt, b = det(e1, u) * dt;
        if (a >= 0 && b >= 0)
            return direction_on_base(base, c, {a, b});
    }
    throw Error(ErrorKind::InvalidData, "developed direction " + u.str() + " lies in no cone of B");
}

inline void add_wall_term(ScatteringDiagram& d, const BasePoint& dir, const WallTerm& t)
{
    for (auto& w : d.walls)
        if (!w.line && w.dir == dir) {
            for (auto& e : w.terms)
                if (e.k == t.k && e.cls == t.cls) {
                    e.coeff += t.coeff;
                    return;
                }
            w.terms.push_back(t);
            return;
        }
    d.walls.push_back(Wall{dir, false, {t}});
}

/// Insert walls degree by degree until the loop around O is the identity
/// modulo classes of degree > order.
inline ScatteringDiagram complete_diagram(const Base& base, const ScatteringDiagram& d0, int order)
{
    ScatteringDiagram d = d0;
    d.order = std::max(d.order, order);
    for (int deg = 1; deg <= order; ++deg) {
        auto [ex, ey] = loop_discrepancy(base, d, deg);
        std::map<SeriesKey, std::pair<Integer, Integer>> disc;
        for (const auto& [k, c] : ex.terms())
            disc[k].first = c;
        for (const auto& [k, c] : ey.terms())
            disc[k].second = c;
        for (const auto& [k, ab] : disc) {
            if (k.cls.degree() < deg)
                throw Error(ErrorKind::InvalidData, "lower-degree discrepancy survived completion");
            const IntVec& m = k.exp;
            if (m.is_zero())
                throw Error(ErrorKind::InvalidData, "discrepancy with zero exponent at class " + k.cls.str());
            IntVec u = primitive(-m);
            Integer kk = lattice_length(m);
            IntVec n{u.y, -u.x};
            // (a, b) must be lambda * n
            if (ab.first * n.y != ab.second * n.x)
                throw Error(ErrorKind::InvalidData, "discrepancy is not normal to its exponent");
            Integer lambda = n.x != 0 ? Integer(ab.first / n.x) : Integer(ab.second / n.y);
            if (lambda * n.x != ab.first || lambda * n.y != ab.second)
                throw Error(ErrorKind::InvalidData, "non-integral wall coefficient");
            add_wall_term(d, undevelop_direction(base, u), WallTerm{static_cast<int>(kk), k.cls, -lambda});
        }
    }
    // drop cancelled terms
    for (auto& w : d.walls)
        w.terms.erase(std::remove_if(w.terms.begin(), w.terms.end(), [](const WallTerm& t) { return t.coeff == 0; }),
                      w.terms.end());
    d.walls.erase(std::remove_if(d.walls.begin(), d.walls.end(), [](const Wall& w) { return w.terms.empty(); }),
                  d.walls.end());
    return d;
}

/// Walls grouped by their direction on B, each with its combined function.
struct RayWalls {
    BasePoint dir;
    std::vector<WallTerm> terms;
};

inline std::vector<RayWalls> walls_by_direction(const ScatteringDiagram& d, int order)
{
    std::vector<RayWalls> out;
    std::vector<BasePoint> dirs;
    for (const auto& w : d.walls)
        if (std::find(dirs.begin(), dirs.end(), w.dir) == dirs.end())
            dirs.push_back(w.dir);
    for (const auto& dir : dirs) {
        std::vector<const Wall*> ws;
        for (const auto& w : d.walls)
            if (w.dir == dir)
                ws.push_back(&w);
        out.push_back({dir, combined_terms(ws, order)});
    }
    return out;
}

} // namespace cylinders
