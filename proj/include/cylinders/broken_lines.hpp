#pragma once

// Broken lines on B and the cylinder counts N(L, beta).
//
// A broken line carries c t^cls z^q and travels in direction -q. Crossing a
// wall with direction u it may pick the term t^b X^k of f^|det(u,q)|, where
// X = z^(-u); the exponent becomes q - k u, so bends turn away from O.
// Lines are traced backwards from their endpoint.

#include "cylinders/scattering.hpp"
#include "cylinders/spine.hpp"

#include <map>
#include <set>
#include <vector>

namespace cylinders {

struct BendEvent {
    BasePoint at;        // canonical
    BasePoint wall;      // canonical wall direction
    IntVec q_before;     // exponents in the chart of at.cone
    IntVec q_after;
    int k = 1;
    CurveClass cls;
    Integer coeff{1};
};

struct BrokenLine {
    BasePoint asymptotic;          // incoming direction m as an integral point of B
    BasePoint endpoint;            // canonical
    std::vector<BendEvent> bends;  // in the direction of travel
    Monomial final;                // exponent in the chart of endpoint.cone

    IntVec initial_exponent() const { return bends.empty() ? final.q : bends.front().q_before; }
};

/// Walls of a diagram organised for tracing: each direction once with its
/// combined function.
class WallIndex {
public:
    WallIndex(const Base& base, const ScatteringDiagram& d, int order) : base_(&base), order_(order)
    {
        for (auto& rw : walls_by_direction(d, order)) {
            for (const auto& t : rw.terms)
                if (t.cls.degree() < 1 || t.k < 1)
                    throw Error(ErrorKind::InvalidData, "wall term of degree 0 at " + rw.dir.str());
            dirs_.push_back(std::move(rw));
        }
    }

    const std::vector<RayWalls>& walls() const { return dirs_; }
    int order() const { return order_; }

    /// Walls meeting the interior of cone c, with their direction in c's chart.
    std::vector<std::pair<const RayWalls*, IntVec>> interior(int c) const
    {
        std::vector<std::pair<const RayWalls*, IntVec>> out;
        for (const auto& w : dirs_)
            if (w.dir.cone == c && w.dir.coords.y > 0)
                out.push_back({&w, integral(w.dir.coords)});
        return out;
    }

    /// Walls supported on ray r.
    const RayWalls* on_ray(int r) const
    {
        for (const auto& w : dirs_)
            if (w.dir.cone == r && w.dir.coords.y == 0)
                return &w;
        return nullptr;
    }

    /// The wall containing a point, if any.
    const RayWalls* containing(const BasePoint& p0) const
    {
        BasePoint p = base_->canonical(p0);
        if (p.is_origin())
            return nullptr;
        for (const auto& w : dirs_)
            if (w.dir.cone == p.cone && det(w.dir.coords, p.coords) == 0)
                return &w;
        return nullptr;
    }

    /// Terms of f^e as (k, class, coefficient), cached.
    const std::vector<WallTerm>& power(const RayWalls* w, long long e) const
    {
        auto key = std::make_pair(w, e);
        auto it = cache_.find(key);
        if (it != cache_.end())
            return it->second;
        Series f = Series::one(order_);
        for (const auto& t : w->terms)
            f.add({t.cls, {t.k, 0}}, t.coeff);
        Series p = f.pow(e);
        std::vector<WallTerm> out;
        for (const auto& [k, c] : p.terms())
            if (k.exp.x != 0)
                out.push_back({static_cast<int>(k.exp.x), k.cls, c});
        return cache_.emplace(key, std::move(out)).first->second;
    }

private:
    const Base* base_;
    int order_;
    std::vector<RayWalls> dirs_;
    mutable std::map<std::pair<const RayWalls*, long long>, std::vector<WallTerm>> cache_;
};

namespace detail {

struct WallEvent {
    Rational s;
    int cone;
    RatVec point;        // in the chart of cone
    const RayWalls* wall;
    IntVec u;            // wall direction in the chart of cone
    IntVec q;            // exponent in the chart of cone
};

/// Wall crossings met along a walk, in order.
inline std::vector<WallEvent> wall_events(const Base& base, const WallIndex& idx, const StraightWalk& w)
{
    std::vector<WallEvent> events;
    for (const auto& piece : w.pieces) {
        std::vector<WallEvent> here;
        RatVec dir(piece.dir);
        for (const auto& [rw, u] : idx.interior(piece.cone)) {
            RatVec ur(u);
            Rational d0 = det(ur, piece.from);
            Rational du = det(ur, dir);
            if (d0 == 0 || du == 0)
                continue;
            Rational s = -d0 / du;
            if (s <= 0)
                continue;
            if (!piece.unbounded && piece.s_from + s >= piece.s_to)
                continue;  // reaching the wall exactly at the piece end means O
            here.push_back({piece.s_from + s, piece.cone, piece.from + s * dir, rw, u, piece.dir});
        }
        std::sort(here.begin(), here.end(), [](const WallEvent& a, const WallEvent& b) { return a.s < b.s; });
        events.insert(events.end(), here.begin(), here.end());
        // every piece but the last ends on a ray crossing
        if (&piece == &w.pieces.back())
            continue;
        int ray = piece.to.x == 0 ? base.wrap(piece.cone + 1) : piece.cone;
        if (const RayWalls* rw = idx.on_ray(ray)) {
            IntVec u = piece.to.x == 0 ? IntVec{0, 1} : IntVec{1, 0};
            events.push_back({piece.s_to, piece.cone, piece.to, rw, u, piece.dir});
        }
    }
    return events;
}

struct Tracer {
    const Base& base;
    const WallIndex& idx;
    int bound;
    BasePoint target_m;            // canonical
    BasePoint endpoint;
    IntVec final_q;
    std::vector<BrokenLine>& out;

    void run(const BasePoint& p, const IntVec& q, const CurveClass& cls, const Integer& coeff,
             std::vector<BendEvent>& bends_rev)
    {
        StraightWalk w = base.walk(p, q);
        for (const auto& ev : wall_events(base, idx, w)) {
            Integer e = det(ev.u, ev.q);
            if (e == 0)
                continue;
            if (e < 0)
                e = -e;
            BasePoint at = base.canonical({ev.cone, ev.point});
            for (const auto& term : idx.power(ev.wall, static_cast<long long>(e))) {
                if (cls.degree() + term.cls.degree() > bound)
                    continue;
                IntVec q_prev = ev.q + Integer(term.k) * ev.u;
                BendEvent b;
                b.at = at;
                b.wall = ev.wall->dir;
                b.q_before = to_canonical_chart(base, ev.cone, ev.point, q_prev);
                b.q_after = to_canonical_chart(base, ev.cone, ev.point, ev.q);
                b.k = term.k;
                b.cls = term.cls;
                b.coeff = term.coeff;
                bends_rev.push_back(b);
                run({ev.cone, ev.point}, q_prev, cls + term.cls, coeff * term.coeff, bends_rev);
                bends_rev.pop_back();
            }
        }
        if (w.end != WalkEnd::Escaped)
            return;
        BasePoint m = base.canonical({w.final_cone, RatVec(w.final_dir)});
        if (!(m == target_m))
            return;
        BrokenLine line;
        line.asymptotic = m;
        line.endpoint = endpoint;
        line.bends.assign(bends_rev.rbegin(), bends_rev.rend());
        line.final = Monomial{coeff, cls, final_q};
        out.push_back(std::move(line));
    }
};

} // namespace detail

inline void require_off_walls(const Base& base, const WallIndex& idx, const BasePoint& q)
{
    if (base.canonical(q).is_origin())
        throw Error(ErrorKind::PathThroughOrigin, "endpoint is the origin");
    if (const RayWalls* w = idx.containing(q))
        throw Error(ErrorKind::EndpointOnWall, "endpoint " + base.canonical(q).str() + " lies on the wall " + w->dir.str());
}

/// Broken lines ending at Q with final exponent q (chart of Q's canonical
/// cone) and incoming direction m.
inline std::vector<BrokenLine> trace_with_final_exponent(const Base& base, const WallIndex& idx,
                                                         const BasePoint& Q0, const IntVec& q_final,
                                                         const BasePoint& m, int bound)
{
    BasePoint Q = base.canonical(Q0);
    require_off_walls(base, idx, Q);
    std::vector<BrokenLine> out;
    detail::Tracer t{base, idx, bound, base.canonical(m), Q, q_final, out};
    std::vector<BendEvent> bends;
    t.run(Q, q_final, CurveClass{}, Integer(1), bends);
    return out;
}

/// Superset of the final exponents reachable from incoming direction m with
/// at most `bound` degrees of bending, expressed in the chart of cone c.
inline std::vector<IntVec> candidate_final_exponents(const Base& base, const WallIndex& idx, const BasePoint& m0,
                                                     int c, int bound)
{
    BasePoint m = base.canonical(m0);
    struct State {
        int cone;
        IntVec v;
        int deg;
        int moves;
        auto key() const { return std::make_tuple(cone, v, deg); }
    };
    const int max_moves = (bound + 1) * 2 * base.l() + 2;
    std::set<std::tuple<int, IntVec, int>> seen;
    std::vector<State> queue{{m.cone, integral(m.coords), 0, 0}};
    std::set<IntVec> found;
    seen.insert(queue.front().key());
    for (std::size_t i = 0; i < queue.size(); ++i) {
        State s = queue[i];
        if (s.cone == base.wrap(c))
            found.insert(s.v);
        std::vector<State> next;
        if (s.moves < max_moves) {
            next.push_back({base.wrap(s.cone + 1), base.chart_transition(s.cone + 1)(s.v), s.deg, s.moves + 1});
            next.push_back({base.wrap(s.cone - 1), base.chart_transition(s.cone).inverse()(s.v), s.deg, s.moves + 1});
        }
        auto bend = [&](const RayWalls* w, const IntVec& u) {
            Integer e = det(u, s.v);
            if (e == 0)
                return;
            if (e < 0)
                e = -e;
            for (const auto& term : idx.power(w, static_cast<long long>(e)))
                if (s.deg + term.cls.degree() <= bound)
                    next.push_back({s.cone, s.v - Integer(term.k) * u, s.deg + term.cls.degree(), s.moves});
        };
        for (const auto& [w, u] : idx.interior(s.cone))
            bend(w, u);
        if (const RayWalls* w = idx.on_ray(s.cone))
            bend(w, {1, 0});
        if (const RayWalls* w = idx.on_ray(base.wrap(s.cone + 1)))
            bend(w, {0, 1});
        for (auto& n : next)
            if (seen.insert(n.key()).second)
                queue.push_back(n);
    }
    return {found.begin(), found.end()};
}

/// All broken lines ending at Q with incoming direction m and class degree
/// at most `bound`.
inline std::vector<BrokenLine> trace_broken_lines(const Base& base, const ScatteringDiagram& d, const BasePoint& Q0,
                                                  const BasePoint& m, int bound)
{
    WallIndex idx(base, d, std::max(bound, 1));
    BasePoint Q = base.canonical(Q0);
    require_off_walls(base, idx, Q);
    std::vector<BrokenLine> out;
    for (const auto& q : candidate_final_exponents(base, idx, m, Q.cone, bound)) {
        if (q.is_zero())
            continue;
        auto lines = trace_with_final_exponent(base, idx, Q, q, m, bound);
        out.insert(out.end(), lines.begin(), lines.end());
    }
    return out;
}

/// Restriction of a broken line to [alpha, 0], where alpha is the lattice
/// length travelled on the unbounded domain before the first bend (or before
/// the endpoint when there is none).
inline Spine spine_of_broken_line(const Base& base, const BrokenLine& g, const Rational& alpha)
{
    if (alpha <= 0)
        throw Error(ErrorKind::AlphaTooLate, "the truncation point must lie on the unbounded domain");
    BasePoint first = g.bends.empty() ? g.endpoint : g.bends.front().at;
    IntVec q0 = g.initial_exponent();
    IntVec back = primitive(q0);
    StraightWalk w = base.walk(first, back, alpha);
    if (w.end != WalkEnd::ReachedLength)
        throw Error(ErrorKind::AlphaTooLate, "the unbounded domain is shorter than alpha");
    const auto& last = w.pieces.back();
    Spine s;
    s.vertices.push_back(base.canonical({last.cone, last.to}));
    s.edges.push_back({to_canonical_chart(base, last.cone, last.to, -w.final_dir), lattice_length(q0)});
    for (const auto& b : g.bends) {
        s.vertices.push_back(b.at);
        s.edges.push_back({primitive(-b.q_after), lattice_length(b.q_after)});
    }
    s.vertices.push_back(g.endpoint);
    return s;
}

/// Equal after simplification, ignoring where the first vertex sits on the
/// first (straight) edge.
inline bool same_spine_shape(const Base& base, const Spine& a0, const Spine& b0)
{
    Spine a = simplify(base, a0), b = simplify(base, b0);
    if (a.vertices.size() != b.vertices.size())
        return false;
    for (std::size_t i = 1; i < a.vertices.size(); ++i)
        if (!(a.vertices[i] == b.vertices[i]))
            return false;
    for (std::size_t k = 1; k < a.edges.size(); ++k)
        if (!(a.edges[k] == b.edges[k]))
            return false;
    return weight_at_head(base, a, 0) == weight_at_head(base, b, 0);
}

/// Cylinder counts N(L, beta) for every class of degree <= bound, keyed by
/// class (classes with zero count omitted).
inline std::map<CurveClass, Integer> cylinder_counts(const Base& base, const ScatteringDiagram& d, const Spine& L0,
                                                     int bound)
{
    ExtendResult ext = extend_spine(base, L0);
    if (!ext.extendable())
        throw Error(ErrorKind::NotExtendableSpine, "spine end " + std::to_string(ext.failed_end) + " does not escape");
    require_valid(base, L0);
    Spine L = normalize_spine(base, L0);
    WallIndex idx(base, d, std::max(bound, 1));
    IntVec q_final = weight_at_head(base, L, L.edges.size() - 1);
    auto lines = trace_with_final_exponent(base, idx, L.vertices.back(), q_final, ext.spine->asymptotic1(), bound);
    std::map<CurveClass, Integer> out;
    for (const auto& g : lines) {
        Spine sg = spine_of_broken_line(base, g, Rational(1));
        if (!same_spine_shape(base, sg, L))
            continue;
        out[g.final.cls] += g.final.coeff;
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

inline Integer cylinder_count(const Base& base, const ScatteringDiagram& d, const Spine& L, const CurveClass& beta)
{
    auto counts = cylinder_counts(base, d, L, std::max(beta.degree(), 1));
    auto it = counts.find(beta);
    return it == counts.end() ? Integer(0) : it->second;
}

} // namespace cylinders
