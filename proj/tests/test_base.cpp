#include "cylinders/base.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace cylinders;

namespace {

Base toric_p2() { return Base({{1, 1, 1}, {}}); }
Base cubic_minus_line() { return Base({{0, 1, 1}, {{0, "E"}}}); }

// Transport by products of transitions from cone `from` counterclockwise to `to`.
UniMatrix ccw_transport(const Base& b, int from, int to)
{
    UniMatrix m;
    for (int c = from; c != to; c = b.wrap(c + 1))
        m = b.chart_transition(c + 1) * m;
    return m;
}

} // namespace

TEST_CASE("toric bases have trivial monodromy from every starting cone")
{
    for (auto d : std::vector<std::vector<long long>>{{1, 1, 1}, {0, 0, 0, 0}, {0, 1, 0, -1}, {0, -1, 0, 1}}) {
        Base b({d, {}});
        // developed rays close up when the fan is complete
        const auto& r = b.developed_rays();
        CHECK(r.back() == r.front());
        for (int s = 0; s < b.l(); ++s)
            CHECK(b.monodromy(s).is_identity());
    }
}

TEST_CASE("developed rays of small bases")
{
    Base p2 = toric_p2();
    CHECK(p2.developed_rays() == std::vector<IntVec>{{1, 0}, {0, 1}, {-1, -1}, {1, 0}});

    Base c = cubic_minus_line();
    CHECK(c.developed_rays() == std::vector<IntVec>{{1, 0}, {0, 1}, {-1, -1}, {1, 0}});
    Base two({{0, 0, 1}, {{0, "E1"}, {1, "E2"}}});
    CHECK(two.developed_rays() == std::vector<IntVec>{{1, 0}, {0, 1}, {-1, 0}, {1, -1}});
}

TEST_CASE("non-toric monodromy is unipotent and conjugate across cones")
{
    Base b = cubic_minus_line();
    UniMatrix m0 = b.monodromy(0);
    CHECK(m0.trace() == 2);
    CHECK_FALSE(m0.is_identity());
    for (int s = 1; s < b.l(); ++s) {
        UniMatrix p = ccw_transport(b, 0, s);
        CHECK(b.monodromy(s) == p * m0 * p.inverse());
    }
    Base two({{0, 0, 1}, {}});
    // seeds on two different components: J * [[-1,1],[-1,0]] * J by hand
    CHECK(two.monodromy(0) == UniMatrix(0, -1, 1, 1));
}

TEST_CASE("chart transitions are unimodular and relate consecutive rays")
{
    Base b({{2, -1, 0, 3}, {}});
    for (int i = 0; i < b.l(); ++i) {
        UniMatrix t = b.chart_transition(i);
        CHECK(t.det() == 1);
        // rho_i is (0,1) in cone i-1 and (1,0) in cone i
        CHECK(t(IntVec{0, 1}) == IntVec{1, 0});
        // v_{i-1} + d_i v_i + v_{i+1} = 0, read in cone i
        IntVec prev = t(IntVec{1, 0});
        CHECK(prev + Integer(b.data().d[i]) * IntVec{1, 0} + IntVec{0, 1} == IntVec{0, 0});
    }
}

TEST_CASE("parallel transport round trip")
{
    Base b = cubic_minus_line();
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> d(-9, 9);
    for (int i = 0; i < 100; ++i) {
        IntVec v{d(rng), d(rng)};
        std::vector<int> path{0, 1, 2, 1, 0, 2, 0};
        CHECK(b.parallel_transport(v, path) == v);
        std::vector<int> there{0, 1, 2};
        std::vector<int> back{2, 1, 0};
        CHECK(b.parallel_transport(b.parallel_transport(v, there), back) == v);
    }
    Base sq({{0, 0, 0, 0}, {}});
    CHECK_THROWS_AS(sq.parallel_transport({1, 0}, {0, 2}), Error);
}

TEST_CASE("canonical points")
{
    Base b = toric_p2();
    CHECK(b.canonical({1, {0, 2}}) == BasePoint{2, {2, 0}});
    CHECK(b.canonical({2, {0, 2}}) == BasePoint{0, {2, 0}});
    CHECK(b.canonical({1, {0, 0}}).is_origin());
    CHECK_THROWS_AS(b.canonical({0, {-1, 1}}), Error);
    CHECK(b.coords_in({2, {3, 0}}, 1) == RatVec{0, 3});
    CHECK_FALSE(b.coords_in({2, {3, 1}}, 1).has_value());
}

TEST_CASE("straight walks agree with the developed picture on toric bases")
{
    // In a complete fan the developed chart is a global linear chart, so a
    // straight walk must be a straight line there.
    for (auto dv : std::vector<std::vector<long long>>{{1, 1, 1}, {0, 0, 0, 0}, {0, -1, 0, 1}}) {
        Base b({dv, {}});
        std::mt19937 rng(5);
        std::uniform_int_distribution<int> d(-6, 6), cd(0, b.l() - 1), pd(0, 5);
        for (int i = 0; i < 300; ++i) {
            BasePoint p{cd(rng), {Rational(pd(rng) + 1, 2), Rational(pd(rng), 3)}};
            IntVec u{d(rng), d(rng)};
            if (u.is_zero())
                continue;
            StraightWalk w = b.walk(p, u);
            RatVec p0 = b.develop(p.cone, p.coords);
            RatVec u0 = RatVec(b.develop(p.cone, u));
            for (const auto& piece : w.pieces) {
                CHECK(RatVec(b.develop(piece.cone, piece.dir)) == u0);
                CHECK(b.develop(piece.cone, piece.from) == p0 + piece.s_from * u0);
                if (!piece.unbounded)
                    CHECK(b.develop(piece.cone, piece.to) == p0 + piece.s_to * u0);
            }
            // hits O exactly when the developed line passes through the origin
            // going forward
            bool through_origin = det(p0, u0) == 0 && dot(p0, u0) < 0;
            CHECK((w.end == WalkEnd::HitOrigin) == through_origin);
            if (w.end == WalkEnd::Escaped)
                CHECK(RatVec(b.develop(w.final_cone, w.final_dir)) == u0);
        }
    }
}

TEST_CASE("walk reparametrization and targets")
{
    Base b = cubic_minus_line();
    BasePoint p{2, {Rational(1, 2), Rational(3, 4)}};
    IntVec u{1, -2};
    StraightWalk full = b.walk(p, u);
    StraightWalk doubled = b.walk(p, IntVec{2, -4});
    CHECK(full.end == doubled.end);
    CHECK(full.pieces.size() == doubled.pieces.size());
    for (std::size_t i = 0; i < full.pieces.size(); ++i) {
        CHECK(full.pieces[i].from == doubled.pieces[i].from);
        CHECK(full.pieces[i].s_from == 2 * doubled.pieces[i].s_from);
    }
    // stopping at an intermediate length, then continuing, reproduces the walk
    Rational half = full.pieces.size() > 1 ? full.pieces[1].s_from + Rational(1, 7) : Rational(1, 7);
    StraightWalk first = b.walk(p, u, half);
    REQUIRE(first.end == WalkEnd::ReachedLength);
    StraightWalk rest = b.walk(first.end_point(), first.final_dir);
    CHECK(rest.end == full.end);
    CHECK(rest.final_cone == full.final_cone);
    CHECK(rest.final_dir == full.final_dir);

    // target detection
    BasePoint q = first.end_point();
    StraightWalk to_q = b.walk(p, u, std::nullopt, q);
    CHECK(to_q.end == WalkEnd::ReachedTarget);
    CHECK(b.canonical(to_q.end_point()) == b.canonical(q));
}

TEST_CASE("walks through the origin and along rays")
{
    Base b = cubic_minus_line();
    // radial inward along a ray
    StraightWalk w = b.walk({1, {2, 0}}, {-1, 0});
    CHECK(w.end == WalkEnd::HitOrigin);
    // radial outward escapes immediately
    CHECK(b.walk({1, {2, 0}}, {1, 0}).end == WalkEnd::Escaped);
    // a point on a ray moving into the previous cone
    StraightWalk prev = b.walk({1, {2, 0}}, {1, -1});
    CHECK(prev.pieces.front().cone == 0);
    CHECK_THROWS_AS(b.walk({0, {0, 0}}, {1, 0}), Error);
    CHECK_THROWS_AS(b.walk({0, {1, 0}}, {0, 0}), Error);
}

TEST_CASE("straight continuation records ray crossings")
{
    Base b = toric_p2();
    Continuation c = straight_continue(b, {0, {1, 1}}, {-1, 0});
    CHECK(c.extendable());
    // (1,1) moving in -x crosses rho_2 at (0,1), then escapes in cone 1
    REQUIRE(c.polyline.size() == 2);
    CHECK(c.polyline[1] == BasePoint{1, {1, 0}});
    CHECK(c.final_cone == 1);
    Continuation o = straight_continue(b, {0, {1, 1}}, {-1, -1});
    CHECK(o.outcome == WalkEnd::HitOrigin);
    CHECK_FALSE(o.extendable());
}
