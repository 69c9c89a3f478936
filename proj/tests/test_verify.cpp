#include "cylinders/verify.hpp"
#include "spine_gen.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace cylinders;

namespace {

Base toric() { return Base({{1, 1, 1}, {}}); }
Base one_seed() { return Base({{0, 1, 1}, {{0, "E"}}}); }

Spine bent_example()
{
    return Spine{{{2, {Rational(1, 2), Rational(3, 4)}}, {0, {1, 0}}, {0, {2, 1}}},
                 {{{-2, 1}, 1}, {{1, 1}, 2}}};
}

auto kind_is(ErrorKind k)
{
    return Catch::Matchers::Predicate<Error>([k](const Error& e) { return e.kind() == k; });
}

// A random valid spine with its endpoints off walls, split at an interior
// point off walls.
std::optional<std::pair<Spine, Spine>> random_pair(const Base& b, const ScatteringDiagram& d, std::mt19937& rng)
{
    WallIndex idx(b, d, d.order);
    gen::SpineOptions opt;
    opt.bend_only_on_rays = true;
    opt.max_segments = 3;
    Spine s = normalize_spine(b, gen::random_spine(b, rng, opt));
    if (idx.containing(s.vertices.front()) || idx.containing(s.vertices.back()))
        return std::nullopt;
    std::uniform_int_distribution<std::size_t> edge(0, s.edges.size() - 1);
    std::uniform_int_distribution<int> num(1, 12);
    BasePoint p = point_on_edge(b, s, edge(rng), Rational(num(rng), 13));
    if (idx.containing(p))
        return std::nullopt;
    return split_spine(b, s, p);
}

} // namespace

TEST_CASE("convolution")
{
    Counts a{{CurveClass{}, 1}, {CurveClass::parse("E"), 2}};
    Counts b{{CurveClass{}, 3}, {CurveClass::parse("E"), 1}};
    Counts c = convolve(a, b, 2);
    CHECK(count_at(c, CurveClass{}) == 3);
    CHECK(count_at(c, CurveClass::parse("E")) == 7);
    CHECK(count_at(c, CurveClass::parse("E^2")) == 2);
    CHECK(convolve(a, b, 1).size() == 2);
}

TEST_CASE("gluing on fixed spines")
{
    Base t = toric();
    auto dt = initial_diagram(t, 3);
    Spine whole{{{0, {1, 2}}, {0, {2, 1}}}, {{{1, -1}, 1}}};
    auto [h1, h2] = split_spine(t, whole, {0, {Rational(3, 2), Rational(3, 2)}});
    GluingReport r = verify_gluing(t, dt, h1, h2, 3);
    CHECK(r.pass);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].direct == 1);

    Base b = one_seed();
    auto d = initial_diagram(b, 3);
    Spine be = bent_example();
    auto [l1, l2] = split_spine(b, be, point_on_edge(b, be, 1, Rational(1, 2)));
    CHECK(is_straight(b, l2));
    r = verify_gluing(b, d, l1, l2, 3);
    CHECK(r.pass);
    REQUIRE(r.rows.size() == 4);
    CHECK(r.rows[1].cls == CurveClass::parse("E"));
    CHECK(r.rows[1].n1 == 2);
    CHECK(r.rows[0].n2 == 1);
    CHECK(r.rows[1].direct == 2);

    // junction weights that do not cancel
    Spine wrong{{l1.vertices.back(), {0, {Rational(5, 2), Rational(1, 2)}}}, {{{1, 0}, 1}}};
    r = verify_gluing(b, d, l1, wrong, 3);
    CHECK_FALSE(r.pass);
    REQUIRE(r.precondition.has_value());
    CHECK(r.precondition->kind == ErrorKind::WeightMismatch);
}

TEST_CASE("gluing over random pairs")
{
    for (Base b : {toric(), one_seed(), Base({{0, 0, 1}, {{0, "E1"}, {1, "E2"}}})}) {
        auto d = complete_diagram(b, initial_diagram(b, 3), 3);
        std::mt19937 rng(31);
        int done = 0;
        while (done < 25) {
            auto pair = random_pair(b, d, rng);
            if (!pair)
                continue;
            ++done;
            auto [l1, l2] = *pair;
            GluingReport r = verify_gluing(b, d, l1, l2, 3);
            CHECK(r.pass);
            // the reversed run sees the same table
            GluingReport back = verify_gluing(b, d, reversed(b, l2), reversed(b, l1), 3);
            REQUIRE(back.rows.size() == r.rows.size());
            for (std::size_t i = 0; i < r.rows.size(); ++i)
                CHECK(back.rows[i].direct == r.rows[i].direct);
        }
    }
}

TEST_CASE("positivity")
{
    Base b = one_seed();
    auto d = initial_diagram(b, 3);
    auto r = verify_positivity_integrality(b, d, {bent_example()}, 3);
    CHECK(r.pass());
    CHECK(r.largest == 2);

    std::mt19937 rng(5);
    std::vector<Spine> suite;
    WallIndex idx(b, d, 3);
    while (suite.size() < 40) {
        Spine s = gen::random_spine(b, rng);
        if (!idx.containing(s.vertices.back()))
            suite.push_back(s);
    }
    r = verify_positivity_integrality(b, d, suite, 3);
    CHECK(r.pass());
    CHECK(r.spines == 40);
}

TEST_CASE("symmetry")
{
    Base b = one_seed();
    auto d = initial_diagram(b, 3);
    Spine be = bent_example();
    // both sides of the bend and one point out on each end
    std::vector<BasePoint> probes{point_on_edge(b, be, 0, Rational(1, 2)), point_on_edge(b, be, 1, Rational(1, 3))};
    for (const auto& p : sample_probes(b, d, be, 6))
        probes.push_back(p);
    SymmetryReport r = verify_symmetry(b, d, be, probes, 3);
    CHECK(r.pass);
    CHECK(count_at(r.reference, CurveClass::parse("E")) == 2);
    CHECK(r.probes.size() == probes.size());

    Spine straight{{{0, {1, 2}}, {0, {2, 1}}}, {{{1, -1}, 1}}};
    CHECK(verify_symmetry(toric(), initial_diagram(toric(), 3), straight,
                          {{0, {Rational(5, 4), Rational(7, 4)}}, {0, {Rational(7, 4), Rational(5, 4)}}}, 3)
              .pass);

    CHECK_THROWS_MATCHES(verify_symmetry(b, d, be, {{0, {1, 0}}}, 3), Error, kind_is(ErrorKind::BendPoint));

    std::mt19937 rng(8);
    for (int i = 0; i < 20; ++i) {
        Spine s = gen::random_spine(b, rng);
        WallIndex idx(b, d, 3);
        if (idx.containing(s.vertices.back()))
            continue;
        CHECK(verify_symmetry(b, d, s, sample_probes(b, d, s, 3), 3).pass);
    }
}

TEST_CASE("straight spines")
{
    Base t = toric();
    Spine s{{{0, {1, 2}}, {0, {2, 1}}}, {{{1, -1}, 1}}};
    auto r = verify_straight_spine(t, initial_diagram(t, 3), s, 3);
    CHECK(r.pass);
    CHECK(count_at(r.counts, CurveClass{}) == 1);

    Base b = one_seed();
    auto d = initial_diagram(b, 3);
    // stays in cone 1, never meets the wall
    Spine away{{{1, {1, 2}}, {1, {2, 1}}}, {{{1, -1}, 1}}};
    CHECK(verify_straight_spine(b, d, away, 3).pass);
    CHECK_THROWS_MATCHES(verify_straight_spine(b, d, bent_example(), 3), Error, kind_is(ErrorKind::NotStraight));
}
