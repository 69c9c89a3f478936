#include "cylinders/tropical.hpp"
#include "spine_gen.hpp"
#include "twig_gen.hpp"

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

BfRegion region(const Base& b, std::initializer_list<Spine> spines)
{
    std::vector<ExtendedSpine> es;
    for (const auto& s : spines)
        es.push_back(*extend_spine(b, s).spine);
    return bf_for(b, es);
}

std::pair<Spine, Spine> halves(const Base& b)
{
    Spine be = normalize_spine(b, bent_example());
    return split_spine(b, be, point_on_edge(b, be, 1, Rational(1, 2)));
}

} // namespace

TEST_CASE("cylinders from spines")
{
    Base b = one_seed();
    TropCurve c = make_cylinder(b, bent_example(), 1);
    CHECK(validate_cylinder(b, c, 2).empty());
    CHECK(c.legs.size() == 2);
    // one bend, one twig to O
    CHECK(c.edges.size() == 3);
    CHECK(c.vertices.back().is_origin());
    const TropEdge& twig = c.edges.back();
    CHECK(twig.speed * twig.dir == -bend_sum(b, normalize_spine(b, bent_example()), 1));
    CHECK(c.interior_mark() == 1);

    // a straight spine has no twigs
    TropCurve s = make_cylinder(toric(), Spine{{{0, {1, 2}}, {0, {2, 1}}}, {{{1, -1}, 1}}}, 0);
    CHECK(s.edges.size() == 1);
    CHECK(validate_cylinder(toric(), s, 2).empty());

    CHECK_THROWS_MATCHES(make_cylinder(b, bent_example(), 5), Error, kind_is(ErrorKind::InvalidData));
    // radial spines are not spines
    Spine radial{{{0, {1, 1}}, {0, {2, 2}}}, {{{1, 1}, 1}}};
    CHECK_THROWS_MATCHES(make_cylinder(toric(), radial, 0), Error, kind_is(ErrorKind::InvalidSpine));
}

TEST_CASE("double cylinders")
{
    Base b = one_seed();
    auto [l1, l2] = halves(b);
    TropCurve dc = make_double_cylinder(b, l1, l2);
    CHECK(validate_cylinder(b, dc, 4).empty());
    REQUIRE(dc.legs.size() == 4);
    int j = dc.interior_mark();
    CHECK(dc.legs[1].at == j);
    CHECK(dc.legs[2].at == j);
    CHECK(dc.legs[1].dir == -dc.legs[2].dir);
    CHECK(dc.legs[1].speed == dc.legs[2].speed);

    Spine wrong{{l1.vertices.back(), {0, {Rational(5, 2), Rational(1, 2)}}}, {{{1, 0}, 1}}};
    CHECK_THROWS_AS(make_double_cylinder(b, l1, wrong), Error);
}

TEST_CASE("curves in B_f")
{
    Base b = one_seed();
    Spine be = bent_example();
    BfRegion bf = region(b, {be});
    require_valid_bf(b, bf);
    TropCurve c = cylinder_to_Bf(b, bf, make_cylinder(b, be, 1));
    CHECK(validate_trop_curve(b, bf, c, 2).empty());
    REQUIRE(c.marks.size() == 3);
    CHECK(boundary_cell(b, bf, c.vertices[c.marks[0]]).has_value());
    CHECK(boundary_cell(b, bf, c.vertices[c.marks[1]]).has_value());
    CHECK(c.vertices[c.interior_mark()] == b.canonical(be.vertices[1]));

    auto [l1, l2] = halves(b);
    BfRegion bf2 = region(b, {l1, l2});
    TropCurve d = cylinder_to_Bf(b, bf2, make_double_cylinder(b, l1, l2));
    CHECK(validate_trop_curve(b, bf2, d, 4).empty());
    CHECK(in_Md(d));
    TropCurve moved = d;
    moved.marks[4] = moved.marks[0];
    CHECK_FALSE(in_Md(moved));

    // too small a region: the bounded part reaches the boundary
    BfRegion tiny = bf;
    tiny.cutoff.assign(b.l(), Rational(1));
    CHECK_THROWS_MATCHES(cylinder_to_Bf(b, tiny, make_cylinder(b, be, 1)), Error,
                         kind_is(ErrorKind::HypothesisViolated));
    // strips transverse to the ends
    BfRegion skew = BfRegion::uniform(b.l(), bf.cutoff[0]);
    CHECK_THROWS_MATCHES(cylinder_to_Bf(b, skew, make_cylinder(b, be, 1)), Error,
                         kind_is(ErrorKind::HypothesisViolated));
}

TEST_CASE("violations of the B_f curve conditions")
{
    Base b = toric();
    BfRegion bf = BfRegion::uniform(3, 4);
    for (auto& s : bf.strips)
        s.push_back({{1, 1}, 0, 1});
    // radial edge from a boundary point to O: transverse to the strip
    TropCurve r;
    r.vertices = {{0, {1, 3}}, {0, {}}};
    r.edges = {{0, 1, {-1, -3}, 1}};
    r.marks = {0, 1};
    auto v = validate_trop_curve(b, bf, r, 1);
    REQUIRE(v.size() == 1);
    CHECK(v[0].item == 3);
    // along the diagonal it is parallel
    r.vertices[0] = {0, {2, 2}};
    r.edges[0].dir = {-1, -1};
    CHECK(validate_trop_curve(b, bf, r, 1).empty());
    // boundary mark pulled inside
    r.vertices[0] = {0, {1, 1}};
    v = validate_trop_curve(b, bf, r, 1);
    REQUIRE(!v.empty());
    CHECK(v[0].item == 1);
    // interior vertex with a single edge
    TropCurve u;
    u.vertices = {{0, {2, 2}}, {0, {1, 1}}, {0, {}}};
    u.edges = {{0, 1, {-1, -1}, 2}, {1, 2, {-1, -1}, 1}};
    u.marks = {0, 2};
    v = validate_trop_curve(b, bf, u, 1);
    REQUIRE(v.size() == 1);
    CHECK(v[0].item == 2);
    CHECK(v[0].vertex == 1);
    // a curve leaving B_f
    TropCurve out;
    out.vertices = {{0, {Rational(4), Rational(1)}}, {0, {}}};
    out.edges = {{0, 1, {-4, -1}, 1}};
    out.marks = {0, 1};
    CHECK(validate_trop_curve(b, bf, out, 1).front().item == 0);
}

TEST_CASE("simplification keeps the image")
{
    Base b = one_seed();
    Spine be = bent_example();
    TropCurve c = make_cylinder(b, be, 1);
    // subdivide the first edge at its midpoint
    Spine sub = normalize_spine(b, be);
    BasePoint mid = point_on_edge(b, sub, 0, Rational(1, 2));
    auto [a, rest] = split_spine(b, sub, mid);
    TropCurve fine = make_cylinder(b, glue_spines(b, a, rest), 2);
    CHECK(fine.vertices.size() == c.vertices.size() + 1);
    fine.marks = {static_cast<int>(a.vertices.size())};  // the bend
    TropCurve simple = make_simple(b, fine);
    CHECK(simple.vertices.size() == c.vertices.size());
    CHECK(total_image_length(b, simple) == total_image_length(b, c));
    CHECK(same_cylinder(b, simple, c));
    // marked vertices survive
    fine.marks = {1};
    CHECK(make_simple(b, fine).vertices.size() == fine.vertices.size());
}

TEST_CASE("membership in T")
{
    Base b = one_seed();
    Spine be = bent_example();
    BfRegion bf = region(b, {be});
    TropCurve ref = make_cylinder(b, be, 1);
    TropCurve c = cylinder_to_Bf(b, bf, ref);
    CHECK(is_in_T(b, bf, c, ref));

    // an extra unmarked point on the path does not matter
    TropCurve sub = c;
    {
        int k = 0;
        while (sub.edges[k].head == sub.interior_mark() || sub.vertices[sub.edges[k].head].is_origin())
            ++k;
        const TropEdge e = sub.edges[k];
        StraightWalk w = trop::edge_walk(b, sub, e);
        BasePoint mid = b.canonical(b.walk(sub.vertices[e.tail], e.dir, w.pieces.back().s_to / 2).end_point());
        StraightWalk w2 = b.walk(sub.vertices[e.tail], e.dir, w.pieces.back().s_to / 2);
        int m = static_cast<int>(sub.vertices.size());
        sub.vertices.push_back(mid);
        sub.edges[k].head = m;
        IntVec d2 = to_canonical_chart(b, w2.pieces.back().cone, w2.pieces.back().to, w2.final_dir);
        sub.edges.push_back({m, e.head, d2, e.speed});
        REQUIRE(validate_trop_curve(b, bf, sub, 2).empty());
    }
    CHECK(is_in_T(b, bf, sub, ref));

    // marked elsewhere on the same spine
    TropCurve other = cylinder_to_Bf(b, bf, make_cylinder(b, be, 0));
    CHECK_FALSE(is_in_T(b, bf, other, ref));
    // boundary marks swapped
    TropCurve sw = c;
    std::swap(sw.marks[0], sw.marks[1]);
    CHECK_FALSE(is_in_T(b, bf, sw, ref));
    // a straight spine through the same marked point; the halves of the
    // bent example have ends parallel to both cylinders
    auto [l1, l2] = halves(b);
    BfRegion both = region(b, {l1, l2});
    Spine straight{{{0, {1, 0}}, {0, {2, 1}}}, {{{1, 1}, 1}}};
    CHECK_FALSE(is_in_T(b, both, cylinder_to_Bf(b, both, make_cylinder(b, straight, 0)), ref));
    CHECK(is_in_T(b, both, cylinder_to_Bf(b, both, ref), ref));

    // the double cylinder lies in its own T^d
    TropCurve dc = make_double_cylinder(b, l1, l2);
    TropCurve dcf = cylinder_to_Bf(b, both, dc);
    CHECK(is_in_T(b, both, dcf, dc));
    CHECK_FALSE(is_in_T(b, both, cylinder_to_Bf(b, both, ref), dc));
}

TEST_CASE("twigs lie on a ray")
{
    std::mt19937 rng(11);
    for (const Base& b : {toric(), one_seed(), Base({{0, 0, 1}, {}}), Base({{-1, -1, 1}, {}})}) {
        for (int i = 0; i < 150; ++i) {
            gen::Twig t = gen::random_twig(b, rng);
            TwigResult r = twig_check(b, t.tree, t.root);
            INFO(r.reason);
            REQUIRE(r.ok);
            CHECK(b.canonical(r.ray) == t.ray);
        }
    }

    Base b = one_seed();
    gen::Twig t;
    std::mt19937 rng2(5);
    do
        t = gen::random_twig(b, rng2);
    while (t.tree.edges.size() < 3);
    // rooted at O
    int leaf = -1;
    for (std::size_t v = 0; v < t.tree.vertices.size(); ++v)
        if (t.tree.vertices[v].is_origin())
            leaf = static_cast<int>(v);
    TwigResult r = twig_check(b, t.tree, leaf);
    CHECK_FALSE(r.ok);
    CHECK(r.witness == leaf);

    // a bent vertex off the ray, unbalanced
    TropCurve bent;
    bent.vertices = {{0, {2, 1}}, {0, {1, 2}}, {0, {}}};
    bent.edges = {{0, 1, {-1, 1}, 1}, {1, 2, {-1, -2}, 1}};
    r = twig_check(b, bent, 0);
    CHECK_FALSE(r.ok);
    CHECK(r.witness == 1);
    // balanced only when the root is on the same ray
    TropCurve line;
    line.vertices = {{0, {3, 3}}, {0, {1, 1}}, {0, {}}};
    line.edges = {{0, 1, {-1, -1}, 1}, {1, 2, {-1, -1}, 1}};
    r = twig_check(b, line, 0);
    CHECK(r.ok);
    CHECK(r.ray == BasePoint{0, {1, 1}});
}

TEST_CASE("rigidity")
{
    Base b = one_seed();
    Spine be = bent_example();
    BfRegion bf = region(b, {be});
    TropCurve c = cylinder_to_Bf(b, bf, make_cylinder(b, be, 1));
    RigidityReport fixed = rigidity_report(b, bf, c, 2);
    CHECK(fixed.rigid());
    CHECK(fixed.trials_moved == 0);
    RigidityReport free = rigidity_report(b, bf, c, 2, false, 8);
    CHECK_FALSE(free.rigid());
    CHECK(free.trials_moved > 0);

    Base t = toric();
    Spine line{{{0, {1, 2}}, {0, {2, 1}}}, {{{1, -1}, 1}}};
    BfRegion bt = region(t, {line});
    TropCurve s = cylinder_to_Bf(t, bt, make_cylinder(t, line, 0));
    CHECK(rigidity_probe(t, bt, s, 2));
    CHECK_FALSE(rigidity_probe(t, bt, s, 2, false));

    auto [l1, l2] = halves(b);
    BfRegion bf2 = region(b, {l1, l2});
    TropCurve dc = cylinder_to_Bf(b, bf2, make_double_cylinder(b, l1, l2));
    CHECK(rigidity_probe(b, bf2, dc, 4));
    CHECK_FALSE(rigidity_probe(b, bf2, dc, 4, false));
}

TEST_CASE("nullspace")
{
    trop::RatMatrix m{{1, 2, 3}, {2, 4, 6}};
    auto n = trop::nullspace(m, 3);
    CHECK(n.size() == 2);
    for (const auto& v : n)
        CHECK(v[0] + 2 * v[1] + 3 * v[2] == 0);
    CHECK(trop::rank_of({{1, 0}, {0, 1}}, 2) == 2);
}

TEST_CASE("degenerations of the five-pointed curve")
{
    CHECK(delta_curve(ExtRational::of(0), DeltaGraph::G) == delta_curve(ExtRational::of(0), DeltaGraph::Gprime));
    CHECK(delta_curve(ExtRational::of(0), DeltaGraph::G).leg_partition().empty());
    for (const auto& r : {ExtRational::of(Rational(1, 3)), ExtRational::of(2), ExtRational::infinity()}) {
        CHECK_FALSE(delta_curve(r, DeltaGraph::G) == delta_curve(r, DeltaGraph::Gprime));
        CHECK(delta_curve(r, DeltaGraph::G) == delta_curve(r, DeltaGraph::G));
    }
    CHECK_FALSE(delta_curve(ExtRational::of(1), DeltaGraph::G) == delta_curve(ExtRational::of(2), DeltaGraph::G));
    using P = std::set<std::set<std::string>>;
    CHECK(delta_curve(ExtRational::infinity(), DeltaGraph::G).leg_partition() == P{{"2.1", "1.2"}, {"1.1", "2.2"}});
    CHECK(delta_curve(ExtRational::infinity(), DeltaGraph::Gprime).leg_partition() ==
          P{{"1.1", "1.2"}, {"2.1", "2.2"}});
    CHECK_THROWS_AS(ExtRational::of(-1), Error);
    CHECK(trop::leg_pairs(DeltaGraph::G) == std::vector<std::pair<int, int>>{{0, 3}, {2, 1}});
    CHECK(trop::leg_pairs(DeltaGraph::Gprime) == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
}

TEST_CASE("splitting double cylinders")
{
    Base b = one_seed();
    auto [l1, l2] = halves(b);
    TropCurve dc = make_double_cylinder(b, l1, l2);

    auto [c1, c2] = split_double_cylinder(b, dc, DeltaGraph::Gprime);
    CHECK(same_cylinder(b, c1, make_cylinder(b, l1, l1.vertices.size() - 1)));
    CHECK(same_cylinder(b, c2, make_cylinder(b, l2, 0)));
    CHECK(same_cylinder(b, join_cylinders(c1, c2, DeltaGraph::Gprime), dc));

    auto [c3, c4] = split_double_cylinder(b, dc, DeltaGraph::G);
    Spine l3 = glue_spines(b, l1, l2);
    CHECK(same_cylinder(b, c3, make_cylinder(b, l3, l1.vertices.size() - 1)));
    CHECK(validate_cylinder(b, c4, 2).empty());
    CHECK(c4.edges.empty());
    CHECK(c4.legs[0].dir == -c4.legs[1].dir);
    CHECK(same_cylinder(b, join_cylinders(c3, c4, DeltaGraph::G), dc));
    CHECK_FALSE(same_cylinder(b, join_cylinders(c3, c4, DeltaGraph::Gprime), dc));

    TropCurve moved = dc;
    moved.marks = {0};
    CHECK_THROWS_MATCHES(split_double_cylinder(b, moved, DeltaGraph::G), Error, kind_is(ErrorKind::NotInTd));

    // random gluable pairs
    std::mt19937 rng(3);
    gen::SpineOptions opt;
    opt.max_segments = 3;
    int done = 0;
    for (int i = 0; i < 200 && done < 25; ++i) {
        Spine s = normalize_spine(b, gen::random_spine(b, rng, opt));
        std::uniform_int_distribution<std::size_t> edge(0, s.edges.size() - 1);
        auto [a, z] = split_spine(b, s, point_on_edge(b, s, edge(rng), Rational(1, 3)));
        TropCurve d = make_double_cylinder(b, a, z);
        REQUIRE(validate_cylinder(b, d, 4).empty());
        for (DeltaGraph g : {DeltaGraph::G, DeltaGraph::Gprime}) {
            auto [x, y] = split_double_cylinder(b, d, g);
            CHECK(validate_cylinder(b, x, 2).empty());
            CHECK(validate_cylinder(b, y, 2).empty());
            CHECK(same_cylinder(b, join_cylinders(x, y, g), d));
        }
        ++done;
    }
    CHECK(done == 25);
}

TEST_CASE("retracted random cylinders are curves in B_f")
{
    std::mt19937 rng(21);
    for (const Base& b : {toric(), one_seed(), Base({{0, 0, 1}, {}})}) {
        for (int i = 0; i < 30; ++i) {
            Spine s = normalize_spine(b, gen::random_spine(b, rng));
            std::uniform_int_distribution<std::size_t> vtx(0, s.vertices.size() - 1);
            TropCurve cyl = make_cylinder(b, s, vtx(rng));
            BfRegion bf = bf_for_cylinders(b, {cyl});
            TropCurve c = cylinder_to_Bf(b, bf, cyl);
            CHECK(validate_trop_curve(b, bf, c, 2).empty());
            CHECK(is_in_T(b, bf, c, cyl));
            CHECK(rigidity_probe(b, bf, c, 2));

            std::uniform_int_distribution<std::size_t> edge(0, s.edges.size() - 1);
            auto [l1, l2] = split_spine(b, s, point_on_edge(b, s, edge(rng), Rational(2, 5)));
            TropCurve dc = make_double_cylinder(b, l1, l2);
            BfRegion bf2 = bf_for_cylinders(b, {dc});
            TropCurve d = cylinder_to_Bf(b, bf2, dc);
            CHECK(validate_trop_curve(b, bf2, d, 4).empty());
            CHECK(in_Md(d));
            CHECK(is_in_T(b, bf2, d, dc));
            CHECK(rigidity_probe(b, bf2, d, 4));
        }
    }
}
