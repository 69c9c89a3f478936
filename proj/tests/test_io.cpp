#include "cylinders/io.hpp"
#include "cylinders/svg.hpp"
#include "spine_gen.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <regex>

using namespace cylinders;
using io::json;

namespace {

Base one_seed() { return Base({{0, 1, 1}, {{0, "E"}}}); }

Spine bent_example()
{
    return Spine{{{2, {Rational(1, 2), Rational(3, 4)}}, {0, {1, 0}}, {0, {2, 1}}},
                 {{{-2, 1}, 1}, {{1, 1}, 2}}};
}

std::string schema_message(const json& j)
{
    try {
        io::spine_from(j, "", 3);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Schema);
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("rationals")
{
    for (const Rational& r : {Rational(0), Rational(-7, 3), Rational(Integer("123456789012345678901234567890"), 7)})
        CHECK(io::rational_from(io::to_json(r), "") == r);
    CHECK(io::to_json(Rational(6, 4)).dump() == R"({"den":"2","num":"3"})");
    CHECK(io::rational_from(json::parse(R"({"num":4,"den":"6"})"), "") == Rational(2, 3));
    CHECK(io::rational_from(json(5), "") == 5);
    CHECK_THROWS_AS(io::rational_from(json::parse(R"({"num":"1","den":"0"})"), ""), Error);
    CHECK_THROWS_AS(io::rational_from(json::parse(R"({"num":"1.5","den":"1"})"), ""), Error);
    CHECK_THROWS_AS(io::rational_from(json(1.5), ""), Error);
}

TEST_CASE("pair files")
{
    LooijengaData d{{0, 1, 1}, {{0, "E"}}};
    json j = io::to_json(d);
    CHECK(j["seeds"][0]["ray"] == 1);
    LooijengaData back = io::pair_from(j);
    CHECK(back.d == d.d);
    CHECK(back.seeds.size() == 1);
    CHECK(back.seeds[0].ray == 0);
    CHECK(io::dump(io::to_json(back)) == io::dump(j));

    auto err = [](const char* text) {
        try {
            io::pair_from(json::parse(text));
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(err(R"({"l":3,"d":[1,1]})").find("/d") != std::string::npos);
    CHECK(err(R"({"l":3,"d":[1,1,1],"seeds":[{"ray":4,"name":"E"}]})").find("/seeds/0/ray") != std::string::npos);
    CHECK(err(R"({"l":3,"d":[1,1,"x"]})").find("/d/2") != std::string::npos);
    CHECK(err(R"({"d":[1,1,1]})").find("/l") != std::string::npos);
    CHECK(err(R"({"l":3,"d":[1,1,1],"seeds":[{"ray":1,"name":"a b"}]})").find("/seeds/0/name") != std::string::npos);
}

TEST_CASE("spine files")
{
    Spine s = bent_example();
    json j = io::to_json(s);
    CHECK(j["vertices"][0]["cone"] == 3);
    CHECK(j["endpoints"] == json::array({1, 3}));
    CHECK(io::spine_from(j) == s);
    CHECK(io::dump(io::to_json(io::spine_from(json::parse(io::dump(j))))) == io::dump(j));

    json bad = j;
    bad["vertices"][1]["cone"] = 4;
    CHECK(schema_message(bad).find("/vertices/1/cone") != std::string::npos);
    bad = j;
    bad["edges"][1]["speed"] = {{"num", "1"}, {"den", "2"}};
    CHECK(schema_message(bad).find("/edges/1/speed") != std::string::npos);
    bad = j;
    bad["edges"].erase(1);
    CHECK(schema_message(bad).find("/edges") != std::string::npos);
    bad = j;
    bad["vertices"][0]["coords"][0] = -1;
    CHECK(schema_message(bad).find("/vertices/0/coords") != std::string::npos);
    bad = j;
    bad["endpoints"] = {1, 2};
    CHECK(schema_message(bad).find("/endpoints") != std::string::npos);

    Base b = one_seed();
    std::mt19937 rng(3);
    for (int i = 0; i < 100; ++i) {
        Spine r = gen::random_spine(b, rng);
        CHECK(io::spine_from(json::parse(io::dump(io::to_json(r)))) == r);
    }
}

TEST_CASE("diagrams, counts and regions")
{
    Base b = one_seed();
    ScatteringDiagram d = complete_diagram(b, initial_diagram(b, 3), 3);
    json j = io::to_json(d);
    ScatteringDiagram back = io::diagram_from(j);
    CHECK(io::dump(io::to_json(back)) == io::dump(j));
    CHECK(back.walls.size() == d.walls.size());

    Counts c = cylinder_counts(b, d, bent_example(), 3);
    CHECK(io::counts_from(io::to_json(c), "") == c);

    std::vector<ExtendedSpine> es{*extend_spine(b, bent_example()).spine};
    BfRegion bf = bf_for(b, es);
    json jb = io::to_json(bf);
    BfRegion bf2 = io::bf_from(json::parse(io::dump(jb)));
    CHECK(bf2.cutoff == bf.cutoff);
    CHECK(io::dump(io::to_json(bf2)) == io::dump(jb));

    TropCurve cyl = make_cylinder(b, bent_example(), 1);
    json jc = io::to_json(cyl);
    CHECK(io::dump(io::to_json(io::trop_curve_from(jc))) == io::dump(jc));
    jc["edges"][0]["head"] = 99;
    CHECK_THROWS_AS(io::trop_curve_from(jc), Error);
}

TEST_CASE("files and parse errors")
{
    try {
        io::parse_text("{\"l\": 3,", "in.json");
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Schema);
        CHECK(std::string(e.what()).find("SchemaError: in.json") == 0);
    }
    CHECK_THROWS_AS(io::read_file("/nonexistent/file.json"), Error);
}

namespace {

std::size_t occurrences(const std::string& s, const std::string& what)
{
    std::size_t n = 0;
    for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1))
        ++n;
    return n;
}

} // namespace

TEST_CASE("svg output")
{
    Base t({{1, 1, 1}, {}});
    Spine straight{{{0, {1, 2}}, {0, {2, 1}}}, {{{1, -1}, 1}}};
    std::string a = svg::render_spines(t, {straight});
    CHECK(a == svg::render_spines(t, {straight}));
    CHECK(occurrences(a, "<circle") == 3);  // two vertices and O
    CHECK_FALSE(std::regex_search(a, std::regex(R"((x|y|x1|y1|x2|y2|cx|cy)="[^"]*\.)")));

    Base b = one_seed();
    Spine be = bent_example();
    auto [l1, l2] = split_spine(b, be, point_on_edge(b, be, 1, Rational(1, 2)));
    std::string g = svg::render_spines(b, {glue_spines(b, l1, l2)}, {{l1.vertices.size() - 1}});
    CHECK(occurrences(g, "<rect x=") == 1);
    CHECK(occurrences(g, ">v") == 4);

    Base two({{0, 0, 1}, {{0, "E1"}, {1, "E2"}}});
    std::string d = svg::render_diagram(two, complete_diagram(two, initial_diagram(two, 3), 3));
    CHECK(occurrences(d, "stroke=\"#cc3333\"") == 4);  // two seed lines, both halves
    CHECK(occurrences(d, "stroke=\"#3366cc\"") == 1);
}
