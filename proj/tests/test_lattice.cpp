#include "cylinders/lattice.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>

using namespace cylinders;

namespace {

// Irreducible lattice points of the cone: brute force over the fundamental
// parallelogram, which contains the whole Hilbert basis.
std::vector<IntVec> hilbert_basis_oracle(const RatCone& c)
{
    const long long bx = static_cast<long long>(abs_int(c.g1().x) + abs_int(c.g2().x));
    const long long by = static_cast<long long>(abs_int(c.g1().y) + abs_int(c.g2().y));
    std::vector<IntVec> pts;
    for (long long x = -bx; x <= bx; ++x)
        for (long long y = -by; y <= by; ++y) {
            IntVec p{x, y};
            if (!p.is_zero() && c.contains(p))
                pts.push_back(p);
        }
    std::set<IntVec> all(pts.begin(), pts.end());
    std::vector<IntVec> basis;
    for (const auto& p : pts) {
        bool reducible = false;
        for (const auto& q : pts) {
            if (q == p)
                continue;
            IntVec r = p - q;
            if (!r.is_zero() && c.contains(r)) {
                reducible = true;
                break;
            }
        }
        if (!reducible)
            basis.push_back(p);
    }
    return basis;
}

// Fewest cones in a unimodular subdivision, by breadth-first search over
// chains of primitive rays from g1 to g2 with consecutive determinant 1.
std::size_t min_subdivision_oracle(const RatCone& c, long long box)
{
    std::vector<IntVec> cand;
    for (long long x = -box; x <= box; ++x)
        for (long long y = -box; y <= box; ++y) {
            IntVec p{x, y};
            if (!p.is_zero() && is_primitive(p) && c.contains(p))
                cand.push_back(p);
        }
    std::map<IntVec, std::size_t> dist{{c.g1(), 0}};
    std::queue<IntVec> q;
    q.push(c.g1());
    while (!q.empty()) {
        IntVec u = q.front();
        q.pop();
        if (u == c.g2())
            return dist[u];
        for (const auto& v : cand)
            if (det(u, v) == 1 && !dist.count(v)) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
    }
    return 0;
}

std::set<IntVec> rays_of(const std::vector<RatCone>& cones)
{
    std::set<IntVec> rays;
    for (const auto& c : cones) {
        rays.insert(c.g1());
        rays.insert(c.g2());
    }
    return rays;
}

} // namespace

TEST_CASE("lattice length")
{
    CHECK(lattice_length({2, 4}) == 2);
    CHECK(lattice_length({3, 0}) == 3);
    CHECK(lattice_length({5, 7}) == 1);
    CHECK(lattice_length({-6, 9}) == 3);
    CHECK_THROWS_AS(lattice_length({0, 0}), Error);

    std::mt19937 rng(7);
    std::uniform_int_distribution<int> d(-40, 40);
    for (int i = 0; i < 500; ++i) {
        IntVec v{d(rng), d(rng)};
        if (v.is_zero())
            continue;
        IntVec p = primitive(v);
        CHECK(lattice_length(v) * p == v);
        CHECK(lattice_length(p) == 1);
    }
}

TEST_CASE("unimodular cones")
{
    CHECK(is_unimodular(RatCone({1, 0}, {0, 1})));
    CHECK_FALSE(is_unimodular(RatCone({1, 0}, {1, 2})));
    CHECK(is_unimodular(RatCone({2, 1}, {1, 1})));
    // generators are normalized to counterclockwise order
    RatCone c({0, 1}, {1, 0});
    CHECK(c.g1() == IntVec{1, 0});
    CHECK(c.g2() == IntVec{0, 1});
    CHECK_THROWS_AS(RatCone({1, 1}, {2, 2}), Error);
}

TEST_CASE("Hirzebruch-Jung subdivision, fixed cases")
{
    auto s = unimodular_subdivide(RatCone({1, 0}, {0, 1}));
    REQUIRE(s.size() == 1);
    CHECK(s[0] == RatCone({1, 0}, {0, 1}));

    s = unimodular_subdivide(RatCone({1, 0}, {1, 2}));
    REQUIRE(s.size() == 2);
    CHECK(s[0] == RatCone({1, 0}, {1, 1}));
    CHECK(s[1] == RatCone({1, 1}, {1, 2}));

    // cone((1,0),(2,5)): inserted rays from the brute-force Hilbert basis
    RatCone c({1, 0}, {2, 5});
    s = unimodular_subdivide(c);
    auto hb = hilbert_basis_oracle(c);
    CHECK(rays_of(s) == std::set<IntVec>(hb.begin(), hb.end()));
    // frozen from the oracle: (1,0),(1,1),(1,2),(2,5)
    CHECK(rays_of(s) == std::set<IntVec>{{1, 0}, {1, 1}, {1, 2}, {2, 5}});
}

TEST_CASE("Hirzebruch-Jung subdivision, properties over random cones")
{
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> d(-7, 7);
    int checked = 0;
    while (checked < 200) {
        IntVec a{d(rng), d(rng)}, b{d(rng), d(rng)};
        if (a.is_zero() || b.is_zero() || det(a, b) == 0)
            continue;
        RatCone c(a, b);
        auto cones = unimodular_subdivide(c);
        // consecutive, unimodular, spanning
        CHECK(cones.front().g1() == c.g1());
        CHECK(cones.back().g2() == c.g2());
        for (std::size_t i = 0; i < cones.size(); ++i) {
            CHECK(is_unimodular(cones[i]));
            if (i + 1 < cones.size())
                CHECK(cones[i].g2() == cones[i + 1].g1());
        }
        // union equals the input cone on a dense sample of rays
        for (int x = -9; x <= 9; ++x)
            for (int y = -9; y <= 9; ++y) {
                IntVec v{x, y};
                if (v.is_zero())
                    continue;
                bool in_some = std::any_of(cones.begin(), cones.end(),
                                           [&](const RatCone& k) { return k.contains(v); });
                CHECK(in_some == c.contains(v));
            }
        auto hb = hilbert_basis_oracle(c);
        CHECK(rays_of(cones) == std::set<IntVec>(hb.begin(), hb.end()));
        if (c.multiplicity() <= 6)
            CHECK(cones.size() == min_subdivision_oracle(c, 8));
        ++checked;
    }
}

TEST_CASE("unimodular matrices")
{
    UniMatrix a(2, 1, 1, 1), b(0, 1, -1, 0), c(1, 3, 0, 1);
    CHECK((a * b) * c == a * (b * c));
    CHECK((a * b).det() == a.det() * b.det());
    CHECK(a * a.inverse() == UniMatrix::identity());
    CHECK_THROWS_AS(UniMatrix(2, 0, 0, 1), Error);
    UniMatrix r(0, 1, 1, 0);
    CHECK(r.det() == -1);
    CHECK(r * r.inverse() == UniMatrix::identity());
}
