#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "boolperc/errors.hpp"
#include "boolperc/geometry.hpp"

using namespace boolperc;

namespace {

// Brute force over the cube [-r, r]^d.
void cube_sites(int d, Radius r, std::vector<Site>& out, Site cur = Site(), int axis = 0)
{
    if (axis == 0) {
        cur = Site(d);
    }
    if (axis == d) {
        out.push_back(cur);
        return;
    }
    for (Coord c = -r; c <= r; ++c) {
        cur[axis] = c;
        cube_sites(d, r, out, cur, axis + 1);
    }
}

std::uint64_t count_norm(int d, Radius r, bool sphere)
{
    std::vector<Site> all;
    cube_sites(d, r, all);
    std::uint64_t n = 0;
    for (const auto& x : all) {
        Coord const k = l1_norm(x);
        n += sphere ? (k == r) : (k <= r);
    }
    return n;
}

}  // namespace

TEST_SUITE("geometry")
{
    TEST_CASE("cardinalities agree with enumeration of the cube")
    {
        for (int d = 1; d <= 4; ++d) {
            for (Radius r = 0; r <= (d == 4 ? 6 : 10); ++r) {
                CHECK(ball_cardinality(d, r) == count_norm(d, r, false));
                CHECK(sphere_cardinality(d, r) == count_norm(d, r, true));
                CHECK(ball_sites(Site::origin(d), r).size() == ball_cardinality(d, r));
                CHECK(sphere_sites(d, r).size() == sphere_cardinality(d, r));
            }
        }
        CHECK(sphere_cardinality(2, 5) == 20);
        CHECK(ball_cardinality(2, 2) == 13);
        CHECK(sphere_cardinality(1, 0) == 1);
    }

    TEST_CASE("spheres hold exactly the sites of the given norm")
    {
        for (const auto& x : sphere_sites(3, 4)) {
            CHECK(l1_norm(x) == 4);
        }
        auto const s = sphere_sites(2, 3);
        CHECK(std::is_sorted(s.begin(), s.end()));
    }

    TEST_CASE("ball constant bounds the ball volume")
    {
        for (int d = 1; d <= 5; ++d) {
            CHECK(ball_constant(d) == static_cast<std::uint64_t>(std::pow(3, d)));
            for (Radius r = 1; r <= 200; ++r) {
                CHECK(static_cast<double>(ball_cardinality(d, r)) <= static_cast<double>(ball_constant(d)) * std::pow(r, d));
            }
        }
    }

    TEST_CASE("window indexing round-trips and ball windows hold their members")
    {
        Window const box = Window::box(Site{-2, 3}, Site{4, 5});
        CHECK(box.size() == 21);
        for (std::size_t i = 0; i < box.box_size(); ++i) {
            CHECK(box.index(box.site(i)) == i);
        }
        Window const ball = Window::l1_ball(Site{1, -1}, 4);
        CHECK(ball.size() == ball_cardinality(2, 4));
        std::vector<Site> visited;
        for_each_site(ball, [&](const Site& x) { visited.push_back(x); });
        std::vector<Site> expected;
        for (std::size_t i = 0; i < ball.box_size(); ++i) {
            Site const x = ball.site(i);
            if (l1_distance(x, Site{1, -1}) <= 4) {
                expected.push_back(x);
            }
        }
        CHECK(visited == expected);  // members only, in index order
        CHECK(ball.on_boundary(Site{5, -1}));
        CHECK(!ball.on_boundary(Site{4, -1}));
        CHECK(ball.inner_radius(Site{1, -1}) == 4);
        CHECK(ball.inner_radius(Site{9, 9}) == -1);
        CHECK(ball.contains_ball(Site{2, -1}, 3));
        CHECK(!ball.contains_ball(Site{2, -1}, 4));
    }

    TEST_CASE("clipped ball iteration matches filtering")
    {
        Window const w = Window::box(Site{0, 0}, Site{5, 3});
        std::size_t n = 0;
        for_each_in_ball(Site{1, 1}, 3, w, [&](const Site& x) {
            CHECK(w.contains(x));
            CHECK(l1_distance(x, Site{1, 1}) <= 3);
            ++n;
        });
        std::size_t brute = 0;
        for_each_site(w, [&](const Site& x) { brute += l1_distance(x, Site{1, 1}) <= 3; });
        CHECK(n == brute);
    }

    TEST_CASE("spheres are covered by balls around scaled sphere points")
    {
        for (int d = 1; d <= 3; ++d) {
            for (Radius n = 1; n <= 2; ++n) {
                for (Radius r = 1; r <= 4; ++r) {
                    CHECK(sphere_covering_check(d, n, r).covered);
                }
            }
        }
        CHECK_THROWS_AS(sphere_covering_check(3, 50, 50, 1000), BudgetExceeded);
    }

    TEST_CASE("rounding distance in exact arithmetic")
    {
        std::vector<std::vector<Rational>> samples{
            {Rational(1), Rational(1, 2), Rational(1, 2)},
            {Rational(2, 3), Rational(2, 3), Rational(2, 3)},
            {Rational(1), Rational(1), Rational(0)},
        };
        CHECK(rounding_distance_check(3, 2, samples));
        std::vector<std::vector<Rational>> bad{{Rational(1, 2), Rational(1), Rational(1, 2)}};
        CHECK_THROWS_AS(rounding_distance_check(3, 2, bad), HypothesisViolation);
        CHECK_THROWS_AS(rounding_distance_check(3, 3, samples), HypothesisViolation);
    }
}
