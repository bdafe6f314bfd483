#include "doctest.h"

#include <cmath>

#include "boolperc/coverage.hpp"
#include "boolperc/monte_carlo.hpp"

using namespace boolperc;

TEST_SUITE("coverage")
{
    TEST_CASE("covered fraction agrees with a direct scan")
    {
        for (int d = 1; d <= 2; ++d) {
            ModelParams params;
            params.retention = {0.1};
            params.laws = RadiusLaw::geometric(0.4);
            params.window = Window::cube(Site::origin(d), d == 1 ? 60 : 12);
            Window const target = Window::cube(Site::origin(d), d == 1 ? 30 : 6);
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                MarkedSample const s = sample(params, seed);
                auto const occupied = s.occupied_sites();
                std::size_t covered = 0;
                std::vector<Site> holes;
                for_each_site(target, [&](const Site& y) {
                    bool const hit = std::any_of(occupied.begin(), occupied.end(),
                                                 [&](const auto& c) { return l1_distance(c.first, y) <= c.second; });
                    covered += hit;
                    if (!hit) {
                        holes.push_back(y);
                    }
                });
                CHECK(covered_fraction(s, target)
                      == doctest::Approx(static_cast<double>(covered) / static_cast<double>(target.size())));
                CHECK(uncovered_sites(s, target) == holes);
            }
        }
    }

    TEST_CASE("expected coverage matches the product formula")
    {
        // P(y uncovered) = prod_x (1 - p P(R >= |x - y|)) over the sample window.
        RadiusLaw const law = RadiusLaw::power_law(2.0);
        double const p = 0.5;
        Window const window = Window::cube(Site{0}, 210);
        Window const target = Window::cube(Site{0}, 10);
        double oracle = 0.0;
        for_each_site(target, [&](const Site& y) {
            double miss = 1.0;
            for_each_site(window, [&](const Site& x) {
                Radius const dist = l1_distance(x, y);
                double const reach = dist == 0 ? 1.0 : law.tail(dist - 1);
                miss *= 1.0 - p * reach;
            });
            oracle += 1.0 - miss;
        });
        oracle /= static_cast<double>(target.size());
        ModelParams params;
        params.retention = {p};
        params.laws = law;
        params.window = window;
        std::vector<double> xs(2000);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            xs[i] = covered_fraction(sample(params, replica_seed(11, i)), target);
        }
        MeanStat const m = mean_stat(xs);
        CHECK(std::abs(m.mean - oracle) < 4.0 * m.std_error);
    }

    TEST_CASE("swallowing events")
    {
        MarkedSample s(Window::cube(Site{0, 0}, 10));
        s.place(Site{3, 0}, 4);
        CHECK(ball_swallow_event(s, 1));  // 4 >= 3 + 1
        CHECK(!ball_swallow_event(s, 2));
        CHECK(swallow_from_sphere(s, 3, 1));
        CHECK(!swallow_from_sphere(s, 2, 0));
    }

    TEST_CASE("Borel-Cantelli sums")
    {
        RadiusLaw const law = RadiusLaw::geometric(0.5);
        std::vector<Radius> const cut{0, 5, 50};
        auto const sums = borel_cantelli_sums(0.3, law, 1, 0, cut);
        double brute = 0.0;
        std::size_t j = 0;
        for (Radius k = 0; k <= 50; ++k) {
            brute += 0.3 * static_cast<double>(sphere_cardinality(1, k)) * law.tail(k);
            if (k == cut[j]) {
                CHECK(sums[j] == doctest::Approx(brute).epsilon(1e-12));
                ++j;
            }
        }
        // p (1/2 + 2 sum_{k>=1} 2^-(k+1)) = 1.5 p
        CHECK(std::abs(sums[2] - 0.45) < 1e-10);
        CHECK_THROWS(borel_cantelli_sums(0.3, law, 1, 0, std::vector<Radius>{5, 1}));
    }

    TEST_CASE("Abel summation identity")
    {
        for (const RadiusLaw& law : {RadiusLaw::geometric(0.3), RadiusLaw::power_law(2.5), RadiusLaw::point_mass(7)}) {
            for (int d = 1; d <= 3; ++d) {
                for (Radius r : {0, 2}) {
                    AbelForms const f = abel_forms(law, d, r, 40);
                    CHECK(f.sphere_form == doctest::Approx(f.ball_form + f.boundary).epsilon(1e-10));
                }
            }
        }
    }

    TEST_CASE("doubling test separates heavy and light tails")
    {
        CHECK(doubling_test(0.5, RadiusLaw::power_law(2.0), 1, 0, 100, 100'000).divergent);
        CHECK(!doubling_test(0.5, RadiusLaw::power_law(3.0), 1, 0, 100, 100'000).divergent);
        CHECK(!doubling_test(0.5, RadiusLaw::geometric(0.5), 1, 0, 10, 10'000).divergent);
        CHECK(doubling_test(0.5, RadiusLaw::power_law(3.0), 2, 0, 100, 100'000).divergent);
        CHECK_THROWS(doubling_test(0.5, RadiusLaw::geometric(0.5), 1, 0, 10, 15));
    }

    TEST_CASE("margin")
    {
        RadiusLaw const law = RadiusLaw::power_law(2.0);
        CHECK(coverage_margin(law, 10) == law.quantile(1.0 - 1e-3));
        CHECK(coverage_margin(law, 100'000) == 100'000);
    }
}
