#include "doctest.h"

#include <deque>
#include <map>
#include <set>

#include "boolperc/boolean_model.hpp"
#include "boolperc/errors.hpp"

using namespace boolperc;

namespace {

// Breadth-first search over the pairwise edge rule, restricted to `region`.
std::set<Site> bfs_cluster(const MarkedSample& s, const Window& region, const Site& x)
{
    std::vector<Site> members;
    for_each_site(region, [&](const Site& v) { members.push_back(v); });
    std::set<Site> seen{x};
    std::deque<Site> queue{x};
    while (!queue.empty()) {
        Site const v = queue.front();
        queue.pop_front();
        for (const Site& u : members) {
            if (!seen.count(u) && adjacent(s, u, v)) {
                seen.insert(u);
                queue.push_back(u);
            }
        }
    }
    return seen;
}

MarkedSample random_sample(int d, double p, const RadiusLaw& law, Radius half, std::uint64_t seed)
{
    ModelParams params;
    params.retention = {p};
    params.laws = law;
    params.window = Window::cube(Site::origin(d), half);
    return sample(params, seed);
}

}  // namespace

TEST_SUITE("boolean_model")
{
    TEST_CASE("sampling is keyed by seed and site")
    {
        ModelParams params;
        params.retention = {0.3};
        params.laws = RadiusLaw::geometric(0.5);
        params.window = Window::cube(Site{0, 0}, 10);
        MarkedSample const a = sample(params, 42);
        MarkedSample const b = sample(params, 42);
        params.window = Window::cube(Site{0, 0}, 25);
        MarkedSample const big = sample(params, 42);
        std::size_t occupied = 0;
        for_each_site(a.window(), [&](const Site& x) {
            CHECK(a.radius(x) == b.radius(x));
            CHECK(a.radius(x) == big.radius(x));
            occupied += a.occupied(x);
        });
        CHECK(occupied > 0);
        CHECK(occupied < a.window().size());
        SiteField const field(params, 42);
        for_each_site(big.window(), [&](const Site& x) { CHECK(field.radius(x) == big.radius(x)); });
        params.retention = {0.0};
        CHECK(sample(params, 1).occupied_count() == 0);
        params.retention = {1.0};
        CHECK_THROWS_AS(sample(params, 1), std::invalid_argument);
    }

    TEST_CASE("occupation frequency matches the retention per class")
    {
        ModelParams params;
        params.retention = {0.2, 0.6};
        params.window = Window::cube(Site{0, 0}, 150);
        MarkedSample const s = sample(params, 5);
        std::array<double, 2> hits{}, total{};
        for_each_site(s.window(), [&](const Site& x) {
            std::size_t const c = static_cast<std::size_t>(((x[0] + x[1]) % 2 + 2) % 2);
            total[c] += 1;
            hits[c] += s.occupied(x);
        });
        CHECK(hits[0] / total[0] == doctest::Approx(0.2).epsilon(0.05));
        CHECK(hits[1] / total[1] == doctest::Approx(0.6).epsilon(0.02));
    }

    TEST_CASE("edge rule")
    {
        MarkedSample s(Window::cube(Site{0, 0}, 5));
        s.place(Site{0, 0}, 2);
        CHECK(adjacent(s, Site{0, 0}, Site{1, 1}));
        CHECK(adjacent(s, Site{1, 1}, Site{0, 0}));
        CHECK(!adjacent(s, Site{0, 0}, Site{2, 1}));
        CHECK(!adjacent(s, Site{1, 1}, Site{1, 0}));  // vacant pairs are never joined
        CHECK(!adjacent(s, Site{0, 0}, Site{0, 0}));
        CHECK(neighbors(s, Site{0, 0}).size() == 12);
        s.place(Site{3, 0}, 0);
        CHECK(!adjacent(s, Site{3, 0}, Site{4, 0}));  // radius 0 keeps the center alone
    }

    TEST_CASE("cluster labels agree with breadth-first search")
    {
        for (int d = 1; d <= 2; ++d) {
            for (std::uint64_t seed = 0; seed < 6; ++seed) {
                MarkedSample const s = random_sample(d, 0.15, RadiusLaw::geometric(0.6), d == 1 ? 30 : 7, seed);
                ClusterReport const rep = clusters(s);
                std::size_t total = 0;
                for (auto n : rep.sizes) {
                    total += n;
                }
                CHECK(total == s.window().size());
                for_each_site(s.window(), [&](const Site& x) {
                    auto const oracle = bfs_cluster(s, s.window(), x);
                    CHECK(rep.sizes[rep.label_of(x)] == oracle.size());
                    for (const Site& y : oracle) {
                        CHECK(rep.label_of(y) == rep.label_of(x));
                    }
                });
            }
        }
    }

    TEST_CASE("diameter agrees with breadth-first search")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            MarkedSample const s = random_sample(2, 0.2, RadiusLaw::point_mass(1), 8, seed);
            auto const oracle = bfs_cluster(s, s.window(), Site{0, 0});
            Coord far = 0;
            bool edge = false;
            for (const Site& v : oracle) {
                far = std::max(far, l1_norm(v));
                edge = edge || s.window().on_boundary(v);
            }
            Diameter const d = diameter(s, Site{0, 0});
            CHECK(d.value == far);
            CHECK(d.censored == edge);
            CHECK(percolation_proxy(s) == edge);
        }
    }

    TEST_CASE("G agrees with search on the induced subgraph")
    {
        std::size_t positive = 0;
        for (std::uint64_t seed = 0; seed < 12; ++seed) {
            for (int d = 1; d <= 2; ++d) {
                MarkedSample const s = random_sample(d, d == 1 ? 0.5 : 0.25, RadiusLaw::geometric(0.5), d == 1 ? 40 : 14, seed);
                for (Radius r = 0; r <= 1; ++r) {
                    for (const Site& x : sphere_sites(d, 2)) {
                        Window const region = Window::l1_ball(x, 10 * r);
                        auto const cl = bfs_cluster(s, region, x);
                        bool const oracle = std::any_of(cl.begin(), cl.end(),
                                                        [&](const Site& v) { return l1_distance(v, x) > 8 * r; });
                        CHECK(event_G(s, x, r) == oracle);
                        positive += oracle;
                    }
                }
            }
        }
        CHECK(positive > 0);
        MarkedSample const small = random_sample(1, 0.5, RadiusLaw::point_mass(1), 5, 1);
        CHECK_THROWS_AS(event_G(small, Site{0}, 1), WindowTooSmall);
    }

    TEST_CASE("H and H-tilde on hand-built samples")
    {
        MarkedSample s(Window::l1_ball(Site{0, 0}, 120));
        s.place(Site{15, 0}, 1);  // 10 * 1 <= 15: no witness
        CHECK(!event_H(s, 1).occurred);
        s.place(Site{0, 15}, 2);  // 10 * 2 > 15 with |x| > 10
        CHECK(event_H(s, 1).occurred);
        CHECK(!event_H(s, 2).occurred);  // needs |x| > 20
        CHECK(event_H(s, 1).observed_to == 120);
        CHECK(event_Htilde(s, 2).occurred);
        CHECK(!event_Htilde(s, 3).occurred);
        CHECK(event_Htilde(s, 2).censored == false);
        CHECK(event_Htilde(s, 3).censored);  // B(0, 300) is not inside the window
    }

    TEST_CASE("H-tilde on the unbounded field matches a window holding B(0, 100r)")
    {
        ModelParams params;
        params.retention = {0.01};
        params.laws = RadiusLaw::geometric(0.5);
        params.window = Window::l1_ball(Site{0, 0}, 300);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            MarkedSample const s = sample(params, seed);
            SiteField const field(params, seed);
            for (Radius r = 1; r <= 3; ++r) {
                CHECK(event_Htilde(field, 2, r) == event_Htilde(s, r).occurred);
            }
        }
        params.laws = RadiusLaw::point_mass(2);
        SiteField const field(params, 1);
        CHECK(!event_Htilde(field, 2, 3));
        CHECK(event_Htilde(field, 2, 2));
    }

    TEST_CASE("H exterior bound")
    {
        // A radius-2 witness needs |x| < 20, so S_19 is the last sphere that counts.
        CHECK(h_exterior_bound(2, 0.1, RadiusLaw::point_mass(2), 19) == 0.0);
        CHECK(h_exterior_bound(2, 0.1, RadiusLaw::point_mass(2), 18)
              == doctest::Approx(0.1 * static_cast<double>(sphere_cardinality(2, 19))));
        // Geometric(1/2), d = 1: p sum_{k > K} 2 * 2^-(floor(k/10) + 1).
        double oracle = 0.0;
        for (Radius k = 51; k < 2000; ++k) {
            oracle += 0.1 * 2.0 * std::ldexp(1.0, -static_cast<int>(k / 10) - 1);
        }
        CHECK(h_exterior_bound(1, 0.1, RadiusLaw::geometric(0.5), 50) == doctest::Approx(oracle).epsilon(1e-9));
        CHECK(std::isinf(h_exterior_bound(1, 0.1, RadiusLaw::power_law(2.0), 50)));
    }

    TEST_CASE("site percolation and crossing proxies")
    {
        MarkedSample s(Window::box(Site{-2, -2}, Site{2, 2}));
        for (Coord x = -2; x <= 2; ++x) {
            s.place(Site{x, 0}, 0);
        }
        CHECK(!percolation_proxy(s));  // radius 0: no edges at all
        CHECK(site_percolation_proxy(s));
        CHECK(crossing_proxy(s, true));
        CHECK(!crossing_proxy(s, false));
        s.remove(Site{1, 0});
        CHECK(site_percolation_proxy(s));  // still reaches x = -2
        CHECK(!crossing_proxy(s, true));
        s.remove(Site{0, 0});
        CHECK(!site_percolation_proxy(s));
        s.place(Site{-1, 0}, 3);
        CHECK(crossing_proxy(s, false));
    }
}
