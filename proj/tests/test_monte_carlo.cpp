#include "doctest.h"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "boolperc/monte_carlo.hpp"

using namespace boolperc;

TEST_SUITE("monte_carlo")
{
    TEST_CASE("parallel_for fills every slot regardless of workers")
    {
        for (unsigned workers : {1U, 2U, 5U}) {
            std::vector<std::uint64_t> out(1000);
            parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = replica_seed(1, i); });
            for (std::size_t i = 0; i < out.size(); ++i) {
                CHECK(out[i] == replica_seed(1, i));
            }
        }
        CHECK_THROWS_AS(parallel_for(100, 3,
                                     [](std::size_t i) {
                                         if (i == 57) {
                                             throw std::runtime_error("boom");
                                         }
                                     }),
                        std::runtime_error);
    }

    TEST_CASE("replica seeds are distinct")
    {
        std::set<std::uint64_t> seen;
        for (std::uint64_t i = 0; i < 10'000; ++i) {
            seen.insert(replica_seed(7, i));
        }
        CHECK(seen.size() == 10'000);
        CHECK(seen.count(7) == 0);
    }

    TEST_CASE("estimates do not depend on the worker count")
    {
        auto event = [](std::uint64_t s) { return Stream(s).uniform() < 0.3; };
        Estimate const a = estimate(5000, 3, event, 1);
        Estimate const b = estimate(5000, 3, event, 4);
        CHECK(a.successes == b.successes);
        CHECK(std::abs(a.mean - 0.3) < 4.0 * a.std_error);
    }

    TEST_CASE("Wilson interval")
    {
        double const z = 1.96;
        Interval const none = wilson_interval(0, 50, z);
        CHECK(none.lo == doctest::Approx(0.0));
        CHECK(none.hi == doctest::Approx(z * z / (50 + z * z)));
        Interval const all = wilson_interval(50, 50, z);
        CHECK(all.hi == doctest::Approx(1.0));
        CHECK(all.lo == doctest::Approx(50 / (50 + z * z)));
        Interval const mid = wilson_interval(30, 100, z);
        double const p = 0.3;
        double const c = (p + z * z / 200) / (1 + z * z / 100);
        double const h = z / (1 + z * z / 100) * std::sqrt(p * (1 - p) / 100 + z * z / 40000);
        CHECK(mid.lo == doctest::Approx(c - h));
        CHECK(mid.hi == doctest::Approx(c + h));
        Estimate const e = make_estimate(0, 50);
        CHECK(e.std_error == 0.0);
        CHECK(e.wilson.hi > 0.0);
    }

    TEST_CASE("mean statistics")
    {
        std::vector<double> const xs{1, 2, 3, 4};
        MeanStat const m = mean_stat(xs);
        CHECK(m.mean == doctest::Approx(2.5));
        CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
        MeanStat const a{100, 1.0, 0.1};
        MeanStat const b{100, 0.7, 0.1};
        CHECK(two_sample_z(a, b) == doctest::Approx(0.3 / std::sqrt(0.02)));
        CHECK(z_score(1.0, 1.0, 0.0) == 0.0);
        CHECK(std::isinf(z_score(1.0, 0.5, 0.0)));
        std::vector<double> const ys{2, 4, 6, 8};
        CHECK(correlation(xs, ys) == doctest::Approx(1.0));
        std::vector<double> const flat{1, 1, 1, 1};
        CHECK(correlation(xs, flat) == 0.0);
    }
}
