#include "doctest.h"

#include <cmath>

#include "boolperc/errors.hpp"
#include "boolperc/harris_coupling.hpp"
#include "boolperc/monte_carlo.hpp"
#include "boolperc/rng.hpp"

using namespace boolperc;

TEST_SUITE("harris_coupling")
{
    TEST_CASE("max-mark CDF closed forms")
    {
        RadiusLaw const law = RadiusLaw::geometric(0.5);
        for (double M : {0.5, 2.0}) {
            for (double t : {0.1, 1.0}) {
                for (Radius r : {0, 1, 4}) {
                    double const g = std::ldexp(1.0, -static_cast<int>(r + 1));  // P(R > r)
                    MaxMarkCdf const c = max_mark_cdf(M, law, t, r);
                    CHECK(c.unconditional == doctest::Approx(std::exp(-M * t * g)).epsilon(1e-12));
                    double const cond = (std::exp(-M * t * g) - std::exp(-M * t)) / (1.0 - std::exp(-M * t));
                    CHECK(c.conditional == doctest::Approx(cond).epsilon(1e-12));
                    CHECK(F_xt(M, law, t, r) == doctest::Approx(cond).epsilon(1e-12));
                }
            }
        }
    }

    TEST_CASE("schedules are reproducible and ordered")
    {
        RadiusLaw const law = RadiusLaw::geometric(0.3);
        Schedule const a = sample_schedule(3.0, law, 0.0, 10.0, 42);
        Schedule const b = sample_schedule(3.0, law, 0.0, 10.0, 42);
        REQUIRE(a.count() == b.count());
        CHECK(a.count() > 0);
        for (std::size_t i = 0; i < a.count(); ++i) {
            CHECK(a.events[i].time == b.events[i].time);
            CHECK(a.events[i].mark == b.events[i].mark);
            CHECK(a.events[i].time > 0.0);
            CHECK(a.events[i].time <= 10.0);
            if (i > 0) {
                CHECK(a.events[i].time > a.events[i - 1].time);
            }
        }
        CHECK_THROWS_AS(sample_schedule(0.0, law, 0.0, 1.0, 1), std::invalid_argument);
    }

    TEST_CASE("event counts are Poisson")
    {
        double const M = 2.0;
        double const t = 1.5;
        std::vector<double> counts(20'000);
        for (std::size_t i = 0; i < counts.size(); ++i) {
            counts[i] = static_cast<double>(sample_schedule(M, RadiusLaw::point_mass(0), t, replica_seed(3, i)).count());
        }
        MeanStat const m = mean_stat(counts);
        CHECK(std::abs(m.mean - M * t) < 4.0 * m.std_error);
    }

    TEST_CASE("window schedules are keyed by site")
    {
        RateField const rates(std::vector<double>{1.0, 2.0});
        SiteLawField const marks(RadiusLaw::geometric(0.5));
        Window const small = Window::cube(Site{0, 0}, 2);
        Window const big = Window::cube(Site{0, 0}, 5);
        auto const a = sample_schedules(small, rates, marks, 0.0, 1.0, 9);
        auto const b = sample_schedules(big, rates, marks, 0.0, 1.0, 9);
        for_each_site(small, [&](const Site& x) {
            const Schedule& sa = a[small.index(x)];
            const Schedule& sb = b[big.index(x)];
            REQUIRE(sa.count() == sb.count());
            for (std::size_t i = 0; i < sa.count(); ++i) {
                CHECK(sa.events[i].time == sb.events[i].time);
            }
        });
        CHECK(rates.lower() == 1.0);
        CHECK(rates.upper() == 2.0);
        CHECK(rates.at(Site{0, 0}) == 1.0);
        CHECK(rates.at(Site{1, 0}) == 2.0);
    }

    TEST_CASE("site coupling marginals")
    {
        double const M = 1.3;
        double const t = 0.7;
        RadiusLaw const law = RadiusLaw::geometric(0.4);
        SiteCoupling const c(M, law, t);
        CHECK(c.occupation() == doctest::Approx(1.0 - std::exp(-M * t)).epsilon(1e-12));
        Stream rng(17);
        std::size_t occupied = 0;
        std::size_t small = 0;
        std::size_t const n = 50'000;
        for (std::size_t i = 0; i < n; ++i) {
            CoupledSite const s = c(rng.uniform(), rng.uniform());
            if (s.occupied) {
                ++occupied;
                small += s.radius <= 1;
            }
        }
        double const q = c.occupation();
        CHECK(std::abs(static_cast<double>(occupied) / n - q) < 4.0 * std::sqrt(q * (1 - q) / n));
        double const f1 = F_xt(M, law, t, 1);
        double const phat = static_cast<double>(small) / static_cast<double>(occupied);
        CHECK(std::abs(phat - f1) < 4.0 * std::sqrt(f1 * (1 - f1) / static_cast<double>(occupied)));
    }

    TEST_CASE("h is monotone and t-monotonicity holds")
    {
        std::vector<double> grid;
        for (int i = 0; i <= 200; ++i) {
            grid.push_back(0.05 * i);
        }
        for (double a : {0.01, 0.25, 0.5, 0.9, 1.0}) {
            CHECK(monotone_h_check(a, grid));
        }
        CHECK_THROWS_AS(monotone_h_check(0.0, grid), std::invalid_argument);
        CHECK(h_ratio(0.3, 0.0) == doctest::Approx(0.3));
        CHECK(h_ratio(0.3, 2.0) == doctest::Approx((1 - std::exp(-0.6)) / (1 - std::exp(-2.0))));
        Stream rng(5);
        RadiusLaw const law = RadiusLaw::power_law(2.5);
        // Each call builds two max-mark laws, so keep the draw count modest.
        for (int i = 0; i < 300; ++i) {
            CHECK(t_monotonicity_check(1.7, law, 0.2, 0.9, rng.uniform(), rng.uniform()));
        }
    }

    TEST_CASE("t0")
    {
        CHECK(t0(2.0, 0.1) == doctest::Approx(-std::log(0.9) / 2.0));
        CHECK(t0(1e-6, 0.5) == 1.0);
        CHECK_THROWS_AS(t0(0.0, 0.1), std::invalid_argument);
    }

    TEST_CASE("dominating process")
    {
        RateField const rates(std::vector<double>{1.0, 2.0});
        SiteLawField const marks(std::vector<RadiusLaw>{RadiusLaw::geometric(0.5), RadiusLaw::geometric(0.3)});
        DominatingProcess const dom(rates, marks, 2);
        CHECK(dom.rate_upper() == 2.0);
        CHECK(dom.rate_lower() == 1.0);
        for (Radius r = 0; r <= 60; ++r) {
            CHECK(dom.radius_law().pmf(r) <= dom.pmf_bound(r) + 1e-15);
        }
        Stream rng(8);
        for (int i = 0; i < 2000; ++i) {
            double const u1 = rng.uniform();
            double const u2 = rng.uniform();
            double const t = rng.uniform();
            CoupledSite const star = dom(t, u1, u2);
            for (std::size_t k = 0; k < 2; ++k) {
                CoupledSite const x = coupled_site(rates.classes()[k], marks.classes()[k], t, u1, u2);
                if (x.occupied) {
                    CHECK(star.occupied);
                    CHECK(x.radius <= star.radius);
                }
            }
        }
        CHECK_THROWS_AS(DominatingProcess(rates, SiteLawField(RadiusLaw::power_law(2.5)), 2), DivergentMoment);
    }

    TEST_CASE("Harris sample keeps the largest mark in the interval")
    {
        Window const w = Window::cube(Site{0}, 2);
        std::vector<Schedule> sched(w.box_size());
        sched[w.index(Site{-1})].events = {{0.1, 5, 0.5}, {0.6, 1, 0.5}, {0.8, 2, 0.5}};
        sched[w.index(Site{2})].events = {{0.05, 3, 0.5}};
        MarkedSample const s = harris_sample(sched, w, 0.5, 1.0);
        CHECK(s.radius(Site{-1}) == 2);
        CHECK(s.radius(Site{2}) == MarkedSample::kVacant);
        CHECK(s.occupied_count() == 1);
        MarkedSample const all = harris_sample(sched, w, 0.0, 1.0);
        CHECK(all.radius(Site{-1}) == 5);
        CHECK(all.radius(Site{2}) == 3);
        CHECK(harris_graph(sched, w, 0.0, 1.0).count() == 1);
        CHECK_THROWS(harris_sample(std::span<const Schedule>(sched).first(2), w, 0.0, 1.0));
    }
}
