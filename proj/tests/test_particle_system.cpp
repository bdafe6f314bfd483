#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "boolperc/errors.hpp"
#include "boolperc/monte_carlo.hpp"
#include "boolperc/particle_system.hpp"

using namespace boolperc;

namespace {

std::set<std::vector<Site>> as_partition(std::vector<std::vector<Site>> parts)
{
    std::set<std::vector<Site>> out;
    for (auto& p : parts) {
        std::sort(p.begin(), p.end());
        out.insert(std::move(p));
    }
    return out;
}

// Components of the graph where u ~ v iff an occupied endpoint's ball holds
// the other, found by pairwise scans.
std::set<std::vector<Site>> brute_islands(const MarkedSample& s)
{
    std::vector<Site> sites;
    for_each_site(s.window(), [&](const Site& x) { sites.push_back(x); });
    auto adjacent = [&](const Site& u, const Site& v) {
        Radius const d = l1_distance(u, v);
        return (s.radius(u) != MarkedSample::kVacant && s.radius(u) >= d)
               || (s.radius(v) != MarkedSample::kVacant && s.radius(v) >= d);
    };
    std::vector<int> comp(sites.size(), -1);
    std::vector<std::vector<Site>> parts;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (comp[i] >= 0) {
            continue;
        }
        int const c = static_cast<int>(parts.size());
        parts.emplace_back();
        std::vector<std::size_t> stack{i};
        comp[i] = c;
        while (!stack.empty()) {
            std::size_t const a = stack.back();
            stack.pop_back();
            parts.back().push_back(sites[a]);
            for (std::size_t b = 0; b < sites.size(); ++b) {
                if (comp[b] < 0 && adjacent(sites[a], sites[b])) {
                    comp[b] = c;
                    stack.push_back(b);
                }
            }
        }
    }
    return as_partition(std::move(parts));
}

KalikowSpec voter_spec()
{
    KalikowSpec spec;
    spec.alphabet = 2;
    spec.rates = 1.0;
    spec.ranges = RadiusLaw::geometric(0.5);
    spec.kernel = voter_kernel();
    return spec;
}

SpinConfig random_config(const Window& w, int alphabet, std::uint64_t seed, BoundaryPolicy policy = {})
{
    SpinConfig c(w, alphabet, 0, policy);
    Stream rng(seed);
    for_each_site(w, [&](const Site& x) { c.set(x, static_cast<Spin>(rng() % static_cast<std::uint64_t>(alphabet))); });
    return c;
}

}  // namespace

TEST_SUITE("particle_system")
{
    TEST_CASE("kernels are normalized probability vectors")
    {
        Window const w = Window::cube(Site{0, 0}, 3);
        SpinConfig const c = random_config(w, 3, 1);
        for (const char* name : {"majority", "voter", "noisy-copy:0.2", "pointmass:1", "uniform", "flip"}) {
            Kernel const k = kernel_by_name(name);
            int const alphabet = std::string(name) == "majority" ? 2 : 3;
            SpinConfig const cfg = alphabet == 2 ? random_config(w, 2, 2) : c;
            for (Radius r = 0; r <= 2; ++r) {
                LocalView const view(cfg, Site{0, 0}, r);
                std::vector<double> probs(static_cast<std::size_t>(alphabet), 0.0);
                k.fn(view, probs);
                double sum = 0.0;
                for (double q : probs) {
                    CHECK(q >= 0.0);
                    sum += q;
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
        CHECK_THROWS(kernel_by_name("nope"));
    }

    TEST_CASE("local views refuse reads outside the ball")
    {
        Window const w = Window::cube(Site{0, 0}, 3);
        SpinConfig const c(w, 2);
        LocalView const view(c, Site{0, 0}, 1);
        CHECK_NOTHROW(view(Site{1, 0}));
        CHECK_THROWS_AS(view(Site{1, 1}), LocalityViolation);
    }

    TEST_CASE("boundary policies")
    {
        Window const w = Window::box(Site{0}, Site{4});
        SpinConfig frozen(w, 3, 0, {BoundaryKind::frozen, 2});
        frozen.set(Site{0}, 1);
        bool outside = false;
        CHECK(frozen.read(Site{-1}, &outside) == 2);
        CHECK(outside);
        SpinConfig periodic(w, 3, 0, {BoundaryKind::periodic, 0});
        periodic.set(Site{4}, 1);
        CHECK(periodic.read(Site{-1}) == 1);
        CHECK(periodic.read(Site{9}) == 1);
    }

    TEST_CASE("jump rates of the uniform kernel")
    {
        KalikowSpec spec;
        spec.alphabet = 3;
        spec.rates = 2.4;
        Window const w = Window::cube(Site{0}, 2);
        SpinConfig const c(w, 3);
        for (Spin s = 0; s < 3; ++s) {
            CHECK(jump_rate(spec, c, Site{0}, s) == doctest::Approx(0.8));
        }
    }

    TEST_CASE("two-state chain law")
    {
        // Each ring resamples uniformly, so P(sigma_T = 1 | 0) = (1 - e^{-MT}) / 2.
        KalikowSpec spec;
        spec.alphabet = 2;
        spec.rates = 1.5;
        double const T = 0.8;
        Window const w = Window::cube(Site{0}, 0);
        SpinConfig const eta(w, 2);
        std::size_t const n = 20'000;
        std::vector<double> hits(n);
        for (std::size_t i = 0; i < n; ++i) {
            SimOptions opts;
            opts.seed = replica_seed(4, i);
            // A lone site is its own island, so one interval suffices.
            opts.interval = T;
            opts.check_interval = false;
            hits[i] = simulate(spec, eta, T, opts).final[Site{0}];
        }
        MeanStat const m = mean_stat(hits);
        double const expected = 0.5 * (1.0 - std::exp(-1.5 * T));
        CHECK(std::abs(m.mean - expected) < 4.0 * m.std_error);
    }

    TEST_CASE("islands match a brute-force partition")
    {
        Window const w = Window::cube(Site{0, 0}, 4);
        RateField const rates(1.0);
        SiteLawField const marks(RadiusLaw::geometric(0.6));
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto const sched = sample_schedules(w, rates, marks, 0.0, 0.3, seed);
            CHECK(as_partition(islands(sched, w, 0.0, 0.3, {})) == brute_islands(harris_sample(sched, w, 0.0, 0.3)));
        }
    }

    TEST_CASE("periodic islands wrap around")
    {
        Window const w = Window::box(Site{0}, Site{9});
        std::vector<Schedule> sched(w.box_size());
        sched[w.index(Site{0})].events = {{0.5, 1, 0.5}};
        auto const parts = as_partition(islands(sched, w, 0.0, 1.0, {BoundaryKind::periodic, 0}));
        CHECK(parts.count(std::vector<Site>{Site{0}, Site{1}, Site{9}}) == 1);
        CHECK(parts.size() == 8);
    }

    TEST_CASE("splicing, replay, resume and worker independence")
    {
        KalikowSpec const spec = voter_spec();
        Window const w = Window::box(Site{0, 0}, Site{11, 11});
        SpinConfig const eta = random_config(w, 2, 7);
        SimOptions opts;
        opts.seed = 99;
        opts.interval = 0.05;
        opts.check_interval = false;
        double const T = 0.5;

        Trajectory const spliced = simulate(spec, eta, T, opts);
        CHECK(spliced.updates.size() > 0);
        CHECK(spliced.replay() == spliced.final);

        SimOptions g = opts;
        g.global_order = true;
        Trajectory const global = simulate(spec, eta, T, g);
        CHECK(global.final == spliced.final);
        CHECK(global.updates == spliced.updates);

        SimOptions par = opts;
        par.workers = 3;
        CHECK(simulate(spec, eta, T, par).updates == spliced.updates);

        Trajectory const head = simulate(spec, eta, 0.25, opts);
        SimOptions tail = opts;
        tail.first_interval = 5;
        Trajectory const rest = simulate(spec, head.final, T, tail);
        CHECK(rest.final == spliced.final);
    }

    TEST_CASE("long intervals warn")
    {
        KalikowSpec const spec = voter_spec();
        Window const w = Window::cube(Site{0}, 5);
        SimOptions opts;
        opts.interval = 1.0;
        Trajectory const tr = simulate(spec, SpinConfig(w, 2), 1.0, opts);
        CHECK(!tr.warnings.empty());
        double const len = interval_length(spec, 1);
        CHECK(len > 0.0);
        CHECK(len < 1.0);
    }

    TEST_CASE("island evolution rejects reads across the island boundary")
    {
        KalikowSpec spec;
        spec.kernel = voter_kernel();
        Window const w = Window::box(Site{0}, Site{4});
        std::vector<Site> const island{Site{2}};
        SpinConfig const eta(w, 2);
        std::vector<Schedule> sched(w.box_size());
        sched[w.index(Site{2})].events = {{0.5, 0, 0.3}};
        CHECK_NOTHROW(evolve_island(spec, island, sched, eta, 0.0, 1.0));
        // A range-1 ring at a lone site reads its neighbours, which belong
        // to other islands.
        sched[w.index(Site{2})].events = {{0.5, 1, 0.3}};
        CHECK_THROWS_AS(evolve_island(spec, island, sched, eta, 0.0, 1.0), std::logic_error);
    }
}
