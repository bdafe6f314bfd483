// Acceptance run: the full invariant suite, each criterion cross-checked
// against an oracle computed here from first principles. Prints one line per
// criterion and exits non-zero if any fails.
//
//   acceptance [--reduced] [--seed N]

#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "boolperc/coverage.hpp"
#include "boolperc/geometry.hpp"
#include "boolperc/harris_coupling.hpp"
#include "boolperc/invariants.hpp"
#include "boolperc/monte_carlo.hpp"
#include "boolperc/multiscale_bounds.hpp"
#include "boolperc/radius_law.hpp"

using namespace boolperc;

namespace {

struct Oracle {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what)
    {
        ok = ok && cond;
        notes.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
    }
};

template <typename... Args>
std::string fmt(const char* f, Args... args)
{
    char buf[200];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Cardinalities by walking the cube [-r, r]^d.
void oracle_geometry(Oracle& o)
{
    bool same = true;
    for (int d = 1; d <= 3; ++d) {
        for (Radius r = 0; r <= 8; ++r) {
            std::uint64_t ball = 0;
            std::uint64_t sphere = 0;
            std::vector<Coord> x(static_cast<std::size_t>(d), -r);
            for (;;) {
                Coord n = 0;
                for (Coord c : x) {
                    n += std::abs(c);
                }
                ball += n <= r;
                sphere += n == r;
                int i = 0;
                while (i < d && x[static_cast<std::size_t>(i)] == r) {
                    x[static_cast<std::size_t>(i++)] = -r;
                }
                if (i == d) {
                    break;
                }
                ++x[static_cast<std::size_t>(i)];
            }
            same = same && ball == ball_cardinality(d, r) && sphere == sphere_cardinality(d, r);
        }
    }
    o.expect(same, "cube-walk cardinalities for d<=3, r<=8");
}

void oracle_p0(Oracle& o)
{
    using Q = boost::rational<std::int64_t>;
    // d = 1, unit radius: C1 = |S_10| |S_80| = 4, C2 = 30, (10d)^d = 10, C3 = 300.
    Q const exact = std::min(Q(1) / (Q(2) * 4 * 30 * 10), Q(1) / (Q(4) * 4 * 300 * 1));
    o.expect(exact == Q(1, 4800), "rational p0 = 1/4800");
    o.expect(p0(1, RadiusLaw::point_mass(1)) == boost::rational_cast<double>(exact), "library p0 equals the rational value");
}

void oracle_recursion(Oracle& o)
{
    std::vector<double> const zeros(5, 0.0);
    auto const t = recursion_iterate(0.5, zeros, 5);
    bool exact = true;
    for (int n = 0; n <= 5; ++n) {
        exact = exact && t.direct[static_cast<std::size_t>(n)] == std::ldexp(1.0, -(1 << n))
                && t.induction[static_cast<std::size_t>(n)] == std::ldexp(1.0, -(n + 1));
    }
    o.expect(exact, "direct 2^-(2^n) and induction 2^-(n+1) bit-exact for n<=5");
}

void oracle_max_mark(Oracle& o)
{
    double worst = 0.0;
    for (double M : {0.5, 1.0, 2.0}) {
        for (double t : {0.25, 0.5, 1.0}) {
            for (Radius r : {0, 1, 3}) {
                double const closed = std::exp(-M * t * std::ldexp(1.0, -static_cast<int>(r + 1)));
                worst = std::max(worst, std::abs(max_mark_cdf(M, RadiusLaw::geometric(0.5), t, r).unconditional - closed));
            }
        }
    }
    o.expect(worst < 1e-14, fmt("closed form exp(-M t 2^-(r+1)) reproduced, max gap %.1e", worst));
}

void oracle_envelope(Oracle& o)
{
    RateField const rates(std::vector<double>{1.0, 2.5});
    SiteLawField const marks(std::vector<RadiusLaw>{RadiusLaw::geometric(0.5), RadiusLaw::geometric(0.3)});
    DominatingProcess const dom(rates, marks, 2);
    double const factor = 2.5 / (1.0 - std::exp(-1.0));
    bool held = true;
    for (Radius r = 0; r <= 100; ++r) {
        double const sup = std::max(0.5 * std::pow(0.5, r), 0.3 * std::pow(0.7, r));
        held = held && std::abs(dom.pmf_bound(r) - factor * sup) <= 1e-12 * factor * sup
               && dom.radius_law().pmf(r) <= factor * sup;
    }
    o.expect(held, "nu*(r) <= M*/(1-e^{-M_*}) sup_c nu_c(r) with the bound recomputed by hand, r<=100");
}

void oracle_coverage(Oracle& o, const SuiteConfig& cfg)
{
    // At L = 100 the covered fraction has an exact mean: a site y is missed
    // with probability prod_x (1 - p P(R >= |x - y|)).
    RadiusLaw const law = RadiusLaw::power_law(2.0);
    double const p = 0.5;
    Radius const half = 50;
    Window const target = Window::cube(Site{0}, half);
    Window const window = Window::cube(Site{0}, half + coverage_margin(law, half));
    double exact = 0.0;
    for_each_site(target, [&](const Site& y) {
        double log_miss = 0.0;
        for_each_site(window, [&](const Site& x) {
            Radius const dist = l1_distance(x, y);
            log_miss += std::log1p(-p * (dist == 0 ? 1.0 : law.tail(dist - 1)));
        });
        exact += 1.0 - std::exp(log_miss);
    });
    exact /= static_cast<double>(target.size());
    ModelParams params;
    params.retention = {p};
    params.laws = law;
    params.window = window;
    std::size_t const n = cfg.scaled(4000, 400);
    std::vector<double> xs(n);
    parallel_for(n, cfg.workers, [&](std::size_t i) {
        xs[i] = covered_fraction(sample(params, replica_seed(cfg.seed ^ 0xc0, i)), target);
    });
    MeanStat const m = mean_stat(xs);
    o.expect(std::abs(m.mean - exact) < 4.0 * m.std_error,
             fmt("L=100 mean covered fraction %.5f vs exact %.5f (4 sigma)", m.mean, exact));
    auto const sums = borel_cantelli_sums(p, law, 1, 0, std::vector<Radius>{1000, 2000});
    // P(R > k) ~ 6 / (pi^2 k), so S(2K) - S(K) tends to 2 p ln 2 * 6 / pi^2.
    double const limit = 2.0 * p * std::log(2.0) * 6.0 / (M_PI * M_PI);
    o.expect(std::abs((sums[1] - sums[0]) - limit) < 0.01,
             fmt("S(2000) - S(1000) = %.4f, limit %.4f", sums[1] - sums[0], limit));
}

void oracle_counterexample(Oracle& o)
{
    double sup = 0.0;
    for (int n = 2; n <= 50; ++n) {
        sup = std::max(sup, (5.0 * n + 5.0) / (8.0 * n));
    }
    double lib = 0.0;
    for (int n = 2; n <= 50; ++n) {
        lib = std::max(lib, *counterexample_family(n).mean());
    }
    o.expect(std::abs(lib - sup) < 1e-12, fmt("sup of (5n+5)/(8n) = %.6f, library %.6f", sup, lib));
    // Truncated envelope mean at integer K is 11/16 + (H_{K-1} - 1) / 2.
    double harmonic = 1.0;
    long K = 2;
    while (11.0 / 16.0 + (harmonic - 1.0) / 2.0 <= 5.0) {
        harmonic += 1.0 / static_cast<double>(K);
        ++K;
    }
    CdfOnReals const env = counterexample_envelope();
    bool const first = env.truncated_mean(static_cast<double>(K)) > 5.0
                       && env.truncated_mean(static_cast<double>(K - 1)) <= 5.0;
    o.expect(first, fmt("harmonic-number K = %ld, library crossing agrees", K));
}

}  // namespace

int main(int argc, char** argv)
{
    SuiteConfig cfg;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--reduced") == 0) {
            cfg.full = false;
        } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            cfg.seed = std::strtoull(argv[++i], nullptr, 0);
        } else {
            std::fprintf(stderr, "usage: %s [--reduced] [--seed N]\n", argv[0]);
            return 1;
        }
    }

    std::map<int, Oracle> oracles;
    oracle_geometry(oracles[1]);
    oracle_p0(oracles[4]);
    oracle_recursion(oracles[5]);
    oracle_max_mark(oracles[7]);
    oracle_envelope(oracles[9]);
    oracle_coverage(oracles[12], cfg);
    oracle_counterexample(oracles[14]);

    std::size_t failed = 0;
    std::size_t deviations = 0;
    run_checks(cfg, {}, [&](const CheckResult& r) {
        Oracle const& o = oracles[r.id];
        CheckStatus status = r.status;
        if (!o.ok) {
            status = CheckStatus::fail;
        }
        failed += status == CheckStatus::fail;
        deviations += status == CheckStatus::deviation;
        std::printf("criterion %2d [%s] %s (%.1f s)\n", r.id, to_string(status), r.title.c_str(), r.seconds);
        for (const auto& line : r.detail) {
            std::printf("    %s\n", line.c_str());
        }
        for (const auto& line : o.notes) {
            std::printf("    oracle: %s\n", line.c_str());
        }
        std::fflush(stdout);
    });
    std::printf("%zu criteria failed, %zu passed with a documented deviation\n", failed, deviations);
    return failed == 0 ? 0 : 1;
}
