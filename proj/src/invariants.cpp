#include "boolperc/invariants.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>

#include "boolperc/boolean_model.hpp"
#include "boolperc/coverage.hpp"
#include "boolperc/errors.hpp"
#include "boolperc/geometry.hpp"
#include "boolperc/harris_coupling.hpp"
#include "boolperc/monte_carlo.hpp"
#include "boolperc/multiscale_bounds.hpp"
#include "boolperc/particle_system.hpp"
#include "boolperc/radius_law.hpp"

namespace boolperc {

const char* to_string(CheckStatus s) noexcept
{
    switch (s) {
    case CheckStatus::pass:
        return "PASS";
    case CheckStatus::fail:
        return "FAIL";
    case CheckStatus::deviation:
        return "DEVIATION";
    }
    return "?";
}

std::size_t SuiteConfig::scaled(std::size_t n, std::size_t floor) const noexcept
{
    return full ? n : std::max(n / 100, std::min(n, floor));
}

namespace {

template <typename... Args>
std::string fmt(const char* format, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

CheckStatus verdict(bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; }

std::uint64_t check_seed(const SuiteConfig& cfg, int id, std::uint64_t sub = 0)
{
    return derive_seed(cfg.seed, static_cast<std::uint64_t>(id), sub);
}

const RadiusLaw& geometric_half()
{
    static const RadiusLaw law = RadiusLaw::geometric(0.5);
    return law;
}

/// Literal H(r) over all of Z^d up to radius `reach`, read off the field.
bool event_H_field(const SiteField& field, int d, Radius r, Radius reach)
{
    for (Radius k = 10 * r + 1; k <= reach; ++k) {
        for (const Site& x : sphere_sites(d, k)) {
            if (10 * field.radius(x) > k) {
                return true;
            }
        }
    }
    return false;
}

/// Smallest radius beyond which an H witness has probability below `eps`.
Radius h_reach(int d, double p, const RadiusLaw& law, Radius r, double eps)
{
    Radius k = 10 * r;
    while (h_exterior_bound(d, p, law, k) > eps) {
        k += 10;
    }
    return k;
}

struct GridCase {
    int d;
    double p;
    RadiusLaw law;
    std::string name;
};

std::vector<GridCase> event_grid()
{
    std::vector<GridCase> out;
    for (int d : {1, 2}) {
        for (double p : {0.05, 0.2}) {
            out.push_back({d, p, RadiusLaw::point_mass(2), "pointmass(2)"});
            out.push_back({d, p, geometric_half(), "geometric(1/2)"});
        }
    }
    return out;
}

}  // namespace

CheckResult check_geometry(const SuiteConfig& cfg)
{
    CheckResult res{1, "geometry", CheckStatus::fail, {}, 0.0};
    int covering_failures = 0;
    for (int d = 1; d <= 3; ++d) {
        for (Radius n = 1; n <= 2; ++n) {
            for (Radius r = 1; r <= 4; ++r) {
                if (!sphere_covering_check(d, n, r).covered) {
                    ++covering_failures;
                    res.detail.push_back(fmt("covering fails at d=%d n=%lld r=%lld", d, static_cast<long long>(n),
                                             static_cast<long long>(r)));
                }
            }
        }
    }
    Radius const r_max = cfg.full ? 20 : 8;
    int count_failures = 0;
    for (int d = 1; d <= 4; ++d) {
        std::uint64_t ball_total = 0;
        for (Radius r = 0; r <= r_max; ++r) {
            auto const sphere = sphere_sites(d, r);
            ball_total += sphere.size();
            bool const ok = ball_sites(Site::origin(d), r).size() == ball_cardinality(d, r)
                            && sphere.size() == sphere_cardinality(d, r) && ball_total == ball_cardinality(d, r);
            if (!ok) {
                ++count_failures;
                res.detail.push_back(fmt("cardinality mismatch at d=%d r=%lld", d, static_cast<long long>(r)));
            }
        }
        for (Radius r = 1; r <= 1000; ++r) {
            if (static_cast<double>(ball_cardinality(d, r))
                > static_cast<double>(ball_constant(d)) * std::pow(static_cast<double>(r), d)) {
                ++count_failures;
                res.detail.push_back(fmt("|B(0,r)| > C r^d at d=%d r=%lld", d, static_cast<long long>(r)));
                break;
            }
        }
    }
    res.detail.push_back(fmt("covering: 24 cases, %d failures", covering_failures));
    res.detail.push_back(fmt("cardinalities: d<=4, r<=%lld, %d mismatches", static_cast<long long>(r_max),
                             count_failures));
    res.status = verdict(covering_failures == 0 && count_failures == 0);
    return res;
}

CheckResult check_diameter_implication(const SuiteConfig& cfg)
{
    CheckResult res{2, "G-H-diameter implication", CheckStatus::fail, {}, 0.0};
    std::size_t const n = cfg.scaled(10'000);
    constexpr Radius kRMax = 3;
    std::size_t total_violations = 0;
    double worst_exterior = 0.0;
    int case_index = 0;
    for (const auto& c : event_grid()) {
        ModelParams params;
        params.retention = {c.p};
        params.laws = c.law;
        Radius const window_radius = 10 * kRMax + std::max<Radius>(c.law.quantile(1.0 - 1e-6), 10);
        params.window = Window::l1_ball(Site::origin(c.d), window_radius);
        std::array<Radius, kRMax + 1> reach{};
        for (Radius r = 1; r <= kRMax; ++r) {
            reach[r] = h_reach(c.d, c.p, c.law, r, 1e-9);
            worst_exterior = std::max(worst_exterior, h_exterior_bound(c.d, c.p, c.law, reach[r]));
        }
        struct Tally {
            std::size_t vacuous = 0, censored = 0, checked = 0, violations = 0;
        };
        std::vector<std::array<Tally, kRMax + 1>> per_sample(n);
        std::uint64_t const seed = check_seed(cfg, 2, static_cast<std::uint64_t>(case_index++));
        parallel_for(n, cfg.workers, [&](std::size_t i) {
            std::uint64_t const rs = replica_seed(seed, i);
            MarkedSample const s = sample(params, rs);
            SiteField const field(params, rs);
            Diameter const diam = diameter(s, Site::origin(c.d));
            for (Radius r = 1; r <= kRMax; ++r) {
                Tally& t = per_sample[i][r];
                if (event_G(s, Site::origin(c.d), r)) {
                    ++t.vacuous;
                    continue;
                }
                if (diam.censored) {
                    ++t.censored;
                }
                if (!diam.censored && diam.value <= 8 * r) {
                    ++t.checked;  // the conclusion holds whatever H does
                    continue;
                }
                if (event_H_field(field, c.d, r, reach[r])) {
                    ++t.vacuous;
                    continue;
                }
                // The window graph is a subgraph, so its diameter bounds the
                // true one from below: D > 8r here is a genuine violation.
                ++t.checked;
                ++t.violations;
            }
        });
        for (Radius r = 1; r <= kRMax; ++r) {
            Tally sum;
            for (const auto& t : per_sample) {
                sum.vacuous += t[r].vacuous;
                sum.censored += t[r].censored;
                sum.checked += t[r].checked;
                sum.violations += t[r].violations;
            }
            total_violations += sum.violations;
            res.detail.push_back(fmt("d=%d p=%.2f %-15s r=%lld: %zu samples, %zu with G or H, %zu censored, "
                                     "%zu checked, %zu violations",
                                     c.d, c.p, c.name.c_str(), static_cast<long long>(r), n, sum.vacuous,
                                     sum.censored, sum.checked, sum.violations));
        }
    }
    res.detail.push_back(fmt("H witnesses beyond the scanned radius have probability <= %.1e per sample",
                             worst_exterior));
    res.status = verdict(total_violations == 0);
    return res;
}

namespace {

struct EscalationTally {
    std::size_t htilde = 0;
    std::size_t no_g = 0;
    std::size_t nonvacuous = 0;
    std::size_t violations = 0;

    EscalationTally& operator+=(const EscalationTally& o)
    {
        htilde += o.htilde;
        no_g += o.no_g;
        nonvacuous += o.nonvacuous;
        violations += o.violations;
        return *this;
    }
};

/// G(0, 10rd) and not H~(rd) imply some x in S_{10d} and some x in S_{80d}
/// with G(rx, rd).
std::vector<EscalationTally> escalation_case(int d, double p, const RadiusLaw& law, std::span<const Radius> rs,
                                     std::size_t n, std::uint64_t seed, unsigned workers)
{
    ModelParams params;
    params.retention = {p};
    params.laws = law;
    params.window = Window::l1_ball(Site::origin(d), 0);  // the field itself is unbounded
    std::vector<std::vector<EscalationTally>> per_sample(n, std::vector<EscalationTally>(rs.size()));
    auto const inner = sphere_sites(d, 10 * d);
    auto const outer = sphere_sites(d, 80 * d);
    parallel_for(n, workers, [&](std::size_t i) {
        std::uint64_t const sseed = replica_seed(seed, i);
        SiteField const field(params, sseed);
        std::vector<bool> need(rs.size());
        Radius widest = 0;
        for (std::size_t j = 0; j < rs.size(); ++j) {
            Radius const rd = rs[j] * d;
            need[j] = !event_Htilde(field, d, rd);
            if (need[j]) {
                widest = std::max(widest, 100 * rd);
            } else {
                ++per_sample[i][j].htilde;
            }
        }
        if (widest == 0) {
            return;
        }
        ModelParams local = params;
        local.window = Window::l1_ball(Site::origin(d), widest);
        MarkedSample const s = sample(local, sseed);
        for (std::size_t j = 0; j < rs.size(); ++j) {
            if (!need[j]) {
                continue;
            }
            Radius const r = rs[j];
            Radius const rd = r * d;
            EscalationTally& t = per_sample[i][j];
            if (!event_G(s, Site::origin(d), 10 * rd)) {
                ++t.no_g;
                continue;
            }
            ++t.nonvacuous;
            auto some = [&](const std::vector<Site>& sphere) {
                return std::any_of(sphere.begin(), sphere.end(),
                                   [&](const Site& x) { return event_G(s, x.scaled(r), rd); });
            };
            if (!(some(inner) && some(outer))) {
                ++t.violations;
            }
        }
    });
    std::vector<EscalationTally> out(rs.size());
    for (const auto& row : per_sample) {
        for (std::size_t j = 0; j < rs.size(); ++j) {
            out[j] += row[j];
        }
    }
    return out;
}

}  // namespace

CheckResult check_escalation(const SuiteConfig& cfg)
{
    CheckResult res{3, "G-escalation containment", CheckStatus::fail, {}, 0.0};
    std::size_t const n = cfg.scaled(10'000);
    std::array<Radius, 2> const rs{1, 2};
    std::size_t violations = 0;
    std::size_t nonvacuous = 0;
    int case_index = 0;
    auto report = [&](const std::string& label, const std::vector<EscalationTally>& tallies, bool counts) {
        for (std::size_t j = 0; j < rs.size(); ++j) {
            const auto& t = tallies[j];
            if (counts) {
                violations += t.violations;
                nonvacuous += t.nonvacuous;
            }
            res.detail.push_back(fmt("%s r=%lld: %zu samples, %zu with H~, %zu without G, %zu non-vacuous, "
                                     "%zu violations",
                                     label.c_str(), static_cast<long long>(rs[j]), n, t.htilde, t.no_g,
                                     t.nonvacuous, t.violations));
        }
    };
    for (const auto& c : event_grid()) {
        auto const tallies = escalation_case(c.d, c.p, c.law, rs, n,
                                         check_seed(cfg, 3, static_cast<std::uint64_t>(case_index++)), cfg.workers);
        report(fmt("d=%d p=%.2f %-15s", c.d, c.p, c.name.c_str()), tallies, true);
    }
    // Off the grid: radii below rd keep H~ away, so the premise is often met.
    std::size_t const extra_n = cfg.scaled(2'000, 50);
    std::size_t extra_violations = 0;
    struct Extra {
        int d;
        double p;
    };
    for (Extra e : {Extra{1, 0.9}, Extra{2, 0.3}}) {
        auto const tallies = escalation_case(e.d, e.p, RadiusLaw::point_mass(1), rs, extra_n,
                                         check_seed(cfg, 3, static_cast<std::uint64_t>(100 + e.d)), cfg.workers);
        for (const auto& t : tallies) {
            extra_violations += t.violations;
        }
        res.detail.push_back(fmt("extra d=%d p=%.2f pointmass(1), %zu samples:", e.d, e.p, extra_n));
        for (std::size_t j = 0; j < rs.size(); ++j) {
            res.detail.push_back(fmt("  r=%lld: %zu with H~, %zu without G, %zu non-vacuous, %zu violations",
                                     static_cast<long long>(rs[j]), tallies[j].htilde, tallies[j].no_g,
                                     tallies[j].nonvacuous, tallies[j].violations));
        }
    }
    res.detail.push_back(fmt("grid: %zu non-vacuous samples, %zu violations; extra rows: %zu violations",
                             nonvacuous, violations, extra_violations));
    res.status = verdict(violations == 0 && extra_violations == 0);
    return res;
}

CheckResult check_p0(const SuiteConfig& cfg)
{
    CheckResult res{4, "constants and p0", CheckStatus::fail, {}, 0.0};
    RadiusLaw const unit = RadiusLaw::point_mass(1);
    BoundConstants const k = constants(1);
    double const value = p0(1, unit);
    bool const exact = value == 1.0 / 4800.0 && k.C == 3.0 && k.C1 == 4.0 && k.C2 == 30.0 && k.C3 == 300.0;
    res.detail.push_back(fmt("d=1: C=%g C1=%g C2=%g C3=%g, p0 = %.17g (1/p0 = %.17g)", k.C, k.C1, k.C2, k.C3, value,
                             1.0 / value));
    ModelParams params;
    params.retention = {value};
    params.laws = unit;
    params.window = Window::box(Site{-500}, Site{499});
    std::size_t const n = cfg.scaled(10'000);
    Estimate const e = estimate(
        n, check_seed(cfg, 4), [&](std::uint64_t s) { return percolation_proxy(sample(params, s)); }, cfg.workers);
    res.detail.push_back(fmt("proxy at p0 on %zu sites: %zu of %zu replicas (Wilson 95%% [%.2e, %.2e])",
                             params.window.size(), e.successes, e.replicas, e.wilson.lo, e.wilson.hi));
    res.status = verdict(exact && e.successes == 0);
    return res;
}

CheckResult check_recursion(const SuiteConfig&)
{
    CheckResult res{5, "recursion", CheckStatus::fail, {}, 0.0};
    std::vector<double> const zeros(5, 0.0);
    auto const table = recursion_iterate(0.5, zeros, 5);
    bool exact = true;
    for (int n = 0; n <= 5; ++n) {
        exact = exact && table.direct[static_cast<std::size_t>(n)] == std::ldexp(1.0, -(1 << n))
                && table.induction[static_cast<std::size_t>(n)] == std::ldexp(1.0, -(n + 1));
    }
    res.detail.push_back(fmt("G = 0, F0 = 1/2: direct == 2^-(2^n) and induction == 2^-(n+1) for n <= 5: %s",
                             exact ? "yes" : "no"));
    bool reached = true;
    struct Case {
        int d;
        RadiusLaw law;
        const char* name;
    };
    for (const Case& c : {Case{1, RadiusLaw::point_mass(1), "pointmass(1)"}, Case{1, geometric_half(), "geometric(1/2)"},
                          Case{2, geometric_half(), "geometric(1/2)"}}) {
        double const p = p0(c.d, c.law) / 2.0;
        auto const rows = bound_pipeline(c.d, c.law, p, 12);
        auto const hit = std::find_if(rows.begin(), rows.end(), [](const PipelineRow& row) {
            return std::min(row.F_direct, row.F_induction) < 1e-3;
        });
        if (hit == rows.end()) {
            reached = false;
            res.detail.push_back(fmt("d=%d %s p=%.3e: F_n >= 1e-3 up to n=12", c.d, c.name, p));
        } else {
            res.detail.push_back(fmt("d=%d %s p=p0/2=%.3e: F_%d = %.3e (induction %.3e) < 1e-3", c.d, c.name, p,
                                     hit->n, hit->F_direct, hit->F_induction));
        }
    }
    res.status = verdict(exact && reached);
    return res;
}

CheckResult check_harris_law(const SuiteConfig& cfg)
{
    CheckResult res{6, "Harris graph vs coupled Boolean graph", CheckStatus::fail, {}, 0.0};
    Window const w = Window::box(Site{0, 0}, Site{4, 4});
    double const M = 1.0;
    double const t = 0.5;
    const RadiusLaw& marks = geometric_half();
    SiteCoupling const coupling(M, marks, t);
    constexpr int kClasses = 8;
    std::vector<std::pair<Site, Site>> pairs;
    std::array<double, kClasses + 1> class_size{};
    for_each_site(w, [&](const Site& u) {
        for_each_site(w, [&](const Site& v) {
            if (u < v) {
                pairs.emplace_back(u, v);
                class_size[static_cast<std::size_t>(l1_distance(u, v))] += 1.0;
            }
        });
    });
    auto fractions = [&](const MarkedSample& s, double* out) {
        std::array<double, kClasses + 1> hits{};
        for (const auto& [u, v] : pairs) {
            if (adjacent(s, u, v)) {
                hits[static_cast<std::size_t>(l1_distance(u, v))] += 1.0;
            }
        }
        for (int k = 1; k <= kClasses; ++k) {
            out[k - 1] = hits[static_cast<std::size_t>(k)] / class_size[static_cast<std::size_t>(k)];
        }
    };
    std::size_t const n = cfg.scaled(100'000, 2'000);
    std::vector<double> harris(n * kClasses);
    std::vector<double> boolean(n * kClasses);
    std::uint64_t const seed_h = check_seed(cfg, 6, 1);
    std::uint64_t const seed_b = check_seed(cfg, 6, 2);
    parallel_for(n, cfg.workers, [&](std::size_t i) {
        auto const schedules = sample_schedules(w, M, marks, 0.0, t, replica_seed(seed_h, i));
        fractions(harris_sample(schedules, w, 0.0, t), &harris[i * kClasses]);
        MarkedSample s(w);
        Stream rng(replica_seed(seed_b, i));
        for_each_site(w, [&](const Site& x) {
            double const u1 = rng.uniform();
            double const u2 = rng.uniform();
            CoupledSite const c = coupling(u1, u2);
            if (c.occupied) {
                s.place(x, c.radius);
            }
        });
        fractions(s, &boolean[i * kClasses]);
    });
    double worst = 0.0;
    for (int k = 0; k < kClasses; ++k) {
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = harris[i * kClasses + static_cast<std::size_t>(k)];
            b[i] = boolean[i * kClasses + static_cast<std::size_t>(k)];
        }
        MeanStat const ha = mean_stat(a);
        MeanStat const hb = mean_stat(b);
        double const z = two_sample_z(ha, hb);
        worst = std::max(worst, std::abs(z));
        res.detail.push_back(fmt("distance %d (%3.0f pairs): Harris %.5f, coupled %.5f, z = %+.2f", k + 1,
                                 class_size[static_cast<std::size_t>(k + 1)], ha.mean, hb.mean, z));
    }
    res.detail.push_back(fmt("%zu replicas per pipeline, max |z| = %.2f (bound 3)", n, worst));
    res.status = verdict(worst <= 3.0);
    return res;
}

CheckResult check_max_mark_law(const SuiteConfig& cfg)
{
    CheckResult res{7, "largest-mark law", CheckStatus::fail, {}, 0.0};
    const RadiusLaw& marks = geometric_half();
    std::size_t const n = cfg.scaled(100'000, 2'000);
    std::array<double, 3> const Ms{0.5, 1.0, 2.0};
    std::array<double, 3> const ts{0.25, 0.5, 1.0};
    std::array<Radius, 3> const rs{0, 1, 3};
    double worst = 0.0;
    int index = 0;
    for (double M : Ms) {
        for (double t : ts) {
            std::vector<Radius> maxima(n);
            std::uint64_t const seed = check_seed(cfg, 7, static_cast<std::uint64_t>(index++));
            parallel_for(n, cfg.workers, [&](std::size_t i) {
                maxima[i] = sample_schedule(M, marks, t, replica_seed(seed, i)).max_mark();
            });
            std::string line = fmt("M=%.2f t=%.2f:", M, t);
            for (Radius r : rs) {
                auto const hits = static_cast<std::size_t>(
                    std::count_if(maxima.begin(), maxima.end(), [r](Radius m) { return m <= r; }));
                double const q = max_mark_cdf(M, marks, t, r).unconditional;
                double const observed = static_cast<double>(hits) / static_cast<double>(n);
                double const z = z_score(observed, q, std::sqrt(q * (1.0 - q) / static_cast<double>(n)));
                worst = std::max(worst, std::abs(z));
                line += fmt("  r=%lld %.4f vs %.4f (z %+.2f)", static_cast<long long>(r), observed, q, z);
            }
            res.detail.push_back(line);
        }
    }
    res.detail.push_back(fmt("%zu schedules per (M,t), max |z| = %.2f (bound 3)", n, worst));
    res.status = verdict(worst <= 3.0);
    return res;
}

CheckResult check_monotone_coupling(const SuiteConfig& cfg)
{
    CheckResult res{8, "pathwise domination", CheckStatus::fail, {}, 0.0};
    std::size_t const n = cfg.scaled(100'000, 2'000);
    const RadiusLaw& law = geometric_half();
    double const M = 1.5;
    std::array<double, 5> const times{0.1, 0.25, 0.5, 0.9, 1.0};
    std::vector<SiteCoupling> by_time;
    for (double t : times) {
        by_time.emplace_back(M, law, t);
    }
    RateField const rates(std::vector<double>{1.0, 2.0});
    SiteLawField const marks(std::vector<RadiusLaw>{law, RadiusLaw::geometric(0.3)});
    DominatingProcess const dom(rates, marks, 2);
    std::vector<std::vector<SiteCoupling>> per_class(2);
    for (std::size_t c = 0; c < 2; ++c) {
        for (double t : times) {
            per_class[c].emplace_back(rates.classes()[c], marks.classes()[c], t);
        }
    }
    std::size_t sdom = 0;
    std::size_t dmpp = 0;
    Stream rng(check_seed(cfg, 8));
    for (std::size_t i = 0; i < n; ++i) {
        double const u1 = rng.uniform();
        double const u2 = rng.uniform();
        for (std::size_t a = 0; a + 1 < times.size(); ++a) {
            for (std::size_t b = a + 1; b < times.size(); ++b) {
                CoupledSite const early = by_time[a](u1, u2);
                CoupledSite const late = by_time[b](u1, u2);
                if ((early.occupied && !late.occupied) || early.radius > late.radius) {
                    ++sdom;
                }
            }
        }
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t k = 0; k < times.size(); ++k) {
                CoupledSite const x = per_class[c][k](u1, u2);
                CoupledSite const star = dom(times[k], u1, u2);
                if ((x.occupied && !star.occupied) || x.radius > star.radius) {
                    ++dmpp;
                }
            }
        }
    }
    res.detail.push_back(fmt("monotonicity in t (M=1.5, geometric(1/2), 10 time pairs): %zu violations in %zu draws",
                             sdom, n));
    res.detail.push_back(fmt("domination of two classes (M=1,2; geometric(1/2),(0.3); 5 times): %zu violations in "
                             "%zu draws",
                             dmpp, n));
    res.status = verdict(sdom == 0 && dmpp == 0);
    return res;
}

CheckResult check_envelope_pmf(const SuiteConfig&)
{
    CheckResult res{9, "envelope pmf bound", CheckStatus::fail, {}, 0.0};
    RateField const rates(std::vector<double>{1.0, 2.5});
    SiteLawField const marks(std::vector<RadiusLaw>{geometric_half(), RadiusLaw::geometric(0.3)});
    DominatingProcess const dom(rates, marks, 2);
    int violations = 0;
    double tightest = 0.0;
    for (Radius r = 0; r <= 100; ++r) {
        double const lhs = dom.radius_law().pmf(r);
        double const rhs = dom.pmf_bound(r);
        if (!(lhs <= rhs)) {
            ++violations;
            res.detail.push_back(fmt("r=%lld: nu*(r) = %.6e > %.6e", static_cast<long long>(r), lhs, rhs));
        }
        if (rhs > 0.0) {
            tightest = std::max(tightest, lhs / rhs);
        }
    }
    res.detail.push_back(fmt("M=(1, 2.5), marks geometric(1/2), geometric(0.3): r=0..100, %d violations, "
                             "max ratio %.4f",
                             violations, tightest));
    res.status = verdict(violations == 0);
    return res;
}

CheckResult check_island_independence(const SuiteConfig& cfg)
{
    CheckResult res{10, "island splicing", CheckStatus::fail, {}, 0.0};
    KalikowSpec spec;
    spec.alphabet = 2;
    spec.rates = 1.0;
    spec.ranges = geometric_half();
    spec.kernel = voter_kernel();
    Window const w = Window::box(Site{0}, Site{19});
    double const t0_value = interval_length(spec, 1);
    std::size_t const n = cfg.scaled(1'000, 50);
    struct Variant {
        const char* name;
        double interval;
        double T;
    };
    bool ok = true;
    for (const Variant& v : {Variant{"T = 3 t0, interval t0", 0.0, 3.0 * t0_value},
                             Variant{"T = 5, interval 0.5", 0.5, 5.0}}) {
        std::atomic<std::size_t> mismatches{0};
        std::atomic<std::size_t> updates{0};
        std::uint64_t const seed = check_seed(cfg, 10, v.interval > 0.0 ? 1 : 0);
        parallel_for(n, cfg.workers, [&](std::size_t i) {
            std::uint64_t const rs = replica_seed(seed, i);
            SpinConfig eta(w, 2);
            Stream init(rs);
            for_each_site(w, [&](const Site& x) { eta.set(x, init.uniform() <= 0.5 ? 1 : 0); });
            SimOptions opts;
            opts.seed = rs;
            opts.interval = v.interval;
            opts.check_interval = false;
            Trajectory const spliced = simulate(spec, eta, v.T, opts);
            opts.global_order = true;
            Trajectory const global = simulate(spec, eta, v.T, opts);
            updates += spliced.updates.size();
            if (!(spliced.updates == global.updates) || !(spliced.final == global.final)
                || !(spliced.replay() == spliced.final)) {
                ++mismatches;
            }
        });
        res.detail.push_back(fmt("%s: %zu seeds, %zu updates, %zu mismatches", v.name, n, updates.load(),
                                 mismatches.load()));
        ok = ok && mismatches == 0;
    }
    res.detail.push_back(fmt("t0 = %.4e for M=1, geometric(1/2) ranges, d=1", t0_value));
    res.status = verdict(ok);
    return res;
}

CheckResult check_generator_rates(const SuiteConfig& cfg)
{
    CheckResult res{11, "generator rates", CheckStatus::fail, {}, 0.0};
    std::size_t const n = cfg.scaled(100'000, 5'000);
    double const dt = 0.01;
    struct Case {
        std::string name;
        KalikowSpec spec;
        SpinConfig sigma;
        Site x;
        Spin s;
    };
    std::vector<Case> cases;
    {
        KalikowSpec spec;
        cases.push_back({"single site, uniform kernel", spec, SpinConfig(Window::box(Site{0}, Site{0}), 2), Site{0}, 1});
    }
    {
        KalikowSpec spec;
        spec.ranges = geometric_half();
        spec.kernel = majority_kernel();
        SpinConfig sigma(Window::box(Site{0}, Site{2}), 2);
        sigma.set(Site{0}, 1);
        sigma.set(Site{1}, 1);
        cases.push_back({"3 sites, majority, geometric ranges", spec, sigma, Site{2}, 1});
    }
    {
        KalikowSpec spec;
        spec.alphabet = 3;
        spec.rates = RateField(std::vector<double>{1.0, 2.0});
        SpinConfig sigma(Window::box(Site{0}, Site{1}), 3);
        sigma.set(Site{1}, 2);
        cases.push_back({"2 classes, 3 spins, uniform kernel", spec, sigma, Site{1}, 0});
    }
    {
        KalikowSpec spec;
        spec.ranges = geometric_half();
        spec.kernel = voter_kernel();
        SpinConfig sigma(Window::box(Site{0}, Site{4}), 2);
        for (Coord i : {1, 3, 4}) {
            sigma.set(Site{i}, 1);
        }
        cases.push_back({"5 sites, voter, geometric ranges", spec, sigma, Site{2}, 1});
    }
    double worst = 0.0;
    std::uint64_t sub = 0;
    for (const auto& c : cases) {
        RateCheck const rc = generator_rate_check(c.spec, c.sigma, c.x, c.s, dt, n, check_seed(cfg, 11, sub++),
                                                  cfg.workers);
        worst = std::max(worst, std::abs(rc.z));
        res.detail.push_back(fmt("%-36s rate %.4f: observed %.5f vs dt*rate %.5f (z %+.2f)", c.name.c_str(),
                                 rc.rate, rc.observed, rc.expected, rc.z));
    }
    res.detail.push_back(fmt("dt = %.2f, %zu replicas per case, max |z| = %.2f (bound 3)", dt, n, worst));
    res.status = verdict(worst <= 3.0);
    return res;
}

CheckResult check_coverage(const SuiteConfig& cfg)
{
    CheckResult res{12, "coverage with heavy tails", CheckStatus::fail, {}, 0.0};
    RadiusLaw const law = RadiusLaw::power_law(2.0);
    double const p = 0.5;
    std::array<Radius, 3> const sides{100, 1'000, 10'000};
    std::size_t const n = cfg.scaled(200, 20);
    std::vector<std::array<double, 3>> frac(n);
    std::uint64_t const seed = check_seed(cfg, 12);
    parallel_for(n, cfg.workers, [&](std::size_t i) {
        for (std::size_t j = 0; j < sides.size(); ++j) {
            Radius const half = sides[j] / 2;
            ModelParams params;
            params.retention = {p};
            params.laws = law;
            params.window = Window::cube(Site{0}, half + coverage_margin(law, half));
            // Matched seeds: every L reuses the uniforms of replica i.
            MarkedSample const s = sample(params, replica_seed(seed, i));
            frac[i][j] = covered_fraction(s, Window::cube(Site{0}, half));
        }
    });
    std::array<MeanStat, 3> stats;
    std::size_t monotone_seeds = 0;
    for (std::size_t j = 0; j < sides.size(); ++j) {
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = frac[i][j];
        }
        stats[j] = mean_stat(xs);
        res.detail.push_back(fmt("L=%5lld: covered fraction %.5f, 95%% CI [%.5f, %.5f]",
                                 static_cast<long long>(sides[j]), stats[j].mean, stats[j].mean - 1.96 * stats[j].std_error,
                                 stats[j].mean + 1.96 * stats[j].std_error));
    }
    for (const auto& f : frac) {
        monotone_seeds += (f[0] <= f[1] && f[1] <= f[2]) ? 1 : 0;
    }
    bool const increasing = stats[0].mean < stats[1].mean && stats[1].mean < stats[2].mean;
    bool const high = stats[2].mean > 0.99;
    res.detail.push_back(fmt("%zu matched replicas, %zu non-decreasing along L; margin = max(q(0.999), L/2), "
                             "q(0.999) = %lld",
                             n, monotone_seeds, static_cast<long long>(law.quantile(1.0 - 1e-3))));
    DoublingReport const heavy = doubling_test(p, law, 1, 0, 100, 1 << 20);
    DoublingReport const light = doubling_test(p, geometric_half(), 1, 0, 100, 1 << 20);
    res.detail.push_back(fmt("doubling test, power law s=2: increments %.4f .. %.4f, divergent = %s",
                             heavy.increments.front(), heavy.increments.back(), heavy.divergent ? "yes" : "no"));
    res.detail.push_back(fmt("doubling test, geometric(1/2) control: divergent = %s", light.divergent ? "yes" : "no"));
    res.status = verdict(increasing && high && heavy.divergent && !light.divergent);
    return res;
}

CheckResult check_site_percolation(const SuiteConfig& cfg)
{
    CheckResult res{13, "radius zero and site percolation", CheckStatus::fail, {}, 0.0};
    std::size_t const n = cfg.scaled(1'000, 50);
    Window const w = Window::box(Site{-100, -100}, Site{99, 99});
    struct Row {
        double p;
        Estimate boolean, origin, crossing;
    };
    std::vector<Row> rows;
    std::uint64_t sub = 0;
    for (double p : {0.45, 0.70}) {
        ModelParams params;
        params.retention = {p};
        params.laws = RadiusLaw::point_mass(0);
        params.window = w;
        std::vector<std::array<bool, 3>> hits(n);
        std::uint64_t const seed = check_seed(cfg, 13, sub++);
        parallel_for(n, cfg.workers, [&](std::size_t i) {
            MarkedSample const s = sample(params, replica_seed(seed, i));
            hits[i] = {percolation_proxy(s), site_percolation_proxy(s), crossing_proxy(s, true)};
        });
        auto count = [&](std::size_t k) {
            return make_estimate(static_cast<std::size_t>(std::count_if(
                                     hits.begin(), hits.end(), [k](const auto& h) { return h[k]; })),
                                 n);
        };
        rows.push_back({p, count(0), count(1), count(2)});
    }
    for (const auto& r : rows) {
        res.detail.push_back(fmt("p=%.2f: Boolean origin proxy %.3f, nearest-neighbour origin proxy %.3f "
                                 "[%.3f, %.3f], nearest-neighbour crossing %.3f [%.3f, %.3f]",
                                 r.p, r.boolean.mean, r.origin.mean, r.origin.wilson.lo, r.origin.wilson.hi,
                                 r.crossing.mean, r.crossing.wilson.lo, r.crossing.wilson.hi));
    }
    auto straddles = [&](auto pick) { return pick(rows[0]).mean < 0.05 && pick(rows[1]).mean > 0.95; };
    bool const literal = straddles([](const Row& r) { return r.boolean; });
    bool const origin = straddles([](const Row& r) { return r.origin; });
    bool const crossing = straddles([](const Row& r) { return r.crossing; });
    res.detail.push_back(fmt("%zu replicas on 200x200; thresholds < 0.05 at p=0.45 and > 0.95 at p=0.70", n));
    res.detail.push_back(
        "radius 0 balls hold only their center, so the Boolean graph has no edges and its proxy is 0; "
        "the origin proxy of site percolation is capped by P(origin occupied) = p");
    res.detail.push_back(fmt("thresholds met: Boolean origin %s, site origin %s, site crossing %s",
                             literal ? "yes" : "no", origin ? "yes" : "no", crossing ? "yes" : "no"));
    if (literal) {
        res.status = CheckStatus::pass;
    } else {
        res.status = crossing ? CheckStatus::deviation : CheckStatus::fail;
    }
    return res;
}

CheckResult check_counterexample(const SuiteConfig&)
{
    CheckResult res{14, "bounded means, divergent envelope", CheckStatus::fail, {}, 0.0};
    double sup = 0.0;
    int arg = 0;
    bool finite = true;
    for (int n = 2; n <= 50; ++n) {
        auto const m = counterexample_family(n).mean();
        if (!m) {
            finite = false;
            continue;
        }
        if (*m > sup) {
            sup = *m;
            arg = n;
        }
    }
    res.detail.push_back(fmt("sup over 2<=n<=50 of mean(F_n) = %.12f at n=%d", sup, arg));
    CdfOnReals const env = counterexample_envelope();
    bool const diverges = !env.mean().has_value();
    double lo = 1.0;
    double hi = 2.0;
    while (env.truncated_mean(hi) <= 5.0 && hi < 1e12) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1.0) {
        double const mid = std::floor((lo + hi) / 2.0);
        (env.truncated_mean(mid) > 5.0 ? hi : lo) = mid;
    }
    res.detail.push_back(fmt("envelope: mean diverges = %s; integral of 1-F over [0,K] first exceeds 5 at K = %.0f "
                             "(%.6f at K-1, %.6f at K)",
                             diverges ? "yes" : "no", hi, env.truncated_mean(hi - 1.0), env.truncated_mean(hi)));
    res.status = verdict(finite && sup < 1.0 && diverges && env.truncated_mean(hi) > 5.0 && hi < 1e12);
    return res;
}

const std::vector<NamedCheck>& all_checks()
{
    static const std::vector<NamedCheck> checks{
        {1, "geometry", check_geometry},
        {2, "diameter-implication", check_diameter_implication},
        {3, "escalation", check_escalation},
        {4, "p0", check_p0},
        {5, "recursion", check_recursion},
        {6, "harris-law", check_harris_law},
        {7, "max-mark", check_max_mark_law},
        {8, "monotone", check_monotone_coupling},
        {9, "envelope-pmf", check_envelope_pmf},
        {10, "islands", check_island_independence},
        {11, "generator", check_generator_rates},
        {12, "coverage", check_coverage},
        {13, "site-percolation", check_site_percolation},
        {14, "counterexample", check_counterexample},
    };
    return checks;
}

std::vector<CheckResult> run_checks(const SuiteConfig& cfg, const std::vector<int>& ids,
                                    const std::function<void(const CheckResult&)>& on_result)
{
    std::vector<CheckResult> out;
    for (const auto& check : all_checks()) {
        if (!ids.empty() && std::find(ids.begin(), ids.end(), check.id) == ids.end()) {
            continue;
        }
        auto const start = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = check.run(cfg);
        } catch (const std::exception& e) {
            r = CheckResult{check.id, check.name, CheckStatus::fail, {std::string("threw: ") + e.what()}, 0.0};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (on_result) {
            on_result(r);
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace boolperc
