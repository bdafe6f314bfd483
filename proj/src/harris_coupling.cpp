#include "boolperc/harris_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "boolperc/errors.hpp"
#include "boolperc/rng.hpp"

namespace boolperc {

Radius Schedule::max_mark() const noexcept
{
    Radius m = MarkedSample::kVacant;
    for (const auto& e : events) {
        m = std::max(m, e.mark);
    }
    return m;
}

Schedule sample_schedule(double M, const RadiusLaw& law, double from, double to, std::uint64_t seed)
{
    if (!(M > 0.0) || !(to > from)) {
        throw std::invalid_argument("sample_schedule: need M > 0 and a non-empty interval");
    }
    Schedule s{from, to, {}};
    Stream rng(seed);
    double t = from;
    for (;;) {
        double const gap = rng.exponential(M);
        if (gap <= 0.0) {
            continue;  // u == 1 exactly; keeps times strictly increasing
        }
        t += gap;
        if (t > to) {
            break;
        }
        Radius const mark = law.quantile(rng.uniform());
        s.events.push_back({t, mark, rng.uniform()});
    }
    return s;
}

RateField::RateField(std::vector<double> per_class) : rates_(std::move(per_class)), map_(rates_.size())
{
    for (double m : rates_) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw std::invalid_argument("rates must be positive and finite");
        }
    }
}

RateField::RateField(double homogeneous) : RateField(std::vector<double>{homogeneous}) {}

double RateField::lower() const noexcept { return *std::min_element(rates_.begin(), rates_.end()); }
double RateField::upper() const noexcept { return *std::max_element(rates_.begin(), rates_.end()); }

std::vector<Schedule> sample_schedules(const Window& w, const RateField& rates, const SiteLawField& marks,
                                       double from, double to, std::uint64_t seed)
{
    std::vector<Schedule> out(w.box_size());
    SiteUniforms const keys(seed, StreamTag::schedule);
    for_each_site(w, [&](const Site& x) {
        out[w.index(x)] = sample_schedule(rates.at(x), marks.law_at(x), from, to, keys.bits(x));
    });
    return out;
}

MaxMarkCdf max_mark_cdf(double M, const RadiusLaw& law, double t, Radius r)
{
    if (!(t > 0.0) || !(M > 0.0)) {
        throw std::invalid_argument("max_mark_cdf: need M, t > 0");
    }
    double const a = M * t;
    double const g = law.tail(r);
    return {std::exp(-a * g), (std::expm1(-a * g) - std::expm1(-a)) / -std::expm1(-a)};
}

double F_xt(double M, const RadiusLaw& law, double t, Radius r)
{
    return max_mark_cdf(M, law, t, r).conditional;
}

SiteCoupling::SiteCoupling(double M, const RadiusLaw& law, double t)
    : occupation_(-std::expm1(-M * t)), max_mark_(RadiusLaw::max_mark(law, M * t))
{
}

CoupledSite SiteCoupling::operator()(double u1, double u2) const
{
    return {u1 <= occupation_, max_mark_.quantile(u2)};
}

CoupledSite coupled_site(double M, const RadiusLaw& law, double t, double u1, double u2)
{
    return SiteCoupling(M, law, t)(u1, u2);
}

double h_ratio(double a, double z)
{
    if (z == 0.0) {
        return a;
    }
    return std::expm1(-a * z) / std::expm1(-z);
}

bool monotone_h_check(double a, std::span<const double> z_grid)
{
    if (!(a > 0.0 && a <= 1.0)) {
        throw std::invalid_argument("monotone_h_check: a must lie in (0, 1]");
    }
    double prev = -1.0;
    double prev_z = -1.0;
    for (double z : z_grid) {
        if (z < 0.0 || z < prev_z) {
            throw std::invalid_argument("monotone_h_check: grid must be ascending on [0, inf)");
        }
        double const h = h_ratio(a, z);
        if (h < prev - 1e-12) {
            return false;
        }
        prev = h;
        prev_z = z;
    }
    return true;
}

bool t_monotonicity_check(double M, const RadiusLaw& law, double t_early, double t_late, double u1, double u2)
{
    if (!(0.0 < t_early && t_early < t_late && t_late <= 1.0)) {
        throw std::invalid_argument("t_monotonicity_check: need 0 < t' < t <= 1");
    }
    CoupledSite const a = coupled_site(M, law, t_early, u1, u2);
    CoupledSite const b = coupled_site(M, law, t_late, u1, u2);
    return (!a.occupied || b.occupied) && a.radius <= b.radius;
}

namespace {

std::vector<RadiusLaw> unit_time_laws(const RateField& rates, const SiteLawField& marks, int d)
{
    std::size_t const nr = rates.classes().size();
    std::size_t const nm = marks.classes().size();
    if (nr != nm && nr != 1 && nm != 1) {
        throw std::invalid_argument("rate and mark class counts differ");
    }
    std::size_t const n = std::max(nr, nm);
    std::vector<RadiusLaw> out;
    for (std::size_t c = 0; c < n; ++c) {
        const RadiusLaw& nu = marks.classes()[nm == 1 ? 0 : c];
        if (!nu.moment_finite(d)) {
            throw DivergentMoment("mark law " + nu.describe() + " has infinite moment of order " + std::to_string(d));
        }
        out.push_back(RadiusLaw::max_mark(nu, rates.classes()[nr == 1 ? 0 : c]));
    }
    return out;
}

}  // namespace

DominatingProcess::DominatingProcess(const RateField& rates, const SiteLawField& marks, int d)
    : upper_(rates.upper()),
      lower_(rates.lower()),
      marks_(marks.classes().begin(), marks.classes().end()),
      envelope_(RadiusLaw::cdf_infimum(unit_time_laws(rates, marks, d)))
{
}

CoupledSite DominatingProcess::operator()(double t, double u1, double u2) const
{
    return {u1 <= -std::expm1(-upper_ * t), envelope_.quantile(u2)};
}

double DominatingProcess::pmf_bound(Radius r) const
{
    double sup = 0.0;
    for (const auto& law : marks_) {
        sup = std::max(sup, law.pmf(r));
    }
    return upper_ / -std::expm1(-lower_) * sup;
}

double t0(double rate_upper, double p0)
{
    if (!(rate_upper > 0.0) || !(p0 > 0.0 && p0 < 1.0)) {
        throw std::invalid_argument("t0: need M^* > 0 and p0 in (0, 1)");
    }
    return std::min(-std::log1p(-p0) / rate_upper, 1.0);
}

MarkedSample harris_sample(std::span<const Schedule> schedules, const Window& w, double tau, double t)
{
    if (schedules.size() != w.box_size()) {
        throw std::invalid_argument("harris_sample: one schedule per window site is required");
    }
    MarkedSample s(w);
    for_each_site(w, [&](const Site& x) {
        Radius m = MarkedSample::kVacant;
        for (const auto& e : schedules[w.index(x)].events) {
            if (e.time > tau && e.time <= t) {
                m = std::max(m, e.mark);
            }
        }
        if (m != MarkedSample::kVacant) {
            s.place(x, m);
        }
    });
    return s;
}

ClusterReport harris_graph(std::span<const Schedule> schedules, const Window& w, double tau, double t)
{
    return clusters(harris_sample(schedules, w, tau, t));
}

}  // namespace boolperc
