#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "boolperc/boolean_model.hpp"
#include "boolperc/radius_law.hpp"

namespace boolperc {

struct ScheduleEvent {
    double time = 0.0;
    Radius mark = 0;
    double u = 1.0;  // in (0, 1]
};

/// Events of one site's marked Poisson clock on (from, to], in time order.
struct Schedule {
    double from = 0.0;
    double to = 0.0;
    std::vector<ScheduleEvent> events;

    std::size_t count() const noexcept { return events.size(); }
    /// Largest mark over the events, or kVacant without events.
    Radius max_mark() const noexcept;
};

/// Clock of rate M on (from, to] with marks from `law`, drawn from a
/// sequential stream seeded by `seed`.
Schedule sample_schedule(double M, const RadiusLaw& law, double from, double to, std::uint64_t seed);
inline Schedule sample_schedule(double M, const RadiusLaw& law, double t, std::uint64_t seed)
{
    return sample_schedule(M, law, 0.0, t, seed);
}

/// Jump intensities per site class; classes follow the coordinate-sum
/// residue rule shared with SiteLawField.
class RateField {
public:
    explicit RateField(std::vector<double> per_class);
    RateField(double homogeneous);  // NOLINT: implicit by intent

    double at(const Site& x) const noexcept { return rates_[map_.class_of(x)]; }
    std::span<const double> classes() const noexcept { return rates_; }
    double lower() const noexcept;  // M_*
    double upper() const noexcept;  // M^*

private:
    std::vector<double> rates_;
    ClassMap map_;
};

/// Schedules for every site of a window, keyed by (seed, site), so a site's
/// clock does not depend on which window it is drawn in. Indexed by the
/// window's bounding-box index; sites outside an L1-ball window stay empty.
std::vector<Schedule> sample_schedules(const Window& w, const RateField& rates, const SiteLawField& marks,
                                       double from, double to, std::uint64_t seed);

struct MaxMarkCdf {
    double unconditional = 0.0;  // P(M(t) <= r) = exp(-M t G(r))
    double conditional = 0.0;    // P(M(t) <= r | N(t) >= 1)
};

MaxMarkCdf max_mark_cdf(double M, const RadiusLaw& law, double t, Radius r);
/// (exp(-M t G(r)) - exp(-M t)) / (1 - exp(-M t)).
double F_xt(double M, const RadiusLaw& law, double t, Radius r);

struct CoupledSite {
    bool occupied = false;
    Radius radius = 0;
};

/// (X_t, R_t) = (1{U1 <= 1 - exp(-M t)}, F_t^{-1}(U2)) for one site law; the
/// conditional max-mark law is built once.
class SiteCoupling {
public:
    SiteCoupling(double M, const RadiusLaw& law, double t);
    CoupledSite operator()(double u1, double u2) const;
    const RadiusLaw& radius_law() const noexcept { return max_mark_; }
    double occupation() const noexcept { return occupation_; }

private:
    double occupation_;
    RadiusLaw max_mark_;
};

CoupledSite coupled_site(double M, const RadiusLaw& law, double t, double u1, double u2);

/// h(z) = (1 - exp(-a z)) / (1 - exp(-z)), with h(0) = a.
double h_ratio(double a, double z);
/// h is non-decreasing along the grid within 1e-12.
bool monotone_h_check(double a, std::span<const double> z_grid);

/// (X_{t'}, R_{t'}) <= (X_t, R_t) coordinatewise for shared (U1, U2).
bool t_monotonicity_check(double M, const RadiusLaw& law, double t_early, double t_late, double u1, double u2);

/// The process (X*, R*) that dominates (X_t, R_t) at every site and every
/// t <= 1: occupancy at rate M^* and radii from the infimum over classes of
/// the conditional max-mark laws at t = 1.
class DominatingProcess {
public:
    /// Throws DivergentMoment when some class law has infinite d-th moment.
    DominatingProcess(const RateField& rates, const SiteLawField& marks, int d);

    CoupledSite operator()(double t, double u1, double u2) const;
    const RadiusLaw& radius_law() const noexcept { return envelope_; }
    double rate_upper() const noexcept { return upper_; }
    double rate_lower() const noexcept { return lower_; }
    /// M^* / (1 - exp(-M_*)) sup_c nu_c(r), the pointwise bound on nu*(r).
    double pmf_bound(Radius r) const;

private:
    double upper_;
    double lower_;
    std::vector<RadiusLaw> marks_;
    RadiusLaw envelope_;
};

/// min(-log(1 - p0) / M^*, 1).
double t0(double rate_upper, double p0);

/// The Boolean sample with X_x = 1{x rings in (tau, t]} and R_x the largest
/// mark rung there. Its graph is the Harris graph on (tau, t].
MarkedSample harris_sample(std::span<const Schedule> schedules, const Window& w, double tau, double t);
/// Islands of the Harris graph on (tau, t].
ClusterReport harris_graph(std::span<const Schedule> schedules, const Window& w, double tau, double t);

}  // namespace boolperc
