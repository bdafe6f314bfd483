#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "boolperc/boolean_model.hpp"

namespace boolperc {

/// Fraction of the target window's sites lying in some occupied ball of the
/// sample. The sample window should extend past the target by a margin.
double covered_fraction(const MarkedSample& s, const Window& target);
/// Uncovered sites of the target, for witness maps.
std::vector<Site> uncovered_sites(const MarkedSample& s, const Window& target);

/// Some occupied x has R_x >= |x|_1 + r, i.e. B(x, R_x) swallows B(0, r).
bool ball_swallow_event(const MarkedSample& s, Radius r);
/// The same restricted to x in S_k.
bool swallow_from_sphere(const MarkedSample& s, Radius k, Radius r);

/// max(quantile(law, 1 - 1e-3), half_width): radii past the pilot quantile
/// are rare, and a margin that grows with the window keeps far balls in play.
Radius coverage_margin(const RadiusLaw& law, Radius half_width);

/// S(K) = p sum_{k<=K} |S_k| G(k + r) for each K in `cutoffs` (ascending).
std::vector<double> borel_cantelli_sums(double p, const RadiusLaw& law, int d, Radius r,
                                        std::span<const Radius> cutoffs);

struct AbelForms {
    double sphere_form = 0.0;  // sum_{k<=K} |S_k| G(k + r)
    double ball_form = 0.0;    // sum_{m<=K} |B_m| nu(m + r + 1)
    double boundary = 0.0;     // |B_K| G(K + r + 1)
};

/// Both sides of sum_k |S_k| G(k+r) = sum_m |B_m| nu(m+r+1) + |B_K| G(K+r+1).
AbelForms abel_forms(const RadiusLaw& law, int d, Radius r, Radius K);

struct DoublingReport {
    std::vector<Radius> cutoffs;
    std::vector<double> increments;  // S(2K) - S(K)
    bool divergent = false;
};

/// S(2K) - S(K) on K = k0, 2 k0, 4 k0, ... up to k_max. Divergence is
/// declared when no increment falls below a quarter of the first one; for a
/// convergent series the increments tend to zero.
DoublingReport doubling_test(double p, const RadiusLaw& law, int d, Radius r, Radius k0, Radius k_max);

}  // namespace boolperc
