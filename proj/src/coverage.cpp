#include "boolperc/coverage.hpp"

#include <algorithm>
#include <stdexcept>

namespace boolperc {

namespace {

std::vector<char> coverage_mask(const MarkedSample& s, const Window& target)
{
    std::vector<char> mask(target.box_size(), 0);
    if (target.dim() == 1 && !target.ball()) {
        // Intervals: a difference array avoids stamping long balls site by site.
        Coord const lo = target.lo()[0];
        Coord const hi = target.hi()[0];
        std::vector<std::int64_t> diff(mask.size() + 1, 0);
        for (const auto& [x, r] : s.occupied_sites()) {
            Coord const a = std::max(lo, x[0] - r);
            Coord const b = std::min(hi, x[0] + r);
            if (a <= b) {
                ++diff[static_cast<std::size_t>(a - lo)];
                --diff[static_cast<std::size_t>(b - lo + 1)];
            }
        }
        std::int64_t depth = 0;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            depth += diff[i];
            mask[i] = depth > 0;
        }
        return mask;
    }
    for (const auto& [x, r] : s.occupied_sites()) {
        for_each_in_ball(x, r, target, [&](const Site& v) { mask[target.index(v)] = 1; });
    }
    return mask;
}

}  // namespace

double covered_fraction(const MarkedSample& s, const Window& target)
{
    auto const mask = coverage_mask(s, target);
    std::size_t covered = 0;
    for_each_site(target, [&](const Site& v) { covered += static_cast<std::size_t>(mask[target.index(v)]); });
    return static_cast<double>(covered) / static_cast<double>(target.size());
}

std::vector<Site> uncovered_sites(const MarkedSample& s, const Window& target)
{
    auto const mask = coverage_mask(s, target);
    std::vector<Site> out;
    for_each_site(target, [&](const Site& v) {
        if (!mask[target.index(v)]) {
            out.push_back(v);
        }
    });
    return out;
}

bool ball_swallow_event(const MarkedSample& s, Radius r)
{
    for (const auto& [x, rx] : s.occupied_sites()) {
        if (rx >= l1_norm(x) + r) {
            return true;
        }
    }
    return false;
}

bool swallow_from_sphere(const MarkedSample& s, Radius k, Radius r)
{
    for (const Site& x : sphere_sites(s.dim(), k)) {
        Radius const rx = s.radius(x);
        if (rx != MarkedSample::kVacant && rx >= k + r) {
            return true;
        }
    }
    return false;
}

Radius coverage_margin(const RadiusLaw& law, Radius half_width)
{
    return std::max(law.quantile(1.0 - 1e-3), half_width);
}

std::vector<double> borel_cantelli_sums(double p, const RadiusLaw& law, int d, Radius r,
                                        std::span<const Radius> cutoffs)
{
    if (!std::is_sorted(cutoffs.begin(), cutoffs.end())) {
        throw std::invalid_argument("borel_cantelli_sums: cutoffs must be ascending");
    }
    std::vector<double> out;
    out.reserve(cutoffs.size());
    long double sum = 0.0L;
    Radius k = 0;
    for (Radius K : cutoffs) {
        for (; k <= K; ++k) {
            sum += static_cast<long double>(sphere_cardinality(d, k)) * law.tail(k + r);
        }
        out.push_back(static_cast<double>(p * sum));
    }
    return out;
}

AbelForms abel_forms(const RadiusLaw& law, int d, Radius r, Radius K)
{
    AbelForms f;
    long double sphere = 0.0L;
    long double ball = 0.0L;
    for (Radius k = 0; k <= K; ++k) {
        sphere += static_cast<long double>(sphere_cardinality(d, k)) * law.tail(k + r);
        ball += static_cast<long double>(ball_cardinality(d, k)) * law.pmf(k + r + 1);
    }
    f.sphere_form = static_cast<double>(sphere);
    f.ball_form = static_cast<double>(ball);
    f.boundary = static_cast<double>(ball_cardinality(d, K)) * law.tail(K + r + 1);
    return f;
}

DoublingReport doubling_test(double p, const RadiusLaw& law, int d, Radius r, Radius k0, Radius k_max)
{
    if (k0 < 1 || k_max < 2 * k0) {
        throw std::invalid_argument("doubling_test: need 1 <= k0 and 2 k0 <= k_max");
    }
    DoublingReport rep;
    std::vector<Radius> grid;
    for (Radius k = k0; k <= k_max; k *= 2) {
        grid.push_back(k);
    }
    auto const sums = borel_cantelli_sums(p, law, d, r, grid);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        rep.cutoffs.push_back(grid[i]);
        rep.increments.push_back(sums[i + 1] - sums[i]);
    }
    double const floor = 0.25 * rep.increments.front();
    rep.divergent = rep.increments.front() > 0.0
                    && std::all_of(rep.increments.begin(), rep.increments.end(), [&](double v) { return v >= floor; });
    return rep;
}

}  // namespace boolperc
