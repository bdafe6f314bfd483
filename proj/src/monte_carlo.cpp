#include "boolperc/monte_carlo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace boolperc {

unsigned default_workers() noexcept
{
    unsigned const hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

Interval wilson_interval(std::size_t successes, std::size_t n, double z)
{
    if (n == 0) {
        return {0.0, 1.0};
    }
    double const nn = static_cast<double>(n);
    double const phat = static_cast<double>(successes) / nn;
    double const z2 = z * z;
    double const denom = 1.0 + z2 / nn;
    double const center = (phat + z2 / (2.0 * nn)) / denom;
    double const half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Estimate make_estimate(std::size_t successes, std::size_t replicas)
{
    if (replicas == 0) {
        throw std::invalid_argument("estimate: at least one replica is required");
    }
    Estimate e;
    e.replicas = replicas;
    e.successes = successes;
    e.mean = static_cast<double>(successes) / static_cast<double>(replicas);
    e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(replicas));
    e.wilson = wilson_interval(successes, replicas);
    return e;
}

Estimate estimate(std::size_t replicas, std::uint64_t seed, const std::function<bool(std::uint64_t)>& event,
                  unsigned workers)
{
    if (replicas == 0) {
        throw std::invalid_argument("estimate: at least one replica is required");
    }
    std::vector<char> hit(replicas, 0);
    parallel_for(replicas, workers, [&](std::size_t i) { hit[i] = event(replica_seed(seed, i)) ? 1 : 0; });
    std::size_t successes = 0;
    for (char h : hit) {
        successes += static_cast<std::size_t>(h);
    }
    return make_estimate(successes, replicas);
}

MeanStat mean_stat(std::span<const double> xs)
{
    MeanStat m;
    m.n = xs.size();
    if (xs.empty()) {
        return m;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    m.mean = sum / static_cast<double>(m.n);
    if (m.n > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - m.mean) * (x - m.mean);
        }
        m.std_error = std::sqrt(ss / static_cast<double>(m.n - 1) / static_cast<double>(m.n));
    }
    return m;
}

double z_score(double observed, double expected, double sigma)
{
    double const gap = observed - expected;
    if (sigma > 0.0) {
        return gap / sigma;
    }
    return gap == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), gap);
}

double two_sample_z(const MeanStat& a, const MeanStat& b)
{
    return z_score(a.mean, b.mean, std::hypot(a.std_error, b.std_error));
}

double correlation(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("correlation: length mismatch");
    }
    MeanStat const mx = mean_stat(xs);
    MeanStat const my = mean_stat(ys);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx.mean) * (ys[i] - my.mean);
        sxx += (xs[i] - mx.mean) * (xs[i] - mx.mean);
        syy += (ys[i] - my.mean) * (ys[i] - my.mean);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace boolperc
