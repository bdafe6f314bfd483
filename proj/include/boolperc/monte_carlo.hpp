#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "boolperc/rng.hpp"

namespace boolperc {

/// Seed of replica i. Replicas never share a stream with each other or with
/// the master seed.
inline std::uint64_t replica_seed(std::uint64_t master, std::uint64_t i) noexcept
{
    return derive_seed(master, StreamTag::replica, i);
}

/// Worker count used when the caller passes 0.
unsigned default_workers() noexcept;

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Work is handed out
/// by index, so results written to slot i do not depend on scheduling. The
/// first exception thrown by any fn is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn)
{
    if (workers == 0) {
        workers = default_workers();
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for `successes` out of `n` at normal quantile z.
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.96);

/// Frequency of an event over independent replicas.
struct Estimate {
    std::size_t replicas = 0;
    std::size_t successes = 0;
    double mean = 0.0;
    /// Plug-in binomial standard error sqrt(m (1 - m) / n); zero for an event
    /// that was always (or never) seen.
    double std_error = 0.0;
    Interval wilson;
};

Estimate make_estimate(std::size_t successes, std::size_t replicas);

/// Evaluates event(replica_seed(seed, i)) for i < replicas in parallel.
Estimate estimate(std::size_t replicas, std::uint64_t seed, const std::function<bool(std::uint64_t)>& event,
                  unsigned workers = 0);

/// Mean and standard error of a real-valued sample.
struct MeanStat {
    std::size_t n = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

MeanStat mean_stat(std::span<const double> xs);

/// (observed - expected) / sigma; zero when both the gap and sigma vanish,
/// infinite when only sigma does.
double z_score(double observed, double expected, double sigma);

/// Two-sample z statistic for a difference of means.
double two_sample_z(const MeanStat& a, const MeanStat& b);

/// Sample Pearson correlation; zero when either side is constant.
double correlation(std::span<const double> xs, std::span<const double> ys);

}  // namespace boolperc
