#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "boolperc/geometry.hpp"
#include "boolperc/harris_coupling.hpp"
#include "boolperc/radius_law.hpp"

namespace boolperc {

using Spin = int;

enum class BoundaryKind { frozen, periodic };

/// How reads outside the window resolve. Frozen reads return `fill`;
/// periodic reads wrap around the window box.
struct BoundaryPolicy {
    BoundaryKind kind = BoundaryKind::frozen;
    Spin fill = 0;

    std::string describe() const;
};

/// Spins on a box window with alphabet {0, .., alphabet-1}.
class SpinConfig {
public:
    SpinConfig() = default;
    SpinConfig(Window w, int alphabet, Spin initial = 0, BoundaryPolicy policy = {});

    const Window& window() const noexcept { return window_; }
    int alphabet() const noexcept { return alphabet_; }
    const BoundaryPolicy& policy() const noexcept { return policy_; }
    std::span<const Spin> spins() const noexcept { return spins_; }

    Spin operator[](const Site& x) const { return spins_[window_.index(x)]; }
    void set(const Site& x, Spin s);

    /// Policy-aware read; `outside` reports whether the policy was used.
    Spin read(const Site& y, bool* outside = nullptr) const;

    /// sigma_{x,s}: equal to this configuration except at x.
    SpinConfig with(const Site& x, Spin s) const;

    friend bool operator==(const SpinConfig& a, const SpinConfig& b)
    {
        return a.spins_ == b.spins_ && a.alphabet_ == b.alphabet_;
    }

private:
    Window window_;
    int alphabet_ = 2;
    std::vector<Spin> spins_;
    BoundaryPolicy policy_;
};

/// The part of a configuration a range-r kernel at x may read. Reads outside
/// B(x, r) throw LocalityViolation.
class LocalView {
public:
    LocalView(const SpinConfig& cfg, const Site& center, Radius r, std::size_t* boundary_reads = nullptr);

    Spin operator()(const Site& y) const;
    const Site& center() const noexcept { return center_; }
    Radius radius() const noexcept { return r_; }
    int alphabet() const noexcept { return cfg_.alphabet(); }

    /// fn(site, spin) over B(center, r).
    template <typename Fn>
    void for_each(Fn&& fn) const
    {
        for_each_in_ball(center_, r_, [&](const Site& y) { fn(y, (*this)(y)); });
    }

private:
    const SpinConfig& cfg_;
    Site center_;
    Radius r_;
    std::size_t* boundary_reads_;
};

/// p_x^[r](. | sigma) written into `probs` (one entry per spin).
using KernelFn = std::function<void(const LocalView& view, std::span<double> probs)>;

struct Kernel {
    std::string name;
    KernelFn fn;
};

/// Majority of B(x,r) \ {x} on {0,1}; ties are resolved uniformly.
Kernel majority_kernel();
/// Copies a uniformly chosen site of B(x,r) \ {x}; keeps sigma(x) when r = 0.
Kernel voter_kernel();
/// Copies the spin at x + r e_1 with probability 1 - eps, else uniform.
Kernel noisy_copy_kernel(double eps);
Kernel point_mass_kernel(Spin s);
Kernel uniform_kernel();
/// sigma(x) + 1 modulo the alphabet size.
Kernel flip_kernel();
/// Kernel by name: majority, voter, noisy-copy[:eps], pointmass:s, uniform, flip.
Kernel kernel_by_name(const std::string& spec);

/// c_x(s, sigma) = M_x sum_r nu_x(r) p_x^[r](s | sigma).
struct KalikowSpec {
    int alphabet = 2;
    RateField rates = 1.0;
    SiteLawField ranges = RadiusLaw::point_mass(0);
    Kernel kernel = uniform_kernel();
};

/// Inverse-CDF draw from p_x^[r](. | sigma) with spins in increasing order.
/// Throws std::runtime_error when the kernel is not normalized to 1e-12.
Spin update_value(const KalikowSpec& spec, const Site& x, Radius r, const SpinConfig& sigma, double u,
                  std::size_t* boundary_reads = nullptr);

/// M_x sum_r nu_x(r) p_x^[r](s | sigma), summed until G_x(r) < 1e-15.
double jump_rate(const KalikowSpec& spec, const SpinConfig& sigma, const Site& x, Spin s);

struct Update {
    double time = 0.0;
    Site site;
    Spin spin = 0;

    friend bool operator==(const Update&, const Update&) = default;
};

/// Every clock ring applied, in order, including rings that leave the spin
/// unchanged.
struct Trajectory {
    SpinConfig initial;
    std::vector<Update> updates;
    SpinConfig final;
    double interval_length = 0.0;
    std::size_t intervals = 0;
    std::size_t boundary_reads = 0;
    std::vector<std::string> warnings;

    /// Re-applies the updates to the initial configuration.
    SpinConfig replay() const;
};

/// Islands of the Harris graph on (tau, t], each a sorted list of sites.
/// Periodic boundaries wrap the balls around the window box.
std::vector<std::vector<Site>> islands(std::span<const Schedule> schedules, const Window& w, double tau, double t,
                                       const BoundaryPolicy& policy);

/// Applies the rings of the island's sites in (tau, t] in (time, site,
/// ring) order. Reads of window sites outside the island throw, so a
/// passing run certifies that the island evolved on its own.
Trajectory evolve_island(const KalikowSpec& spec, std::span<const Site> island, std::span<const Schedule> schedules,
                         const SpinConfig& eta, double tau, double t);

/// Applies every ring in the window in (time, site, ring) order.
Trajectory evolve_global(const KalikowSpec& spec, std::span<const Schedule> schedules, const SpinConfig& eta, double tau,
                         double t);

/// Largest interval length for which the Harris graph has finite islands:
/// t0 of the dominating process with p0 of its radius law.
double interval_length(const KalikowSpec& spec, int d);

struct SimOptions {
    std::uint64_t seed = 0;
    /// 0 picks interval_length(spec, d); larger values are allowed with a warning.
    double interval = 0.0;
    /// Intervals are (k L, (k+1) L]; a run may resume at any k.
    std::size_t first_interval = 0;
    /// Straight global ordering instead of island splicing.
    bool global_order = false;
    /// Compare an explicit interval against t0 and warn when it is longer.
    bool check_interval = true;
    unsigned workers = 1;
};

/// Evolves eta from first_interval * L up to time T.
Trajectory simulate(const KalikowSpec& spec, const SpinConfig& eta, double T, const SimOptions& opts);

struct RateCheck {
    double rate = 0.0;      // c_x(s, sigma)
    double expected = 0.0;  // dt * rate
    double observed = 0.0;  // frequency of ending at sigma_{x,s}
    double z = 0.0;
};

/// Frequency over replicas of the run on [0, dt] ending exactly at
/// sigma_{x,s} != sigma, against dt c_x(s, sigma). A no-op jump (s = sigma(x))
/// is invisible and both sides are zero.
RateCheck generator_rate_check(const KalikowSpec& spec, const SpinConfig& sigma, const Site& x, Spin s, double dt,
                               std::size_t replicas, std::uint64_t seed, unsigned workers = 0);

}  // namespace boolperc
