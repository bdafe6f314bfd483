#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boolperc/geometry.hpp"

namespace boolperc {

/// Largest radius a quantile search will return. Effectively infinite on any
/// window this library can hold in memory.
inline constexpr Radius kMaxRadius = Radius{1} << 60;

/// A moment that is either divergent or known up to a one-sided error:
/// the true value lies in [value, value + abs_error].
struct MomentValue {
    bool divergent = false;
    double value = 0.0;
    double abs_error = 0.0;

    double upper() const noexcept { return value + abs_error; }
};

namespace detail {
class LawImpl;
}

/// Probability mass function on the non-negative integers with exact tail
/// access G(r) = P(R > r). Immutable, cheap to copy, safe to share.
class RadiusLaw {
public:
    static RadiusLaw point_mass(Radius r0);
    /// nu(r) = a (1 - a)^r, r >= 0, with success probability a in (0, 1].
    static RadiusLaw geometric(double success);
    /// nu(r) proportional to (r+1)^(-s), s > 1; optionally restricted to r <= cap.
    static RadiusLaw power_law(double s, std::optional<Radius> cap = std::nullopt);
    /// Finite table nu(0), nu(1), ...; must sum to one within 1e-12.
    static RadiusLaw table(std::vector<double> pmf);
    /// Law of the largest mark among the events of a Poisson clock with mean
    /// `mean_events` marked by `base`, conditioned on at least one event:
    /// F(r) = (exp(-a G(r)) - exp(-a)) / (1 - exp(-a)).
    static RadiusLaw max_mark(const RadiusLaw& base, double mean_events);
    /// Pointwise infimum of the CDFs of finitely many laws.
    static RadiusLaw cdf_infimum(std::vector<RadiusLaw> laws);

    double pmf(Radius r) const;
    double tail(Radius r) const;
    double cdf(Radius r) const;
    /// Generalized inverse: smallest r with cdf(r) >= u, for u in (0, 1].
    Radius quantile(double u) const;

    Radius support_min() const;
    std::optional<Radius> support_max() const;
    /// Analytic finiteness of sum_r r^d nu(r).
    bool moment_finite(int d) const;
    std::string describe() const;

    const detail::LawImpl& impl() const noexcept { return *impl_; }

private:
    explicit RadiusLaw(std::shared_ptr<const detail::LawImpl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const detail::LawImpl> impl_;
};

/// E[R^d] = sum_{r>=1} r^d nu(r); divergence decided analytically.
MomentValue dth_moment(const RadiusLaw& law, int d);
/// E[R^d 1{R >= r0}]. Throws DivergentMoment when the d-th moment is infinite.
MomentValue tail_moment(const RadiusLaw& law, int d, Radius r0);

/// Assignment of Z^d to finitely many site classes by the residue of the
/// coordinate sum modulo the number of classes.
class ClassMap {
public:
    explicit ClassMap(std::size_t classes = 1);
    std::size_t classes() const noexcept { return classes_; }
    std::size_t class_of(const Site& x) const noexcept;

private:
    std::size_t classes_;
};

/// One radius law per site class.
class SiteLawField {
public:
    explicit SiteLawField(std::vector<RadiusLaw> class_laws);
    SiteLawField(RadiusLaw homogeneous);  // NOLINT: implicit by intent

    const ClassMap& class_map() const noexcept { return map_; }
    std::span<const RadiusLaw> classes() const noexcept { return laws_; }
    const RadiusLaw& law_at(const Site& x) const noexcept { return laws_[map_.class_of(x)]; }
    bool homogeneous() const noexcept { return laws_.size() == 1; }

private:
    std::vector<RadiusLaw> laws_;
    ClassMap map_;
};

/// Law whose CDF is inf over classes of the class CDFs; every class law is
/// stochastically dominated by it. Returns the class law itself when all
/// classes share one law.
RadiusLaw envelope(const SiteLawField& field);

struct CoupledRadii {
    std::vector<Radius> per_class;
    Radius envelope = 0;
};

/// Quantiles of every class law and of the envelope at one shared uniform.
CoupledRadii shared_uniform_coupling(const SiteLawField& field, const RadiusLaw& envelope_law, double u);

/// Distribution function on [0, inf) made of linear pieces and jumps.
class CdfOnReals {
public:
    /// Linear on [from, to) going from at_from to the left limit at_to.
    struct Piece {
        double from;
        double to;
        double at_from;
        double at_to;
    };

    /// Finite support: equals 1 from the end of the last piece on.
    explicit CdfOnReals(std::vector<Piece> pieces);
    /// Unbounded support: after `head`, unit pieces [e+k, e+k+1) are produced
    /// by `unit_piece(k)`. `mean_diverges` is the analytic verdict.
    CdfOnReals(std::vector<Piece> head, std::function<Piece(std::size_t)> unit_piece, bool mean_diverges);

    double operator()(double x) const;
    /// Mean, or nullopt when it diverges.
    std::optional<double> mean() const;
    /// Integral of 1 - F over [0, K].
    double truncated_mean(double k) const;

private:
    std::vector<Piece> head_;
    std::function<Piece(std::size_t)> unit_piece_;
    bool mean_diverges_ = false;

    Piece piece_at(double x) const;
};

/// The four-piece distribution functions F_n, n >= 2, whose means are
/// uniformly bounded while their pointwise infimum has infinite mean.
CdfOnReals counterexample_family(int n);
/// Pointwise infimum over n >= 2 of counterexample_family(n).
CdfOnReals counterexample_envelope();

}  // namespace boolperc
