#include "boolperc/radius_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include "boolperc/errors.hpp"

namespace boolperc {
namespace detail {

namespace {

// GSL aborts on domain errors by default; every call below checks status.
const bool gsl_quiet = [] {
    gsl_set_error_handler_off();
    return true;
}();

double hurwitz_zeta(double s, double q)
{
    gsl_sf_result res;
    if (gsl_sf_hzeta_e(s, q, &res) != GSL_SUCCESS) {
        throw std::domain_error("Hurwitz zeta evaluation failed");
    }
    return res.val;
}

double ipow(double x, int d)
{
    double v = 1.0;
    for (int i = 0; i < d; ++i) {
        v *= x;
    }
    return v;
}

std::string fmt_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

class LawImpl {
public:
    virtual ~LawImpl() = default;

    // Both are only called with r >= 0.
    virtual double pmf_at(Radius r) const = 0;
    virtual double tail_at(Radius r) const = 0;

    virtual Radius support_min() const = 0;
    virtual std::optional<Radius> support_max() const = 0;
    virtual bool moment_finite(int d) const = 0;
    /// Only called when moment_finite(d).
    virtual MomentValue tail_moment(int d, Radius r0) const = 0;
    virtual std::string describe() const = 0;

    double pmf(Radius r) const { return r < 0 ? 0.0 : pmf_at(r); }
    double tail(Radius r) const { return r < 0 ? 1.0 : tail_at(r); }
    double cdf(Radius r) const { return r < 0 ? 0.0 : 1.0 - tail_at(r); }

    void build_index()
    {
        constexpr std::size_t kTableLimit = std::size_t{1} << 16;
        constexpr double kTableTop = 1.0 - 0x1.0p-20;
        auto const top = support_max();
        for (Radius r = 0; static_cast<std::size_t>(r) < kTableLimit; ++r) {
            double const c = cdf(r);
            cdf_table_.push_back(c);
            if (c >= kTableTop || (top && r >= *top)) {
                break;
            }
        }
    }

    Radius quantile(double u) const
    {
        if (!(u > 0.0 && u <= 1.0)) {
            throw std::invalid_argument("quantile: u must lie in (0, 1]");
        }
        if (u <= cdf_table_.back()) {
            auto it = std::lower_bound(cdf_table_.begin(), cdf_table_.end(), u);
            return static_cast<Radius>(it - cdf_table_.begin());
        }
        // cdf(lo) < u throughout; gallop then bisect on (lo, hi].
        Radius lo = static_cast<Radius>(cdf_table_.size()) - 1;
        Radius step = 1;
        Radius hi = lo + step;
        while (cdf(hi) < u) {
            lo = hi;
            if (hi >= kMaxRadius) {
                return kMaxRadius;
            }
            step *= 2;
            hi = std::min(lo + step, kMaxRadius);
        }
        while (hi - lo > 1) {
            Radius const mid = lo + (hi - lo) / 2;
            if (cdf(mid) >= u) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return hi;
    }

private:
    std::vector<double> cdf_table_;
};

namespace {

constexpr double kMomentRelTol = 1e-15;
constexpr std::int64_t kMaxAbelTerms = 20'000'000;

/// sum_{r>=r0} r^d nu(r) through r0^d G(r0-1) + sum_{r>=r0} ((r+1)^d - r^d) G(r),
/// cut off once `remainder(R)`, a bound on sum_{j>=R} j^d nu(j), is negligible.
template <typename Remainder>
MomentValue abel_tail_moment(const LawImpl& law, int d, Radius r0, Remainder&& remainder)
{
    Radius const start = std::max<Radius>(r0, 0);
    double sum = start > 0 ? ipow(static_cast<double>(start), d) * law.tail(start - 1) : 0.0;
    auto const top = law.support_max();
    for (Radius r = start, n = 0;; ++r, ++n) {
        if (top && r >= *top) {
            return {false, sum, 0.0};
        }
        double const g = law.tail(r);
        sum += (ipow(static_cast<double>(r + 1), d) - ipow(static_cast<double>(r), d)) * g;
        if ((n & 255) == 255 || n >= kMaxAbelTerms) {
            double const rem = remainder(r + 2);
            if (rem <= kMomentRelTol * sum || rem == 0.0 || n >= kMaxAbelTerms) {
                return {false, sum, rem};
            }
        }
    }
}

class PointMassLaw final : public LawImpl {
public:
    explicit PointMassLaw(Radius r0) : r0_(r0) {}
    double pmf_at(Radius r) const override { return r == r0_ ? 1.0 : 0.0; }
    double tail_at(Radius r) const override { return r < r0_ ? 1.0 : 0.0; }
    Radius support_min() const override { return r0_; }
    std::optional<Radius> support_max() const override { return r0_; }
    bool moment_finite(int) const override { return true; }
    MomentValue tail_moment(int d, Radius r0) const override
    {
        return {false, r0_ >= r0 ? ipow(static_cast<double>(r0_), d) : 0.0, 0.0};
    }
    std::string describe() const override { return "pointmass(" + std::to_string(r0_) + ")"; }

private:
    Radius r0_;
};

class GeometricLaw final : public LawImpl {
public:
    explicit GeometricLaw(double a) : a_(a), q_(1.0 - a) {}
    double pmf_at(Radius r) const override { return a_ * std::pow(q_, static_cast<double>(r)); }
    double tail_at(Radius r) const override { return std::pow(q_, static_cast<double>(r + 1)); }
    Radius support_min() const override { return 0; }
    std::optional<Radius> support_max() const override
    {
        return q_ == 0.0 ? std::optional<Radius>(0) : std::nullopt;
    }
    bool moment_finite(int) const override { return true; }
    MomentValue tail_moment(int d, Radius r0) const override
    {
        if (q_ == 0.0) {
            return {false, 0.0, 0.0};
        }
        // Terms r^d a q^r are eventually decreasing with ratio
        // rho(r) = q (1 + 1/r)^d; past that point the remainder after r is at
        // most term(r) rho / (1 - rho).
        double const mode = d / -std::log(q_);
        double sum = 0.0;
        for (Radius r = std::max<Radius>(r0, 1);; ++r) {
            double const term = ipow(static_cast<double>(r), d) * pmf_at(r);
            sum += term;
            if (static_cast<double>(r) > mode + 1.0) {
                double const rho = q_ * ipow(1.0 + 1.0 / static_cast<double>(r), d);
                if (rho < 1.0) {
                    double const rem = term * rho / (1.0 - rho);
                    if (rem <= kMomentRelTol * sum || rem == 0.0) {
                        return {false, sum, rem};
                    }
                }
            }
        }
    }
    std::string describe() const override { return "geometric(" + fmt_double(a_) + ")"; }

private:
    double a_;
    double q_;
};

class PowerLaw final : public LawImpl {
public:
    explicit PowerLaw(double s) : s_(s), zeta_(hurwitz_zeta(s, 1.0)) {}
    double pmf_at(Radius r) const override { return std::pow(static_cast<double>(r) + 1.0, -s_) / zeta_; }
    double tail_at(Radius r) const override { return hurwitz_zeta(s_, static_cast<double>(r) + 2.0) / zeta_; }
    Radius support_min() const override { return 0; }
    std::optional<Radius> support_max() const override { return std::nullopt; }
    bool moment_finite(int d) const override { return s_ > d + 1; }
    MomentValue tail_moment(int d, Radius r0) const override
    {
        // With k = r + 1: sum_{k>=k0} (k-1)^d k^{-s}
        //   = sum_j C(d,j) (-1)^{d-j} zeta(s - j, k0).
        double const k0 = static_cast<double>(std::max<Radius>(r0, 1)) + 1.0;
        double sum = 0.0;
        double binom = 1.0;
        for (int j = 0; j <= d; ++j) {
            double const sign = ((d - j) % 2 == 0) ? 1.0 : -1.0;
            sum += sign * binom * hurwitz_zeta(s_ - j, k0);
            binom = binom * (d - j) / (j + 1);
        }
        return {false, std::max(sum, 0.0) / zeta_, 0.0};
    }
    std::string describe() const override { return "powerlaw(" + fmt_double(s_) + ")"; }

private:
    double s_;
    double zeta_;
};

class TableLaw final : public LawImpl {
public:
    TableLaw(std::vector<double> pmf, std::string name) : pmf_(std::move(pmf)), name_(std::move(name))
    {
        if (pmf_.empty()) {
            throw std::invalid_argument("table law needs at least one entry");
        }
        long double total = 0.0L;
        for (double p : pmf_) {
            if (!(p >= 0.0)) {
                throw std::invalid_argument("table law entries must be non-negative");
            }
            total += p;
        }
        if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12) {
            throw std::invalid_argument("table law must sum to one");
        }
        while (pmf_.size() > 1 && pmf_.back() == 0.0) {
            pmf_.pop_back();
        }
        tail_.assign(pmf_.size(), 0.0);
        long double acc = 0.0L;
        for (std::size_t r = pmf_.size(); r-- > 0;) {
            tail_[r] = static_cast<double>(acc);
            acc += pmf_[r];
        }
        min_ = static_cast<Radius>(std::find_if(pmf_.begin(), pmf_.end(), [](double p) { return p > 0.0; })
                                   - pmf_.begin());
    }
    double pmf_at(Radius r) const override
    {
        return static_cast<std::size_t>(r) < pmf_.size() ? pmf_[static_cast<std::size_t>(r)] : 0.0;
    }
    double tail_at(Radius r) const override
    {
        return static_cast<std::size_t>(r) < tail_.size() ? tail_[static_cast<std::size_t>(r)] : 0.0;
    }
    Radius support_min() const override { return min_; }
    std::optional<Radius> support_max() const override { return static_cast<Radius>(pmf_.size()) - 1; }
    bool moment_finite(int) const override { return true; }
    MomentValue tail_moment(int d, Radius r0) const override
    {
        long double sum = 0.0L;
        for (std::size_t r = static_cast<std::size_t>(std::max<Radius>(r0, 1)); r < pmf_.size(); ++r) {
            sum += static_cast<long double>(ipow(static_cast<double>(r), d)) * pmf_[r];
        }
        return {false, static_cast<double>(sum), 0.0};
    }
    std::string describe() const override { return name_; }

private:
    std::vector<double> pmf_;
    std::vector<double> tail_;
    Radius min_ = 0;
    std::string name_;
};

class MaxMarkLaw final : public LawImpl {
public:
    MaxMarkLaw(RadiusLaw base, double a) : base_(std::move(base)), a_(a), denom_(std::expm1(-a)) {}
    double pmf_at(Radius r) const override
    {
        return std::exp(-a_ * base_.tail(r)) * (std::expm1(-a_ * base_.pmf(r)) / denom_);
    }
    double tail_at(Radius r) const override { return std::expm1(-a_ * base_.tail(r)) / denom_; }
    Radius support_min() const override { return base_.support_min(); }
    std::optional<Radius> support_max() const override { return base_.support_max(); }
    bool moment_finite(int d) const override { return base_.moment_finite(d); }
    MomentValue tail_moment(int d, Radius r0) const override
    {
        // 1 - exp(-a G) <= a G, so this tail is at most kappa times the base tail.
        double const kappa = a_ / -denom_;
        return abel_tail_moment(*this, d, r0, [&](Radius r) {
            return kappa * boolperc::tail_moment(base_, d, r).upper();
        });
    }
    std::string describe() const override { return "maxmark(" + base_.describe() + "," + fmt_double(a_) + ")"; }

private:
    RadiusLaw base_;
    double a_;
    double denom_;
};

class InfimumLaw final : public LawImpl {
public:
    explicit InfimumLaw(std::vector<RadiusLaw> laws) : laws_(std::move(laws)) {}
    double pmf_at(Radius r) const override
    {
        if (r == 0) {
            return 1.0 - tail_at(0);
        }
        std::size_t const c2 = argmax_tail(r);
        double const g_prev = tail_at(r - 1);
        if (laws_[c2].tail(r - 1) == g_prev) {
            return laws_[c2].pmf(r);
        }
        std::size_t const c1 = argmax_tail(r - 1);
        double const gap = laws_[c2].tail(r) - laws_[c1].tail(r);
        return std::max(0.0, laws_[c1].pmf(r) - std::max(0.0, gap));
    }
    double tail_at(Radius r) const override
    {
        double g = 0.0;
        for (const auto& law : laws_) {
            g = std::max(g, law.tail(r));
        }
        return g;
    }
    Radius support_min() const override
    {
        Radius m = 0;
        for (const auto& law : laws_) {
            m = std::max(m, law.support_min());
        }
        return m;
    }
    std::optional<Radius> support_max() const override
    {
        Radius m = 0;
        for (const auto& law : laws_) {
            auto const top = law.support_max();
            if (!top) {
                return std::nullopt;
            }
            m = std::max(m, *top);
        }
        return m;
    }
    bool moment_finite(int d) const override
    {
        return std::all_of(laws_.begin(), laws_.end(), [d](const RadiusLaw& l) { return l.moment_finite(d); });
    }
    MomentValue tail_moment(int d, Radius r0) const override
    {
        // max_c G_c <= sum_c G_c bounds the remainder by the class tail moments.
        return abel_tail_moment(*this, d, r0, [&](Radius r) {
            double rem = 0.0;
            for (const auto& law : laws_) {
                rem += boolperc::tail_moment(law, d, r).upper();
            }
            return rem;
        });
    }
    std::string describe() const override
    {
        std::string s = "inf[";
        for (std::size_t i = 0; i < laws_.size(); ++i) {
            s += (i ? ";" : "") + laws_[i].describe();
        }
        return s + "]";
    }

private:
    std::size_t argmax_tail(Radius r) const
    {
        std::size_t best = 0;
        double g = -1.0;
        for (std::size_t i = 0; i < laws_.size(); ++i) {
            double const v = laws_[i].tail(r);
            if (v > g) {
                g = v;
                best = i;
            }
        }
        return best;
    }

    std::vector<RadiusLaw> laws_;
};

}  // namespace
}  // namespace detail

namespace {

template <typename Impl, typename... Args>
std::shared_ptr<const detail::LawImpl> make_law(Args&&... args)
{
    auto impl = std::make_shared<Impl>(std::forward<Args>(args)...);
    impl->build_index();
    return impl;
}

}  // namespace

RadiusLaw RadiusLaw::point_mass(Radius r0)
{
    if (r0 < 0) {
        throw std::invalid_argument("point mass radius must be non-negative");
    }
    return RadiusLaw(make_law<detail::PointMassLaw>(r0));
}

RadiusLaw RadiusLaw::geometric(double success)
{
    if (!(success > 0.0 && success <= 1.0)) {
        throw std::invalid_argument("geometric success probability must lie in (0, 1]");
    }
    return RadiusLaw(make_law<detail::GeometricLaw>(success));
}

RadiusLaw RadiusLaw::power_law(double s, std::optional<Radius> cap)
{
    if (!(s > 1.0) && !cap) {
        throw std::invalid_argument("power law exponent must exceed 1");
    }
    if (!cap) {
        return RadiusLaw(make_law<detail::PowerLaw>(s));
    }
    if (*cap < 0 || *cap > 10'000'000) {
        throw std::invalid_argument("power law truncation must lie in [0, 1e7]");
    }
    std::vector<double> pmf(static_cast<std::size_t>(*cap) + 1);
    long double total = 0.0L;
    for (std::size_t r = 0; r < pmf.size(); ++r) {
        pmf[r] = std::pow(static_cast<double>(r) + 1.0, -s);
        total += pmf[r];
    }
    for (double& p : pmf) {
        p = static_cast<double>(p / total);
    }
    std::ostringstream name;
    name.precision(17);
    name << "powerlaw(" << s << ",cap=" << *cap << ")";
    return RadiusLaw(make_law<detail::TableLaw>(std::move(pmf), name.str()));
}

RadiusLaw RadiusLaw::table(std::vector<double> pmf)
{
    std::ostringstream name;
    name.precision(17);
    name << "table(";
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        name << (i ? "," : "") << pmf[i];
    }
    name << ")";
    return RadiusLaw(make_law<detail::TableLaw>(std::move(pmf), name.str()));
}

RadiusLaw RadiusLaw::max_mark(const RadiusLaw& base, double mean_events)
{
    if (!(mean_events > 0.0) || !std::isfinite(mean_events)) {
        throw std::invalid_argument("max_mark: mean event count must be positive and finite");
    }
    return RadiusLaw(make_law<detail::MaxMarkLaw>(base, mean_events));
}

RadiusLaw RadiusLaw::cdf_infimum(std::vector<RadiusLaw> laws)
{
    if (laws.empty()) {
        throw std::invalid_argument("cdf_infimum: no laws given");
    }
    std::string const first = laws.front().describe();
    if (std::all_of(laws.begin(), laws.end(), [&](const RadiusLaw& l) { return l.describe() == first; })) {
        return laws.front();
    }
    return RadiusLaw(make_law<detail::InfimumLaw>(std::move(laws)));
}

double RadiusLaw::pmf(Radius r) const { return impl_->pmf(r); }
double RadiusLaw::tail(Radius r) const { return impl_->tail(r); }
double RadiusLaw::cdf(Radius r) const { return impl_->cdf(r); }
Radius RadiusLaw::quantile(double u) const { return impl_->quantile(u); }
Radius RadiusLaw::support_min() const { return impl_->support_min(); }
std::optional<Radius> RadiusLaw::support_max() const { return impl_->support_max(); }
bool RadiusLaw::moment_finite(int d) const { return impl_->moment_finite(d); }
std::string RadiusLaw::describe() const { return impl_->describe(); }

MomentValue dth_moment(const RadiusLaw& law, int d)
{
    if (d < 1) {
        throw std::invalid_argument("dth_moment: d >= 1");
    }
    if (!law.moment_finite(d)) {
        return {true, std::numeric_limits<double>::infinity(), 0.0};
    }
    return law.impl().tail_moment(d, 0);
}

MomentValue tail_moment(const RadiusLaw& law, int d, Radius r0)
{
    if (d < 1) {
        throw std::invalid_argument("tail_moment: d >= 1");
    }
    if (!law.moment_finite(d)) {
        throw DivergentMoment("tail_moment: " + law.describe() + " has infinite moment of order "
                              + std::to_string(d));
    }
    return law.impl().tail_moment(d, r0);
}

// ---------------------------------------------------------------------------

ClassMap::ClassMap(std::size_t classes) : classes_(classes)
{
    if (classes == 0) {
        throw std::invalid_argument("class map needs at least one class");
    }
}

std::size_t ClassMap::class_of(const Site& x) const noexcept
{
    if (classes_ == 1) {
        return 0;
    }
    Coord s = 0;
    for (Coord c : x) {
        s += c;
    }
    auto const k = static_cast<Coord>(classes_);
    return static_cast<std::size_t>(((s % k) + k) % k);
}

SiteLawField::SiteLawField(std::vector<RadiusLaw> class_laws) : laws_(std::move(class_laws)), map_(laws_.size()) {}

SiteLawField::SiteLawField(RadiusLaw homogeneous) : SiteLawField(std::vector<RadiusLaw>{std::move(homogeneous)}) {}

RadiusLaw envelope(const SiteLawField& field)
{
    // Each class law is a proper distribution and there are finitely many
    // classes, so inf_x P(R_x <= r) -> 1 and the envelope is proper.
    return RadiusLaw::cdf_infimum({field.classes().begin(), field.classes().end()});
}

CoupledRadii shared_uniform_coupling(const SiteLawField& field, const RadiusLaw& envelope_law, double u)
{
    CoupledRadii out;
    out.per_class.reserve(field.classes().size());
    for (const auto& law : field.classes()) {
        out.per_class.push_back(law.quantile(u));
    }
    out.envelope = envelope_law.quantile(u);
    return out;
}

// ---------------------------------------------------------------------------
// CdfOnReals

CdfOnReals::CdfOnReals(std::vector<Piece> pieces) : head_(std::move(pieces)) {}

CdfOnReals::CdfOnReals(std::vector<Piece> head, std::function<Piece(std::size_t)> unit_piece, bool mean_diverges)
    : head_(std::move(head)), unit_piece_(std::move(unit_piece)), mean_diverges_(mean_diverges)
{
}

CdfOnReals::Piece CdfOnReals::piece_at(double x) const
{
    for (const Piece& p : head_) {
        if (x >= p.from && x < p.to) {
            return p;
        }
    }
    double const end = head_.empty() ? 0.0 : head_.back().to;
    if (!unit_piece_) {
        return {end, std::numeric_limits<double>::infinity(), 1.0, 1.0};
    }
    return unit_piece_(static_cast<std::size_t>(std::floor(x - end)));
}

double CdfOnReals::operator()(double x) const
{
    if (x < 0.0 || (!head_.empty() && x < head_.front().from)) {
        return 0.0;
    }
    Piece const p = piece_at(x);
    if (!std::isfinite(p.to) || p.at_from == p.at_to) {
        return p.at_from;
    }
    return p.at_from + (p.at_to - p.at_from) * (x - p.from) / (p.to - p.from);
}

std::optional<double> CdfOnReals::mean() const
{
    if (mean_diverges_) {
        return std::nullopt;
    }
    if (unit_piece_) {
        throw std::logic_error("CdfOnReals: unbounded support without a divergence verdict");
    }
    return truncated_mean(head_.empty() ? 0.0 : head_.back().to);
}

double CdfOnReals::truncated_mean(double k) const
{
    auto integrate = [k](const Piece& p) {
        double const a = std::max(p.from, 0.0);
        double const b = std::min(p.to, k);
        if (b <= a) {
            return 0.0;
        }
        auto value = [&](double x) {
            return p.at_from + (p.at_to - p.at_from) * (x - p.from) / (p.to - p.from);
        };
        return (b - a) * (1.0 - 0.5 * (value(a) + value(b)));
    };
    double total = 0.0;
    double covered_from = head_.empty() ? 0.0 : head_.front().from;
    total += std::clamp(covered_from, 0.0, k);  // F = 0 below the first piece
    for (const Piece& p : head_) {
        total += integrate(p);
    }
    if (unit_piece_) {
        double const end = head_.empty() ? 0.0 : head_.back().to;
        for (std::size_t i = 0; end + static_cast<double>(i) < k; ++i) {
            total += integrate(unit_piece_(i));
        }
    }
    return total;
}

CdfOnReals counterexample_family(int n)
{
    if (n < 2) {
        throw std::invalid_argument("counterexample_family: n >= 2");
    }
    double const nd = n;
    double const low = 1.0 - 3.0 / (4.0 * nd);
    double const high = 1.0 - 1.0 / (2.0 * nd);
    return CdfOnReals({
        {0.0, 1.0, low, low},
        {1.0, nd, low, high},
        {nd, nd + 1.0, high, high},
    });
}

CdfOnReals counterexample_envelope()
{
    // On [0,2) the infimum is attained by F_2; on [m, m+1), m >= 2, it equals
    // 1 - 1/(2m), attained by F_m. The tail 1/(2m) is not summable.
    return CdfOnReals(
        {
            {0.0, 1.0, 0.625, 0.625},
            {1.0, 2.0, 0.625, 0.75},
        },
        [](std::size_t k) {
            double const m = 2.0 + static_cast<double>(k);
            double const v = 1.0 - 1.0 / (2.0 * m);
            return CdfOnReals::Piece{m, m + 1.0, v, v};
        },
        true);
}

}  // namespace boolperc
