#include "boolperc/geometry.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "boolperc/errors.hpp"

namespace boolperc {

Site::Site(int dim) : dim_(dim)
{
    if (dim < 1 || dim > kMaxDim) {
        throw std::invalid_argument("site dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
}

Site::Site(std::initializer_list<Coord> coords) : Site(static_cast<int>(coords.size()))
{
    std::copy(coords.begin(), coords.end(), c_.begin());
}

Site Site::operator+(const Site& o) const
{
    Site s = *this;
    for (int i = 0; i < dim_; ++i) {
        s[i] += o[i];
    }
    return s;
}

Site Site::operator-(const Site& o) const
{
    Site s = *this;
    for (int i = 0; i < dim_; ++i) {
        s[i] -= o[i];
    }
    return s;
}

Site Site::scaled(Coord k) const
{
    Site s = *this;
    for (int i = 0; i < dim_; ++i) {
        s[i] *= k;
    }
    return s;
}

bool operator==(const Site& a, const Site& b) noexcept
{
    return a.dim_ == b.dim_ && std::equal(a.begin(), a.end(), b.begin());
}

std::strong_ordering operator<=>(const Site& a, const Site& b) noexcept
{
    if (auto c = a.dim_ <=> b.dim_; c != 0) {
        return c;
    }
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

std::string Site::to_string() const
{
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim_; ++i) {
        os << (i ? "," : "") << c_[static_cast<std::size_t>(i)];
    }
    os << ')';
    return os.str();
}

Coord l1_norm(const Site& x) noexcept
{
    Coord s = 0;
    for (Coord c : x) {
        s += std::abs(c);
    }
    return s;
}

Coord l1_distance(const Site& x, const Site& y) noexcept
{
    Coord s = 0;
    for (int i = 0; i < x.dim(); ++i) {
        s += std::abs(x[i] - y[i]);
    }
    return s;
}

std::vector<Site> ball_sites(const Site& x, Radius r)
{
    if (r < 0) {
        throw std::invalid_argument("ball radius must be non-negative");
    }
    std::vector<Site> out;
    out.reserve(ball_cardinality(x.dim(), r));
    for_each_in_ball(x, r, [&](const Site& s) { out.push_back(s); });
    return out;
}

std::vector<Site> sphere_sites(int d, Radius r)
{
    if (r < 0) {
        throw std::invalid_argument("sphere radius must be non-negative");
    }
    Site const o = Site::origin(d);
    std::vector<Site> out;
    out.reserve(sphere_cardinality(d, r));
    // Walk the first d-1 axes inside the ball, then place the last coordinate
    // at the two points that exhaust the remaining budget.
    if (d == 1) {
        out.push_back(Site{-r});
        if (r != 0) {
            out.push_back(Site{r});
        }
        return out;
    }
    Site lo = o;
    Site hi = o;
    for (int i = 0; i < d - 1; ++i) {
        lo[i] = -r;
        hi[i] = r;
    }
    Window prefix = Window::box(lo, hi);
    for_each_site(prefix, [&](const Site& s) {
        Coord used = 0;
        for (int i = 0; i < d - 1; ++i) {
            used += std::abs(s[i]);
        }
        if (used > r) {
            return;
        }
        Site z = s;
        Coord rest = r - used;
        z[d - 1] = -rest;
        out.push_back(z);
        if (rest != 0) {
            z[d - 1] = rest;
            out.push_back(z);
        }
    });
    return out;
}

namespace {

__extension__ typedef unsigned __int128 u128;

u128 binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n) {
        return 0;
    }
    u128 c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
    }
    return c;
}

std::uint64_t narrow(u128 v)
{
    if (v > std::numeric_limits<std::uint64_t>::max()) {
        throw std::overflow_error("lattice cardinality exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(v);
}

}  // namespace

std::uint64_t ball_cardinality(int d, Radius r)
{
    if (d < 1 || r < 0) {
        throw std::invalid_argument("ball_cardinality: need d >= 1, r >= 0");
    }
    // Choose i non-zero axes, their signs and a composition of the budget.
    u128 total = 0;
    auto const ur = static_cast<std::uint64_t>(r);
    for (int i = 0; i <= d && static_cast<std::uint64_t>(i) <= ur; ++i) {
        total += (u128{1} << i) * binomial(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(i))
                 * binomial(ur, static_cast<std::uint64_t>(i));
    }
    return narrow(total);
}

std::uint64_t sphere_cardinality(int d, Radius r)
{
    if (d < 1 || r < 0) {
        throw std::invalid_argument("sphere_cardinality: need d >= 1, r >= 0");
    }
    if (r == 0) {
        return 1;
    }
    u128 total = 0;
    auto const ur = static_cast<std::uint64_t>(r);
    for (int i = 1; i <= d && static_cast<std::uint64_t>(i) <= ur; ++i) {
        total += (u128{1} << i) * binomial(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(i))
                 * binomial(ur - 1, static_cast<std::uint64_t>(i - 1));
    }
    return narrow(total);
}

std::uint64_t ball_constant(int d)
{
    if (d < 1) {
        throw std::invalid_argument("ball_constant: d >= 1");
    }
    std::uint64_t c = 1;
    for (int i = 0; i < d; ++i) {
        c *= 3;
    }
    return c;
}

CoveringResult sphere_covering_check(int d, Radius n, Radius r, std::uint64_t budget)
{
    if (n < 1 || r < 1) {
        throw std::invalid_argument("sphere_covering_check: n, r >= 1");
    }
    if (sphere_cardinality(d, n * r) > budget) {
        throw BudgetExceeded("sphere_covering_check: |S_" + std::to_string(n * r) + "| exceeds budget");
    }
    Radius const reach = (static_cast<Radius>(d) * r + 1) / 2;  // ceil(d r / 2)
    std::vector<Site> centers = sphere_sites(d, n);
    for (Site& c : centers) {
        c = c.scaled(r);
    }
    CoveringResult result;
    for (const Site& z : sphere_sites(d, n * r)) {
        bool hit = std::any_of(centers.begin(), centers.end(),
                               [&](const Site& c) { return l1_distance(z, c) <= reach; });
        if (!hit) {
            result.covered = false;
            result.uncovered.push_back(z);
        }
    }
    return result;
}

bool rounding_distance_check(int d, int m, std::span<const std::vector<Rational>> samples)
{
    if (d < 2 || m < 1 || m >= d) {
        throw HypothesisViolation("rounding_distance_check: need 1 <= m < d");
    }
    Rational const zero(0);
    Rational const one(1);
    Rational const half_d(d, 2);
    for (const auto& x : samples) {
        if (static_cast<int>(x.size()) != d) {
            throw HypothesisViolation("rounding sample has wrong dimension");
        }
        Rational sum(0);
        for (int i = 0; i < d; ++i) {
            if (x[i] < zero || x[i] > one) {
                throw HypothesisViolation("rounding sample coordinate outside [0,1]");
            }
            if (i > 0 && x[i] > x[i - 1]) {
                throw HypothesisViolation("rounding sample is not non-increasing");
            }
            sum += x[i];
        }
        if (sum != Rational(m)) {
            throw HypothesisViolation("rounding sample does not sum to m");
        }
        Rational dist(0);
        Rational tail(0);
        for (int i = 0; i < d; ++i) {
            Rational const y = i < m ? one : zero;
            dist += abs(y - x[i]);
            if (i >= m) {
                tail += x[i];
            }
        }
        if (dist != Rational(2) * tail || dist > half_d) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Window

void Window::init_strides()
{
    int const d = lo_.dim();
    std::size_t stride = 1;
    for (int i = d - 1; i >= 0; --i) {
        if (hi_[i] < lo_[i]) {
            throw std::invalid_argument("window box is empty");
        }
        stride_[static_cast<std::size_t>(i)] = stride;
        stride *= static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
    }
    box_size_ = stride;
}

Window Window::box(const Site& lo, const Site& hi)
{
    if (lo.dim() != hi.dim()) {
        throw std::invalid_argument("window corners differ in dimension");
    }
    Window w;
    w.lo_ = lo;
    w.hi_ = hi;
    w.init_strides();
    return w;
}

Window Window::cube(const Site& center, Coord half_width)
{
    if (half_width < 0) {
        throw std::invalid_argument("window half-width must be non-negative");
    }
    Site lo = center;
    Site hi = center;
    for (int i = 0; i < center.dim(); ++i) {
        lo[i] -= half_width;
        hi[i] += half_width;
    }
    return box(lo, hi);
}

Window Window::l1_ball(const Site& center, Radius radius)
{
    Window w = cube(center, radius);
    w.ball_ = std::make_pair(center, radius);
    return w;
}

bool Window::contains(const Site& x) const noexcept
{
    if (x.dim() != dim()) {
        return false;
    }
    for (int i = 0; i < dim(); ++i) {
        if (x[i] < lo_[i] || x[i] > hi_[i]) {
            return false;
        }
    }
    return !ball_ || l1_distance(x, ball_->first) <= ball_->second;
}

bool Window::on_boundary(const Site& x) const noexcept
{
    if (!contains(x)) {
        return false;
    }
    for (int i = 0; i < dim(); ++i) {
        if (x[i] == lo_[i] || x[i] == hi_[i]) {
            return true;
        }
    }
    return ball_ && l1_distance(x, ball_->first) == ball_->second;
}

bool Window::contains_ball(const Site& x, Radius r) const noexcept
{
    return inner_radius(x) >= r;
}

Radius Window::inner_radius(const Site& x) const noexcept
{
    if (!contains(x)) {
        return -1;
    }
    Radius k = std::numeric_limits<Radius>::max();
    for (int i = 0; i < dim(); ++i) {
        k = std::min({k, x[i] - lo_[i], hi_[i] - x[i]});
    }
    if (ball_) {
        k = std::min(k, ball_->second - l1_distance(x, ball_->first));
    }
    return k;
}

std::size_t Window::index(const Site& x) const noexcept
{
    std::size_t idx = 0;
    for (int i = 0; i < dim(); ++i) {
        idx += static_cast<std::size_t>(x[i] - lo_[i]) * stride_[static_cast<std::size_t>(i)];
    }
    return idx;
}

Site Window::site(std::size_t index) const noexcept
{
    Site s = lo_;
    for (int i = 0; i < dim(); ++i) {
        auto const st = stride_[static_cast<std::size_t>(i)];
        s[i] += static_cast<Coord>(index / st);
        index %= st;
    }
    return s;
}

std::size_t Window::size() const
{
    if (!ball_) {
        return box_size_;
    }
    if (inner_radius(ball_->first) == ball_->second) {
        return static_cast<std::size_t>(ball_cardinality(dim(), ball_->second));
    }
    std::size_t n = 0;
    for_each_site(*this, [&](const Site&) { ++n; });
    return n;
}

std::string Window::describe() const
{
    std::string s = "box" + lo_.to_string() + ".." + hi_.to_string();
    if (ball_) {
        s += "&B(" + ball_->first.to_string() + "," + std::to_string(ball_->second) + ")";
    }
    return s;
}

}  // namespace boolperc
