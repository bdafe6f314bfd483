#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace boolperc {

using Coord = std::int64_t;
using Radius = std::int64_t;

inline constexpr int kMaxDim = 8;

/// A point of Z^d with d <= kMaxDim. Stored inline so hot loops never allocate.
class Site {
public:
    Site() = default;
    explicit Site(int dim);
    Site(std::initializer_list<Coord> coords);

    static Site origin(int dim) { return Site(dim); }

    int dim() const noexcept { return dim_; }
    Coord operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
    Coord& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }

    const Coord* begin() const noexcept { return c_.data(); }
    const Coord* end() const noexcept { return c_.data() + dim_; }

    Site operator+(const Site& o) const;
    Site operator-(const Site& o) const;
    Site scaled(Coord k) const;

    friend bool operator==(const Site& a, const Site& b) noexcept;
    friend std::strong_ordering operator<=>(const Site& a, const Site& b) noexcept;

    std::string to_string() const;

private:
    std::array<Coord, kMaxDim> c_{};
    int dim_ = 0;
};

Coord l1_norm(const Site& x) noexcept;
Coord l1_distance(const Site& x, const Site& y) noexcept;

/// B(x, r) in lexicographic order.
std::vector<Site> ball_sites(const Site& x, Radius r);
/// S_r = {x : |x|_1 = r} in lexicographic order; S_0 = {0}.
std::vector<Site> sphere_sites(int d, Radius r);

std::uint64_t ball_cardinality(int d, Radius r);
std::uint64_t sphere_cardinality(int d, Radius r);

/// C with |B(0,r)| <= C r^d for every r >= 1. Realized as 3^d since
/// |B(0,r)| <= (2r+1)^d <= (3r)^d.
std::uint64_t ball_constant(int d);

struct CoveringResult {
    bool covered = true;
    std::vector<Site> uncovered;
};

/// Checks S_{nr} against the union of B(r x, ceil(d r / 2)) over x in S_n by
/// exhaustive enumeration. Throws BudgetExceeded when |S_{nr}| > budget.
CoveringResult sphere_covering_check(int d, Radius n, Radius r, std::uint64_t budget = 2'000'000);

using Rational = boost::rational<std::int64_t>;

/// For each sample x (non-increasing, coordinates in [0,1], summing to m) the
/// rounding y = (1,..,1,0,..,0) with m ones satisfies |y - x|_1 <= d/2 and
/// |y - x|_1 == 2 * sum_{i>m} x_i, evaluated in exact rational arithmetic.
/// Throws HypothesisViolation when a sample or (d, m) is out of range.
bool rounding_distance_check(int d, int m, std::span<const std::vector<Rational>> samples);

/// Axis-aligned box, optionally intersected with an L1 ball. Sites are
/// addressed by a linear index over the bounding box (last axis fastest).
class Window {
public:
    Window() = default;

    static Window box(const Site& lo, const Site& hi);
    /// [-h, h]^d around the center.
    static Window cube(const Site& center, Coord half_width);
    /// B(center, radius) stored on its bounding cube.
    static Window l1_ball(const Site& center, Radius radius);

    int dim() const noexcept { return lo_.dim(); }
    const Site& lo() const noexcept { return lo_; }
    const Site& hi() const noexcept { return hi_; }
    Coord extent(int axis) const noexcept { return hi_[axis] - lo_[axis] + 1; }
    std::size_t box_size() const noexcept { return box_size_; }
    const std::optional<std::pair<Site, Radius>>& ball() const noexcept { return ball_; }

    bool contains(const Site& x) const noexcept;
    /// Member with a lattice neighbour outside the window.
    bool on_boundary(const Site& x) const noexcept;
    /// True when the whole of B(x, r) is a subset of the window.
    bool contains_ball(const Site& x, Radius r) const noexcept;

    std::size_t index(const Site& x) const noexcept;
    Site site(std::size_t index) const noexcept;

    /// Number of member sites.
    std::size_t size() const;
    /// Largest k with B(x, k) inside the window, or -1 when x is outside.
    Radius inner_radius(const Site& x) const noexcept;

    std::string describe() const;

private:
    Site lo_;
    Site hi_;
    std::optional<std::pair<Site, Radius>> ball_;
    std::array<std::size_t, kMaxDim> stride_{};
    std::size_t box_size_ = 0;

    void init_strides();
};

/// Calls fn(site) for every site of B(x, r) (unclipped), lexicographic order.
template <typename Fn>
void for_each_in_ball(const Site& x, Radius r, Fn&& fn);

/// Calls fn(site) for every site of B(x, r) that lies in the window.
template <typename Fn>
void for_each_in_ball(const Site& x, Radius r, const Window& w, Fn&& fn);

/// Calls fn(site) for every member of the window, linear-index order.
template <typename Fn>
void for_each_site(const Window& w, Fn&& fn);

}  // namespace boolperc

#include "boolperc/detail/geometry_impl.hpp"
