#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "boolperc/geometry.hpp"
#include "boolperc/radius_law.hpp"
#include "boolperc/rng.hpp"
#include "boolperc/union_find.hpp"

namespace boolperc {

/// Retention probabilities and radius laws per site class, plus the window
/// to sample on. Retention classes use the same coordinate-sum residue rule
/// as SiteLawField.
struct ModelParams {
    Window window;
    std::vector<double> retention{0.1};
    SiteLawField laws = RadiusLaw::point_mass(0);

    double retention_at(const Site& x) const;
    double max_retention() const;
    /// Throws std::invalid_argument unless every retention lies in [0, 1).
    void validate() const;
};

/// One realization of occupancy and radii on a window. Radii exist only at
/// occupied sites; sites outside the window read as vacant.
class MarkedSample {
public:
    static constexpr Radius kVacant = -1;

    struct Meta {
        std::uint64_t seed = 0;
        std::string retention;
        std::string law;
    };

    MarkedSample() = default;
    explicit MarkedSample(Window w);

    const Window& window() const noexcept { return window_; }
    int dim() const noexcept { return window_.dim(); }
    const Meta& meta() const noexcept { return meta_; }
    Meta& meta() noexcept { return meta_; }

    bool occupied(const Site& x) const noexcept { return radius(x) != kVacant; }
    Radius radius(const Site& x) const noexcept
    {
        return window_.contains(x) ? radius_[window_.index(x)] : kVacant;
    }
    /// Raw access by bounding-box index.
    Radius radius_at(std::size_t index) const noexcept { return radius_[index]; }

    void place(const Site& x, Radius r);
    void remove(const Site& x);
    /// Upper bound on the radii present (removals do not lower it).
    Radius max_radius() const noexcept { return max_radius_; }

    std::vector<std::pair<Site, Radius>> occupied_sites() const;
    std::size_t occupied_count() const;

private:
    Window window_;
    std::vector<Radius> radius_;
    Radius max_radius_ = 0;
    Meta meta_;
};

/// Occupancy and radius of every site of Z^d for one seed, evaluated on
/// demand. sample() materializes it on a window.
class SiteField {
public:
    SiteField(const ModelParams& params, std::uint64_t seed);
    /// R_x for occupied x, kVacant otherwise.
    Radius radius(const Site& x) const;
    /// Largest radius any class law can produce.
    Radius radius_bound() const;

private:
    const ModelParams& params_;
    ClassMap retention_classes_;
    SiteUniforms occupancy_;
    SiteUniforms radius_;
};

/// Occupancy is X_x = 1{U_1(x) <= p_x} and R_x = quantile(nu_x, U_2(x)),
/// with U_1, U_2 keyed by (seed, coordinates). Sampling a larger window with
/// the same seed reproduces the smaller one on their common sites.
MarkedSample sample(const ModelParams& params, std::uint64_t seed);

/// {u, v} is an edge iff u != v and some endpoint is occupied with the other
/// inside its ball.
bool adjacent(const MarkedSample& s, const Site& u, const Site& v);
/// Neighbours of v inside the window.
std::vector<Site> neighbors(const MarkedSample& s, const Site& v);

/// Connected components of the graph induced on a region of the window.
///
/// The graph is a union of stars: each occupied center is joined to every
/// site of its ball. Every region site remembers the first center covering
/// it and later centers covering the same site are merged with it, so the
/// work is the total volume of the clipped balls. Buffers are kept between
/// calls.
class ComponentLabeler {
public:
    /// `region` must be a subset of the sample window.
    void label(const MarkedSample& s, const Window& region);

    const Window& region() const noexcept { return region_; }
    /// Identifier of the component of a region site; equal ids iff connected.
    std::uint64_t component(const Site& x);
    bool connected(const Site& x, const Site& y) { return component(x) == component(y); }

private:
    static constexpr std::uint32_t kUncovered = ~std::uint32_t{0};

    Window region_;
    std::vector<std::uint32_t> cover_;
    UnionFind centers_;
};

struct ClusterReport {
    Window window;
    /// Component label per bounding-box index, numbered 0.. in order of first
    /// appearance; kNone for box sites outside an L1-ball window.
    std::vector<std::size_t> label;
    std::vector<std::size_t> sizes;

    static constexpr std::size_t kNone = ~std::size_t{0};

    std::size_t count() const noexcept { return sizes.size(); }
    std::size_t label_of(const Site& x) const { return label[window.index(x)]; }
    std::vector<Site> members(std::size_t component) const;
};

ClusterReport clusters(const MarkedSample& s);

struct Diameter {
    Radius value = 0;
    /// The cluster reaches the window boundary, so the true value may be larger.
    bool censored = false;
};

/// max |v - x|_1 over the cluster of x in the window graph.
Diameter diameter(const MarkedSample& s, const Site& x);

/// x is connected to a site outside B(x, 8r) inside the graph induced on
/// B(x, 10r). Throws WindowTooSmall unless the window contains B(x, 10r).
bool event_G(const MarkedSample& s, const Site& x, Radius r);

struct HReport {
    bool occurred = false;
    /// Sites with |x|_1 <= observed_to were inspected.
    Radius observed_to = 0;
    /// Union bound on the probability of a witness beyond observed_to; zero
    /// when the window already covers every possible witness.
    double exterior_bound = 0.0;
};

/// Some occupied x with |x|_1 > 10r has 10 R_x > |x|_1. Literal on the window;
/// the exterior bound needs the law, so it is filled only by the overload
/// taking params.
HReport event_H(const MarkedSample& s, Radius r);
HReport event_H(const MarkedSample& s, Radius r, const ModelParams& params);

struct HtildeReport {
    bool occurred = false;
    /// The window does not contain B(0, 100r) and no witness was seen.
    bool censored = false;
};

/// Some occupied x with |x|_1 <= 100r has R_x >= r.
HtildeReport event_Htilde(const MarkedSample& s, Radius r);
/// The same on the unbounded field, scanning spheres outward and stopping
/// at the first witness.
bool event_Htilde(const SiteField& field, int d, Radius r);

/// p * sum_{k > k_min} |S_k| G(floor(k/10)) for the envelope law, a bound on
/// the probability that a site beyond S_{k_min} witnesses H. Infinite when
/// the d-th moment diverges.
double h_exterior_bound(int d, double p, const RadiusLaw& law, Radius k_min);

/// The cluster of the origin meets the window boundary.
bool percolation_proxy(const MarkedSample& s);
bool percolation_proxy(const MarkedSample& s, ComponentLabeler& labeler);

/// Nearest-neighbour site percolation on the occupied set: the origin is
/// occupied and its occupied cluster meets the window boundary.
bool site_percolation_proxy(const MarkedSample& s);

/// Some cluster meets both faces of the window box normal to the first axis.
/// With `nearest_neighbour` the clusters are those of site percolation on
/// the occupied set, otherwise those of the Boolean graph.
bool crossing_proxy(const MarkedSample& s, bool nearest_neighbour);

/// One CSV record per occupied site: coordinates, radius. Header lines start
/// with '#'.
void write_sample_csv(std::ostream& os, const MarkedSample& s, const std::vector<std::string>& header = {});

}  // namespace boolperc
