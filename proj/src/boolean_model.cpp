#include "boolperc/boolean_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "boolperc/errors.hpp"
#include "boolperc/rng.hpp"

namespace boolperc {

double ModelParams::retention_at(const Site& x) const
{
    return retention[ClassMap(retention.size()).class_of(x)];
}

double ModelParams::max_retention() const
{
    return *std::max_element(retention.begin(), retention.end());
}

void ModelParams::validate() const
{
    if (window.dim() < 1) {
        throw std::invalid_argument("model window is not set");
    }
    if (retention.empty()) {
        throw std::invalid_argument("at least one retention probability is required");
    }
    for (double p : retention) {
        if (!(p >= 0.0 && p < 1.0)) {
            throw std::invalid_argument("retention probabilities must lie in [0, 1)");
        }
    }
}

MarkedSample::MarkedSample(Window w) : window_(std::move(w)), radius_(window_.box_size(), kVacant) {}

void MarkedSample::place(const Site& x, Radius r)
{
    if (!window_.contains(x)) {
        throw WindowTooSmall("place: " + x.to_string() + " is outside " + window_.describe());
    }
    if (r < 0) {
        throw std::invalid_argument("place: radius must be non-negative");
    }
    radius_[window_.index(x)] = r;
    max_radius_ = std::max(max_radius_, r);
}

void MarkedSample::remove(const Site& x)
{
    if (window_.contains(x)) {
        radius_[window_.index(x)] = kVacant;
    }
}

std::vector<std::pair<Site, Radius>> MarkedSample::occupied_sites() const
{
    std::vector<std::pair<Site, Radius>> out;
    for_each_site(window_, [&](const Site& x) {
        Radius const r = radius_[window_.index(x)];
        if (r != kVacant) {
            out.emplace_back(x, r);
        }
    });
    return out;
}

std::size_t MarkedSample::occupied_count() const
{
    return static_cast<std::size_t>(std::count_if(radius_.begin(), radius_.end(), [](Radius r) { return r != kVacant; }));
}

SiteField::SiteField(const ModelParams& params, std::uint64_t seed)
    : params_(params),
      retention_classes_(params.retention.size()),
      occupancy_(seed, StreamTag::occupancy),
      radius_(seed, StreamTag::radius)
{
    params.validate();
}

Radius SiteField::radius_bound() const
{
    Radius bound = -1;
    for (const auto& law : params_.laws.classes()) {
        auto const top = law.support_max();
        if (!top) {
            return kMaxRadius;
        }
        bound = std::max(bound, *top);
    }
    return bound;
}

Radius SiteField::radius(const Site& x) const
{
    if (occupancy_(x) > params_.retention[retention_classes_.class_of(x)]) {
        return MarkedSample::kVacant;
    }
    return params_.laws.law_at(x).quantile(radius_(x));
}

MarkedSample sample(const ModelParams& params, std::uint64_t seed)
{
    SiteField const field(params, seed);
    MarkedSample s(params.window);
    for_each_site(params.window, [&](const Site& x) {
        Radius const r = field.radius(x);
        if (r != MarkedSample::kVacant) {
            s.place(x, r);
        }
    });
    std::ostringstream ret;
    for (std::size_t i = 0; i < params.retention.size(); ++i) {
        ret << (i ? ";" : "") << params.retention[i];
    }
    std::string law;
    for (std::size_t i = 0; i < params.laws.classes().size(); ++i) {
        law += (i ? ";" : "") + params.laws.classes()[i].describe();
    }
    s.meta() = {seed, ret.str(), law};
    return s;
}

bool adjacent(const MarkedSample& s, const Site& u, const Site& v)
{
    if (u == v) {
        return false;
    }
    Coord const dist = l1_distance(u, v);
    Radius const ru = s.radius(u);
    Radius const rv = s.radius(v);
    return (ru != MarkedSample::kVacant && dist <= ru) || (rv != MarkedSample::kVacant && dist <= rv);
}

std::vector<Site> neighbors(const MarkedSample& s, const Site& v)
{
    std::vector<Site> out;
    for_each_site(s.window(), [&](const Site& c) {
        if (adjacent(s, v, c)) {
            out.push_back(c);
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Components

void ComponentLabeler::label(const MarkedSample& s, const Window& region)
{
    region_ = region;
    cover_.assign(region.box_size(), kUncovered);
    centers_.reset(0);
    for_each_site(region, [&](const Site& c) {
        Radius const r = s.radius(c);
        if (r == MarkedSample::kVacant) {
            return;
        }
        std::uint32_t const id = centers_.add();
        for_each_in_ball(c, r, region, [&](const Site& v) {
            std::uint32_t& slot = cover_[region.index(v)];
            if (slot == kUncovered) {
                slot = id;
            } else {
                centers_.unite(id, slot);
            }
        });
    });
}

std::uint64_t ComponentLabeler::component(const Site& x)
{
    std::size_t const idx = region_.index(x);
    std::uint32_t const slot = cover_[idx];
    if (slot == kUncovered) {
        return (std::uint64_t{1} << 63) | idx;
    }
    return centers_.find(slot);
}

std::vector<Site> ClusterReport::members(std::size_t component) const
{
    std::vector<Site> out;
    for_each_site(window, [&](const Site& x) {
        if (label[window.index(x)] == component) {
            out.push_back(x);
        }
    });
    return out;
}

ClusterReport clusters(const MarkedSample& s)
{
    ComponentLabeler labeler;
    labeler.label(s, s.window());
    ClusterReport rep;
    rep.window = s.window();
    rep.label.assign(s.window().box_size(), ClusterReport::kNone);
    std::unordered_map<std::uint64_t, std::size_t> canonical;
    for_each_site(s.window(), [&](const Site& x) {
        auto [it, fresh] = canonical.try_emplace(labeler.component(x), rep.sizes.size());
        if (fresh) {
            rep.sizes.push_back(0);
        }
        rep.label[s.window().index(x)] = it->second;
        ++rep.sizes[it->second];
    });
    return rep;
}

Diameter diameter(const MarkedSample& s, const Site& x)
{
    if (!s.window().contains(x)) {
        throw WindowTooSmall("diameter: " + x.to_string() + " is outside the window");
    }
    ComponentLabeler labeler;
    labeler.label(s, s.window());
    std::uint64_t const cid = labeler.component(x);
    Diameter out;
    for_each_site(s.window(), [&](const Site& v) {
        if (labeler.component(v) == cid) {
            out.value = std::max(out.value, l1_distance(v, x));
            out.censored = out.censored || s.window().on_boundary(v);
        }
    });
    return out;
}

bool event_G(const MarkedSample& s, const Site& x, Radius r)
{
    if (r < 0) {
        throw std::invalid_argument("event_G: r must be non-negative");
    }
    if (!s.window().contains_ball(x, 10 * r)) {
        throw WindowTooSmall("event_G: window " + s.window().describe() + " does not contain B(" + x.to_string()
                             + "," + std::to_string(10 * r) + ")");
    }
    if (r == 0) {
        return false;  // B(x, 0) holds no site outside B(x, 0)
    }
    // Search over centers rather than sites. Inside an L1 ball around x two
    // centers' clipped balls meet iff |c - c'|_1 <= R_c + R_c': a geodesic
    // that first moves toward x stays in the region. The component of x
    // escapes B(x, 8r) iff it holds a center with |c - x|_1 + R_c > 8r.
    // Centers are expanded farthest-reach first, so supercritical samples
    // finish along a short path.
    const Window& w = s.window();
    Radius const region = 10 * r;
    Radius const rmax = s.max_radius();
    thread_local std::vector<std::uint32_t> stamp;
    thread_local std::uint32_t generation = 0;
    if (stamp.size() < w.box_size()) {
        stamp.assign(w.box_size(), 0);
        generation = 0;
    }
    if (++generation == 0) {
        std::fill(stamp.begin(), stamp.end(), 0);
        generation = 1;
    }
    std::priority_queue<std::pair<Radius, std::size_t>> frontier;
    auto visit = [&](const Site& c, Radius rc) {
        std::size_t const idx = w.index(c);
        if (stamp[idx] != generation) {
            stamp[idx] = generation;
            frontier.emplace(l1_distance(c, x) + rc, idx);
        }
    };
    for_each_in_ball(x, std::min(rmax, region), w, [&](const Site& c) {
        Radius const rc = s.radius(c);
        if (rc != MarkedSample::kVacant && l1_distance(c, x) <= std::min(rc, region)) {
            visit(c, rc);
        }
    });
    while (!frontier.empty()) {
        auto const [reach, idx] = frontier.top();
        frontier.pop();
        if (reach > 8 * r) {
            return true;
        }
        Site const c = w.site(idx);
        Radius const rc = s.radius_at(idx);
        for_each_in_ball(c, rc + rmax, w, [&](const Site& c2) {
            Radius const r2 = s.radius(c2);
            if (r2 != MarkedSample::kVacant && l1_distance(c, c2) <= rc + r2 && l1_distance(c2, x) <= region) {
                visit(c2, r2);
            }
        });
    }
    return false;
}

HReport event_H(const MarkedSample& s, Radius r)
{
    HReport rep;
    Site const o = Site::origin(s.dim());
    rep.observed_to = s.window().inner_radius(o);
    for_each_site(s.window(), [&](const Site& x) {
        Radius const rx = s.radius(x);
        Coord const n = l1_norm(x);
        if (rx != MarkedSample::kVacant && n > 10 * r && 10 * rx > n) {
            rep.occurred = true;
        }
    });
    return rep;
}

HReport event_H(const MarkedSample& s, Radius r, const ModelParams& params)
{
    HReport rep = event_H(s, r);
    rep.exterior_bound = h_exterior_bound(s.dim(), params.max_retention(), envelope(params.laws),
                                          std::max(rep.observed_to, 10 * r));
    return rep;
}

HtildeReport event_Htilde(const MarkedSample& s, Radius r)
{
    HtildeReport rep;
    for_each_site(s.window(), [&](const Site& x) {
        Radius const rx = s.radius(x);
        if (rx != MarkedSample::kVacant && rx >= r && l1_norm(x) <= 100 * r) {
            rep.occurred = true;
        }
    });
    rep.censored = !rep.occurred && !s.window().contains_ball(Site::origin(s.dim()), 100 * r);
    return rep;
}

bool event_Htilde(const SiteField& field, int d, Radius r)
{
    if (field.radius_bound() < r) {
        return false;
    }
    for (Radius k = 0; k <= 100 * r; ++k) {
        for (const Site& x : sphere_sites(d, k)) {
            if (field.radius(x) >= r) {
                return true;
            }
        }
    }
    return false;
}

namespace {

double sphere_size(int d, Radius k)
{
    if (k == 0) {
        return 1.0;
    }
    // sum_i 2^i C(d,i) C(k-1,i-1) in floating point; exact for the sizes used.
    double total = 0.0;
    double cd = 1.0;  // C(d, i)
    double ck = 1.0;  // C(k-1, i-1)
    for (int i = 1; i <= d; ++i) {
        cd = cd * (d - i + 1) / i;
        if (i > 1) {
            ck = ck * static_cast<double>(k - i + 1) / (i - 1);
        }
        if (static_cast<Radius>(i) > k) {
            break;
        }
        total += std::ldexp(cd * ck, i);
    }
    return total;
}

}  // namespace

double h_exterior_bound(int d, double p, const RadiusLaw& law, Radius k_min)
{
    if (p == 0.0) {
        return 0.0;
    }
    if (!law.moment_finite(d)) {
        return std::numeric_limits<double>::infinity();
    }
    // Beyond the summed range: sum_{k in [10m, 10m+9]} |S_k| <= 10 3^d (19 m)^(d-1)
    // and sum_{m' > m} G(m') m'^(d-1) <= E[R^d 1{R >= m+2}].
    double kappa = 10.0;
    for (int i = 0; i < d; ++i) {
        kappa *= 3.0;
    }
    for (int i = 1; i < d; ++i) {
        kappa *= 19.0;
    }
    auto const top = law.support_max();
    double sum = 0.0;
    Radius const m0 = k_min / 10;
    for (Radius m = m0;; ++m) {
        if (top && m >= *top) {
            return p * sum;
        }
        double const g = law.tail(m);
        for (Radius k = std::max(10 * m, k_min + 1); k <= 10 * m + 9; ++k) {
            sum += sphere_size(d, k) * g;
        }
        if ((m - m0) % 64 == 63) {
            double const rem = kappa * tail_moment(law, d, m + 2).upper();
            if (rem <= 1e-12 * sum || rem == 0.0 || m - m0 > 2'000'000) {
                return p * (sum + rem);
            }
        }
    }
}

bool percolation_proxy(const MarkedSample& s)
{
    ComponentLabeler labeler;
    return percolation_proxy(s, labeler);
}

bool percolation_proxy(const MarkedSample& s, ComponentLabeler& labeler)
{
    Site const o = Site::origin(s.dim());
    if (!s.window().contains(o)) {
        throw WindowTooSmall("percolation_proxy: origin outside the window");
    }
    labeler.label(s, s.window());
    std::uint64_t const cid = labeler.component(o);
    bool touched = false;
    for_each_site(s.window(), [&](const Site& v) {
        if (!touched && s.window().on_boundary(v)) {
            touched = labeler.component(v) == cid;
        }
    });
    return touched;
}

bool site_percolation_proxy(const MarkedSample& s)
{
    Site const o = Site::origin(s.dim());
    if (!s.window().contains(o)) {
        throw WindowTooSmall("site_percolation_proxy: origin outside the window");
    }
    if (!s.occupied(o)) {
        return false;
    }
    std::vector<char> seen(s.window().box_size(), 0);
    std::deque<Site> queue{o};
    seen[s.window().index(o)] = 1;
    while (!queue.empty()) {
        Site const v = queue.front();
        queue.pop_front();
        if (s.window().on_boundary(v)) {
            return true;
        }
        for (int axis = 0; axis < v.dim(); ++axis) {
            for (Coord step : {-1, 1}) {
                Site w = v;
                w[axis] += step;
                if (s.occupied(w) && !seen[s.window().index(w)]) {
                    seen[s.window().index(w)] = 1;
                    queue.push_back(w);
                }
            }
        }
    }
    return false;
}

bool crossing_proxy(const MarkedSample& s, bool nearest_neighbour)
{
    const Window& w = s.window();
    if (w.ball()) {
        throw std::invalid_argument("crossing_proxy: needs a box window");
    }
    UnionFind uf;
    std::vector<std::uint64_t> comp(w.box_size());
    if (nearest_neighbour) {
        uf.reset(w.box_size());
        for_each_site(w, [&](const Site& v) {
            if (!s.occupied(v)) {
                return;
            }
            for (int axis = 0; axis < v.dim(); ++axis) {
                Site u = v;
                ++u[axis];
                if (s.occupied(u)) {
                    uf.unite(static_cast<std::uint32_t>(w.index(v)), static_cast<std::uint32_t>(w.index(u)));
                }
            }
        });
        for_each_site(w, [&](const Site& v) {
            comp[w.index(v)] = s.occupied(v) ? uf.find(static_cast<std::uint32_t>(w.index(v))) : ~std::uint64_t{0};
        });
    } else {
        ComponentLabeler labeler;
        labeler.label(s, w);
        for_each_site(w, [&](const Site& v) { comp[w.index(v)] = labeler.component(v); });
    }
    std::vector<std::uint64_t> left;
    for_each_site(w, [&](const Site& v) {
        if (v[0] == w.lo()[0] && comp[w.index(v)] != ~std::uint64_t{0}) {
            left.push_back(comp[w.index(v)]);
        }
    });
    std::sort(left.begin(), left.end());
    bool crossed = false;
    for_each_site(w, [&](const Site& v) {
        if (!crossed && v[0] == w.hi()[0]) {
            crossed = std::binary_search(left.begin(), left.end(), comp[w.index(v)]);
        }
    });
    return crossed;
}

void write_sample_csv(std::ostream& os, const MarkedSample& s, const std::vector<std::string>& header)
{
    for (const auto& line : header) {
        os << "# " << line << '\n';
    }
    os << "# d=" << s.dim() << " window=" << s.window().describe() << " retention=" << s.meta().retention
       << " law=" << s.meta().law << " seed=" << s.meta().seed << '\n';
    for (int i = 0; i < s.dim(); ++i) {
        os << 'x' << i << ',';
    }
    os << "radius\n";
    for (const auto& [x, r] : s.occupied_sites()) {
        for (Coord c : x) {
            os << c << ',';
        }
        os << r << '\n';
    }
}

}  // namespace boolperc
