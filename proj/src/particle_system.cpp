#include "boolperc/particle_system.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "boolperc/errors.hpp"
#include "boolperc/monte_carlo.hpp"
#include "boolperc/multiscale_bounds.hpp"
#include "boolperc/rng.hpp"
#include "boolperc/union_find.hpp"

namespace boolperc {

namespace {

// Marks window sites that belong to another island.
constexpr Spin kForeign = -1;

}  // namespace

std::string BoundaryPolicy::describe() const
{
    return kind == BoundaryKind::periodic ? std::string("periodic") : "frozen:" + std::to_string(fill);
}

SpinConfig::SpinConfig(Window w, int alphabet, Spin initial, BoundaryPolicy policy)
    : window_(std::move(w)), alphabet_(alphabet), spins_(window_.box_size(), initial), policy_(policy)
{
    if (alphabet < 1) {
        throw std::invalid_argument("spin alphabet must be non-empty");
    }
    if (initial < 0 || initial >= alphabet || policy.fill < 0 || policy.fill >= alphabet) {
        throw std::invalid_argument("spin outside the alphabet");
    }
    if (policy.kind == BoundaryKind::periodic && window_.ball()) {
        throw std::invalid_argument("periodic boundaries need a box window");
    }
}

void SpinConfig::set(const Site& x, Spin s)
{
    if (!window_.contains(x)) {
        throw std::out_of_range("SpinConfig::set: " + x.to_string() + " outside the window");
    }
    if (s != kForeign && (s < 0 || s >= alphabet_)) {
        throw std::invalid_argument("SpinConfig::set: spin outside the alphabet");
    }
    spins_[window_.index(x)] = s;
}

Spin SpinConfig::read(const Site& y, bool* outside) const
{
    if (window_.contains(y)) {
        if (outside != nullptr) {
            *outside = false;
        }
        return spins_[window_.index(y)];
    }
    if (outside != nullptr) {
        *outside = true;
    }
    if (policy_.kind == BoundaryKind::frozen) {
        return policy_.fill;
    }
    Site z = y;
    for (int i = 0; i < z.dim(); ++i) {
        Coord const ext = window_.extent(i);
        z[i] = window_.lo()[i] + (((z[i] - window_.lo()[i]) % ext) + ext) % ext;
    }
    return spins_[window_.index(z)];
}

SpinConfig SpinConfig::with(const Site& x, Spin s) const
{
    SpinConfig c = *this;
    c.set(x, s);
    return c;
}

LocalView::LocalView(const SpinConfig& cfg, const Site& center, Radius r, std::size_t* boundary_reads)
    : cfg_(cfg), center_(center), r_(r), boundary_reads_(boundary_reads)
{
}

Spin LocalView::operator()(const Site& y) const
{
    if (l1_distance(y, center_) > r_) {
        throw LocalityViolation("kernel at " + center_.to_string() + " with range " + std::to_string(r_) + " read "
                                + y.to_string());
    }
    bool outside = false;
    Spin const s = cfg_.read(y, &outside);
    if (outside && boundary_reads_ != nullptr) {
        ++*boundary_reads_;
    }
    if (s == kForeign) {
        throw std::logic_error("island evolution read " + y.to_string() + ", which belongs to another island");
    }
    return s;
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

std::size_t spin_index(Spin s) { return static_cast<std::size_t>(s); }

}  // namespace

Kernel majority_kernel()
{
    return {"majority", [](const LocalView& v, std::span<double> p) {
                std::int64_t balance = 0;
                v.for_each([&](const Site& y, Spin s) {
                    if (!(y == v.center())) {
                        balance += s == 1 ? 1 : -1;
                    }
                });
                if (balance > 0) {
                    p[1] = 1.0;
                } else if (balance < 0) {
                    p[0] = 1.0;
                } else {
                    p[0] = p[1] = 0.5;
                }
            }};
}

Kernel voter_kernel()
{
    return {"voter", [](const LocalView& v, std::span<double> p) {
                if (v.radius() == 0) {
                    p[spin_index(v(v.center()))] = 1.0;
                    return;
                }
                double const w = 1.0 / static_cast<double>(ball_cardinality(v.center().dim(), v.radius()) - 1);
                v.for_each([&](const Site& y, Spin s) {
                    if (!(y == v.center())) {
                        p[spin_index(s)] += w;
                    }
                });
            }};
}

Kernel noisy_copy_kernel(double eps)
{
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("noisy-copy noise must lie in [0, 1]");
    }
    return {"noisy-copy:" + std::to_string(eps), [eps](const LocalView& v, std::span<double> p) {
                Site y = v.center();
                y[0] += v.radius();
                p[spin_index(v(y))] += 1.0 - eps;
                for (double& q : p) {
                    q += eps / static_cast<double>(p.size());
                }
            }};
}

Kernel point_mass_kernel(Spin s)
{
    return {"pointmass:" + std::to_string(s), [s](const LocalView&, std::span<double> p) {
                if (spin_index(s) >= p.size()) {
                    throw std::invalid_argument("point-mass kernel spin outside the alphabet");
                }
                p[spin_index(s)] = 1.0;
            }};
}

Kernel uniform_kernel()
{
    return {"uniform", [](const LocalView&, std::span<double> p) {
                for (double& q : p) {
                    q = 1.0 / static_cast<double>(p.size());
                }
            }};
}

Kernel flip_kernel()
{
    return {"flip", [](const LocalView& v, std::span<double> p) {
                p[(spin_index(v(v.center())) + 1) % p.size()] = 1.0;
            }};
}

Kernel kernel_by_name(const std::string& spec)
{
    auto const colon = spec.find(':');
    std::string const name = spec.substr(0, colon);
    std::string const arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (name == "majority") {
        return majority_kernel();
    }
    if (name == "voter") {
        return voter_kernel();
    }
    if (name == "noisy-copy") {
        return noisy_copy_kernel(arg.empty() ? 0.1 : std::stod(arg));
    }
    if (name == "pointmass") {
        return point_mass_kernel(arg.empty() ? 0 : std::stoi(arg));
    }
    if (name == "uniform") {
        return uniform_kernel();
    }
    if (name == "flip") {
        return flip_kernel();
    }
    throw std::invalid_argument("unknown kernel '" + spec + "'");
}

namespace {

void kernel_probabilities(const KalikowSpec& spec, const LocalView& view, std::vector<double>& probs)
{
    probs.assign(static_cast<std::size_t>(spec.alphabet), 0.0);
    spec.kernel.fn(view, probs);
    double total = 0.0;
    for (double q : probs) {
        if (q < 0.0) {
            throw std::runtime_error("kernel " + spec.kernel.name + " produced a negative probability");
        }
        total += q;
    }
    if (std::fabs(total - 1.0) > 1e-12) {
        throw std::runtime_error("kernel " + spec.kernel.name + " is not normalized (total " + std::to_string(total)
                                 + ")");
    }
}

}  // namespace

Spin update_value(const KalikowSpec& spec, const Site& x, Radius r, const SpinConfig& sigma, double u,
                  std::size_t* boundary_reads)
{
    if (!(u > 0.0 && u <= 1.0)) {
        throw std::invalid_argument("update_value: u must lie in (0, 1]");
    }
    thread_local std::vector<double> probs;
    kernel_probabilities(spec, LocalView(sigma, x, r, boundary_reads), probs);
    double cum = 0.0;
    for (std::size_t s = 0; s < probs.size(); ++s) {
        cum += probs[s];
        if (u <= cum && probs[s] > 0.0) {
            return static_cast<Spin>(s);
        }
    }
    // Rounding left u above the final partial sum; take the largest spin with mass.
    for (std::size_t s = probs.size(); s-- > 0;) {
        if (probs[s] > 0.0) {
            return static_cast<Spin>(s);
        }
    }
    return 0;
}

double jump_rate(const KalikowSpec& spec, const SpinConfig& sigma, const Site& x, Spin s)
{
    const RadiusLaw& nu = spec.ranges.law_at(x);
    auto const top = nu.support_max();
    std::vector<double> probs;
    double rate = 0.0;
    for (Radius r = 0;; ++r) {
        double const w = nu.pmf(r);
        if (w > 0.0) {
            kernel_probabilities(spec, LocalView(sigma, x, r), probs);
            rate += w * probs[spin_index(s)];
        }
        if ((top && r >= *top) || nu.tail(r) < 1e-15) {
            break;
        }
    }
    return spec.rates.at(x) * rate;
}

SpinConfig Trajectory::replay() const
{
    SpinConfig c = initial;
    for (const auto& u : updates) {
        c.set(u.site, u.spin);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Islands and evolution

std::vector<std::vector<Site>> islands(std::span<const Schedule> schedules, const Window& w, double tau, double t,
                                       const BoundaryPolicy& policy)
{
    std::vector<std::vector<Site>> out;
    if (policy.kind == BoundaryKind::frozen) {
        ClusterReport const rep = harris_graph(schedules, w, tau, t);
        out.resize(rep.count());
        for_each_site(w, [&](const Site& x) { out[rep.label_of(x)].push_back(x); });
        return out;
    }
    if (w.ball()) {
        throw std::invalid_argument("periodic islands need a box window");
    }
    // On the torus every ball wraps, so join sites directly.
    MarkedSample const s = harris_sample(schedules, w, tau, t);
    UnionFind uf(w.box_size());
    for_each_site(w, [&](const Site& x) {
        Radius const r = s.radius(x);
        if (r == MarkedSample::kVacant) {
            return;
        }
        auto const xi = static_cast<std::uint32_t>(w.index(x));
        for_each_in_ball(x, r, [&](const Site& y) {
            Site z = y;
            for (int i = 0; i < z.dim(); ++i) {
                Coord const ext = w.extent(i);
                z[i] = w.lo()[i] + (((z[i] - w.lo()[i]) % ext) + ext) % ext;
            }
            uf.unite(xi, static_cast<std::uint32_t>(w.index(z)));
        });
    });
    std::map<std::uint32_t, std::size_t> slot;
    for_each_site(w, [&](const Site& x) {
        auto const root = uf.find(static_cast<std::uint32_t>(w.index(x)));
        auto [it, fresh] = slot.try_emplace(root, out.size());
        if (fresh) {
            out.emplace_back();
        }
        out[it->second].push_back(x);
    });
    return out;
}

namespace {

struct Ring {
    double time;
    std::size_t site_index;
    std::size_t ring;
    Site site;
    Radius mark;
    double u;
};

bool ring_before(const Ring& a, const Ring& b)
{
    return std::tie(a.time, a.site_index, a.ring) < std::tie(b.time, b.site_index, b.ring);
}

template <typename Sites>
std::vector<Ring> collect_rings(const Sites& sites, const Window& w, std::span<const Schedule> schedules, double tau,
                                double t)
{
    std::vector<Ring> rings;
    for (const Site& x : sites) {
        std::size_t const idx = w.index(x);
        const auto& events = schedules[idx].events;
        for (std::size_t k = 0; k < events.size(); ++k) {
            if (events[k].time > tau && events[k].time <= t) {
                rings.push_back({events[k].time, idx, k, x, events[k].mark, events[k].u});
            }
        }
    }
    std::sort(rings.begin(), rings.end(), ring_before);
    return rings;
}

void apply_rings(const KalikowSpec& spec, const std::vector<Ring>& rings, SpinConfig& cfg, Trajectory& traj)
{
    for (const Ring& ring : rings) {
        Spin const s = update_value(spec, ring.site, ring.mark, cfg, ring.u, &traj.boundary_reads);
        cfg.set(ring.site, s);
        traj.updates.push_back({ring.time, ring.site, s});
    }
}

}  // namespace

Trajectory evolve_island(const KalikowSpec& spec, std::span<const Site> island, std::span<const Schedule> schedules,
                         const SpinConfig& eta, double tau, double t)
{
    const Window& w = eta.window();
    Trajectory traj;
    traj.initial = eta;
    auto const rings = collect_rings(island, w, schedules, tau, t);
    if (rings.empty()) {
        traj.final = eta;
        return traj;
    }
    SpinConfig local = eta;
    std::vector<char> member(w.box_size(), 0);
    for (const Site& x : island) {
        member[w.index(x)] = 1;
    }
    for_each_site(w, [&](const Site& x) {
        if (!member[w.index(x)]) {
            local.set(x, kForeign);
        }
    });
    apply_rings(spec, rings, local, traj);
    traj.final = eta;
    for (const Site& x : island) {
        traj.final.set(x, local[x]);
    }
    return traj;
}

Trajectory evolve_global(const KalikowSpec& spec, std::span<const Schedule> schedules, const SpinConfig& eta, double tau,
                         double t)
{
    const Window& w = eta.window();
    std::vector<Site> all;
    all.reserve(w.size());
    for_each_site(w, [&](const Site& x) { all.push_back(x); });
    Trajectory traj;
    traj.initial = eta;
    SpinConfig cfg = eta;
    apply_rings(spec, collect_rings(all, w, schedules, tau, t), cfg, traj);
    traj.final = std::move(cfg);
    return traj;
}

double interval_length(const KalikowSpec& spec, int d)
{
    DominatingProcess const dom(spec.rates, spec.ranges, d);
    return t0(dom.rate_upper(), p0(d, dom.radius_law()));
}

Trajectory simulate(const KalikowSpec& spec, const SpinConfig& eta, double T, const SimOptions& opts)
{
    if (!(T >= 0.0)) {
        throw std::invalid_argument("simulate: T must be non-negative");
    }
    const Window& w = eta.window();
    Trajectory traj;
    traj.initial = eta;
    double len = opts.interval;
    if (len <= 0.0) {
        len = interval_length(spec, w.dim());
    } else if (opts.check_interval) {
        try {
            double const safe = interval_length(spec, w.dim());
            if (len > safe) {
                traj.warnings.push_back("interval " + std::to_string(len) + " exceeds t0 = " + std::to_string(safe)
                                        + "; islands may span the window");
            }
        } catch (const DivergentMoment& e) {
            traj.warnings.push_back(std::string("no finite t0: ") + e.what());
        }
    }
    traj.interval_length = len;

    SpinConfig cfg = eta;
    for (std::size_t k = opts.first_interval; static_cast<double>(k) * len < T; ++k) {
        double const tau = static_cast<double>(k) * len;
        double const t = std::min(static_cast<double>(k + 1) * len, T);
        auto const schedules = sample_schedules(w, spec.rates, spec.ranges, tau, static_cast<double>(k + 1) * len,
                                                derive_seed(opts.seed, StreamTag::schedule, k));
        ++traj.intervals;
        if (opts.global_order) {
            Trajectory part = evolve_global(spec, schedules, cfg, tau, t);
            traj.updates.insert(traj.updates.end(), part.updates.begin(), part.updates.end());
            traj.boundary_reads += part.boundary_reads;
            cfg = std::move(part.final);
            continue;
        }
        auto const parts_sites = islands(schedules, w, tau, t, eta.policy());
        std::vector<Trajectory> parts(parts_sites.size());
        parallel_for(parts.size(), opts.workers, [&](std::size_t i) {
            parts[i] = evolve_island(spec, parts_sites[i], schedules, cfg, tau, t);
        });
        // Splice: islands touch disjoint sites, so their final spins and
        // update lists merge without conflict.
        std::size_t const first_new = traj.updates.size();
        for (std::size_t i = 0; i < parts.size(); ++i) {
            for (const Site& x : parts_sites[i]) {
                cfg.set(x, parts[i].final[x]);
            }
            traj.updates.insert(traj.updates.end(), parts[i].updates.begin(), parts[i].updates.end());
            traj.boundary_reads += parts[i].boundary_reads;
        }
        std::stable_sort(traj.updates.begin() + static_cast<std::ptrdiff_t>(first_new), traj.updates.end(),
                         [&](const Update& a, const Update& b) {
                             return std::make_pair(a.time, w.index(a.site)) < std::make_pair(b.time, w.index(b.site));
                         });
    }
    traj.final = std::move(cfg);
    return traj;
}

RateCheck generator_rate_check(const KalikowSpec& spec, const SpinConfig& sigma, const Site& x, Spin s, double dt,
                               std::size_t replicas, std::uint64_t seed, unsigned workers)
{
    RateCheck out;
    if (s == sigma[x]) {
        return out;
    }
    out.rate = jump_rate(spec, sigma, x, s);
    out.expected = dt * out.rate;
    SpinConfig const target = sigma.with(x, s);
    Estimate const e = estimate(
        replicas, seed,
        [&](std::uint64_t rs) {
            SimOptions opts;
            opts.seed = rs;
            opts.interval = dt;
            opts.check_interval = false;
            return simulate(spec, sigma, dt, opts).final == target;
        },
        workers);
    out.observed = e.mean;
    double const q = out.expected;
    out.z = z_score(out.observed, q, std::sqrt(q * (1.0 - q) / static_cast<double>(replicas)));
    return out;
}

}  // namespace boolperc
