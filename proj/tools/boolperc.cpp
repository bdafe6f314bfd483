// Command-line front end: sampling, sweeps, bounds, coverage, coupling checks,
// particle-system runs and the self-test. Run with --help for the options.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "boolperc/boolean_model.hpp"
#include "boolperc/coverage.hpp"
#include "boolperc/errors.hpp"
#include "boolperc/harris_coupling.hpp"
#include "boolperc/invariants.hpp"
#include "boolperc/monte_carlo.hpp"
#include "boolperc/multiscale_bounds.hpp"
#include "boolperc/particle_system.hpp"
#include "cli_config.hpp"

using nlohmann::json;
namespace bp = boolperc;
namespace cli = boolperc::cli;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kInvariantFailure = 2;

struct Common {
    std::uint64_t seed = 1;
    std::size_t replicas = 1000;
    std::string out = "-";
    unsigned workers = 0;
    int dim = 1;
    std::string retention = "0.1";
    std::string law = "pointmass:1";
    std::string window = "cube:20";
};

struct Model {
    bp::ModelParams params;
    json config;
};

Model resolve_model(const Common& c)
{
    Model m;
    m.params.window = cli::parse_window(c.window, c.dim);
    m.params.retention = cli::parse_numbers(c.retention, ';');
    m.params.laws = cli::parse_law_field(c.law);
    try {
        m.params.validate();
    } catch (const std::invalid_argument& e) {
        throw cli::ConfigError(e.what());
    }
    std::vector<std::string> laws;
    for (const auto& l : m.params.laws.classes()) {
        laws.push_back(l.describe());
    }
    m.config = {{"dim", c.dim}, {"retention", m.params.retention}, {"law", laws},
                {"window", m.params.window.describe()}};
    return m;
}

/// Writes to --out, or stdout for "-".
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw cli::ConfigError("cannot open " + path + " for writing");
            }
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void write_json(const Common& c, const json& body)
{
    Output out(c.out);
    out.stream() << body.dump(2) << '\n';
}

int run_sample(const Common& c)
{
    Model const m = resolve_model(c);
    bp::MarkedSample const s = bp::sample(m.params, c.seed);
    Output out(c.out);
    bp::write_sample_csv(out.stream(), s, cli::stamp_lines(m.config, c.seed));
    return kOk;
}

int run_clusters(const Common& c)
{
    Model const m = resolve_model(c);
    bp::MarkedSample const s = bp::sample(m.params, c.seed);
    bp::ClusterReport const rep = bp::clusters(s);
    std::vector<std::size_t> sizes = rep.sizes;
    std::sort(sizes.rbegin(), sizes.rend());
    sizes.resize(std::min<std::size_t>(sizes.size(), 10));
    json body = {{"sites", m.params.window.size()},
                 {"occupied", s.occupied_count()},
                 {"clusters", rep.count()},
                 {"largest", sizes}};
    bp::Site const o = bp::Site::origin(c.dim);
    if (m.params.window.contains(o)) {
        bp::Diameter const diam = bp::diameter(s, o);
        body["origin"] = {{"size", rep.sizes[rep.label_of(o)]},
                          {"diameter", diam.value},
                          {"censored", diam.censored},
                          {"touches_boundary", bp::percolation_proxy(s)}};
    }
    write_json(c, cli::stamp(body, m.config, c.seed));
    return kOk;
}

int run_scan(const Common& c, const std::string& ps, const std::string& graph, const std::string& proxy)
{
    Model m = resolve_model(c);
    if (graph != "boolean" && graph != "site") {
        throw cli::ConfigError("--graph must be boolean or site");
    }
    if (proxy != "origin" && proxy != "crossing") {
        throw cli::ConfigError("--proxy must be origin or crossing");
    }
    if (proxy == "crossing" && m.params.window.ball()) {
        throw cli::ConfigError("--proxy crossing needs a cube or box window");
    }
    auto const grid = cli::parse_numbers(ps, ',');
    json config = m.config;
    config["p"] = grid;
    config["graph"] = graph;
    config["proxy"] = proxy;
    config["replicas"] = c.replicas;
    Output out(c.out);
    for (const auto& line : cli::stamp_lines(config, c.seed)) {
        out.stream() << "# " << line << '\n';
    }
    out.stream() << "p,replicas,successes,frequency,std_error,wilson_lo,wilson_hi\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        m.params.retention.assign(m.params.retention.size(), grid[k]);
        try {
            m.params.validate();
        } catch (const std::invalid_argument& e) {
            throw cli::ConfigError(e.what());
        }
        bp::Estimate const e = bp::estimate(
            c.replicas, bp::derive_seed(c.seed, k),
            [&](std::uint64_t rs) {
                bp::MarkedSample const s = bp::sample(m.params, rs);
                if (proxy == "crossing") {
                    return bp::crossing_proxy(s, graph == "site");
                }
                return graph == "site" ? bp::site_percolation_proxy(s) : bp::percolation_proxy(s);
            },
            c.workers);
        char line[256];
        std::snprintf(line, sizeof line, "%.6g,%zu,%zu,%.6f,%.6f,%.6f,%.6f\n", grid[k], e.replicas, e.successes,
                      e.mean, e.std_error, e.wilson.lo, e.wilson.hi);
        out.stream() << line;
    }
    return kOk;
}

int run_bounds(const Common& c, double p, int levels, double rate)
{
    Model const m = resolve_model(c);
    bp::RadiusLaw const law = bp::envelope(m.params.laws);
    bp::BoundConstants const k = bp::constants(c.dim);
    json body;
    body["constants"] = {{"C", k.C}, {"C1", k.C1}, {"C2", k.C2}, {"C3", k.C3}};
    double p0 = 0.0;
    try {
        p0 = bp::p0(c.dim, law);
    } catch (const bp::DivergentMoment& e) {
        body["p0"] = nullptr;
        body["note"] = e.what();
        json config = m.config;
        config["levels"] = levels;
        write_json(c, cli::stamp(body, config, c.seed));
        return kOk;
    }
    body["p0"] = p0;
    body["inverse_p0"] = 1.0 / p0;
    body["t0"] = bp::t0(rate, p0);
    if (p <= 0.0) {
        p = p0 / 2.0;
    }
    json config = m.config;
    config["p"] = p;
    config["levels"] = levels;
    config["rate_upper"] = rate;
    json table = json::array();
    try {
        for (const auto& row : bp::bound_pipeline(c.dim, law, p, levels)) {
            table.push_back({{"n", row.n}, {"G", row.G}, {"F_induction", row.F_induction}, {"F_direct", row.F_direct}});
        }
        body["table"] = table;
    } catch (const bp::HypothesisViolation& e) {
        body["table"] = nullptr;
        body["note"] = e.what();
    }
    write_json(c, cli::stamp(body, config, c.seed));
    return kOk;
}

int run_coverage(const Common& c, const std::string& sides_spec, const std::string& cutoff_spec, bp::Radius r)
{
    Model const m = resolve_model(c);
    if (m.params.retention.size() != 1 || !m.params.laws.homogeneous()) {
        throw cli::ConfigError("coverage needs a homogeneous model");
    }
    const bp::RadiusLaw& law = m.params.laws.classes()[0];
    double const p = m.params.retention[0];
    std::vector<bp::Radius> sides;
    for (double v : cli::parse_numbers(sides_spec, ',')) {
        sides.push_back(static_cast<bp::Radius>(v));
    }
    std::vector<bp::Radius> cutoffs;
    for (double v : cli::parse_numbers(cutoff_spec, ',')) {
        cutoffs.push_back(static_cast<bp::Radius>(v));
    }
    std::sort(cutoffs.begin(), cutoffs.end());
    json config = m.config;
    config.erase("window");
    config["sides"] = sides;
    config["cutoffs"] = cutoffs;
    config["replicas"] = c.replicas;
    config["r"] = r;
    std::vector<std::vector<double>> frac(c.replicas, std::vector<double>(sides.size()));
    bp::parallel_for(c.replicas, c.workers, [&](std::size_t i) {
        for (std::size_t j = 0; j < sides.size(); ++j) {
            bp::Radius const half = sides[j] / 2;
            bp::ModelParams params = m.params;
            params.window = bp::Window::cube(bp::Site::origin(c.dim), half + bp::coverage_margin(law, half));
            bp::MarkedSample const s = bp::sample(params, bp::replica_seed(c.seed, i));
            frac[i][j] = bp::covered_fraction(s, bp::Window::cube(bp::Site::origin(c.dim), half));
        }
    });
    json rows = json::array();
    for (std::size_t j = 0; j < sides.size(); ++j) {
        std::vector<double> xs;
        for (const auto& f : frac) {
            xs.push_back(f[j]);
        }
        bp::MeanStat const st = bp::mean_stat(xs);
        rows.push_back({{"L", sides[j]}, {"covered_mean", st.mean}, {"std_error", st.std_error},
                        {"margin", bp::coverage_margin(law, sides[j] / 2)}});
    }
    json body;
    body["coverage"] = rows;
    auto const sums = bp::borel_cantelli_sums(p, law, c.dim, r, cutoffs);
    json bc = json::array();
    for (std::size_t k = 0; k < cutoffs.size(); ++k) {
        bc.push_back({{"K", cutoffs[k]}, {"S", sums[k]}});
    }
    body["borel_cantelli"] = bc;
    if (cutoffs.size() >= 2 && cutoffs.front() >= 1 && cutoffs.back() >= 2 * cutoffs.front()) {
        bp::DoublingReport const rep = bp::doubling_test(p, law, c.dim, r, cutoffs.front(), cutoffs.back());
        body["doubling"] = {{"cutoffs", rep.cutoffs}, {"increments", rep.increments}, {"divergent", rep.divergent}};
    }
    write_json(c, cli::stamp(body, config, c.seed));
    return kOk;
}

json report_json(const std::vector<bp::CheckResult>& results)
{
    json checks = json::array();
    bool ok = true;
    for (const auto& r : results) {
        checks.push_back({{"id", r.id}, {"title", r.title}, {"status", bp::to_string(r.status)}, {"detail", r.detail}});
        ok = ok && r.ok();
    }
    return {{"passed", ok}, {"checks", checks}};
}

int run_suite(const Common& c, const std::vector<int>& ids, bool full, const std::string& label)
{
    bp::SuiteConfig cfg;
    cfg.full = full;
    cfg.seed = c.seed;
    cfg.workers = c.workers;
    auto const results = bp::run_checks(cfg, ids, [](const bp::CheckResult& r) {
        std::cerr << '[' << bp::to_string(r.status) << "] " << r.id << ' ' << r.title << " (" << r.seconds << " s)\n";
    });
    json config = {{"command", label}, {"full", full}, {"checks", ids}};
    json const body = report_json(results);
    write_json(c, cli::stamp(body, config, c.seed));
    return body["passed"].get<bool>() ? kOk : kInvariantFailure;
}

struct HarrisOptions {
    std::string kernel = "voter";
    int alphabet = 2;
    std::string rates = "1";
    double time = 1.0;
    double interval = 0.0;
    std::string boundary = "frozen";
    std::string initial = "random";
    bool global_order = false;
};

int run_harris(const Common& c, const HarrisOptions& h)
{
    bp::KalikowSpec spec;
    spec.alphabet = h.alphabet;
    if (h.alphabet < 2) {
        throw cli::ConfigError("--alphabet must be at least 2");
    }
    try {
        spec.rates = bp::RateField(cli::parse_numbers(h.rates, ';'));
        spec.kernel = bp::kernel_by_name(h.kernel);
    } catch (const std::invalid_argument& e) {
        throw cli::ConfigError(e.what());
    }
    spec.ranges = cli::parse_law_field(c.law);
    bp::Window const w = cli::parse_window(c.window, c.dim);
    if (w.ball()) {
        throw cli::ConfigError("harris needs a cube or box window");
    }
    if (!(h.time >= 0.0)) {
        throw cli::ConfigError("--time must be non-negative");
    }
    bp::BoundaryPolicy const policy = cli::parse_boundary(h.boundary);
    bp::SpinConfig eta(w, h.alphabet, 0, policy);
    if (h.initial == "random") {
        bp::SiteUniforms const u(c.seed, bp::StreamTag::coupling);
        bp::for_each_site(w, [&](const bp::Site& x) {
            eta.set(x, std::min(h.alphabet - 1, static_cast<bp::Spin>(u(x) * h.alphabet)));
        });
    } else if (h.initial != "zero") {
        throw cli::ConfigError("--initial must be random or zero");
    }
    bp::SimOptions opts;
    opts.seed = c.seed;
    opts.interval = h.interval;
    opts.global_order = h.global_order;
    opts.workers = c.workers;
    bp::Trajectory const traj = bp::simulate(spec, eta, h.time, opts);
    std::vector<std::string> ranges;
    for (const auto& l : spec.ranges.classes()) {
        ranges.push_back(l.describe());
    }
    json const config = {{"dim", c.dim},
                         {"window", w.describe()},
                         {"kernel", spec.kernel.name},
                         {"alphabet", h.alphabet},
                         {"rates", cli::parse_numbers(h.rates, ';')},
                         {"ranges", ranges},
                         {"time", h.time},
                         {"interval", traj.interval_length},
                         {"boundary", policy.describe()},
                         {"initial", h.initial},
                         {"global_order", h.global_order}};
    Output out(c.out);
    for (const auto& line : cli::stamp_lines(config, c.seed)) {
        out.stream() << "# " << line << '\n';
    }
    for (const auto& warn : traj.warnings) {
        out.stream() << "# warning: " << warn << '\n';
        std::cerr << "warning: " << warn << '\n';
    }
    auto print_config = [&](const char* label, const bp::SpinConfig& cfg) {
        out.stream() << "# " << label << '=';
        for (bp::Spin s : cfg.spins()) {
            out.stream() << s;
        }
        out.stream() << '\n';
    };
    print_config("initial", traj.initial);
    print_config("final", traj.final);
    out.stream() << "time,";
    for (int i = 0; i < c.dim; ++i) {
        out.stream() << 'x' << i << ',';
    }
    out.stream() << "spin\n";
    char buf[64];
    for (const auto& u : traj.updates) {
        std::snprintf(buf, sizeof buf, "%.17g,", u.time);
        out.stream() << buf;
        for (bp::Coord x : u.site) {
            out.stream() << x << ',';
        }
        out.stream() << u.spin << '\n';
    }
    std::cerr << traj.updates.size() << " clock rings over " << traj.intervals << " intervals of length "
              << traj.interval_length << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Boolean percolation on Z^d with random L1 radii, and the particle systems it controls"};
    app.set_config("--config", "", "Key=value config file; keys are long option names, [command] sections allowed");
    // Values such as "0.1,0.2" or "0.3;0.5" are single strings parsed later,
    // so the file reader must not split them into arrays.
    auto formatter = std::make_shared<CLI::ConfigTOML>();
    formatter->arrayDelimiter('\x1f');
    app.config_formatter(formatter);
    app.require_subcommand(1);
    app.fallthrough();

    Common c;
    app.add_option("--seed", c.seed, "Master seed; every random draw derives from it")->capture_default_str();
    app.add_option("--replicas", c.replicas, "Independent replicas for Monte Carlo commands")->capture_default_str();
    app.add_option("--out", c.out, "Output file, '-' for stdout")->capture_default_str();
    app.add_option("--workers", c.workers, "Threads; 0 uses every core. Results do not depend on it")
        ->capture_default_str();
    app.add_option("--dim", c.dim, "Lattice dimension d")->capture_default_str();
    app.add_option("--retention", c.retention, "Retention p per site class, ';'-separated")->capture_default_str();
    app.add_option("--law", c.law,
                   "Radius law per class, ';'-separated: pointmass:R, geometric:a, powerlaw:s[:cap], table:p0,p1,..")
        ->capture_default_str();
    app.add_option("--window", c.window, "cube:H, ball:R or box:lo:hi (coordinates ','-separated)")
        ->capture_default_str();

    auto* sample = app.add_subcommand("sample", "Emit one marked sample as CSV");
    auto* clusters = app.add_subcommand("clusters", "Cluster statistics of one sample as JSON");

    auto* scan = app.add_subcommand("scan", "Percolation proxy frequency over a sweep of p (CSV)");
    std::string ps = "0.1,0.2,0.3";
    std::string graph = "boolean";
    std::string proxy = "origin";
    scan->add_option("--ps", ps, "Retention values, ','-separated")->capture_default_str();
    scan->add_option("--graph", graph, "boolean (ball graph) or site (nearest-neighbour on occupied sites)")
        ->capture_default_str();
    scan->add_option("--proxy", proxy, "origin (origin cluster meets the boundary) or crossing (left-right)")
        ->capture_default_str();

    auto* bounds = app.add_subcommand("bounds", "Constants, p0, t0 and the F_n table as JSON");
    double bound_p = 0.0;
    int levels = 8;
    double rate = 1.0;
    bounds->add_option("--p", bound_p, "Retention for the F_n table; 0 uses p0/2")->capture_default_str();
    bounds->add_option("--levels", levels, "Number of scales in the table")->capture_default_str();
    bounds->add_option("--rate-upper", rate, "M^* used for t0")->capture_default_str();

    auto* coverage = app.add_subcommand("coverage", "Covered fractions and Borel-Cantelli sums as JSON");
    std::string sides = "100,1000,10000";
    std::string cutoffs = "100,200,400,800,1600,3200,6400,12800";
    bp::Radius cover_r = 0;
    coverage->add_option("--sides", sides, "Side lengths L of the target cubes")->capture_default_str();
    coverage->add_option("--cutoffs", cutoffs, "Cutoffs K of the partial sums")->capture_default_str();
    coverage->add_option("--r", cover_r, "Radius of the ball that must be swallowed")->capture_default_str();

    auto* couple = app.add_subcommand("couple-test", "Harris coupling checks as a JSON report");
    bool couple_full = false;
    couple->add_flag("--full", couple_full, "Full replica counts");

    auto* harris = app.add_subcommand("harris", "Particle-system run; trajectory CSV");
    HarrisOptions h;
    h.boundary = "frozen";
    harris->add_option("--kernel", h.kernel, "majority, voter, noisy-copy[:eps], pointmass:s, uniform, flip")
        ->capture_default_str();
    harris->add_option("--alphabet", h.alphabet, "Spin alphabet size")->capture_default_str();
    harris->add_option("--rates", h.rates, "Jump intensity M per class, ';'-separated")->capture_default_str();
    harris->add_option("--time", h.time, "Time horizon T")->capture_default_str();
    harris->add_option("--interval", h.interval, "Interval length; 0 uses t0")->capture_default_str();
    harris->add_option("--boundary", h.boundary, "frozen[:fill] or periodic")->capture_default_str();
    harris->add_option("--initial", h.initial, "random or zero")->capture_default_str();
    harris->add_flag("--global-order", h.global_order, "Apply all rings in one global order instead of by island");

    auto* selftest = app.add_subcommand("selftest", "Invariant suite as a JSON report; exit 2 on failure");
    bool self_full = false;
    std::vector<int> only;
    selftest->add_flag("--full", self_full, "Full replica counts and windows (minutes)");
    selftest->add_option("--only", only, "Check ids to run")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*sample) {
            return run_sample(c);
        }
        if (*clusters) {
            return run_clusters(c);
        }
        if (*scan) {
            return run_scan(c, ps, graph, proxy);
        }
        if (*bounds) {
            return run_bounds(c, bound_p, levels, rate);
        }
        if (*coverage) {
            return run_coverage(c, sides, cutoffs, cover_r);
        }
        if (*couple) {
            return run_suite(c, {6, 7, 8, 9}, couple_full, "couple-test");
        }
        if (*harris) {
            return run_harris(c, h);
        }
        if (*selftest) {
            return run_suite(c, only, self_full, "selftest");
        }
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const bp::BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kConfigError;
    } catch (const bp::DivergentMoment& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}
