#include "cli_config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace boolperc::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep)) {
        out.push_back(cur);
    }
    if (!text.empty() && text.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double to_double(const std::string& text, const std::string& what)
{
    try {
        std::size_t used = 0;
        double const v = std::stod(text, &used);
        if (used != text.size()) {
            throw ConfigError(what + ": trailing characters in '" + text + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError(what + ": '" + text + "' is not a number");
    }
}

std::int64_t to_int(const std::string& text, const std::string& what)
{
    std::int64_t v = 0;
    auto const [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(what + ": '" + text + "' is not an integer");
    }
    return v;
}

Site parse_site(const std::string& text, int d)
{
    auto const parts = split(text, ',');
    if (static_cast<int>(parts.size()) != d) {
        throw ConfigError("window: '" + text + "' needs " + std::to_string(d) + " coordinates");
    }
    Site x(d);
    for (int i = 0; i < d; ++i) {
        x[i] = to_int(parts[static_cast<std::size_t>(i)], "window");
    }
    return x;
}

}  // namespace

RadiusLaw parse_law(const std::string& spec)
{
    auto const parts = split(spec, ':');
    const std::string& kind = parts.front();
    try {
        if (kind == "pointmass" && parts.size() == 2) {
            return RadiusLaw::point_mass(to_int(parts[1], "law"));
        }
        if (kind == "geometric" && parts.size() == 2) {
            return RadiusLaw::geometric(to_double(parts[1], "law"));
        }
        if (kind == "powerlaw" && (parts.size() == 2 || parts.size() == 3)) {
            std::optional<Radius> cap;
            if (parts.size() == 3) {
                cap = to_int(parts[2], "law");
            }
            return RadiusLaw::power_law(to_double(parts[1], "law"), cap);
        }
        if (kind == "table" && parts.size() == 2) {
            std::vector<double> pmf;
            for (const auto& v : split(parts[1], ',')) {
                pmf.push_back(to_double(v, "law"));
            }
            return RadiusLaw::table(std::move(pmf));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("law '") + spec + "': " + e.what());
    }
    throw ConfigError("law '" + spec + "': expected pointmass:R, geometric:a, powerlaw:s[:cap] or table:p0,p1,..");
}

SiteLawField parse_law_field(const std::string& spec)
{
    std::vector<RadiusLaw> laws;
    for (const auto& part : split(spec, ';')) {
        laws.push_back(parse_law(part));
    }
    if (laws.empty()) {
        throw ConfigError("law: empty");
    }
    return SiteLawField(std::move(laws));
}

std::vector<double> parse_numbers(const std::string& spec, char sep)
{
    std::vector<double> out;
    for (const auto& part : split(spec, sep)) {
        out.push_back(to_double(part, "number list"));
    }
    if (out.empty()) {
        throw ConfigError("empty number list");
    }
    return out;
}

Window parse_window(const std::string& spec, int d)
{
    if (d < 1 || d > kMaxDim) {
        throw ConfigError("dim must lie in 1.." + std::to_string(kMaxDim));
    }
    auto const parts = split(spec, ':');
    if (parts.size() == 2 && parts[0] == "cube") {
        Radius const h = to_int(parts[1], "window");
        if (h < 0) {
            throw ConfigError("window: negative half-width");
        }
        return Window::cube(Site::origin(d), h);
    }
    if (parts.size() == 2 && parts[0] == "ball") {
        Radius const r = to_int(parts[1], "window");
        if (r < 0) {
            throw ConfigError("window: negative radius");
        }
        return Window::l1_ball(Site::origin(d), r);
    }
    if (parts.size() == 3 && parts[0] == "box") {
        Site const lo = parse_site(parts[1], d);
        Site const hi = parse_site(parts[2], d);
        for (int i = 0; i < d; ++i) {
            if (lo[i] > hi[i]) {
                throw ConfigError("window: empty box");
            }
        }
        return Window::box(lo, hi);
    }
    throw ConfigError("window '" + spec + "': expected cube:H, ball:R or box:lo:hi");
}

BoundaryPolicy parse_boundary(const std::string& spec)
{
    auto const parts = split(spec, ':');
    if (parts.size() == 1 && parts[0] == "periodic") {
        return {BoundaryKind::periodic, 0};
    }
    if (parts[0] == "frozen" && parts.size() <= 2) {
        Spin const fill = parts.size() == 2 ? static_cast<Spin>(to_int(parts[1], "boundary")) : 0;
        return {BoundaryKind::frozen, fill};
    }
    throw ConfigError("boundary '" + spec + "': expected frozen[:fill] or periodic");
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json stamp(nlohmann::json body, const nlohmann::json& config, std::uint64_t seed)
{
    body["config"] = config;
    body["config_hash"] = fnv1a_hex(config.dump());
    body["seed"] = seed;
    return body;
}

std::vector<std::string> stamp_lines(const nlohmann::json& config, std::uint64_t seed)
{
    return {"config_hash=" + fnv1a_hex(config.dump()), "seed=" + std::to_string(seed), "config=" + config.dump()};
}

}  // namespace boolperc::cli
