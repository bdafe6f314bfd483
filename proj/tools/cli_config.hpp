#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "boolperc/boolean_model.hpp"
#include "boolperc/geometry.hpp"
#include "boolperc/harris_coupling.hpp"
#include "boolperc/particle_system.hpp"
#include "boolperc/radius_law.hpp"

namespace boolperc::cli {

/// Thrown for any malformed option value; maps to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One law: pointmass:R, geometric:a, powerlaw:s[:cap], table:p0,p1,...
RadiusLaw parse_law(const std::string& spec);
/// Laws per site class, separated by ';'.
SiteLawField parse_law_field(const std::string& spec);
/// Numbers separated by ';' (per class) or ',' (lists).
std::vector<double> parse_numbers(const std::string& spec, char sep);
/// cube:H, ball:R or box:lo_1,..,lo_d:hi_1,..,hi_d. Cubes and balls are
/// centered at the origin of Z^d.
Window parse_window(const std::string& spec, int d);
/// frozen[:fill] or periodic.
BoundaryPolicy parse_boundary(const std::string& spec);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Embeds the resolved config, its hash and the seed into a JSON report.
nlohmann::json stamp(nlohmann::json body, const nlohmann::json& config, std::uint64_t seed);
/// The same as '#'-prefixed CSV header lines.
std::vector<std::string> stamp_lines(const nlohmann::json& config, std::uint64_t seed);

}  // namespace boolperc::cli
