#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace boolperc {

// End-to-end checks of the model's structural claims. Each check runs at a
// full size (the acceptance suite) or a reduced size (the CLI self-test) and
// reports what it measured whether or not it passed.

enum class CheckStatus {
    pass,
    fail,
    /// Failed as literally posed for a documented reason; the detail reports
    /// the literal measurement next to the reading that was checked instead.
    deviation,
};

const char* to_string(CheckStatus s) noexcept;

struct CheckResult {
    int id = 0;
    std::string title;
    CheckStatus status = CheckStatus::fail;
    std::vector<std::string> detail;
    double seconds = 0.0;

    bool ok() const noexcept { return status != CheckStatus::fail; }
};

struct SuiteConfig {
    /// Full replica counts and windows; otherwise roughly a hundredth.
    bool full = true;
    std::uint64_t seed = 0x5eed2024;
    unsigned workers = 0;

    /// n at full size, max(n / 100, floor) otherwise.
    std::size_t scaled(std::size_t n, std::size_t floor = 100) const noexcept;
};

CheckResult check_geometry(const SuiteConfig& cfg);
CheckResult check_diameter_implication(const SuiteConfig& cfg);
CheckResult check_escalation(const SuiteConfig& cfg);
CheckResult check_p0(const SuiteConfig& cfg);
CheckResult check_recursion(const SuiteConfig& cfg);
CheckResult check_harris_law(const SuiteConfig& cfg);
CheckResult check_max_mark_law(const SuiteConfig& cfg);
CheckResult check_monotone_coupling(const SuiteConfig& cfg);
CheckResult check_envelope_pmf(const SuiteConfig& cfg);
CheckResult check_island_independence(const SuiteConfig& cfg);
CheckResult check_generator_rates(const SuiteConfig& cfg);
CheckResult check_coverage(const SuiteConfig& cfg);
CheckResult check_site_percolation(const SuiteConfig& cfg);
CheckResult check_counterexample(const SuiteConfig& cfg);

struct NamedCheck {
    int id;
    const char* name;
    CheckResult (*run)(const SuiteConfig&);
};

/// The fourteen checks in order.
const std::vector<NamedCheck>& all_checks();

/// Runs the checks whose id is listed (all when empty), reporting each as it
/// finishes.
std::vector<CheckResult> run_checks(const SuiteConfig& cfg, const std::vector<int>& ids = {},
                                    const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace boolperc
