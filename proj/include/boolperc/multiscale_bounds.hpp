#pragma once

#include <span>
#include <vector>

#include "boolperc/geometry.hpp"
#include "boolperc/radius_law.hpp"

namespace boolperc {

/// Constants of the renormalization argument. All are integers; they are
/// held as doubles because C1 and C3 overflow 64 bits for d >= 6.
struct BoundConstants {
    int d = 1;
    double C = 0.0;   // 3^d
    double C1 = 0.0;  // |S_{10d}| |S_{80d}|
    double C2 = 0.0;  // 10^d C
    double C3 = 0.0;  // 100^d C
};

BoundConstants constants(int d);

/// C1 p C2 (r d)^d, the bound on C1 P(G(0, r d)).
double f_upper(double p, Radius r, const BoundConstants& k);
/// C1 p C3 E[R^d 1{R >= r d}]. Throws DivergentMoment.
double g_upper(double p, Radius r, const BoundConstants& k, const RadiusLaw& law);

/// min(1 / (2 C1 C2 (10d)^d), 1 / (4 C1 C3 E[R^d])); the second term is
/// dropped when E[R^d] = 0. Throws DivergentMoment when E[R^d] is infinite.
double p0(int d, const RadiusLaw& law);

struct RecursionTable {
    /// 1/2^(n+1) + sum_{j<n} G_{n-1-j} / 2^j.
    std::vector<double> induction;
    /// F_{n+1} = F_n^2 + G_n from the given F_0.
    std::vector<double> direct;
};

/// n = 0..N of both sequences. Needs G_0..G_{N-1}. Throws HypothesisViolation
/// unless F0 <= 1/2 and every G_n <= 1/4.
RecursionTable recursion_iterate(double F0, std::span<const double> G, int N);

struct PipelineRow {
    int n = 0;
    double G = 0.0;
    double F_induction = 0.0;
    double F_direct = 0.0;
};

/// F_0 = max_{1<=r<=10} f_upper(p, r) and G_n = g_upper(p, 10^n) fed into
/// recursion_iterate. Throws HypothesisViolation when p is too large for the
/// hypotheses.
std::vector<PipelineRow> bound_pipeline(int d, const RadiusLaw& law, double p, int N);

struct DiameterTailBound {
    int n = 0;
    double G_part = 0.0;  // F_n / C1 with the sharper of the two F_n values
    double H_part = 0.0;  // union bound on P(H(r))
    double total() const noexcept { return G_part + H_part; }
};

/// Bound on P(D_0 > 8r) for r = 10^n d r' with r' in 1..10 and p <= p0.
/// Throws HypothesisViolation off that grid or above p0.
DiameterTailBound diameter_tail_bound(double p, Radius r, int d, const RadiusLaw& law);

}  // namespace boolperc
