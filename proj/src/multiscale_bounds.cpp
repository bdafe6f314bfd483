#include "boolperc/multiscale_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "boolperc/boolean_model.hpp"
#include "boolperc/errors.hpp"

namespace boolperc {

BoundConstants constants(int d)
{
    if (d < 1) {
        throw std::invalid_argument("constants: d >= 1");
    }
    BoundConstants k;
    k.d = d;
    k.C = static_cast<double>(ball_constant(d));
    k.C1 = static_cast<double>(sphere_cardinality(d, 10 * d)) * static_cast<double>(sphere_cardinality(d, 80 * d));
    k.C2 = std::pow(10.0, d) * k.C;
    k.C3 = std::pow(100.0, d) * k.C;
    return k;
}

double f_upper(double p, Radius r, const BoundConstants& k)
{
    return k.C1 * p * k.C2 * std::pow(static_cast<double>(r * k.d), k.d);
}

double g_upper(double p, Radius r, const BoundConstants& k, const RadiusLaw& law)
{
    double const tm = tail_moment(law, k.d, r * k.d).upper();
    return k.C1 * p * k.C3 * tm;
}

double p0(int d, const RadiusLaw& law)
{
    BoundConstants const k = constants(d);
    MomentValue const m = dth_moment(law, d);
    if (m.divergent) {
        throw DivergentMoment("p0: " + law.describe() + " has infinite moment of order " + std::to_string(d));
    }
    double const first = 1.0 / (2.0 * k.C1 * k.C2 * std::pow(10.0 * d, d));
    if (m.upper() == 0.0) {
        return first;
    }
    // The upper end of the moment keeps the threshold conservative.
    return std::min(first, 1.0 / (4.0 * k.C1 * k.C3 * m.upper()));
}

RecursionTable recursion_iterate(double F0, std::span<const double> G, int N)
{
    if (N < 0 || G.size() < static_cast<std::size_t>(N)) {
        throw std::invalid_argument("recursion_iterate: need G_0..G_{N-1}");
    }
    if (!(F0 >= 0.0 && F0 <= 0.5)) {
        throw HypothesisViolation("recursion_iterate: F_0 must lie in [0, 1/2]");
    }
    for (int n = 0; n < N; ++n) {
        if (!(G[static_cast<std::size_t>(n)] >= 0.0 && G[static_cast<std::size_t>(n)] <= 0.25)) {
            throw HypothesisViolation("recursion_iterate: G_" + std::to_string(n) + " exceeds 1/4");
        }
    }
    RecursionTable t;
    t.direct.push_back(F0);
    for (int n = 0; n <= N; ++n) {
        double b = std::ldexp(1.0, -(n + 1));
        for (int j = 0; j < n; ++j) {
            b += std::ldexp(G[static_cast<std::size_t>(n - 1 - j)], -j);
        }
        t.induction.push_back(b);
        if (n < N) {
            double const f = t.direct.back();
            t.direct.push_back(f * f + G[static_cast<std::size_t>(n)]);
        }
    }
    return t;
}

std::vector<PipelineRow> bound_pipeline(int d, const RadiusLaw& law, double p, int N)
{
    BoundConstants const k = constants(d);
    // f_upper grows in r and the tail moment shrinks in r, so the maxima over
    // r in 1..10 sit at r = 10 and r = 1.
    double const F0 = f_upper(p, 10, k);
    std::vector<double> G;
    Radius scale = 1;
    for (int n = 0; n <= N; ++n) {
        G.push_back(g_upper(p, scale, k, law));
        scale *= 10;
    }
    RecursionTable const t = recursion_iterate(F0, G, N);
    std::vector<PipelineRow> rows;
    for (int n = 0; n <= N; ++n) {
        auto const i = static_cast<std::size_t>(n);
        rows.push_back({n, G[i], t.induction[i], t.direct[i]});
    }
    return rows;
}

DiameterTailBound diameter_tail_bound(double p, Radius r, int d, const RadiusLaw& law)
{
    if (p > p0(d, law)) {
        throw HypothesisViolation("diameter_tail_bound: p exceeds p0");
    }
    if (r < d || r % d != 0) {
        throw HypothesisViolation("diameter_tail_bound: r must be 10^n d r' with r' in 1..10");
    }
    Radius q = r / d;
    int n = 0;
    while (q > 10) {
        if (q % 10 != 0) {
            throw HypothesisViolation("diameter_tail_bound: r must be 10^n d r' with r' in 1..10");
        }
        q /= 10;
        ++n;
    }
    DiameterTailBound out;
    out.n = n;
    if (p == 0.0) {
        return out;
    }
    auto const rows = bound_pipeline(d, law, p, n);
    double const F = std::min(rows.back().F_direct, rows.back().F_induction);
    out.G_part = F / constants(d).C1;
    out.H_part = h_exterior_bound(d, p, law, 10 * r);
    return out;
}

}  // namespace boolperc
