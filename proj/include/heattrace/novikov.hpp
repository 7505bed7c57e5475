#pragma once

// Derived invariants for locally symmetric quotients: delta(G), Casimir
// scalars of flat twists, Novikov-Shubin-type exponents for the Casimir, and
// the twisted Hodge-Laplacian band classification.

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "heattrace/constants.hpp"

namespace heattrace {

struct FlatTwist {
    Vec lambda_t;  // lambda^V restricted to t0
    Vec lambda_a;  // lambda^V restricted to a
    bool theta_fixed() const {
        for (double x : lambda_a)
            if (std::fabs(x) > tau_zero) return false;
        return true;
    }
};

enum class NSCase { a, b, c };

struct NSReport {
    int delta_g = 0;
    int band_lo = 0;  // (m - delta)/2
    int band_hi = 0;  // (m + delta)/2
    struct Degree {
        NSCase which;
        double ns;  // infinity unless finite per the band classification
    };
    std::map<int, Degree> per_degree;  // i = 0..m
};

// delta(G) = rk_C G - rk_C K = dim a.
inline int delta_G(const CartanDatum& d) { return d.dim_a; }

// Casimir scalar of the flat twist: -C = |rho^g + lambda^V|t0|^2 + |lambda^V|a|^2 - |rho^g|^2.
inline double casimir_scalar(const CartanDatum& d, const PositiveSystem& ps, const FlatTwist& twist) {
    (void)d;
    Vec shifted = add(ps.rho_g, twist.lambda_t);
    double v = norm2(shifted) + norm2(twist.lambda_a) - norm2(ps.rho_g);
    return -v;
}

// Novikov-Shubin-type invariant of the Casimir acting on F_Gamma = Gamma\(G x_K E).
// vol scales only the removed atom, never the exponent.
inline double ns_bundle(const CartanDatum& d, const PositiveSystem& ps, const HighestWeight& lambda, double vol,
                        std::uint64_t seed = 1) {
    if (vol <= 0) throw Error("ns_bundle: quotient volume must be positive");
    auto c = asymptotic_constants(d, ps, lambda, seed);
    if (c.gamma2_bar > tau_zero)
        throw AssumptionViolated("ns_bundle: gamma2_bar > 0 violates the standing assumption");
    const double inf = std::numeric_limits<double>::infinity();
    if (c.gamma2_bar < -tau_zero) return inf;
    if (std::fabs(c.beta1_bar) < 1e-12) return inf;
    return -2.0 * c.beta1_bar;
}

// Twisted Hodge Laplacian band classification for the flat bundle W_Gamma.
inline NSReport ns_flat(const CartanDatum& d, const PositiveSystem& ps, const FlatTwist& twist) {
    (void)ps;  // the band depends only on the datum and the twist
    NSReport rep;
    const int m = d.dim_p();
    rep.delta_g = delta_G(d);
    if ((m - rep.delta_g) % 2 != 0)
        throw Error("ns_flat: delta(G) and m must share parity");
    rep.band_lo = (m - rep.delta_g) / 2;
    rep.band_hi = (m + rep.delta_g) / 2;
    const double inf = std::numeric_limits<double>::infinity();

    const bool fixed = twist.theta_fixed();
    for (int i = 0; i <= m; ++i) {
        NSReport::Degree deg;
        if (!fixed || i < rep.band_lo || i > rep.band_hi) {
            deg.which = NSCase::a;  // positive spectral bottom
            deg.ns = inf;
        } else if (rep.delta_g == 0) {
            deg.which = NSCase::b;  // atom at zero with a gap
            deg.ns = inf;
        } else {
            deg.which = NSCase::c;  // zero in the spectrum, no gap
            deg.ns = static_cast<double>(rep.delta_g);
        }
        rep.per_degree[i] = deg;
    }
    return rep;
}

// The K-weight of the band construction: lambda^E = sum_{R+(p)} alpha + lambda^V|t0.
inline HighestWeight band_weight(const CartanDatum& d, const PositiveSystem& ps, const FlatTwist& twist) {
    Vec l = twist.lambda_t;
    for (int i : ps.pos_g)
        if (d.roots[static_cast<std::size_t>(i)].mult_p == 1) l = add(l, d.roots[static_cast<std::size_t>(i)].v);
    return HighestWeight{l, twist.lambda_a};
}

}  // namespace heattrace
