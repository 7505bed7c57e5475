#pragma once

// The Weyl-reduced trace integral: I_t over t0, its chamber pieces over
// w^{-1} C+(g), the equal-rank closed form, and the short-time diagnostic.
// All integrands are evaluated in signed-log form; the t_g directions are
// integrated in closed form (a pure Gaussian factor).

#include <cmath>
#include <cstdint>
#include <vector>

#include "heattrace/chambers.hpp"
#include "heattrace/quadrature.hpp"
#include "heattrace/rootdata.hpp"

namespace heattrace {

struct TraceSample {
    double t = 0.0;
    Estimate trace;    // prefactor * i_value
    Estimate i_value;  // I_t^g(lambda + rho^k)
    double prefactor = 0.0;        // may underflow double for large t; see log below
    double log_prefactor = 0.0;
};

struct HeatOptions {
    double tol = 1e-10;
    std::uint64_t seed = 1;
    std::size_t mc_samples = 400000;
    std::size_t max_evals = 40'000'000;
};

// Truncation radius for the A-hat / Td weighted box integrals; the saddle
// sits near t*mu and the Gaussian width is sqrt(t).
inline double truncation_radius(double t, double mu_norm, double rho_norm) {
    return t * (mu_norm + rho_norm + 1.0) + 12.0 * std::sqrt(t) + 20.0;
}

namespace detail {

// Pairing coefficients of a set of roots against an orthonormal frame.
inline std::vector<Vec> frame_coefficients(const std::vector<Vec>& roots, const std::vector<Vec>& frame) {
    std::vector<Vec> out;
    out.reserve(roots.size());
    for (const Vec& r : roots) {
        Vec c(frame.size());
        for (std::size_t i = 0; i < frame.size(); ++i) c[i] = dot(r, frame[i]);
        out.push_back(std::move(c));
    }
    return out;
}

inline std::vector<Vec> positive_root_vectors(const CartanDatum& d, const PositiveSystem& ps, bool p_part) {
    std::vector<Vec> out;
    for (int i : ps.pos_g) {
        const auto& r = d.roots[static_cast<std::size_t>(i)];
        if ((p_part && r.mult_p == 1) || (!p_part && r.mult_k == 1)) out.push_back(r.v);
    }
    return out;
}

}  // namespace detail

// I_t^g(mu): the full integral of pi^k(Y) A-hat(ad Y|p) e^{<mu,Y> - |Y|^2/2t}
// over t0, normalized by (2 pi t)^{r0/2}.
inline Estimate I_t(const CartanDatum& d, const PositiveSystem& ps, const Vec& mu, double t,
                    const HeatOptions& opt = {}) {
    if (t <= 0) throw Error("I_t: t must be positive");
    // orthonormal frame of t0^g = span of the roots; t_g handled exactly
    std::vector<Vec> rv;
    for (int i : ps.pos_g) rv.push_back(d.roots[static_cast<std::size_t>(i)].v);
    auto frame = orthonormal_basis(rv);
    const std::size_t dim = frame.size();

    Vec mu_g = mu;  // t_g component of mu
    for (const Vec& q : frame) axpy(mu_g, -dot(mu_g, q), q);
    const double tg_factor_log = 0.5 * t * norm2(mu_g);

    if (dim == 0) {
        Estimate e = Estimate::exact(1.0);
        e.log_scale = tg_factor_log;
        return e.normalized();
    }
    if (dim > 4) throw Error("I_t: numeric dimension exceeds 4");

    auto k_coeff = detail::frame_coefficients(detail::positive_root_vectors(d, ps, false), frame);
    auto p_coeff = detail::frame_coefficients(detail::positive_root_vectors(d, ps, true), frame);
    Vec mu_coeff = coords_in(frame, mu);

    const double inv2t = 0.5 / t;
    LogIntegrand f = [&](const Vec& x) -> SignedLog {
        double lg = 0.0, sg = 1.0;
        for (const Vec& c : k_coeff) {
            double v = dot(c, x);
            if (v == 0.0) return SignedLog::zero();
            lg += std::log(std::fabs(v));
            if (v < 0) sg = -sg;
        }
        for (const Vec& c : p_coeff) lg += log_a_hat(dot(c, x));
        lg += dot(mu_coeff, x) - inv2t * norm2(x);
        return {lg, sg};
    };

    const double L = truncation_radius(t, norm(mu), norm(ps.rho_g));
    Box box;
    box.lo.assign(dim, -L);
    box.hi.assign(dim, L);
    QuadOptions qopt;
    qopt.tol_rel = opt.tol;
    qopt.max_evals = opt.max_evals;
    Estimate est = integrate_adaptive_log(f, box, qopt);
    est.log_scale += tg_factor_log - 0.5 * static_cast<double>(dim) * std::log(2.0 * M_PI * t);
    return est.normalized();
}

// Tr_G[exp(-t C/2)] via the Weyl-reduced formula.
inline TraceSample trace_G(const CartanDatum& d, const PositiveSystem& ps, const HighestWeight& lambda, double t,
                           const HeatOptions& opt = {}) {
    const int m = d.dim_p();
    const int n = d.dim_k();
    double pik_rho = 1.0;
    for (int i : ps.pos_k) pik_rho *= dot(d.roots[static_cast<std::size_t>(i)].v, ps.rho_k);

    validate_weight(d, ps, lambda);
    TraceSample s;
    s.t = t;
    s.i_value = I_t(d, ps, add(lambda.lambda, ps.rho_k), t, opt);
    s.log_prefactor = -0.5 * m * std::log(2.0 * M_PI) - std::log(pik_rho) -
                      0.5 * (m + n - d.r0) * std::log(t) - 0.5 * ps.c_g * t;
    s.prefactor = std::exp(s.log_prefactor);
    s.trace = s.i_value;
    s.trace.log_scale += s.log_prefactor;
    s.trace = s.trace.normalized();
    if (!(s.trace.value > 0)) throw Error("trace_G: non-positive trace (numerical failure)");
    return s;
}

// mu_ul(w) = w mu + w1 rho^k - rho^g.
inline Vec mu_underline(const CartanDatum& d, const PositiveSystem& ps, const Vec& mu, const WeylElement& w) {
    auto f = decompose_w(d, ps, w);
    Vec out = act(w.matrix, mu);
    out = add(out, act(f.w1.matrix, ps.rho_k));
    return sub(out, ps.rho_g);
}

namespace detail {

// Positive-system images under w1: w1 R+(k) and w1 R(p) cap R+(g).
struct ChamberFactors {
    std::vector<Vec> linear;  // roots entering as plain pairings
    std::vector<Vec> td;      // roots entering through Td
};

inline ChamberFactors chamber_factors(const CartanDatum& d, const PositiveSystem& ps, const WeylElement& w1) {
    ChamberFactors cf;
    for (int i : ps.pos_k) cf.linear.push_back(act(w1.matrix, d.roots[static_cast<std::size_t>(i)].v));
    for (const auto& r : d.roots) {
        if (r.mult_p != 1) continue;
        Vec img = act(w1.matrix, r.v);
        // keep the images that are positive
        bool positive = false;
        for (int i : ps.pos_g)
            if (approx_eq(img, d.roots[static_cast<std::size_t>(i)].v, 1e-7)) positive = true;
        if (positive) cf.td.push_back(img);
    }
    return cf;
}

}  // namespace detail

// I_t^g(mu, w): the integral over the chamber w^{-1} C+(g), computed in the
// Td form over C+(g) with the sign eps_{w2}.  The cone is parameterized by
// its coweight coordinates, so the integrand stays smooth; rank >= 3 falls
// back to Monte Carlo.
inline Estimate I_t_chamber(const CartanDatum& d, const PositiveSystem& ps, const Vec& mu, const WeylElement& w,
                            double t, const HeatOptions& opt = {}) {
    if (t <= 0) throw Error("I_t_chamber: t must be positive");
    auto f = decompose_w(d, ps, w);
    Vec mu_ul = act(w.matrix, mu);
    mu_ul = add(mu_ul, act(f.w1.matrix, ps.rho_k));
    mu_ul = sub(mu_ul, ps.rho_g);
    auto cf = detail::chamber_factors(d, ps, f.w1);

    // t_g component integrates to a Gaussian factor
    std::vector<Vec> rv;
    for (int i : ps.pos_g) rv.push_back(d.roots[static_cast<std::size_t>(i)].v);
    auto frame = orthonormal_basis(rv);
    Vec mu_g = mu_ul;
    for (const Vec& q : frame) axpy(mu_g, -dot(mu_g, q), q);
    const double tg_factor_log = 0.5 * t * norm2(mu_g);
    const std::size_t dim = frame.size();
    const double sign = f.w2.sign;

    if (dim == 0) {
        Estimate e = Estimate::exact(1.0);
        e.value *= sign;
        e.log_scale = tg_factor_log;
        return e.normalized();
    }

    const std::size_t k = ps.coweights.size();
    if (k != dim) throw Error("I_t_chamber: simple roots do not span the root span");

    if (dim <= 2) {
        // box quadrature in coweight coordinates: Y = sum u_a omega_a, u >= 0
        std::vector<Vec> lin_c = detail::frame_coefficients(cf.linear, ps.coweights);   // <f, omega_a> pairings
        std::vector<Vec> td_c = detail::frame_coefficients(cf.td, ps.coweights);
        Vec mu_c(k);
        for (std::size_t a = 0; a < k; ++a) mu_c[a] = dot(mu_ul, ps.coweights[a]);
        std::vector<double> gram(k * k);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) gram[a * k + b] = dot(ps.coweights[a], ps.coweights[b]);
        Mat omega(static_cast<int>(k));
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < k; ++c) omega.at(static_cast<int>(r), static_cast<int>(c)) =
                dot(ps.coweights[c], frame[r]);
        const double log_jac = std::log(std::fabs(determinant(omega)));

        const double inv2t = 0.5 / t;
        LogIntegrand fn = [&](const Vec& u) -> SignedLog {
            double lg = log_jac, sg = 1.0;
            for (const Vec& c : lin_c) {
                double v = dot(c, u);
                if (v == 0.0) return SignedLog::zero();
                lg += std::log(std::fabs(v));
                if (v < 0) sg = -sg;
            }
            for (const Vec& c : td_c) lg += log_td(dot(c, u));
            double n2 = 0.0;
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b) n2 += u[a] * u[b] * gram[a * k + b];
            lg += dot(mu_c, u) - inv2t * n2;
            return {lg, sg};
        };

        const double L = truncation_radius(t, norm(mu_ul), norm(ps.rho_g));
        Box box;
        for (std::size_t a = 0; a < k; ++a) {
            box.lo.push_back(0.0);
            box.hi.push_back(norm(d.roots[static_cast<std::size_t>(ps.simple[a])].v) * L);
        }
        QuadOptions qopt;
        qopt.tol_rel = opt.tol;
        qopt.max_evals = opt.max_evals;
        Estimate est = integrate_adaptive_log(fn, box, qopt);
        est.log_scale += tg_factor_log - 0.5 * static_cast<double>(dim) * std::log(2.0 * M_PI * t);
        est.value *= sign;
        return est.normalized();
    }

    // Monte Carlo route
    ConeIntegrandSpec spec;
    for (const Vec& v : cf.linear) spec.linear_factors.push_back({v, 1});
    spec.td_factors = cf.td;
    spec.gaussian_weight = 1.0 / t;
    spec.linear_exponent = mu_ul;
    Estimate est = integrate_cone_mc(spec, ps.coweights, opt.seed, opt.mc_samples);
    est.value *= sign;
    // (2 pi)^{k/2} from the mc normalizer vs (2 pi t)^{k/2} here
    est = scale_estimate(est, std::pow(t, -0.5 * static_cast<double>(dim)));
    est.log_scale += tg_factor_log;
    return est;
}

// Equal-rank regular closed form K_t = pi_0^g(t mu_ul) exp(t |mu_ul|^2 / 2),
// with pi_0^g the full multiplicity-weighted product over R+(g).
inline Estimate K_t_closed(const CartanDatum& d, const PositiveSystem& ps, const Vec& mu, double t) {
    if (d.dim_a != 0) throw NotEqualRankRegular("K_t_closed: datum is not equal rank");
    Vec mu_ul = add(mu, ps.rho_k);
    mu_ul = sub(mu_ul, ps.rho_g);
    auto ld = langlands_decompose(d, ps, mu_ul);
    if (!ld.pair.delta1.empty() || !ld.pair.delta2.empty())
        throw NotEqualRankRegular("K_t_closed: mu_ul is not regular dominant");

    double lg = 0.5 * t * norm2(mu_ul);
    double sg = 1.0;
    for (int i : ps.pos_g) {
        const auto& r = d.roots[static_cast<std::size_t>(i)];
        double v = t * dot(r.v, mu_ul);
        if (v == 0.0) return Estimate::exact(0.0);
        lg += r.dim() * std::log(std::fabs(v));
        if (v < 0 && r.dim() % 2 == 1) sg = -sg;
    }
    Estimate e;
    e.value = sg;
    e.log_scale = lg;
    e.err = 0.0;
    return e.normalized();
}

// Quadrature of the plain-pi integrand over all of t0^g (the harmonic
// counterpart of K_t_closed); used to cross-check the closed form.
inline Estimate K_t_quadrature(const CartanDatum& d, const PositiveSystem& ps, const Vec& mu, double t,
                               const HeatOptions& opt = {}) {
    Vec mu_ul = add(mu, ps.rho_k);
    mu_ul = sub(mu_ul, ps.rho_g);

    std::vector<Vec> rv;
    for (int i : ps.pos_g) rv.push_back(d.roots[static_cast<std::size_t>(i)].v);
    auto frame = orthonormal_basis(rv);
    const std::size_t dim = frame.size();
    if (dim == 0 || dim > 4) throw Error("K_t_quadrature: bad dimension");

    Vec mu_g = mu_ul;
    for (const Vec& q : frame) axpy(mu_g, -dot(mu_g, q), q);
    const double tg_factor_log = 0.5 * t * norm2(mu_g);

    std::vector<Vec> coeff;
    std::vector<int> mult;
    for (int i : ps.pos_g) {
        Vec c(frame.size());
        for (std::size_t q = 0; q < frame.size(); ++q) c[q] = dot(d.roots[static_cast<std::size_t>(i)].v, frame[q]);
        coeff.push_back(std::move(c));
        mult.push_back(d.roots[static_cast<std::size_t>(i)].dim());
    }
    Vec mu_coeff = coords_in(frame, mu_ul);

    const double inv2t = 0.5 / t;
    LogIntegrand f = [&](const Vec& x) -> SignedLog {
        double lg = 0.0, sg = 1.0;
        for (std::size_t i = 0; i < coeff.size(); ++i) {
            double v = dot(coeff[i], x);
            if (v == 0.0) return SignedLog::zero();
            lg += mult[i] * std::log(std::fabs(v));
            if (v < 0 && mult[i] % 2 == 1) sg = -sg;
        }
        lg += dot(mu_coeff, x) - inv2t * norm2(x);
        return {lg, sg};
    };

    const double L = truncation_radius(t, norm(mu_ul), norm(ps.rho_g));
    Box box;
    box.lo.assign(dim, -L);
    box.hi.assign(dim, L);
    QuadOptions qopt;
    qopt.tol_rel = opt.tol;
    qopt.max_evals = opt.max_evals;
    Estimate est = integrate_adaptive_log(f, box, qopt);
    est.log_scale += tg_factor_log - 0.5 * static_cast<double>(dim) * std::log(2.0 * M_PI * t);
    return est.normalized();
}

// (2 pi t)^{m/2} e^{c_g t / 2} Tr / dim E; tends to 1 as t -> 0.
inline double small_t_diagnostic(const CartanDatum& d, const PositiveSystem& ps, const HighestWeight& lambda,
                                 double t_small, const HeatOptions& opt = {}) {
    if (t_small > 1e-2) throw Error("small_t_diagnostic: t must be <= 1e-2");
    auto s = trace_G(d, ps, lambda, t_small, opt);
    double dim = static_cast<double>(weyl_dimension(d, ps, lambda));
    double lg = 0.5 * d.dim_p() * std::log(2.0 * M_PI * t_small) + 0.5 * ps.c_g * t_small;
    return s.trace.real() * std::exp(lg) / dim;
}

}  // namespace heattrace
