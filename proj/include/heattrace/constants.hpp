#pragma once

// Closed-form asymptotic constants (alpha, beta, gamma and their underlined
// versions), the per-chamber constants with their A/B root partitions, the
// ordering/sum theorems, spectral classification, and the formal degree.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "heattrace/chambers.hpp"
#include "heattrace/heattrace.hpp"
#include "heattrace/quadrature.hpp"

namespace heattrace {

enum class MultConvention { multiplicity, plain };

struct Classification {
    LanglandsDecomposition decomp;  // of v = lambda + 2 rho^k - rho^g
    bool equal_rank = false;
    bool regular = false;
    Vec mu2;
};

struct AsymptoticConstants {
    Estimate alpha01;
    Estimate alpha12;
    double alpha2 = 1.0;
    Estimate alpha0;
    Estimate alpha0_bar;
    double beta1 = 0.0;
    double beta1_bar = 0.0;
    double gamma2 = 0.0;
    double gamma2_bar = 0.0;
};

struct ChamberConstants {
    WeylElement w;
    int eps_w2 = 1;
    Estimate alpha_w;
    double beta_w = 0.0;
    double gamma_w = 0.0;
    // the six root partitions (A from w1 R+(k), B from w1 R(p) cap R+(g))
    std::vector<Vec> a01, a12, a2, b01, b12, b2;
};

inline Classification classify(const CartanDatum& d, const PositiveSystem& ps, const HighestWeight& lambda) {
    Vec v = lambda.lambda;
    axpy(v, 2.0, ps.rho_k);
    v = sub(v, ps.rho_g);
    Classification c;
    c.decomp = langlands_decompose(d, ps, v);
    c.equal_rank = (d.dim_a == 0);
    c.regular = c.equal_rank && c.decomp.pair.delta1.empty() && c.decomp.pair.delta2.empty();
    c.mu2 = c.decomp.v2;
    // regularity in the Harish-Chandra sense: v pairs positively with R+(g)
    if (c.regular)
        for (int i : ps.pos_g)
            if (dot(d.roots[static_cast<std::size_t>(i)].v, c.mu2) <= tau_zero)
                throw Error("classify: regular flag inconsistent with strict dominance");
    return c;
}

namespace detail {

// Minimal decay rate per unit length of sum |<a,u>|/2 - <mu,u> over unit
// directions of the span; this guards integrability of the A-hat weighted
// integrals and calibrates their truncation radius.
inline double min_decay_rate(const std::vector<Vec>& p_roots, const Vec& mu, const std::vector<Vec>& frame) {
    const std::size_t dim = frame.size();
    auto rate = [&](const Vec& u) {
        double r = 0.0;
        for (const Vec& a : p_roots) r += 0.5 * std::fabs(dot(a, u));
        return r - dot(mu, u);
    };
    double best = std::numeric_limits<double>::infinity();
    if (dim == 1) {
        best = std::min(rate(frame[0]), rate(scale(frame[0], -1.0)));
    } else if (dim == 2) {
        for (int i = 0; i < 720; ++i) {
            double a = 2.0 * M_PI * i / 720.0;
            Vec u = add(scale(frame[0], std::cos(a)), scale(frame[1], std::sin(a)));
            best = std::min(best, rate(u));
        }
    } else {
        // corners, axes, and a fixed pseudo-random sample
        std::uint64_t st = 12345;
        for (int trial = 0; trial < 4096; ++trial) {
            Vec u = zero_vec(frame[0].size());
            for (const Vec& q : frame) {
                double g = static_cast<double>(splitmix64(st) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
                axpy(u, g, q);
            }
            double n = norm(u);
            if (n > 1e-9) best = std::min(best, rate(scale(u, 1.0 / n)));
        }
        for (std::size_t i = 0; i < dim; ++i) {
            best = std::min(best, rate(frame[i]));
            best = std::min(best, rate(scale(frame[i], -1.0)));
        }
    }
    return best;
}

// Full-space A-hat weighted integral over span(frame):
//   int pi(Y) prod A(<a,Y>) e^{<mu,Y>} dY / (2 pi)^{dim/2}
inline Estimate ahat_space_integral(const std::vector<Vec>& k_roots, const std::vector<Vec>& p_roots, const Vec& mu,
                                    const std::vector<Vec>& frame, double tol, std::size_t max_evals) {
    const std::size_t dim = frame.size();
    if (dim == 0) return Estimate::exact(1.0);
    if (dim > 4) throw Error("ahat_space_integral: dimension exceeds 4");
    double decay = min_decay_rate(p_roots, mu, frame);
    if (decay <= tau_zero)
        throw IntegrabilityViolated("A-hat integral: exponent does not decay in some direction");

    auto k_coeff = frame_coefficients(k_roots, frame);
    auto p_coeff = frame_coefficients(p_roots, frame);
    Vec mu_coeff = coords_in(frame, mu);
    const double deg = static_cast<double>(k_roots.size() + p_roots.size());
    const double L = (80.0 + 20.0 * deg) / decay;

    LogIntegrand f = [&](const Vec& x) -> SignedLog {
        double lg = 0.0, sg = 1.0;
        for (const Vec& c : k_coeff) {
            double v = dot(c, x);
            if (v == 0.0) return SignedLog::zero();
            lg += std::log(std::fabs(v));
            if (v < 0) sg = -sg;
        }
        for (const Vec& c : p_coeff) lg += log_a_hat(dot(c, x));
        lg += dot(mu_coeff, x);
        return {lg, sg};
    };
    Box box;
    box.lo.assign(dim, -L);
    box.hi.assign(dim, L);
    QuadOptions qopt;
    qopt.tol_rel = tol;
    qopt.max_evals = max_evals;
    Estimate est = integrate_adaptive_log(f, box, qopt);
    est.log_scale -= 0.5 * static_cast<double>(dim) * std::log(2.0 * M_PI);
    return est.normalized();
}

// Td/linear weighted cone integral over the cone spanned by `gens` inside
// its span, with exponent <mu, Y>; quadrature at rank <= 2, exponential
// Monte Carlo beyond.
inline Estimate td_cone_integral(const std::vector<Vec>& lin_roots, const std::vector<Vec>& td_roots, const Vec& mu,
                                 const std::vector<Vec>& gens, double tol, std::uint64_t seed, std::size_t mc_n,
                                 std::size_t max_evals) {
    const std::size_t k = gens.size();
    if (k == 0) return Estimate::exact(1.0);
    if (k > 2) {
        ConeIntegrandSpec spec;
        for (const Vec& f : lin_roots) spec.linear_factors.push_back({f, 1});
        spec.td_factors = td_roots;
        spec.linear_exponent = mu;
        return integrate_cone_mc(spec, gens, seed, mc_n);
    }

    std::vector<double> rates(k);
    for (std::size_t j = 0; j < k; ++j) {
        double r = -dot(mu, gens[j]);
        for (const Vec& f : td_roots) r += std::max(0.0, -dot(f, gens[j]));
        if (r <= tau_zero)
            throw IntegrabilityViolated("Td cone integral: exponent does not decay along a generator");
        rates[j] = r;
    }
    auto q = orthonormal_basis(gens);
    if (q.size() != k) throw Error("td_cone_integral: dependent generators");
    Mat gm(static_cast<int>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) gm.at(static_cast<int>(i), static_cast<int>(j)) = dot(gens[j], q[i]);
    const double log_jac = std::log(std::fabs(determinant(gm)));

    auto lin_c = frame_coefficients(lin_roots, gens);
    auto td_c = frame_coefficients(td_roots, gens);
    Vec mu_c(k);
    for (std::size_t j = 0; j < k; ++j) mu_c[j] = dot(mu, gens[j]);
    const double deg = static_cast<double>(lin_roots.size() + td_roots.size());

    LogIntegrand f = [&](const Vec& u) -> SignedLog {
        double lg = log_jac, sg = 1.0;
        for (const Vec& c : lin_c) {
            double v = dot(c, u);
            if (v == 0.0) return SignedLog::zero();
            lg += std::log(std::fabs(v));
            if (v < 0) sg = -sg;
        }
        for (const Vec& c : td_c) lg += log_td(dot(c, u));
        lg += dot(mu_c, u);
        return {lg, sg};
    };
    Box box;
    for (std::size_t j = 0; j < k; ++j) {
        box.lo.push_back(0.0);
        box.hi.push_back((80.0 + 20.0 * deg) / rates[j]);
    }
    QuadOptions qopt;
    qopt.tol_rel = tol;
    qopt.max_evals = max_evals;
    Estimate est = integrate_adaptive_log(f, box, qopt);
    est.log_scale -= 0.5 * static_cast<double>(k) * std::log(2.0 * M_PI);
    return est.normalized();
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 7));
    splitmix64(s);
    return s;
}

}  // namespace detail

// Closed-form constants of the large-time asymptotics.
inline AsymptoticConstants asymptotic_constants(const CartanDatum& d, const PositiveSystem& ps,
                                                const HighestWeight& lambda, std::uint64_t seed,
                                                const HeatOptions& opt = {},
                                                MultConvention conv = MultConvention::multiplicity) {
    validate_weight(d, ps, lambda);
    auto cls = classify(d, ps, lambda);
    const auto& pair = cls.decomp.pair;

    AsymptoticConstants out;

    // alpha_0^1: full-space A-hat integral over t01, exponent (lambda + rho^k)|t01
    std::vector<int> delta1_roots, delta2_roots;
    for (int p : pair.delta1) delta1_roots.push_back(ps.simple[static_cast<std::size_t>(p)]);
    for (int p : pair.delta2) delta2_roots.push_back(ps.simple[static_cast<std::size_t>(p)]);

    std::vector<Vec> k1, p1;
    for (int i : ps.pos_g) {
        const auto& r = d.roots[static_cast<std::size_t>(i)];
        if (!detail::root_in_span(d, ps, r.v, pair.delta1)) continue;
        if (r.mult_k == 1) k1.push_back(r.v);
        if (r.mult_p == 1) p1.push_back(r.v);
    }
    Vec mu01 = project_onto(pair.b01, add(lambda.lambda, ps.rho_k));
    out.alpha01 = detail::ahat_space_integral(k1, p1, mu01, pair.b01, opt.tol, opt.max_evals);

    // alpha_1^2: gaussian cone integral over C12 with multiplicity exponents
    if (pair.delta12.empty()) {
        out.alpha12 = Estimate::exact(1.0);
    } else {
        ConeIntegrandSpec spec;
        for (int i : ps.pos_g) {
            const auto& r = d.roots[static_cast<std::size_t>(i)];
            bool in1 = detail::root_in_span(d, ps, r.v, pair.delta1);
            bool in2 = detail::root_in_span(d, ps, r.v, pair.delta2);
            if (!in2 || in1) continue;
            int e = (conv == MultConvention::multiplicity) ? r.dim() : 1;
            spec.linear_factors.push_back({r.v, e});
        }
        spec.gaussian_weight = 1.0;
        out.alpha12 = integrate_cone_mc(spec, pair.delta12_dual, detail::derive_seed(seed, 0), opt.mc_samples);
    }

    // alpha_2: polynomial at mu2 over the roots off R_0^2
    out.alpha2 = 1.0;
    for (int i : ps.pos_g) {
        const auto& r = d.roots[static_cast<std::size_t>(i)];
        if (detail::root_in_span(d, ps, r.v, pair.delta2)) continue;
        int e = (conv == MultConvention::multiplicity) ? r.dim() : 1;
        out.alpha2 *= std::pow(dot(r.v, cls.mu2), e);
    }
    if (out.alpha2 <= 0 && pair.delta2.size() < ps.simple.size())
        throw Error("asymptotic_constants: alpha2 must be positive on the open chamber");

    out.alpha0 = scale_estimate(mul_estimates(out.alpha01, out.alpha12), out.alpha2);

    double pik_rho = 1.0;
    for (int i : ps.pos_k) pik_rho *= dot(d.roots[static_cast<std::size_t>(i)].v, ps.rho_k);
    out.alpha0_bar = scale_estimate(out.alpha0, std::pow(2.0 * M_PI, -0.5 * d.dim_p()) / pik_rho);

    auto ld = levi_data(d, ps, pair.delta1, pair.delta2, lambda.lambda);
    int r01 = static_cast<int>(pair.b01.size());
    out.beta1 = -0.5 * r01 + 0.5 * ld.dim_u12 + ld.dim_u2;
    out.beta1_bar = out.beta1 - 0.5 * (d.dim_p() + d.dim_k() - d.r0);
    if (std::fabs(out.beta1_bar - ld.beta1_bar) > 1e-9)
        throw Error("asymptotic_constants: beta1_bar bookkeeping mismatch");
    if (cls.regular != (std::fabs(out.beta1_bar) < 1e-12))
        throw Error("asymptotic_constants: beta1_bar = 0 iff regular (Thm 3.4) violated");

    out.gamma2 = 0.5 * norm2(cls.mu2);
    out.gamma2_bar = out.gamma2 - 0.5 * ps.c_g;
    return out;
}

// Per-chamber constants for w in W(g), at mu = lambda + rho^k.
inline ChamberConstants chamber_constants(const CartanDatum& d, const PositiveSystem& ps, const Vec& mu,
                                          const WeylElement& w, std::uint64_t seed, const HeatOptions& opt = {}) {
    ChamberConstants cc;
    cc.w = w;
    auto f = decompose_w(d, ps, w);
    cc.eps_w2 = f.w2.sign;

    Vec mu_ul = act(w.matrix, mu);
    mu_ul = add(mu_ul, act(f.w1.matrix, ps.rho_k));
    mu_ul = sub(mu_ul, ps.rho_g);
    auto ld = langlands_decompose(d, ps, mu_ul);
    const auto& pair = ld.pair;

    // A/B partitions by vanishing of restrictions to t1^g(w) and t2^g(w)
    auto cf = detail::chamber_factors(d, ps, f.w1);
    auto in01 = [&](const Vec& v) { return norm(sub(v, pair.p01(v))) <= 1e-7; };
    auto in02 = [&](const Vec& v) { return norm(sub(sub(v, pair.p01(v)), pair.p12(v))) <= 1e-7; };
    for (const Vec& v : cf.linear) {
        if (in01(v))
            cc.a01.push_back(v);
        else if (in02(v))
            cc.a12.push_back(v);
        else
            cc.a2.push_back(v);
    }
    for (const Vec& v : cf.td) {
        if (in01(v))
            cc.b01.push_back(v);
        else if (in02(v))
            cc.b12.push_back(v);
        else
            cc.b2.push_back(v);
    }

    // cardinality identities of the partitions against the parabolic dims
    auto ldw = levi_data(d, ps, pair.delta1, pair.delta2);
    int dim_u01 = 0;
    for (int i : ps.pos_g) {
        const auto& r = d.roots[static_cast<std::size_t>(i)];
        if (detail::root_in_span(d, ps, r.v, pair.delta1)) dim_u01 += r.dim();
    }
    if (static_cast<int>(cc.a01.size() + cc.b01.size()) != dim_u01)
        throw TheoremViolation("chamber_constants: |A01|+|B01| != dim u_0^1(w)");
    if (static_cast<int>(cc.a12.size() + cc.b12.size()) != ldw.dim_u12)
        throw TheoremViolation("chamber_constants: |A12|+|B12| != dim u_1^2(w)");
    if (static_cast<int>(cc.a2.size() + cc.b2.size()) != ldw.dim_u2)
        throw TheoremViolation("chamber_constants: |A2|+|B2| != dim u_2(w)");

    // alpha_0^1(w): Td cone integral over C01(w) with exponent <., mu_ul_0^1(w)>
    Vec mu01 = ld.v01;  // the strictly negative part
    std::vector<Vec> gens01;
    for (int p : pair.delta1) gens01.push_back(pair.p01(ps.coweights[static_cast<std::size_t>(p)]));
    Estimate a01 = detail::td_cone_integral(cc.a01, cc.b01, mu01, gens01, opt.tol, detail::derive_seed(seed, 1),
                                            opt.mc_samples, opt.max_evals);

    // alpha_1^2(w): gaussian cone integral over C12(w)
    Estimate a12;
    if (pair.delta12.empty() && cc.a12.empty() && cc.b12.empty()) {
        a12 = Estimate::exact(1.0);
    } else {
        ConeIntegrandSpec spec;
        for (const Vec& v : cc.a12) spec.linear_factors.push_back({v, 1});
        for (const Vec& v : cc.b12) spec.linear_factors.push_back({v, 1});
        spec.gaussian_weight = 1.0;
        a12 = integrate_cone_mc(spec, pair.delta12_dual, detail::derive_seed(seed, 2), opt.mc_samples);
    }

    // alpha_2^g(w): plain product at mu_ul_2^g(w)
    double a2 = 1.0;
    for (const Vec& v : cc.a2) a2 *= dot(v, ld.v2);
    for (const Vec& v : cc.b2) a2 *= dot(v, ld.v2);

    cc.alpha_w = scale_estimate(mul_estimates(a01, a12), a2);
    if (cc.alpha_w.value <= 0) throw TheoremViolation("chamber_constants: alpha_w must be positive");

    int r01w = static_cast<int>(pair.b01.size());
    cc.beta_w = -0.5 * r01w + 0.5 * ldw.dim_u12 + ldw.dim_u2;
    cc.gamma_w = 0.5 * norm2(ld.v2);
    return cc;
}

struct TheoremReport {
    std::vector<ChamberConstants> chambers;
    std::vector<std::size_t> w02_members;  // indices into `chambers`
    std::vector<std::size_t> w01_members;
    double sum_identity_lhs = 0.0;
    double sum_identity_rhs = 0.0;
    double sum_identity_sigma = 0.0;
    bool gamma_ordering_ok = false;
    bool beta_ordering_ok = false;
    bool sum_identity_ok = false;
};

// Orders (Thms on gamma_w and beta_w) and the sum identity over W_0^1.
inline TheoremReport verify_theorems(const CartanDatum& d, const PositiveSystem& ps, const HighestWeight& lambda,
                                     std::uint64_t seed, const HeatOptions& opt = {}) {
    auto cls = classify(d, ps, lambda);
    auto consts = asymptotic_constants(d, ps, lambda, seed, opt);
    Vec mu = add(lambda.lambda, ps.rho_k);
    auto wg = weyl_group(d, WhichGroup::g);

    // W_0^1 and W_0^2 as generated subgroups of reflections
    auto members_of = [&](const std::vector<int>& delta) {
        std::vector<WeylElement> gens;
        for (int p : delta)
            gens.push_back(reflection(d, d.roots[static_cast<std::size_t>(ps.simple[static_cast<std::size_t>(p)])].v));
        return generate_group(d, gens);
    };
    auto w01 = members_of(cls.decomp.pair.delta1);
    auto w02 = members_of(cls.decomp.pair.delta2);
    auto contains = [](const std::vector<WeylElement>& lst, const WeylElement& w) {
        for (const auto& e : lst)
            if (same_element(e, w)) return true;
        return false;
    };

    TheoremReport rep;
    rep.gamma_ordering_ok = true;
    rep.beta_ordering_ok = true;
    double sum = 0.0, var = 0.0;
    for (std::size_t i = 0; i < wg.size(); ++i) {
        auto cc = chamber_constants(d, ps, mu, wg[i], detail::derive_seed(seed, 100 + i), opt);
        bool in2 = contains(w02, wg[i]);
        bool in1 = contains(w01, wg[i]);
        if (in2) rep.w02_members.push_back(i);
        if (in1) rep.w01_members.push_back(i);

        if (cc.gamma_w > consts.gamma2 + 1e-9) rep.gamma_ordering_ok = false;
        if ((std::fabs(cc.gamma_w - consts.gamma2) <= 1e-9) != in2) rep.gamma_ordering_ok = false;
        if (in2) {
            double bw = std::round(2.0 * cc.beta_w) / 2.0;
            double b1 = std::round(2.0 * consts.beta1) / 2.0;
            if (bw > b1) rep.beta_ordering_ok = false;
            if ((bw == b1) != in1) rep.beta_ordering_ok = false;
        }
        if (in1) {
            sum += cc.eps_w2 * cc.alpha_w.real();
            var += cc.alpha_w.real_err() * cc.alpha_w.real_err();
        }
        rep.chambers.push_back(std::move(cc));
    }
    rep.sum_identity_lhs = sum;
    rep.sum_identity_rhs = consts.alpha0.real();
    rep.sum_identity_sigma = std::sqrt(var + consts.alpha0.real_err() * consts.alpha0.real_err());
    rep.sum_identity_ok =
        std::fabs(sum - rep.sum_identity_rhs) <= 3.0 * rep.sum_identity_sigma + 1e-9 * std::fabs(rep.sum_identity_rhs);
    if (!rep.gamma_ordering_ok) throw TheoremViolation("gamma_w ordering (equality set != W_0^2)");
    if (!rep.beta_ordering_ok) throw TheoremViolation("beta_w ordering (equality set != W_0^1)");
    if (!rep.sum_identity_ok) throw TheoremViolation("sum identity over W_0^1 fails beyond 3 sigma");
    return rep;
}

struct SpectrumReport {
    double bottom = 0.0;  // -2 gamma2_bar
    bool has_gap = false;
    double atom_mass = 0.0;
    std::string tempered_note;
};

inline SpectrumReport classify_spectrum(const AsymptoticConstants& c) {
    SpectrumReport r;
    r.bottom = -2.0 * c.gamma2_bar;
    if (std::fabs(c.beta1_bar) < 1e-12) {
        r.has_gap = true;
        r.atom_mass = c.alpha0_bar.real();
    } else {
        r.has_gap = false;
        r.atom_mass = 0.0;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "exists an irreducible unitary tempered representation pi with pi(C^g) = %.12g containing E",
                  r.bottom);
    r.tempered_note = buf;
    return r;
}

// Formal degree of the discrete series in the equal-rank regular case:
// pi^g(v / 2pi) / pi^k(rho^k / 2pi) with multiplicity exponents in pi^g.
inline double formal_degree(const CartanDatum& d, const PositiveSystem& ps, const HighestWeight& lambda) {
    auto cls = classify(d, ps, lambda);
    if (!cls.regular || !cls.equal_rank)
        throw NotDiscreteSeriesCase("formal_degree: weight is not equal-rank regular");
    Vec v = lambda.lambda;
    axpy(v, 2.0, ps.rho_k);
    v = sub(v, ps.rho_g);
    double num = 1.0;
    for (int i : ps.pos_g) {
        const auto& r = d.roots[static_cast<std::size_t>(i)];
        num *= std::pow(dot(r.v, v) / (2.0 * M_PI), r.dim());
    }
    double den = 1.0;
    for (int i : ps.pos_k) den *= dot(d.roots[static_cast<std::size_t>(i)].v, ps.rho_k) / (2.0 * M_PI);
    return num / den;
}

}  // namespace heattrace
