#pragma once

// Positive systems, chamber geometry, cone projection, Langlands'
// combinatorial lemma, Vogan's Lambda map, the W(g,k) factorization and
// theta-stable parabolic bookkeeping.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "heattrace/errors.hpp"
#include "heattrace/rootdata.hpp"
#include "heattrace/vec.hpp"

namespace heattrace {

// A compatible positive system R+(k) <= R+(g) with its simple roots,
// fundamental coweights and rho-data.
struct PositiveSystem {
    std::vector<int> pos_g;   // indices into datum.roots
    std::vector<int> pos_k;   // subset of pos_g with mult_k = 1
    std::vector<int> simple;  // indices into datum.roots, Delta_0^g
    std::vector<Vec> coweights;  // omega_alpha, aligned with `simple`
    Vec rho_g;
    Vec rho_k;
    double c_g = 0.0;
    std::vector<std::string> tie_break_trace;  // per root pair: which rule fixed the sign

    const Vec& root(const CartanDatum& d, int idx) const { return d.roots[static_cast<std::size_t>(idx)].v; }
};

struct RhoData {
    Vec rho_g;
    Vec rho_k;
    double c_g;
};

inline RhoData rho_data(const CartanDatum& d, const PositiveSystem& ps) {
    RhoData r{zero_vec(static_cast<std::size_t>(d.r0)), zero_vec(static_cast<std::size_t>(d.r0)), 0.0};
    for (int i : ps.pos_g) axpy(r.rho_g, 0.5 * d.roots[static_cast<std::size_t>(i)].dim(), d.roots[static_cast<std::size_t>(i)].v);
    for (int i : ps.pos_k) axpy(r.rho_k, 0.5, d.roots[static_cast<std::size_t>(i)].v);
    r.c_g = norm2(r.rho_g);
    return r;
}

namespace detail {

inline std::vector<Vec> dual_basis(const std::vector<Vec>& roots) {
    // omega_beta solving <alpha, omega_beta> = delta inside span(roots)
    const std::size_t k = roots.size();
    std::vector<double> gram(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) gram[i * k + j] = dot(roots[i], roots[j]);
    std::vector<Vec> duals(k);
    for (std::size_t b = 0; b < k; ++b) {
        std::vector<double> rhs(k, 0.0);
        rhs[b] = 1.0;
        auto c = solve_linear(gram, rhs, static_cast<int>(k), "simple-root Gram matrix");
        Vec w = zero_vec(roots[0].size());
        for (std::size_t j = 0; j < k; ++j) axpy(w, c[j], roots[j]);
        duals[b] = w;
    }
    return duals;
}

}  // namespace detail

// Assemble a PositiveSystem from a chosen set of positive roots (one per +-
// pair).  Validates compatibility and computes simple roots, coweights and
// rho-data.
inline PositiveSystem make_positive_system(const CartanDatum& d, std::vector<int> pos_g,
                                           std::vector<std::string> trace = {}) {
    PositiveSystem ps;
    ps.pos_g = std::move(pos_g);
    if (2 * ps.pos_g.size() != d.roots.size())
        throw IncompatibleSystem("positive system must contain one root per +- pair");
    for (int i : ps.pos_g)
        if (d.roots[static_cast<std::size_t>(i)].mult_k == 1) ps.pos_k.push_back(i);
    ps.simple = detail::simple_subset(d, ps.pos_g);
    std::sort(ps.simple.begin(), ps.simple.end(), [&](int a, int b) {
        return lex_compare(d.roots[static_cast<std::size_t>(a)].v, d.roots[static_cast<std::size_t>(b)].v) < 0;
    });

    // every positive root must be a nonnegative combination of the simple ones
    std::vector<Vec> simple_vecs;
    for (int i : ps.simple) simple_vecs.push_back(d.roots[static_cast<std::size_t>(i)].v);
    auto duals = detail::dual_basis(simple_vecs);
    for (int i : ps.pos_g)
        for (const Vec& w : duals)
            if (dot(d.roots[static_cast<std::size_t>(i)].v, w) < -1e-7)
                throw IncompatibleSystem("positive root with negative simple coefficient");

    ps.coweights = duals;
    auto rho = rho_data(d, ps);
    ps.rho_g = rho.rho_g;
    ps.rho_k = rho.rho_k;
    ps.c_g = rho.c_g;
    ps.tie_break_trace = std::move(trace);
    return ps;
}

// Positive system making lambda^E + 2 rho^k dominant, containing the given
// positive k-roots.  Zero pairings are broken by two fixed generic vectors;
// the first keeps R+(k) on the positive side.
inline PositiveSystem choose_positive_system(const CartanDatum& d, const std::vector<int>& pos_k,
                                             const HighestWeight& lambda) {
    Vec rho_k = zero_vec(static_cast<std::size_t>(d.r0));
    for (int i : pos_k) axpy(rho_k, 0.5, d.roots[static_cast<std::size_t>(i)].v);
    Vec v = lambda.lambda;
    axpy(v, 2.0, rho_k);

    Vec g1 = rho_k;
    double p = 0.5;
    for (int i = 0; i < d.r0; ++i, p *= 0.5) g1[static_cast<std::size_t>(i)] += p;
    Vec g2 = zero_vec(static_cast<std::size_t>(d.r0));
    double q = 1.0 / 3.0;
    for (int i = 0; i < d.r0; ++i, q /= 3.0) g2[static_cast<std::size_t>(i)] = q;

    std::vector<int> pos;
    std::vector<std::string> trace;
    std::vector<char> taken(d.roots.size(), 0);
    for (std::size_t i = 0; i < d.roots.size(); ++i) {
        if (taken[i]) continue;
        int neg = d.find_root(scale(d.roots[i].v, -1.0));
        taken[i] = taken[static_cast<std::size_t>(neg)] = 1;
        int chosen;
        std::string rule;
        double dv = dot(d.roots[i].v, v);
        if (std::fabs(dv) > tau_zero) {
            chosen = dv > 0 ? static_cast<int>(i) : neg;
            rule = "lambda+2rho_k";
        } else {
            double d1 = dot(d.roots[i].v, g1);
            if (std::fabs(d1) > tau_zero) {
                chosen = d1 > 0 ? static_cast<int>(i) : neg;
                rule = "g1";
            } else {
                double d2 = dot(d.roots[i].v, g2);
                if (std::fabs(d2) <= tau_zero) throw IncompatibleSystem("tie-break vectors vanish on a root");
                chosen = d2 > 0 ? static_cast<int>(i) : neg;
                rule = "g2";
            }
        }
        pos.push_back(chosen);
        trace.push_back(rule);
    }

    // guard: the chosen system must keep pos_k positive
    for (int i : pos_k)
        if (std::find(pos.begin(), pos.end(), i) == pos.end())
            throw IncompatibleSystem("chosen system does not contain R+(k)");
    return make_positive_system(d, std::move(pos), std::move(trace));
}

// ---------------------------------------------------------------------------
// Weyl dimension and character

// Dominance and integrality of lambda for R+(k).
inline void validate_weight(const CartanDatum& d, const PositiveSystem& ps, const HighestWeight& lambda) {
    if (static_cast<int>(lambda.lambda.size()) != d.r0)
        throw Error("weight length does not match datum rank");
    for (int i : ps.pos_k) {
        const Vec& a = d.roots[static_cast<std::size_t>(i)].v;
        double pairing = dot(lambda.lambda, a);
        if (pairing < -tau_zero) throw Error("weight is not dominant for R+(k)");
        double c = 2.0 * pairing / dot(a, a);
        if (std::fabs(c - std::round(c)) > 1e-6) throw Error("weight is not integral for R+(k)");
    }
}

inline long long weyl_dimension(const CartanDatum& d, const PositiveSystem& ps, const HighestWeight& lambda) {
    double num = 1.0, den = 1.0;
    for (int i : ps.pos_k) {
        const Vec& a = d.roots[static_cast<std::size_t>(i)].v;
        num *= dot(add(lambda.lambda, ps.rho_k), a);
        den *= dot(ps.rho_k, a);
    }
    double dim = num / den;
    if (std::fabs(dim - std::round(dim)) > 1e-6)
        throw NonIntegralDimension("weyl_dimension residual exceeds 1e-6");
    return static_cast<long long>(std::llround(dim));
}

// Character of the K-representation with highest weight lambda at exp(-Y);
// Weyl character formula with a two-sided perturbation fallback on walls.
inline double character_value(const CartanDatum& d, const PositiveSystem& ps, const HighestWeight& lambda,
                              const Vec& y) {
    auto wk = weyl_group(d, WhichGroup::k);
    Vec mu = add(lambda.lambda, ps.rho_k);

    auto eval = [&](const Vec& y0) -> std::optional<double> {
        double den = 1.0;
        for (int i : ps.pos_k) {
            double a = dot(d.roots[static_cast<std::size_t>(i)].v, y0);
            den *= std::exp(-a / 2.0) - std::exp(a / 2.0);
            if (std::fabs(den) < 1e-300) return std::nullopt;
        }
        if (std::fabs(den) < 1e-12) return std::nullopt;
        double num = 0.0;
        for (const auto& w : wk) num += w.sign * std::exp(-dot(mu, act(w.matrix, y0)));
        return num / den;
    };

    if (auto v = eval(y)) return *v;
    Vec dir = ps.rho_k;
    if (is_zero(dir)) dir = detail::generic_positive_functional(d);
    dir = scale(dir, 1e-7 / norm(dir));
    auto a = eval(add(y, dir));
    auto b = eval(sub(y, dir));
    if (a && b) return 0.5 * (*a + *b);
    // Y = 0 (or a deep wall): fall back to the dimension
    return static_cast<double>(weyl_dimension(d, ps, lambda));
}

// ---------------------------------------------------------------------------
// cone projection (exact active-set enumeration)

// Projection of v onto C+(g) = {Y : <alpha,Y> >= 0 for alpha in Delta_0^g};
// the t_g directions are unconstrained.  Enumerates the 2^{|Delta|} candidate
// active sets and returns the unique feasible KKT point.
inline Vec cone_project(const CartanDatum& d, const PositiveSystem& ps, const Vec& v) {
    const std::size_t k = ps.simple.size();
    std::vector<Vec> alpha;
    for (int i : ps.simple) alpha.push_back(d.roots[static_cast<std::size_t>(i)].v);

    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::vector<std::size_t> act;
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (std::size_t{1} << i)) act.push_back(i);

        Vec cand = v;
        bool kkt_ok = true;
        if (!act.empty()) {
            const std::size_t m = act.size();
            std::vector<double> gram(m * m), rhs(m);
            for (std::size_t i = 0; i < m; ++i) {
                rhs[i] = -dot(alpha[act[i]], v);
                for (std::size_t j = 0; j < m; ++j) gram[i * m + j] = dot(alpha[act[i]], alpha[act[j]]);
            }
            auto mult = solve_linear(gram, rhs, static_cast<int>(m), "active-set Gram matrix");
            for (double lam : mult)
                if (lam < -tau_zero) kkt_ok = false;
            for (std::size_t i = 0; i < m; ++i) axpy(cand, mult[i], alpha[act[i]]);
        }
        if (!kkt_ok) continue;
        bool feasible = true;
        for (std::size_t i = 0; i < k; ++i)
            if (dot(alpha[i], cand) < -tau_zero) feasible = false;
        if (feasible) return cand;
    }
    throw Error("cone_project: no feasible KKT point (unexpected)");
}

// ---------------------------------------------------------------------------
// Langlands' combinatorial lemma

// Orthogonal split of t0 determined by delta1 <= delta2 <= Delta_0^g:
// t0 = t01 + t12 + t2g + tg, with orthonormal bases and the projections.
struct SimplePair {
    std::vector<int> delta1;  // positions into ps.simple
    std::vector<int> delta2;
    std::vector<Vec> b01, b12, b2g, bg;  // orthonormal bases
    std::vector<Vec> delta12;            // P12(alpha), alpha in delta2 \ delta1
    std::vector<Vec> delta12_dual;       // P12(omega_alpha)

    Vec p01(const Vec& v) const { return project_onto(b01, v); }
    Vec p12(const Vec& v) const { return project_onto(b12, v); }
    Vec p2g(const Vec& v) const { return project_onto(b2g, v); }
    Vec pg(const Vec& v) const { return project_onto(bg, v); }
};

inline SimplePair make_simple_pair(const CartanDatum& d, const PositiveSystem& ps, std::vector<int> delta1,
                                   std::vector<int> delta2) {
    SimplePair sp;
    sp.delta1 = std::move(delta1);
    sp.delta2 = std::move(delta2);
    std::sort(sp.delta1.begin(), sp.delta1.end());
    std::sort(sp.delta2.begin(), sp.delta2.end());

    const std::size_t n = static_cast<std::size_t>(d.r0);
    std::vector<Vec> v1, v2, vg;
    for (int p : sp.delta1) v1.push_back(d.roots[static_cast<std::size_t>(ps.simple[static_cast<std::size_t>(p)])].v);
    for (int p : sp.delta2) v2.push_back(d.roots[static_cast<std::size_t>(ps.simple[static_cast<std::size_t>(p)])].v);
    for (std::size_t p = 0; p < ps.simple.size(); ++p)
        vg.push_back(d.roots[static_cast<std::size_t>(ps.simple[p])].v);

    sp.b01 = orthonormal_basis(v1);
    // t12 = orthocomplement of t01 inside t02
    auto b02 = orthonormal_basis(v2);
    sp.b12.clear();
    for (const Vec& q : b02) {
        Vec w = q;
        for (const Vec& u : sp.b01) axpy(w, -dot(w, u), u);
        for (const Vec& u : sp.b12) axpy(w, -dot(w, u), u);
        double nw = norm(w);
        if (nw > 1e-10) sp.b12.push_back(scale(w, 1.0 / nw));
    }
    // t2g = orthocomplement of t02 inside t0g
    auto b0g = orthonormal_basis(vg);
    sp.b2g.clear();
    for (const Vec& q : b0g) {
        Vec w = q;
        for (const Vec& u : sp.b01) axpy(w, -dot(w, u), u);
        for (const Vec& u : sp.b12) axpy(w, -dot(w, u), u);
        for (const Vec& u : sp.b2g) axpy(w, -dot(w, u), u);
        double nw = norm(w);
        if (nw > 1e-10) sp.b2g.push_back(scale(w, 1.0 / nw));
    }
    std::vector<Vec> used = sp.b01;
    used.insert(used.end(), sp.b12.begin(), sp.b12.end());
    used.insert(used.end(), sp.b2g.begin(), sp.b2g.end());
    sp.bg = orthonormal_complement(used, n);

    for (int p : sp.delta2) {
        if (std::find(sp.delta1.begin(), sp.delta1.end(), p) != sp.delta1.end()) continue;
        const Vec& a = d.roots[static_cast<std::size_t>(ps.simple[static_cast<std::size_t>(p)])].v;
        sp.delta12.push_back(sp.p12(a));
        sp.delta12_dual.push_back(sp.p12(ps.coweights[static_cast<std::size_t>(p)]));
    }
    return sp;
}

struct LanglandsDecomposition {
    SimplePair pair;
    Vec v01;    // strictly negative combination of delta1
    Vec v2;     // dominant part, equals the chamber projection
    Vec vstar;  // cone projection of v (same as v2)
};

// Unique decomposition v = v01 + v2 of Prop. "exist uniquely two subsets".
inline LanglandsDecomposition langlands_decompose(const CartanDatum& d, const PositiveSystem& ps, const Vec& v) {
    Vec vstar = cone_project(d, ps, v);
    Vec diff = sub(vstar, v);  // in the nonnegative span of Delta_0^g

    std::vector<Vec> simple_vecs;
    for (int i : ps.simple) simple_vecs.push_back(d.roots[static_cast<std::size_t>(i)].v);
    Vec coeff(simple_vecs.size(), 0.0);
    if (!simple_vecs.empty()) {
        const std::size_t k = simple_vecs.size();
        std::vector<double> gram(k * k), rhs(k);
        for (std::size_t i = 0; i < k; ++i) {
            rhs[i] = dot(simple_vecs[i], diff);
            for (std::size_t j = 0; j < k; ++j) gram[i * k + j] = dot(simple_vecs[i], simple_vecs[j]);
        }
        auto c = solve_linear(gram, rhs, static_cast<int>(k), "simple-root Gram matrix");
        for (std::size_t i = 0; i < k; ++i) coeff[i] = c[i];
    }

    std::vector<int> delta1, delta2;
    for (std::size_t i = 0; i < ps.simple.size(); ++i) {
        double c = coeff[i];
        if (c > tau_zero && c < 10 * tau_zero)
            throw ToleranceAmbiguity("langlands_decompose: expansion coefficient inside the ambiguity band");
        if (c < -tau_zero)
            throw Error("langlands_decompose: negative expansion coefficient of v*-v (projection bug)");
        if (c > tau_zero) delta1.push_back(static_cast<int>(i));
        double pv = dot(d.roots[static_cast<std::size_t>(ps.simple[i])].v, vstar);
        if (pv > tau_zero && pv < 10 * tau_zero)
            throw ToleranceAmbiguity("langlands_decompose: wall pairing inside the ambiguity band");
        if (std::fabs(pv) <= tau_zero) delta2.push_back(static_cast<int>(i));
    }
    for (int p : delta1)
        if (std::find(delta2.begin(), delta2.end(), p) == delta2.end())
            throw Error("langlands_decompose: delta1 not contained in delta2");

    LanglandsDecomposition ld;
    ld.pair = make_simple_pair(d, ps, delta1, delta2);
    ld.vstar = vstar;
    ld.v2 = vstar;
    ld.v01 = sub(v, vstar);
    return ld;
}

// ---------------------------------------------------------------------------
// Vogan's Lambda map

// Lambda(mu) = (mu - rho^g)_2 computed in a chamber containing mu.  When mu
// is not dominant the decomposition is carried out for w mu in the standard
// chamber and mapped back.
inline Vec lambda_map(const CartanDatum& d, const PositiveSystem& ps, const Vec& mu) {
    auto dominant = [&](const Vec& x) {
        for (int i : ps.pos_g)
            if (dot(d.roots[static_cast<std::size_t>(i)].v, x) < -tau_zero) return false;
        return true;
    };
    if (dominant(mu)) {
        return langlands_decompose(d, ps, sub(mu, ps.rho_g)).v2;
    }
    for (const auto& w : weyl_group(d, WhichGroup::g)) {
        Vec wmu = act(w.matrix, mu);
        if (dominant(wmu)) {
            Vec v2 = langlands_decompose(d, ps, sub(wmu, ps.rho_g)).v2;
            return act_transpose(w.matrix, v2);
        }
    }
    throw Error("lambda_map: no chamber contains mu (unexpected)");
}

// ---------------------------------------------------------------------------
// W(g,k) and the w = w1 w2 factorization

inline std::vector<WeylElement> wgk_set(const CartanDatum& d, const PositiveSystem& ps) {
    auto wg = weyl_group(d, WhichGroup::g);
    std::vector<WeylElement> reps;
    for (const auto& w : wg) {
        bool ok = true;
        for (int b : ps.pos_k) {
            const Vec& beta = d.roots[static_cast<std::size_t>(b)].v;
            for (const Vec& om : ps.coweights)
                if (dot(beta, act_transpose(w.matrix, om)) < -tau_zero) {
                    ok = false;
                    break;
                }
            if (!ok) break;
        }
        if (ok) reps.push_back(w);
    }
    auto wk = weyl_group(d, WhichGroup::k);
    if (reps.size() * wk.size() != wg.size()) throw Error("wgk_set: |W(g,k)| * |W(k)| != |W(g)|");
    return reps;
}

struct WFactorization {
    WeylElement w1;  // in W(g,k)
    WeylElement w2;  // in W(k)
};

// Unique w = w1 w2 with w1 in W(g,k), w2 in W(k).
inline WFactorization decompose_w(const CartanDatum& d, const PositiveSystem& ps, const WeylElement& w) {
    // generic interior point of C+(g)
    Vec u = zero_vec(static_cast<std::size_t>(d.r0));
    for (std::size_t i = 0; i < ps.coweights.size(); ++i) axpy(u, 1.0 + 0.137 * static_cast<double>(i), ps.coweights[i]);
    Vec z = act_transpose(w.matrix, u);

    auto wk = weyl_group(d, WhichGroup::k);
    const WeylElement* w2 = nullptr;
    for (const auto& cand : wk) {
        Vec cz = act(cand.matrix, z);
        bool kdom = true;
        for (int b : ps.pos_k)
            if (dot(d.roots[static_cast<std::size_t>(b)].v, cz) < -tau_zero) {
                kdom = false;
                break;
            }
        if (kdom) {
            w2 = &cand;
            break;
        }
    }
    if (!w2) throw Error("decompose_w: no element of W(k) makes the chamber k-dominant");

    WFactorization f;
    f.w2 = *w2;
    f.w1 = *w2;
    f.w1.matrix = mul(w.matrix, transpose(w2->matrix));
    f.w1.sign = w.sign * w2->sign;
    f.w1.word.clear();
    auto perm = detail::root_permutation(d, f.w1.matrix);
    if (!perm) throw Error("decompose_w: w1 does not permute roots");
    f.w1.perm = *perm;
    // w = w1 w2 exactly
    Mat prod = mul(f.w1.matrix, f.w2.matrix);
    for (std::size_t i = 0; i < prod.a.size(); ++i)
        if (std::fabs(prod.a[i] - w.matrix.a[i]) > 1e-8) throw Error("decompose_w: factorization mismatch");
    return f;
}

// ---------------------------------------------------------------------------
// Levi data for delta1 <= delta2

struct LeviData {
    std::vector<int> delta1;    // positions into ps.simple
    std::vector<int> roots_l1;  // indices into datum.roots: R(g) in span(delta1)
    std::vector<int> pos_l1;    // positive part
    std::vector<int> pos_k1;    // k-part of pos_l1
    int dim_u12 = 0;
    int dim_u2 = 0;
    int dim_m1 = 0;
    Vec lambda_restricted;  // lambda^E restricted to t01
    double beta1_bar = 0.0;
};

namespace detail {

// Positive roots lying in span(delta_subset), by simple-coefficient support.
inline bool root_in_span(const CartanDatum& d, const PositiveSystem& ps, const Vec& root,
                         const std::vector<int>& subset) {
    std::vector<Vec> sv;
    for (int i : ps.simple) sv.push_back(d.roots[static_cast<std::size_t>(i)].v);
    if (sv.empty()) return false;
    const std::size_t k = sv.size();
    std::vector<double> gram(k * k), rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
        rhs[i] = dot(sv[i], root);
        for (std::size_t j = 0; j < k; ++j) gram[i * k + j] = dot(sv[i], sv[j]);
    }
    auto c = solve_linear(gram, rhs, static_cast<int>(k), "simple-root Gram matrix");
    for (std::size_t i = 0; i < k; ++i) {
        bool inset = std::find(subset.begin(), subset.end(), static_cast<int>(i)) != subset.end();
        if (!inset && std::fabs(c[i]) > 1e-7) return false;
    }
    return true;
}

}  // namespace detail

inline LeviData levi_data(const CartanDatum& d, const PositiveSystem& ps, const std::vector<int>& delta1,
                          const std::vector<int>& delta2, const Vec& lambda = {}) {
    LeviData ld;
    ld.delta1 = delta1;

    for (std::size_t i = 0; i < d.roots.size(); ++i)
        if (detail::root_in_span(d, ps, d.roots[i].v, delta1)) ld.roots_l1.push_back(static_cast<int>(i));
    for (int i : ps.pos_g) {
        if (std::find(ld.roots_l1.begin(), ld.roots_l1.end(), i) == ld.roots_l1.end()) continue;
        ld.pos_l1.push_back(i);
        if (d.roots[static_cast<std::size_t>(i)].mult_k == 1) ld.pos_k1.push_back(i);
    }

    int p_part = 0, k_part = 0;
    for (int i : ld.pos_l1) {
        p_part += 2 * d.roots[static_cast<std::size_t>(i)].mult_p;  // both signs
        k_part += 2 * d.roots[static_cast<std::size_t>(i)].mult_k;
    }
    // rank of span(delta1)
    std::vector<Vec> v1;
    for (int p : delta1) v1.push_back(d.roots[static_cast<std::size_t>(ps.simple[static_cast<std::size_t>(p)])].v);
    int rank1 = static_cast<int>(orthonormal_basis(v1).size());
    ld.dim_m1 = d.dim_a + p_part + rank1 + k_part;

    for (int i : ps.pos_g) {
        bool in1 = detail::root_in_span(d, ps, d.roots[static_cast<std::size_t>(i)].v, delta1);
        bool in2 = detail::root_in_span(d, ps, d.roots[static_cast<std::size_t>(i)].v, delta2);
        if (in2 && !in1) ld.dim_u12 += d.roots[static_cast<std::size_t>(i)].dim();
        if (!in2) ld.dim_u2 += d.roots[static_cast<std::size_t>(i)].dim();
    }
    ld.beta1_bar = -0.5 * (ld.dim_m1 + ld.dim_u12);

    // rho restriction identities: rho^{k1_s} = rho^k|t01 and rho^{m1} = rho^g|t01
    auto b01 = orthonormal_basis(v1);
    Vec rk1 = zero_vec(static_cast<std::size_t>(d.r0)), rm1 = zero_vec(static_cast<std::size_t>(d.r0));
    for (int i : ld.pos_k1) axpy(rk1, 0.5, d.roots[static_cast<std::size_t>(i)].v);
    for (int i : ld.pos_l1) axpy(rm1, 0.5 * d.roots[static_cast<std::size_t>(i)].dim(), d.roots[static_cast<std::size_t>(i)].v);
    if (!approx_eq(project_onto(b01, ps.rho_k), rk1, 1e-7))
        throw Error("levi_data: rho^{k1} restriction identity fails");
    if (!approx_eq(project_onto(b01, ps.rho_g), rm1, 1e-7))
        throw Error("levi_data: rho^{m1} restriction identity fails");

    if (!lambda.empty()) ld.lambda_restricted = project_onto(b01, lambda);
    return ld;
}

// ---------------------------------------------------------------------------
// quasi-split reduction

struct QuasiSplitReduction {
    CartanDatum datum;     // (l2, k2) with t_g enlarged by t2g
    HighestWeight weight;  // lambda^{E,2} in the new coordinates
    int m2 = 0;
    int n2 = 0;
    int p_drop = 0;             // m - m2
    int k_drop = 0;             // n - n2
    bool dim_identity_holds = false;  // p_drop == k_drop; fails when the p/k
                                      // multiplicities off R_0^2 are unbalanced
};

// Sub-datum for the Levi l2 attached to delta2 of lambda^E + 2rho^k - rho^g.
// Coordinates are rotated so span(delta2) occupies the leading axes and the
// enlarged t_g the trailing ones; asserts m - m2 = n - n2.
inline QuasiSplitReduction reduce_to_quasi_split(const CartanDatum& d, const PositiveSystem& ps,
                                                 const HighestWeight& lambda) {
    Vec v = lambda.lambda;
    axpy(v, 2.0, ps.rho_k);
    v = sub(v, ps.rho_g);
    auto ld = langlands_decompose(d, ps, v);
    const auto& delta2 = ld.pair.delta2;

    std::vector<Vec> v2;
    for (int p : delta2) v2.push_back(d.roots[static_cast<std::size_t>(ps.simple[static_cast<std::size_t>(p)])].v);
    auto b02 = orthonormal_basis(v2);
    auto rest = orthonormal_complement(b02, static_cast<std::size_t>(d.r0));
    std::vector<Vec> frame = b02;
    frame.insert(frame.end(), rest.begin(), rest.end());

    auto rotate = [&frame](const Vec& x) {
        Vec out(frame.size());
        for (std::size_t i = 0; i < frame.size(); ++i) out[i] = dot(x, frame[i]);
        return out;
    };

    QuasiSplitReduction red;
    red.datum.name = d.name + "-quasisplit";
    red.datum.r0 = d.r0;
    red.datum.dim_a = d.dim_a;
    red.datum.dim_tg = d.r0 - static_cast<int>(b02.size());
    for (std::size_t i = 0; i < d.roots.size(); ++i) {
        if (!detail::root_in_span(d, ps, d.roots[i].v, delta2)) continue;
        RestrictedRoot r = d.roots[i];
        r.v = rotate(r.v);
        for (int c = red.datum.r0 - red.datum.dim_tg; c < red.datum.r0; ++c) {
            if (std::fabs(r.v[static_cast<std::size_t>(c)]) > 1e-9)
                throw Error("reduce_to_quasi_split: rotated root leaks into t_g");
            r.v[static_cast<std::size_t>(c)] = 0.0;
        }
        red.datum.roots.push_back(r);
    }
    require_valid(red.datum);

    red.weight.lambda = rotate(project_onto(b02, lambda.lambda));
    for (int c = red.datum.r0 - red.datum.dim_tg; c < red.datum.r0; ++c)
        red.weight.lambda[static_cast<std::size_t>(c)] = 0.0;
    red.weight.lambda_a = lambda.lambda_a;

    red.m2 = red.datum.dim_p();
    red.n2 = red.datum.dim_k();
    red.p_drop = d.dim_p() - red.m2;
    red.k_drop = d.dim_k() - red.n2;
    red.dim_identity_holds = (red.p_drop == red.k_drop);
    return red;
}

}  // namespace heattrace
