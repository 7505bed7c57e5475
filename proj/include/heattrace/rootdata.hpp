#pragma once

// Restricted root system of (g,k): datum types, axiom validation, reflections
// and Weyl-group generation.  Vectors live in t0, identified with its dual by
// the invariant form; coordinates are with respect to a fixed orthonormal
// basis.  The last dim_tg coordinates span t_g (the compact part of the
// centre); every root must vanish there.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heattrace/errors.hpp"
#include "heattrace/vec.hpp"

namespace heattrace {

struct RestrictedRoot {
    Vec v;
    int mult_p = 0;  // dim p_alpha, 0 or 1
    int mult_k = 0;  // dim k_alpha, 0 or 1

    int dim() const { return mult_p + mult_k; }
};

struct CartanDatum {
    std::string name;
    int r0 = 0;      // dim t0
    int dim_a = 0;   // dim a
    int dim_tg = 0;  // dim t_g, carried by the last dim_tg coordinates
    std::vector<RestrictedRoot> roots;  // closed under negation

    int dim_p() const {
        int c = dim_a;
        for (const auto& r : roots) c += r.mult_p;
        return c;
    }
    int dim_k() const {
        int c = r0;
        for (const auto& r : roots) c += r.mult_k;
        return c;
    }

    int find_root(const Vec& v, double tol = 1e-7) const {
        for (std::size_t i = 0; i < roots.size(); ++i)
            if (approx_eq(roots[i].v, v, tol)) return static_cast<int>(i);
        return -1;
    }

    std::vector<int> k_root_indices() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < roots.size(); ++i)
            if (roots[i].mult_k == 1) out.push_back(static_cast<int>(i));
        return out;
    }
};

struct HighestWeight {
    Vec lambda;    // lambda^E, or lambda^V restricted to t0
    Vec lambda_a;  // lambda^V restricted to a; used by the novikov module
};

// Orthogonal map on t0 together with a reduced word (indices into the simple
// system it was generated from) and its sign.  `perm` records how the element
// permutes the datum's root list; two elements are equal iff their perms are.
struct WeylElement {
    Mat matrix;
    std::vector<int> word;
    int sign = 1;
    std::vector<int> perm;

    bool is_identity() const {
        for (std::size_t i = 0; i < perm.size(); ++i)
            if (perm[i] != static_cast<int>(i)) return false;
        return true;
    }
};

inline bool same_element(const WeylElement& a, const WeylElement& b) { return a.perm == b.perm; }

// ---------------------------------------------------------------------------
// validation

struct ValidationReport {
    struct Check {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Check> checks;
    int m = 0;  // dim p
    int n = 0;  // dim k

    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    std::string first_failure() const {
        for (const auto& c : checks)
            if (!c.pass) return c.name + ": " + c.detail;
        return {};
    }
};

namespace detail {

inline Vec reflect_vec(const Vec& alpha, const Vec& v) {
    return sub(v, scale(alpha, 2.0 * dot(alpha, v) / dot(alpha, alpha)));
}

// Permutation of the root list induced by an orthogonal map, or nullopt if
// the map is not a symmetry of the root set.
inline std::optional<std::vector<int>> root_permutation(const CartanDatum& d, const Mat& m) {
    std::vector<int> perm(d.roots.size());
    std::vector<char> used(d.roots.size(), 0);
    for (std::size_t i = 0; i < d.roots.size(); ++i) {
        int j = d.find_root(act(m, d.roots[i].v));
        if (j < 0 || used[static_cast<std::size_t>(j)]) return std::nullopt;
        perm[i] = j;
        used[static_cast<std::size_t>(j)] = 1;
    }
    return perm;
}

}  // namespace detail

inline ValidationReport validate_datum(const CartanDatum& d) {
    ValidationReport rep;
    auto push = [&rep](const std::string& name, bool pass, const std::string& detail = {}) {
        rep.checks.push_back({name, pass, detail});
    };

    // structural basics
    bool shape_ok = d.r0 >= 1 && d.dim_a >= 0 && d.dim_tg >= 0 && d.dim_tg <= d.r0;
    for (const auto& r : d.roots) {
        if (static_cast<int>(r.v.size()) != d.r0) shape_ok = false;
        for (double x : r.v)
            if (!std::isfinite(x)) shape_ok = false;
        if (is_zero(r.v)) shape_ok = false;
        if (r.mult_p < 0 || r.mult_p > 1 || r.mult_k < 0 || r.mult_k > 1 || r.dim() < 1) shape_ok = false;
    }
    push("structure", shape_ok, shape_ok ? "" : "bad coordinates or multiplicities");
    if (!shape_ok) return rep;

    // negation closure with matching multiplicities
    bool neg_ok = true;
    std::string neg_detail;
    for (const auto& r : d.roots) {
        int j = d.find_root(scale(r.v, -1.0));
        if (j < 0 || d.roots[static_cast<std::size_t>(j)].mult_p != r.mult_p ||
            d.roots[static_cast<std::size_t>(j)].mult_k != r.mult_k) {
            neg_ok = false;
            neg_detail = "root and its negative disagree";
            break;
        }
    }
    push("negation closure", neg_ok, neg_detail);

    // no duplicate roots
    bool dup_ok = true;
    for (std::size_t i = 0; i < d.roots.size() && dup_ok; ++i)
        for (std::size_t j = i + 1; j < d.roots.size(); ++j)
            if (approx_eq(d.roots[i].v, d.roots[j].v, 1e-7)) {
                dup_ok = false;
                break;
            }
    push("distinct roots", dup_ok);

    auto pair_str = [&d](std::size_t i, std::size_t j) {
        auto show = [](const Vec& v) {
            std::string s = "(";
            for (std::size_t c = 0; c < v.size(); ++c) s += (c ? "," : "") + std::to_string(v[c]);
            return s + ")";
        };
        return "roots " + show(d.roots[i].v) + ", " + show(d.roots[j].v);
    };

    // integrality 2<a,b>/<a,a> in Z
    bool int_ok = true;
    std::string int_detail;
    for (std::size_t i = 0; i < d.roots.size() && int_ok; ++i) {
        for (std::size_t j = 0; j < d.roots.size(); ++j) {
            double c = 2.0 * dot(d.roots[i].v, d.roots[j].v) / dot(d.roots[i].v, d.roots[i].v);
            if (std::fabs(c - std::round(c)) > 1e-6) {
                int_ok = false;
                int_detail = "pairing 2<a,b>/<a,a> not an integer for " + pair_str(i, j);
                break;
            }
        }
    }
    push("integrality", int_ok, int_detail);

    // reflection closure of R(g)
    bool refl_ok = true;
    std::string refl_detail;
    for (std::size_t i = 0; i < d.roots.size() && refl_ok; ++i) {
        for (std::size_t j = 0; j < d.roots.size(); ++j) {
            if (d.find_root(detail::reflect_vec(d.roots[i].v, d.roots[j].v)) < 0) {
                refl_ok = false;
                refl_detail = "s_a(b) escapes the root set for " + pair_str(i, j);
                break;
            }
        }
    }
    push("reflection closure of R(g)", refl_ok, refl_detail);

    // the k-root subset must itself be a root system
    bool k_ok = true;
    std::string k_detail;
    auto kroots = d.k_root_indices();
    auto is_kroot = [&](const Vec& v) {
        for (int i : kroots)
            if (approx_eq(d.roots[static_cast<std::size_t>(i)].v, v, 1e-7)) return true;
        return false;
    };
    for (int i : kroots) {
        for (int j : kroots) {
            Vec r = detail::reflect_vec(d.roots[static_cast<std::size_t>(i)].v, d.roots[static_cast<std::size_t>(j)].v);
            if (!is_kroot(r)) {
                k_ok = false;
                k_detail = "R(k) not closed under its own reflections";
                break;
            }
        }
        if (!k_ok) break;
    }
    push("reflection closure of R(k)", k_ok, k_detail);

    // dim g_alpha constant on W(g)-orbits; reflections generate W(g), so it
    // suffices to check every generator against every root
    bool mult_ok = refl_ok;
    std::string mult_detail;
    if (refl_ok) {
        for (std::size_t i = 0; i < d.roots.size() && mult_ok; ++i) {
            for (std::size_t b = 0; b < d.roots.size(); ++b) {
                int j = d.find_root(detail::reflect_vec(d.roots[i].v, d.roots[b].v));
                if (j >= 0 && d.roots[static_cast<std::size_t>(j)].dim() != d.roots[b].dim()) {
                    mult_ok = false;
                    mult_detail = "dim g_alpha changes along a W(g)-orbit for " + pair_str(i, b);
                    break;
                }
            }
        }
    }
    push("multiplicity invariance", mult_ok, mult_detail);

    // span dimension and the t_g coordinate convention
    std::vector<Vec> rv;
    for (const auto& r : d.roots) rv.push_back(r.v);
    auto basis = orthonormal_basis(rv);
    bool span_ok = static_cast<int>(basis.size()) == d.r0 - d.dim_tg;
    push("root span has dimension r0 - dim_tg", span_ok);
    bool tg_ok = true;
    for (const auto& r : d.roots)
        for (int c = d.r0 - d.dim_tg; c < d.r0; ++c)
            if (std::fabs(r.v[static_cast<std::size_t>(c)]) > tau_zero) tg_ok = false;
    push("roots vanish on the trailing t_g coordinates", tg_ok);

    rep.m = d.dim_p();
    rep.n = d.dim_k();
    push("dimension bookkeeping", rep.m >= 0 && rep.n >= d.r0);
    return rep;
}

inline void require_valid(const CartanDatum& d) {
    auto rep = validate_datum(d);
    if (!rep.ok()) throw DatumInvalid("datum '" + d.name + "' invalid: " + rep.first_failure());
}

// ---------------------------------------------------------------------------
// reflections and Weyl groups

inline WeylElement identity_element(const CartanDatum& d) {
    WeylElement w;
    w.matrix = Mat::identity(d.r0);
    w.sign = 1;
    w.perm.resize(d.roots.size());
    for (std::size_t i = 0; i < d.roots.size(); ++i) w.perm[i] = static_cast<int>(i);
    return w;
}

inline WeylElement reflection(const CartanDatum& d, const Vec& alpha) {
    if (d.find_root(alpha) < 0) throw NotARoot("reflection: not a root of the datum");
    WeylElement w;
    w.matrix = Mat::identity(d.r0);
    double aa = dot(alpha, alpha);
    for (int i = 0; i < d.r0; ++i)
        for (int j = 0; j < d.r0; ++j)
            w.matrix.at(i, j) -= 2.0 * alpha[static_cast<std::size_t>(i)] * alpha[static_cast<std::size_t>(j)] / aa;
    w.sign = -1;
    auto perm = detail::root_permutation(d, w.matrix);
    if (!perm) throw DatumInvalid("reflection does not permute the root set");
    w.perm = *perm;
    return w;
}

enum class WhichGroup { g, k };

namespace detail {

inline int matrix_sign(const Mat& m) {
    double det = determinant(m);
    if (std::fabs(std::fabs(det) - 1.0) > 1e-6) throw Error("weyl element determinant not +-1");
    return det > 0 ? 1 : -1;
}

// Left-to-right lexicographic order on matrices with a dead band.
inline bool matrix_less(const Mat& a, const Mat& b) {
    for (std::size_t i = 0; i < a.a.size(); ++i) {
        if (a.a[i] < b.a[i] - 1e-9) return true;
        if (a.a[i] > b.a[i] + 1e-9) return false;
    }
    return false;
}

}  // namespace detail

// Closure of the given generators under composition.  Words are with respect
// to the generator list; breadth-first traversal keeps them reduced.  The
// result is sorted lexicographically on matrices (identity first is not
// guaranteed by that order, so callers should not rely on position).
inline std::vector<WeylElement> generate_group(const CartanDatum& d, const std::vector<WeylElement>& gens,
                                               std::size_t cap = 100000) {
    std::map<std::vector<int>, std::size_t> seen;
    std::vector<WeylElement> out;
    WeylElement id = identity_element(d);
    seen[id.perm] = 0;
    out.push_back(id);
    std::size_t head = 0;
    while (head < out.size()) {
        WeylElement cur = out[head++];
        for (std::size_t gi = 0; gi < gens.size(); ++gi) {
            WeylElement nxt;
            nxt.matrix = mul(gens[gi].matrix, cur.matrix);
            nxt.word = cur.word;
            nxt.word.insert(nxt.word.begin(), static_cast<int>(gi));
            nxt.sign = cur.sign * gens[gi].sign;
            auto perm = detail::root_permutation(d, nxt.matrix);
            if (!perm) throw DatumInvalid("group generation: product does not permute roots");
            nxt.perm = *perm;
            if (seen.emplace(nxt.perm, out.size()).second) {
                if (out.size() >= cap) throw GroupTooLarge("weyl group exceeds configured cap");
                out.push_back(nxt);
            }
        }
    }
    for (auto& w : out) {
        if (detail::matrix_sign(w.matrix) != w.sign) throw Error("weyl sign does not match determinant");
        if ((w.word.size() % 2 == 0) != (w.sign > 0)) throw Error("weyl sign does not match word length");
    }
    std::sort(out.begin(), out.end(),
              [](const WeylElement& a, const WeylElement& b) { return detail::matrix_less(a.matrix, b.matrix); });
    return out;
}

// Positive members of a root-index set with respect to a fixed generic
// functional; used internally to pick simple roots for group generation.
namespace detail {

inline Vec generic_positive_functional(const CartanDatum& d) {
    // rho^k candidate plus decaying coordinate perturbations; strictly
    // nonzero on every root for any reasonable datum, by the second term
    Vec g = zero_vec(static_cast<std::size_t>(d.r0));
    double p = 0.5;
    for (int i = 0; i < d.r0; ++i, p *= 0.5) g[static_cast<std::size_t>(i)] = p;
    double q = 1.0 / 3.0;
    for (int i = 0; i < d.r0; ++i, q /= 3.0) g[static_cast<std::size_t>(i)] += q * 1e-4;
    return g;
}

// Indecomposable elements of a positive set.
inline std::vector<int> simple_subset(const CartanDatum& d, const std::vector<int>& pos) {
    std::vector<int> simple;
    for (int i : pos) {
        bool decomposable = false;
        for (int a : pos) {
            for (int b : pos) {
                Vec s = add(d.roots[static_cast<std::size_t>(a)].v, d.roots[static_cast<std::size_t>(b)].v);
                if (approx_eq(s, d.roots[static_cast<std::size_t>(i)].v, 1e-7)) {
                    decomposable = true;
                    break;
                }
            }
            if (decomposable) break;
        }
        if (!decomposable) simple.push_back(i);
    }
    return simple;
}

}  // namespace detail

// Full Weyl group W(g) or W(k), generated by the simple reflections of an
// internally chosen positive system (the group does not depend on the
// choice).
inline std::vector<WeylElement> weyl_group(const CartanDatum& d, WhichGroup which, std::size_t cap = 100000) {
    Vec g = detail::generic_positive_functional(d);
    std::vector<int> pos;
    for (std::size_t i = 0; i < d.roots.size(); ++i) {
        if (which == WhichGroup::k && d.roots[i].mult_k == 0) continue;
        if (dot(d.roots[i].v, g) > 0) pos.push_back(static_cast<int>(i));
    }
    std::vector<WeylElement> gens;
    for (int i : detail::simple_subset(d, pos)) gens.push_back(reflection(d, d.roots[static_cast<std::size_t>(i)].v));
    return generate_group(d, gens, cap);
}

}  // namespace heattrace
