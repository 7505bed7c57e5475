#pragma once

// Dense vectors in t0 (identified with its dual via the form B) and the
// small linear-algebra kit used throughout: Gram solves, orthonormal bases,
// determinants.  All dimensions here are tiny (rank <= 6), so everything is
// plain Gaussian elimination on std::vector storage.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "heattrace/errors.hpp"

namespace heattrace {

using Vec = std::vector<double>;

// Default absolute tolerance for "vanishing pairing" tests.
inline constexpr double tau_zero = 1e-9;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec add(const Vec& a, const Vec& b) {
    Vec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline Vec scale(const Vec& a, double c) {
    Vec r = a;
    for (double& x : r) x *= c;
    return r;
}

inline void axpy(Vec& y, double c, const Vec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

inline Vec zero_vec(std::size_t n) { return Vec(n, 0.0); }

inline bool is_zero(const Vec& a, double tol = tau_zero) {
    for (double x : a)
        if (std::fabs(x) > tol) return false;
    return true;
}

inline bool approx_eq(const Vec& a, const Vec& b, double tol = tau_zero) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::fabs(a[i] - b[i]) > tol) return false;
    return true;
}

// Lexicographic comparison with a dead band so that equal-up-to-roundoff
// entries compare equal.
inline int lex_compare(const Vec& a, const Vec& b, double tol = 1e-9) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i] - tol) return -1;
        if (a[i] > b[i] + tol) return 1;
    }
    return 0;
}

// Square matrix, row major.
struct Mat {
    int n = 0;
    std::vector<double> a;  // n*n entries

    Mat() = default;
    explicit Mat(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    static Mat identity(int n_) {
        Mat m(n_);
        for (int i = 0; i < n_; ++i) m.at(i, i) = 1.0;
        return m;
    }
};

inline Vec act(const Mat& m, const Vec& v) {
    Vec r(static_cast<std::size_t>(m.n), 0.0);
    for (int i = 0; i < m.n; ++i) {
        double s = 0;
        for (int j = 0; j < m.n; ++j) s += m.at(i, j) * v[static_cast<std::size_t>(j)];
        r[static_cast<std::size_t>(i)] = s;
    }
    return r;
}

// For orthogonal m this is the inverse action.
inline Vec act_transpose(const Mat& m, const Vec& v) {
    Vec r(static_cast<std::size_t>(m.n), 0.0);
    for (int j = 0; j < m.n; ++j) {
        double s = 0;
        for (int i = 0; i < m.n; ++i) s += m.at(i, j) * v[static_cast<std::size_t>(i)];
        r[static_cast<std::size_t>(j)] = s;
    }
    return r;
}

inline Mat mul(const Mat& x, const Mat& y) {
    Mat r(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int k = 0; k < x.n; ++k) {
            double v = x.at(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < x.n; ++j) r.at(i, j) += v * y.at(k, j);
        }
    return r;
}

inline Mat transpose(const Mat& m) {
    Mat r(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) r.at(i, j) = m.at(j, i);
    return r;
}

// Solve a (small) dense linear system in place; throws on singular input.
inline std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b, int n,
                                        const std::string& what = "linear system") {
    std::vector<int> piv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) piv[static_cast<std::size_t>(i)] = i;
    for (int c = 0; c < n; ++c) {
        int best = c;
        double bv = std::fabs(a[static_cast<std::size_t>(c) * n + c]);
        for (int r = c + 1; r < n; ++r) {
            double v = std::fabs(a[static_cast<std::size_t>(r) * n + c]);
            if (v > bv) {
                bv = v;
                best = r;
            }
        }
        if (bv < 1e-13) throw Error("singular " + what);
        if (best != c) {
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<std::size_t>(c) * n + j], a[static_cast<std::size_t>(best) * n + j]);
            std::swap(b[static_cast<std::size_t>(c)], b[static_cast<std::size_t>(best)]);
        }
        double d = a[static_cast<std::size_t>(c) * n + c];
        for (int r = c + 1; r < n; ++r) {
            double f = a[static_cast<std::size_t>(r) * n + c] / d;
            if (f == 0.0) continue;
            for (int j = c; j < n; ++j)
                a[static_cast<std::size_t>(r) * n + j] -= f * a[static_cast<std::size_t>(c) * n + j];
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(c)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int j = r + 1; j < n; ++j) s -= a[static_cast<std::size_t>(r) * n + j] * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r) * n + r];
    }
    return x;
}

inline double determinant(Mat m) {
    double det = 1.0;
    for (int c = 0; c < m.n; ++c) {
        int best = c;
        double bv = std::fabs(m.at(c, c));
        for (int r = c + 1; r < m.n; ++r)
            if (std::fabs(m.at(r, c)) > bv) {
                bv = std::fabs(m.at(r, c));
                best = r;
            }
        if (bv == 0.0) return 0.0;
        if (best != c) {
            for (int j = 0; j < m.n; ++j) std::swap(m.at(c, j), m.at(best, j));
            det = -det;
        }
        det *= m.at(c, c);
        for (int r = c + 1; r < m.n; ++r) {
            double f = m.at(r, c) / m.at(c, c);
            for (int j = c; j < m.n; ++j) m.at(r, j) -= f * m.at(c, j);
        }
    }
    return det;
}

// Modified Gram-Schmidt; returns an orthonormal basis of span(vs).
inline std::vector<Vec> orthonormal_basis(const std::vector<Vec>& vs, double tol = 1e-10) {
    std::vector<Vec> q;
    for (const Vec& v : vs) {
        Vec w = v;
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& u : q) axpy(w, -dot(w, u), u);
        double nw = norm(w);
        if (nw > tol) q.push_back(scale(w, 1.0 / nw));
    }
    return q;
}

// Completes basis `q` (orthonormal) to an orthonormal basis of R^n; the new
// vectors span the orthogonal complement.
inline std::vector<Vec> orthonormal_complement(const std::vector<Vec>& q, std::size_t n, double tol = 1e-10) {
    std::vector<Vec> all = q;
    std::vector<Vec> comp;
    for (std::size_t i = 0; i < n; ++i) {
        Vec e = zero_vec(n);
        e[i] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& u : all) axpy(e, -dot(e, u), u);
        double ne = norm(e);
        if (ne > tol) {
            e = scale(e, 1.0 / ne);
            all.push_back(e);
            comp.push_back(e);
        }
    }
    return comp;
}

// Orthogonal projection of v onto span of orthonormal rows qs.
inline Vec project_onto(const std::vector<Vec>& qs, const Vec& v) {
    Vec r = zero_vec(v.size());
    for (const Vec& q : qs) axpy(r, dot(v, q), q);
    return r;
}

// Coordinates of v in the orthonormal basis qs (v assumed in the span).
inline Vec coords_in(const std::vector<Vec>& qs, const Vec& v) {
    Vec c(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) c[i] = dot(v, qs[i]);
    return c;
}

}  // namespace heattrace
