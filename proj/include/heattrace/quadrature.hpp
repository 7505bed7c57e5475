#pragma once

// Numerical integration engines: an adaptive tensor Gauss-Kronrod rule on
// boxes, seeded Monte Carlo on convex cones, and the asymptotic-fit
// regression.  Integrands are evaluated in signed-log form so that factors
// like exp(t|mu|^2/2) never overflow a double; results carry an explicit
// log_scale.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <thread>
#include <utility>
#include <vector>

#include "heattrace/errors.hpp"
#include "heattrace/vec.hpp"

namespace heattrace {

// ---------------------------------------------------------------------------
// signed-log scalars

struct SignedLog {
    double log_abs = -std::numeric_limits<double>::infinity();
    double sign = 0.0;  // -1, 0, +1

    static SignedLog zero() { return {}; }
    static SignedLog from_double(double x) {
        if (x == 0.0) return {};
        return {std::log(std::fabs(x)), x > 0 ? 1.0 : -1.0};
    }
    double to_double() const { return sign == 0.0 ? 0.0 : sign * std::exp(log_abs); }
};

inline SignedLog operator*(const SignedLog& a, const SignedLog& b) {
    if (a.sign == 0.0 || b.sign == 0.0) return SignedLog::zero();
    return {a.log_abs + b.log_abs, a.sign * b.sign};
}

// Running sum of signed-log terms.  Keeps a floating reference scale so the
// mantissa sum stays representable no matter how large the terms get.
class LogAccumulator {
public:
    void add(double log_abs, double sign, double weight = 1.0) {
        if (sign == 0.0 || weight == 0.0) return;
        double w = std::fabs(weight);
        double s = sign * (weight < 0 ? -1.0 : 1.0);
        double l = log_abs + std::log(w);
        if (l == -std::numeric_limits<double>::infinity()) return;
        if (empty_) {
            scale_ = l;
            sum_ = s;
            empty_ = false;
            return;
        }
        if (l > scale_ + 40.0) {
            sum_ *= std::exp(scale_ - l);
            scale_ = l;
            sum_ += s;
        } else {
            sum_ += s * std::exp(l - scale_);
        }
        if (std::fabs(sum_) > 1e280) {
            scale_ += std::log(std::fabs(sum_));
            sum_ = sum_ > 0 ? 1.0 : -1.0;
        }
    }
    void add(const SignedLog& v, double weight = 1.0) { add(v.log_abs, v.sign, weight); }

    bool empty() const { return empty_; }
    // log of |sum|; -inf when the accumulated sum cancels to zero.
    double log_abs() const {
        if (empty_ || sum_ == 0.0) return -std::numeric_limits<double>::infinity();
        return scale_ + std::log(std::fabs(sum_));
    }
    double sign() const { return sum_ == 0.0 ? 0.0 : (sum_ > 0 ? 1.0 : -1.0); }
    SignedLog value() const { return {log_abs(), sign()}; }

private:
    double scale_ = 0.0;
    double sum_ = 0.0;
    bool empty_ = true;
};

// ---------------------------------------------------------------------------
// stable special functions (log form)

// log of A-hat(x) = (x/2)/sinh(x/2); even, positive, A(0)=1.
inline double log_a_hat(double x) {
    double u = std::fabs(x) / 2.0;
    if (u < 1e-4) {
        double u2 = u * u;
        return -std::log1p(u2 / 6.0 + u2 * u2 / 120.0);
    }
    // log(sinh u) = u + log1p(-exp(-2u)) - log 2
    double log_sinh = u + std::log1p(-std::exp(-2.0 * u)) - std::log(2.0);
    return std::log(u) - log_sinh;
}

// log of Td(x) = x/(1-exp(-x)); positive for all real x, Td(0)=1.
inline double log_td(double x) {
    if (std::fabs(x) < 1e-4) {
        return std::log1p(x / 2.0 + x * x / 12.0);
    }
    if (x > 0) return std::log(x) - std::log1p(-std::exp(-x));
    return std::log(-x) + x - std::log1p(-std::exp(x));
}

// ---------------------------------------------------------------------------
// estimates

enum class EstimateKind { quadrature, mc };

// A numerical value with an error bound.  The represented quantity is
// value * exp(log_scale); log_scale is zero except for heat-trace factors
// that exceed double range.
struct Estimate {
    double value = 0.0;
    double err = 0.0;  // absolute error bound / 1-sigma, same scale as value
    double log_scale = 0.0;
    EstimateKind kind = EstimateKind::quadrature;
    std::size_t n_evals = 0;
    bool converged = true;

    static Estimate exact(double v) { return {v, 0.0, 0.0, EstimateKind::quadrature, 0, true}; }

    double real() const { return value * std::exp(log_scale); }
    double real_err() const { return err * std::exp(log_scale); }
    double log_abs() const {
        if (value == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(std::fabs(value)) + log_scale;
    }
    double rel_err() const { return value == 0.0 ? (err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : std::fabs(err / value); }

    // Fold log_scale into value when it fits a double comfortably.
    Estimate normalized() const {
        Estimate e = *this;
        if (e.log_scale != 0.0 && std::fabs(e.log_abs()) < 650.0) {
            double f = std::exp(e.log_scale);
            e.value *= f;
            e.err *= f;
            e.log_scale = 0.0;
        }
        return e;
    }
};

inline Estimate mul_estimates(const Estimate& a, const Estimate& b) {
    Estimate r;
    r.value = a.value * b.value;
    r.log_scale = a.log_scale + b.log_scale;
    // first-order error propagation
    r.err = std::fabs(a.value) * b.err + std::fabs(b.value) * a.err;
    r.kind = (a.kind == EstimateKind::mc || b.kind == EstimateKind::mc) ? EstimateKind::mc : EstimateKind::quadrature;
    r.n_evals = a.n_evals + b.n_evals;
    r.converged = a.converged && b.converged;
    return r;
}

inline Estimate scale_estimate(const Estimate& a, double c) {
    Estimate r = a;
    r.value *= c;
    r.err *= std::fabs(c);
    return r;
}

// ---------------------------------------------------------------------------
// adaptive tensor quadrature

using LogIntegrand = std::function<SignedLog(const Vec&)>;

struct Box {
    std::vector<double> lo, hi;
    std::size_t dim() const { return lo.size(); }
};

struct QuadOptions {
    double tol_rel = 1e-10;
    double tol_abs = 0.0;         // in true scale; ignored if the result is too large for doubles
    std::size_t max_evals = 20'000'000;
    bool throw_on_budget = false;  // default: flag the estimate instead
    // Uniform pre-split per axis before adapting.  Coarse first panels can
    // park a narrow peak at a corner where every node misses it, which makes
    // the embedded error estimate lie; 0 picks a dimension-based default.
    int initial_splits = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes on [-1,1]: abscissa, Gauss weight, Kronrod weight.
inline constexpr double gk15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

struct NodeSet1D {
    std::array<double, 15> x;   // abscissae
    std::array<double, 15> wk;  // Kronrod weights
    std::array<double, 15> wg;  // Gauss weights (zero off the Gauss subset)
};

inline const NodeSet1D& nodes1d() {
    static const NodeSet1D ns = [] {
        NodeSet1D n{};
        int k = 0;
        n.x[k] = gk15[0][0];
        n.wg[k] = gk15[0][1];
        n.wk[k] = gk15[0][2];
        ++k;
        for (int i = 1; i < 8; ++i) {
            n.x[k] = gk15[i][0];
            n.wg[k] = gk15[i][1];
            n.wk[k] = gk15[i][2];
            ++k;
            n.x[k] = -gk15[i][0];
            n.wg[k] = gk15[i][1];
            n.wk[k] = gk15[i][2];
            ++k;
        }
        return n;
    }();
    return ns;
}

struct Panel {
    Box box;
    SignedLog val;
    double log_err;
    int split_dim;
};

// Evaluate the tensor K15 rule on one box.  The error estimate per axis
// compares the full Kronrod tensor against the rule with the Gauss weights
// substituted on that axis; the panel error is the max over axes.
template <class F>
Panel eval_panel(const F& f, const Box& box, std::size_t& evals) {
    const auto& ns = nodes1d();
    const int d = static_cast<int>(box.dim());
    int npts = 1;
    for (int j = 0; j < d; ++j) npts *= 15;

    double log_jac = 0.0;
    std::vector<double> mid(static_cast<std::size_t>(d)), half(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        mid[static_cast<std::size_t>(j)] = 0.5 * (box.lo[static_cast<std::size_t>(j)] + box.hi[static_cast<std::size_t>(j)]);
        half[static_cast<std::size_t>(j)] = 0.5 * (box.hi[static_cast<std::size_t>(j)] - box.lo[static_cast<std::size_t>(j)]);
        log_jac += std::log(half[static_cast<std::size_t>(j)]);
    }

    // first pass: all node values in signed-log form, find local max
    std::vector<SignedLog> vals(static_cast<std::size_t>(npts));
    double vmax = -std::numeric_limits<double>::infinity();
    Vec y(static_cast<std::size_t>(d));
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (int p = 0; p < npts; ++p) {
        int q = p;
        for (int j = 0; j < d; ++j) {
            idx[static_cast<std::size_t>(j)] = q % 15;
            q /= 15;
            y[static_cast<std::size_t>(j)] =
                mid[static_cast<std::size_t>(j)] + half[static_cast<std::size_t>(j)] * ns.x[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
        }
        SignedLog v = f(y);
        vals[static_cast<std::size_t>(p)] = v;
        if (v.sign != 0.0 && v.log_abs > vmax) vmax = v.log_abs;
    }
    evals += static_cast<std::size_t>(npts);

    Panel panel;
    panel.box = box;
    if (vmax == -std::numeric_limits<double>::infinity()) {
        panel.val = SignedLog::zero();
        panel.log_err = -std::numeric_limits<double>::infinity();
        panel.split_dim = 0;
        return panel;
    }

    double sk = 0.0;                                          // full Kronrod tensor (shifted by vmax)
    std::vector<double> sg(static_cast<std::size_t>(d), 0.0);  // Gauss on axis j, Kronrod elsewhere
    for (int p = 0; p < npts; ++p) {
        const SignedLog& v = vals[static_cast<std::size_t>(p)];
        if (v.sign == 0.0) continue;
        double ev = v.sign * std::exp(v.log_abs - vmax);
        int q = p;
        double wkprod = 1.0;
        for (int j = 0; j < d; ++j) {
            idx[static_cast<std::size_t>(j)] = q % 15;
            q /= 15;
            wkprod *= ns.wk[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
        }
        sk += wkprod * ev;
        for (int j = 0; j < d; ++j) {
            double wgj = ns.wg[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
            if (wgj == 0.0) continue;
            double w = wkprod / ns.wk[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] * wgj;
            sg[static_cast<std::size_t>(j)] += w * ev;
        }
    }

    double emax = 0.0;
    int sdim = 0;
    for (int j = 0; j < d; ++j) {
        double e = std::fabs(sk - sg[static_cast<std::size_t>(j)]);
        if (e > emax) {
            emax = e;
            sdim = j;
        }
    }
    // widest axis as tie break, so degenerate error estimates still make progress
    if (emax == 0.0) {
        double w = -1;
        for (int j = 0; j < d; ++j)
            if (half[static_cast<std::size_t>(j)] > w) {
                w = half[static_cast<std::size_t>(j)];
                sdim = j;
            }
    }

    panel.val = (sk == 0.0) ? SignedLog::zero() : SignedLog{vmax + std::log(std::fabs(sk)) + log_jac, sk > 0 ? 1.0 : -1.0};
    panel.log_err = (emax == 0.0) ? -std::numeric_limits<double>::infinity() : vmax + std::log(emax) + log_jac;
    panel.split_dim = sdim;
    return panel;
}

}  // namespace detail

// Adaptive integration of a signed-log integrand over a box (dimension <= 4).
inline Estimate integrate_adaptive_log(const LogIntegrand& f, const Box& box, const QuadOptions& opt = {}) {
    if (box.dim() == 0 || box.dim() > 4) throw Error("integrate_adaptive: dimension must be 1..4");
    std::size_t evals = 0;

    auto cmp = [](const detail::Panel& a, const detail::Panel& b) { return a.log_err < b.log_err; };
    std::priority_queue<detail::Panel, std::vector<detail::Panel>, decltype(cmp)> heap(cmp);

    const int d = static_cast<int>(box.dim());
    int splits = opt.initial_splits > 0 ? opt.initial_splits : (d <= 2 ? 8 : 2);
    {
        int cells = 1;
        for (int j = 0; j < d; ++j) cells *= splits;
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        for (int c = 0; c < cells; ++c) {
            int q = c;
            Box cell = box;
            for (int j = 0; j < d; ++j) {
                int i = q % splits;
                q /= splits;
                double w = (box.hi[static_cast<std::size_t>(j)] - box.lo[static_cast<std::size_t>(j)]) / splits;
                cell.lo[static_cast<std::size_t>(j)] = box.lo[static_cast<std::size_t>(j)] + i * w;
                cell.hi[static_cast<std::size_t>(j)] = cell.lo[static_cast<std::size_t>(j)] + w;
            }
            heap.push(detail::eval_panel(f, cell, evals));
        }
    }

    auto totals = [&heap]() {
        // exact re-total over current leaves (heap copy)
        LogAccumulator val, err;
        auto copy = heap;
        while (!copy.empty()) {
            val.add(copy.top().val);
            err.add(copy.top().log_err, copy.top().log_err == -std::numeric_limits<double>::infinity() ? 0.0 : 1.0);
            copy.pop();
        }
        return std::pair<SignedLog, SignedLog>(val.value(), err.value());
    };

    bool converged = false;
    bool budget_hit = false;
    while (true) {
        auto [tv, te] = totals();
        double log_tol = std::max(
            tv.sign == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(opt.tol_rel) + tv.log_abs,
            opt.tol_abs > 0.0 ? std::log(opt.tol_abs) : -std::numeric_limits<double>::infinity());
        if (te.sign == 0.0 || te.log_abs <= log_tol) {
            converged = true;
            break;
        }
        if (evals >= opt.max_evals) {
            budget_hit = true;
            break;
        }
        // split a batch of the worst panels per pass; re-totalling per split
        // would be quadratic in the panel count
        std::size_t batch = std::max<std::size_t>(1, heap.size() / 8);
        for (std::size_t s = 0; s < batch && evals < opt.max_evals; ++s) {
            detail::Panel worst = heap.top();
            if (worst.log_err == -std::numeric_limits<double>::infinity()) break;
            heap.pop();
            int sd = worst.split_dim;
            double m = 0.5 * (worst.box.lo[static_cast<std::size_t>(sd)] + worst.box.hi[static_cast<std::size_t>(sd)]);
            Box left = worst.box, right = worst.box;
            left.hi[static_cast<std::size_t>(sd)] = m;
            right.lo[static_cast<std::size_t>(sd)] = m;
            heap.push(detail::eval_panel(f, left, evals));
            heap.push(detail::eval_panel(f, right, evals));
        }
    }

    if (budget_hit && opt.throw_on_budget) throw MaxSubdivisions("integrate_adaptive: subdivision budget exhausted");

    LogAccumulator val, err;
    while (!heap.empty()) {
        val.add(heap.top().val);
        if (heap.top().log_err != -std::numeric_limits<double>::infinity()) err.add(heap.top().log_err, 1.0);
        heap.pop();
    }
    SignedLog v = val.value(), e = err.value();

    Estimate est;
    est.kind = EstimateKind::quadrature;
    est.n_evals = evals;
    est.converged = converged;
    if (v.sign == 0.0) {
        est.value = 0.0;
        est.err = e.sign == 0.0 ? 0.0 : std::exp(e.log_abs);
        est.log_scale = 0.0;
    } else {
        est.log_scale = v.log_abs;
        est.value = v.sign;
        est.err = e.sign == 0.0 ? 0.0 : std::exp(e.log_abs - v.log_abs);
    }
    return est.normalized();
}

// Plain-double convenience wrapper.
inline Estimate integrate_adaptive(const std::function<double(const Vec&)>& f, const Box& box,
                                   const QuadOptions& opt = {}) {
    return integrate_adaptive_log([&f](const Vec& y) { return SignedLog::from_double(f(y)); }, box, opt);
}

// ---------------------------------------------------------------------------
// reproducible RNG: splitmix64 streams, one per fixed-size chunk

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class ChunkRng {
public:
    ChunkRng(std::uint64_t seed, std::uint64_t chunk) : state_(seed ^ (0x9e3779b97f4a7c15ULL * (chunk + 1))) {
        for (int i = 0; i < 4; ++i) splitmix64(state_);
    }
    double uniform() {  // in (0,1)
        return (static_cast<double>(splitmix64(state_) >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal() {
        if (have_) {
            have_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        cached_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }
    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    std::uint64_t state_;
    bool have_ = false;
    double cached_ = 0.0;
};

inline constexpr std::size_t mc_chunk = 8192;

inline unsigned worker_count() {
    const char* env = std::getenv("HEATTRACE_THREADS");
    if (!env) return 1;
    long v = std::strtol(env, nullptr, 10);
    if (v < 1) return 1;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return static_cast<unsigned>(std::min<long>(v, hw));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// cone Monte Carlo

// Integrand over a cone inside its linear span V:
//    prod <f,Y>^e  *  prod Td(<f,Y>)  *  exp(<c,Y>)  *  [exp(-s|Y|^2/2)]
// integrated against the Lebesgue measure of V, divided by (2 pi)^{dim V/2}.
struct ConeIntegrandSpec {
    std::vector<std::pair<Vec, int>> linear_factors;
    std::vector<Vec> td_factors;
    std::optional<double> gaussian_weight;  // s
    Vec linear_exponent;                    // c; empty means 0
};

// `generators`: linearly independent rays spanning the cone (and its span V).
// Gaussian proposal when a Gaussian weight is present, exponential proposal
// along the generators otherwise.  Reproducible per (seed, n) and independent
// of any parallel evaluation schedule (fixed-size chunks, one RNG stream per
// chunk, partial sums combined in chunk order).
inline Estimate integrate_cone_mc(const ConeIntegrandSpec& spec, const std::vector<Vec>& generators,
                                  std::uint64_t seed, std::size_t n) {
    if (generators.empty()) return Estimate::exact(1.0);
    const std::size_t ambient = generators[0].size();
    const std::size_t k = generators.size();
    std::vector<Vec> q = orthonormal_basis(generators);
    if (q.size() != k) throw Error("integrate_cone_mc: generators must be linearly independent");

    Vec c = spec.linear_exponent.empty() ? zero_vec(ambient) : spec.linear_exponent;

    // generator matrix in the orthonormal basis of V, and its inverse data
    std::vector<double> gm(k * k);  // gm[i*k+j] = <g_j, q_i>
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < k; ++i) gm[i * k + j] = dot(generators[j], q[i]);
    Mat gmat(static_cast<int>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) gmat.at(static_cast<int>(i), static_cast<int>(j)) = gm[i * k + j];
    const double abs_det = std::fabs(determinant(gmat));

    const bool gaussian = spec.gaussian_weight.has_value();
    std::vector<double> rates(k, 0.0);
    if (!gaussian) {
        for (std::size_t j = 0; j < k; ++j) {
            double decay = -dot(c, generators[j]);
            for (const Vec& f : spec.td_factors) decay += std::max(0.0, -dot(f, generators[j]));
            if (decay <= tau_zero)
                throw IntegrabilityViolated("integrate_cone_mc: exponent does not decay along a cone generator");
            rates[j] = std::max(tau_zero, decay);
        }
    }
    const double s = gaussian ? *spec.gaussian_weight : 0.0;
    if (gaussian && s <= 0.0) throw Error("integrate_cone_mc: gaussian weight must be positive");

    auto poly_log = [&spec](const Vec& y) -> SignedLog {
        double lg = 0.0, sg = 1.0;
        for (const auto& [f, e] : spec.linear_factors) {
            double v = dot(f, y);
            if (v == 0.0) return SignedLog::zero();
            lg += e * std::log(std::fabs(v));
            if (e % 2 != 0 && v < 0) sg = -sg;
        }
        for (const Vec& f : spec.td_factors) lg += log_td(dot(f, y));
        return {lg, sg};
    };

    // cone membership: coordinates along the generators must be >= -tau
    auto in_cone = [&](const Vec& coords_v) {
        std::vector<double> rhs(coords_v.begin(), coords_v.end());
        std::vector<double> a = gm;
        std::vector<double> u = solve_linear(std::move(a), std::move(rhs), static_cast<int>(k), "cone coordinates");
        for (double ui : u)
            if (ui < -1e-9) return false;
        return true;
    };

    const std::size_t nchunks = (n + detail::mc_chunk - 1) / detail::mc_chunk;

    struct ChunkSums {
        long double sum = 0.0L, sum2 = 0.0L;
        std::size_t accepted = 0, total = 0;
    };
    std::vector<ChunkSums> partial(nchunks);

    auto run_chunk = [&](std::size_t ch) {
        detail::ChunkRng rng(seed, ch);
        const std::size_t lo = ch * detail::mc_chunk;
        const std::size_t hi = std::min(n, lo + detail::mc_chunk);
        ChunkSums cs;
        Vec y(ambient), coords(k);
        for (std::size_t i = lo; i < hi; ++i) {
            double w;  // importance weight, true scale
            bool ok = true;
            if (gaussian) {
                for (std::size_t j = 0; j < k; ++j) coords[j] = rng.normal() / std::sqrt(s);
                for (std::size_t a2 = 0; a2 < ambient; ++a2) {
                    double v = 0;
                    for (std::size_t j = 0; j < k; ++j) v += coords[j] * q[j][a2];
                    y[a2] = v;
                }
                ok = in_cone(coords);
                if (ok) {
                    SignedLog p = poly_log(y);
                    double extra = dot(c, y);  // usually zero in the Gaussian branch
                    w = p.sign * std::exp(p.log_abs + extra - 0.5 * static_cast<double>(k) * std::log(s));
                } else {
                    w = 0.0;
                }
            } else {
                double log_q = 0.0;
                std::vector<double> u(k);
                for (std::size_t j = 0; j < k; ++j) {
                    u[j] = rng.exponential(rates[j]);
                    log_q += std::log(rates[j]) - rates[j] * u[j];
                }
                for (std::size_t a2 = 0; a2 < ambient; ++a2) {
                    double v = 0;
                    for (std::size_t j = 0; j < k; ++j) v += u[j] * generators[j][a2];
                    y[a2] = v;
                }
                SignedLog p = poly_log(y);
                w = p.sign == 0.0 ? 0.0 : p.sign * std::exp(p.log_abs + dot(c, y) + std::log(abs_det) - log_q);
                ok = true;
            }
            if (ok && w != 0.0) ++cs.accepted;
            ++cs.total;
            cs.sum += w;
            cs.sum2 += static_cast<long double>(w) * w;
        }
        partial[ch] = cs;
    };

    // chunks are independent streams; partial sums are reduced in chunk
    // order below, so the result is bit-identical for any worker count
    const unsigned workers = std::min<std::size_t>(detail::worker_count(), nchunks);
    if (workers <= 1) {
        for (std::size_t ch = 0; ch < nchunks; ++ch) run_chunk(ch);
    } else {
        std::vector<std::thread> pool;
        for (unsigned wi = 0; wi < workers; ++wi)
            pool.emplace_back([&, wi]() {
                for (std::size_t ch = wi; ch < nchunks; ch += workers) run_chunk(ch);
            });
        for (auto& th : pool) th.join();
    }

    long double sum = 0.0L, sum2 = 0.0L;
    std::size_t accepted = 0, total = 0;
    for (const auto& cs : partial) {
        sum += cs.sum;
        sum2 += cs.sum2;
        accepted += cs.accepted;
        total += cs.total;
    }

    // The target measure carries dY/(2 pi)^{k/2}.  A standard-normal proposal
    // already includes that normalizer in its density; the exponential
    // proposal does not.
    const double norm_const = gaussian ? 1.0 : std::pow(2.0 * M_PI, -0.5 * static_cast<double>(k));
    double mean = static_cast<double>(sum / static_cast<long double>(n));
    double var = std::max(0.0L, static_cast<long double>(sum2 / static_cast<long double>(n)) -
                                    static_cast<long double>(mean) * mean);
    double sigma = std::sqrt(static_cast<double>(var) / static_cast<double>(n));

    if (total > 0 && static_cast<double>(accepted) / static_cast<double>(total) < 1e-3)
        throw LowAcceptance("integrate_cone_mc: acceptance below 1e-3, reparameterize the cone");

    Estimate est;
    est.kind = EstimateKind::mc;
    est.n_evals = n;
    est.value = mean * norm_const;
    est.err = sigma * norm_const;
    return est;
}

// ---------------------------------------------------------------------------
// asymptotic fit

struct AsymptoticFit {
    double log_alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double residual_max = 0.0;
    double condition = 0.0;
};

// Least squares of log_value against (1, log t, t).
inline AsymptoticFit fit_asymptotics(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 4) throw Error("fit_asymptotics: need at least 4 samples");
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (std::size_t j = i + 1; j < samples.size(); ++j)
            if (samples[i].first == samples[j].first) throw Error("fit_asymptotics: t values must be distinct");

    double m[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    double b[3] = {0, 0, 0};
    for (const auto& [t, y] : samples) {
        double phi[3] = {1.0, std::log(t), t};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m[i * 3 + j] += phi[i] * phi[j];
            b[i] += phi[i] * y;
        }
    }

    // condition of the normal matrix via its eigenvalues (Jacobi sweeps)
    double a[9];
    std::copy(m, m + 9, a);
    for (int sweep = 0; sweep < 60; ++sweep) {
        int p = 0, q = 1;
        double off = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (std::fabs(a[i * 3 + j]) > off) {
                    off = std::fabs(a[i * 3 + j]);
                    p = i;
                    q = j;
                }
        if (off < 1e-14 * (std::fabs(a[0]) + std::fabs(a[4]) + std::fabs(a[8]))) break;
        double theta = 0.5 * std::atan2(2 * a[p * 3 + q], a[q * 3 + q] - a[p * 3 + p]);
        double cs = std::cos(theta), sn = std::sin(theta);
        double app = a[p * 3 + p], aqq = a[q * 3 + q], apq = a[p * 3 + q];
        for (int i = 0; i < 3; ++i) {
            double aip = a[i * 3 + p], aiq = a[i * 3 + q];
            a[i * 3 + p] = cs * aip - sn * aiq;
            a[i * 3 + q] = sn * aip + cs * aiq;
        }
        for (int i = 0; i < 3; ++i) {
            double api = a[p * 3 + i], aqi = a[q * 3 + i];
            a[p * 3 + i] = cs * api - sn * aqi;
            a[q * 3 + i] = sn * api + cs * aqi;
        }
        a[p * 3 + p] = cs * cs * app - 2 * sn * cs * apq + sn * sn * aqq;
        a[q * 3 + q] = sn * sn * app + 2 * sn * cs * apq + cs * cs * aqq;
        a[p * 3 + q] = a[q * 3 + p] = 0.0;
    }
    double emax = std::max({std::fabs(a[0]), std::fabs(a[4]), std::fabs(a[8])});
    double emin = std::min({std::fabs(a[0]), std::fabs(a[4]), std::fabs(a[8])});
    double cond = emin == 0.0 ? std::numeric_limits<double>::infinity() : emax / emin;
    if (cond > 1e12) throw IllConditioned("fit_asymptotics: normal system condition exceeds 1e12");

    std::vector<double> sol = solve_linear(std::vector<double>(m, m + 9), std::vector<double>(b, b + 3), 3);

    AsymptoticFit fit;
    fit.log_alpha = sol[0];
    fit.beta = sol[1];
    fit.gamma = sol[2];
    fit.condition = cond;
    for (const auto& [t, y] : samples)
        fit.residual_max = std::max(fit.residual_max, std::fabs(y - (sol[0] + sol[1] * std::log(t) + sol[2] * t)));
    return fit;
}

}  // namespace heattrace
