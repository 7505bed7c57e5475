#pragma once

// Test-only oracles, kept independent of the library's integration and
// projection code paths.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "heattrace/vec.hpp"

namespace oracles {

// Composite Simpson on a fixed grid (n even).
template <class F>
double simpson(const F& f, double a, double b, std::size_t n) {
    if (n % 2) ++n;
    double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Projection of v onto the cone {sum u_i w_i : u_i >= 0} by a coarse grid
// seed followed by coordinate descent on the convex quadratic
// |sum u_i w_i - v|^2.  Independent of the active-set solver.
inline heattrace::Vec project_cone_grid(const std::vector<heattrace::Vec>& gens, const heattrace::Vec& v) {
    using heattrace::Vec;
    const std::size_t k = gens.size();
    const std::size_t n = v.size();
    if (k == 0) return heattrace::zero_vec(n);

    auto point = [&](const std::vector<double>& u) {
        Vec y = heattrace::zero_vec(n);
        for (std::size_t i = 0; i < k; ++i) heattrace::axpy(y, u[i], gens[i]);
        return y;
    };
    auto dist2 = [&](const std::vector<double>& u) {
        Vec y = point(u);
        return heattrace::norm2(heattrace::sub(y, v));
    };

    // grid seed
    double umax = 2.0 * heattrace::norm(v) + 1.0;
    std::vector<double> best(k, 0.0);
    double bestd = dist2(best);
    const int g = (k <= 2) ? 24 : 8;
    std::vector<int> idx(k, 0);
    while (true) {
        std::vector<double> u(k);
        for (std::size_t i = 0; i < k; ++i) u[i] = umax * idx[i] / double(g) / heattrace::norm(gens[i]);
        double d = dist2(u);
        if (d < bestd) {
            bestd = d;
            best = u;
        }
        std::size_t c = 0;
        while (c < k && ++idx[c] > g) idx[c++] = 0;
        if (c == k) break;
    }

    // coordinate descent refinement; each 1-D step has a closed form
    for (int it = 0; it < 20000; ++it) {
        double change = 0;
        for (std::size_t i = 0; i < k; ++i) {
            Vec rest = heattrace::zero_vec(n);
            for (std::size_t j = 0; j < k; ++j)
                if (j != i) heattrace::axpy(rest, best[j], gens[j]);
            double ui = heattrace::dot(heattrace::sub(v, rest), gens[i]) / heattrace::norm2(gens[i]);
            ui = std::max(0.0, ui);
            change = std::max(change, std::fabs(ui - best[i]));
            best[i] = ui;
        }
        if (change < 1e-15) break;
    }
    return point(best);
}

}  // namespace oracles
