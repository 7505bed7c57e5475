// Acceptance suite: one line per criterion, nonzero exit when any fails.
//
// Criteria 1, 2 and 9 carry reference values whose sl2R lambda in {0,1}
// entries contradict the rank-one worked example they cite (its exponential
// rate is gamma - 1/2 = -1/2 there, and the 2% leading-constant tolerance is
// tighter than the 1/t pre-asymptotics of those weights on the pinned
// window).  Those sub-checks are evaluated and reported exactly as printed,
// fail honestly, and the verified counterpart values are shown next to them.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "heattrace/catalog.hpp"
#include "heattrace/constants.hpp"
#include "heattrace/heattrace.hpp"
#include "heattrace/novikov.hpp"
#include "test_oracles.hpp"

using namespace heattrace;

namespace {

int criteria_failed = 0;

void report(int num, const std::string& what, bool pass, const std::string& note = {}) {
    std::printf("criterion %2d: %s  %s%s%s\n", num, pass ? "PASS" : "FAIL", what.c_str(),
                note.empty() ? "" : " - ", note.c_str());
    if (!pass) ++criteria_failed;
}

PositiveSystem ps_for(const CartanDatum& d, const Vec& lambda) {
    std::vector<int> pos_k;
    Vec g = detail::generic_positive_functional(d);
    for (std::size_t i = 0; i < d.roots.size(); ++i)
        if (d.roots[i].mult_k == 1 && dot(d.roots[i].v, g) > 0) pos_k.push_back(static_cast<int>(i));
    return choose_positive_system(d, pos_k, HighestWeight{lambda, {}});
}

struct FitResult {
    double alpha, beta, gamma;
};

FitResult run_fit(const CartanDatum& d, const PositiveSystem& ps, double lambda) {
    HeatOptions opt;
    opt.tol = 1e-10;
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < 12; ++i) {
        double t = 40.0 * std::pow(10.0, i / 11.0);
        samples.push_back({t, trace_G(d, ps, {{lambda}, {}}, t, opt).trace.log_abs()});
    }
    auto f = fit_asymptotics(samples);
    return {std::exp(f.log_alpha), f.beta, f.gamma};
}

// ---------------------------------------------------------------------------

void criterion_1() {
    auto d = builtin("sl2R").datum;
    const double lams[4] = {0, 1, 2, 3};
    const double beta_ref[4] = {-1.5, -0.5, 0, 0};
    const double gamma_printed[4] = {0, 0, 0, 1.5};
    const double gamma_paper[4] = {-0.5, -0.5, 0, 1.5};
    const double alpha_ref[4] = {0.3133285, 0.1269874, 0.3183099, 2.0 / M_PI};

    bool pass = true, paper_gamma_ok = true;
    std::string detail;
    for (int i = 0; i < 4; ++i) {
        auto ps = ps_for(d, {lams[i]});
        auto f = run_fit(d, ps, lams[i]);
        bool b_ok = std::fabs(f.beta - beta_ref[i]) <= 0.05;
        bool g_ok = std::fabs(f.gamma - gamma_printed[i]) <= 1e-3;
        bool a_ok = std::fabs(f.alpha / alpha_ref[i] - 1.0) <= 0.02;
        if (std::fabs(f.gamma - gamma_paper[i]) > 1e-3) paper_gamma_ok = false;
        pass = pass && b_ok && g_ok && a_ok;
        std::printf("    lambda=%g: fit (alpha %.6f, beta %+.4f, gamma %+.5f); beta %s, gamma-vs-printed(%g) %s, "
                    "alpha dev %+.3f%% (tol 2%%) %s\n",
                    lams[i], f.alpha, f.beta, f.gamma, b_ok ? "ok" : "FAIL", gamma_printed[i],
                    g_ok ? "ok" : "FAIL", 100 * (f.alpha / alpha_ref[i] - 1.0), a_ok ? "ok" : "FAIL");
    }
    std::printf("    gamma vs paper-verified {-1/2,-1/2,0,3/2}: %s\n", paper_gamma_ok ? "all ok" : "FAIL");
    report(1, "SL(2,R) ground truth fit over t in [40,400]", pass,
           pass ? "" : "lambda in {0,1} entries are spec-transcription defects; see notes/decisions.md");
}

void criterion_2() {
    auto d = builtin("sl2R").datum;
    const double lams[4] = {0, 1, 2, 3};
    const double beta_ref[4] = {-1.5, -0.5, 0, 0};
    const double gamma_printed[4] = {0, 0, 0, 1.5};
    const double gamma_paper[4] = {-0.5, -0.5, 0, 1.5};
    const double alpha_ref[4] = {0.3133285, 0.1269874, 0.3183099, 2.0 / M_PI};

    bool pass = true, paper_gamma_ok = true;
    for (int i = 0; i < 4; ++i) {
        auto ps = ps_for(d, {lams[i]});
        auto c = asymptotic_constants(d, ps, {{lams[i]}, {}}, 11);
        bool a_ok = std::fabs(c.alpha0_bar.real() / alpha_ref[i] - 1.0) <=
                    std::max(3.0 * c.alpha0_bar.rel_err(), 2e-6);
        bool mc_ok = c.alpha12.kind != EstimateKind::mc || 3.0 * c.alpha12.rel_err() <= 0.01;
        bool b_ok = std::fabs(c.beta1_bar - beta_ref[i]) < 1e-12;
        bool g_ok = std::fabs(c.gamma2_bar - gamma_printed[i]) <= 1e-9;
        if (std::fabs(c.gamma2_bar - gamma_paper[i]) > 1e-9) paper_gamma_ok = false;
        pass = pass && a_ok && mc_ok && b_ok && g_ok;
        std::printf("    lambda=%g: alpha0_bar %.7f (3sig %.2e) %s, beta %s, gamma-vs-printed %s\n", lams[i],
                    c.alpha0_bar.real(), 3 * c.alpha0_bar.real_err(), (a_ok && mc_ok) ? "ok" : "FAIL",
                    b_ok ? "ok" : "FAIL", g_ok ? "ok" : "FAIL");
    }
    std::printf("    gamma vs paper-verified {-1/2,-1/2,0,3/2}: %s\n", paper_gamma_ok ? "all ok" : "FAIL");
    report(2, "closed-form pipeline match with MC error <= 1% (3 sigma)", pass,
           pass ? "" : "gamma entries for lambda in {0,1} are spec-transcription defects; see notes/decisions.md");
}

void criterion_3() {
    std::mt19937 rng(314159);
    std::uniform_real_distribution<double> u(0.1, 1.2);
    bool pass = true;
    for (const auto& name : {"sl2R", "sl3R"}) {
        auto d = builtin(name).datum;
        auto ps = ps_for(d, zero_vec(static_cast<std::size_t>(d.r0)));
        auto wg = weyl_group(d, WhichGroup::g);
        for (double t : {5.0, 50.0}) {
            for (int trial = 0; trial < 3; ++trial) {
                Vec mu = zero_vec(static_cast<std::size_t>(d.r0));
                for (const auto& om : ps.coweights) axpy(mu, u(rng), om);
                auto full = I_t(d, ps, mu, t);
                double sum = 0, err = full.real_err();
                for (const auto& w : wg) {
                    auto piece = I_t_chamber(d, ps, mu, w, t);
                    sum += piece.real();
                    err += piece.real_err();
                }
                if (std::fabs(sum - full.real()) > std::max(4 * err, 1e-9 * std::fabs(full.real()))) pass = false;
            }
        }
    }
    report(3, "chamber additivity on sl2R and sl3R at t in {5, 50}", pass);
}

void criterion_4() {
    std::mt19937 rng(8675309);
    std::uniform_real_distribution<double> u(-3.5, 3.5);
    bool pass = true;
    std::vector<CartanDatum> data;
    for (const auto& name : catalog_names()) {
        auto d = builtin(name).datum;
        if (d.r0 <= 2) data.push_back(d);
    }
    {
        // an extra synthetic B2 datum, independent of the catalog entry
        CartanDatum b2;
        b2.name = "b2-synthetic";
        b2.r0 = 2;
        b2.dim_a = 2;
        b2.dim_tg = 0;
        b2.roots = {{{1.0, 0.0}, 1, 0}, {{0.0, 1.0}, 1, 0}, {{1.0, 1.0}, 1, 0}, {{1.0, -1.0}, 1, 0}};
        b2 = detail::close_under_negation(b2);
        require_valid(b2);
        data.push_back(b2);
    }
    for (const auto& d : data) {
        auto ps = ps_for(d, zero_vec(static_cast<std::size_t>(d.r0)));
        for (int trial = 0; trial < 1000; ++trial) {
            Vec v(static_cast<std::size_t>(d.r0));
            for (auto& x : v) x = u(rng);
            Vec mine = cone_project(d, ps, v);
            Vec oracle = oracles::project_cone_grid(ps.coweights, v);
            if (norm(sub(mine, oracle)) > 1e-9) pass = false;
            if (std::fabs(dot(sub(v, mine), mine)) > 1e-9) pass = false;
            // v* - v in the dual cone: nonnegative simple coefficients
            if (!ps.simple.empty()) {
                std::vector<Vec> sv;
                for (int i : ps.simple) sv.push_back(d.roots[static_cast<std::size_t>(i)].v);
                const std::size_t k = sv.size();
                std::vector<double> gram(k * k), rhs(k);
                Vec diff = sub(mine, v);
                for (std::size_t i = 0; i < k; ++i) {
                    rhs[i] = dot(sv[i], diff);
                    for (std::size_t j = 0; j < k; ++j) gram[i * k + j] = dot(sv[i], sv[j]);
                }
                for (double c : solve_linear(gram, rhs, static_cast<int>(k)))
                    if (c < -1e-9) pass = false;
            }
        }
    }
    report(4, "cone projection vs grid+refinement oracle, 1000 vectors per datum", pass);
}

void criteria_5_and_6() {
    bool ordering = true, sums = true;
    auto run = [&](const CartanDatum& d, const Vec& lam) {
        auto ps = ps_for(d, lam);
        try {
            auto rep = verify_theorems(d, ps, {lam, {}}, 2718);
            ordering = ordering && rep.gamma_ordering_ok && rep.beta_ordering_ok;
            sums = sums && rep.sum_identity_ok;
        } catch (const TheoremViolation&) {
            ordering = false;
            sums = false;
        }
    };
    auto sl2 = builtin("sl2R").datum;
    for (double l : {0.0, 1.0, 2.0}) run(sl2, {l});
    auto sl3 = builtin("sl3R").datum;
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> pick(0, 6);
    const double step = 0.5 / std::sqrt(2.0);  // integral weights are k * alpha / 2
    for (int trial = 0; trial < 3; ++trial) run(sl3, {pick(rng) * step});
    report(5, "ordering theorems exact on sl2R (lambda 0,1,2) and sl3R (3 random weights)", ordering);
    report(6, "sum identity over W_0^1 within 3 sigma for the same cases", sums);
}

void criterion_7() {
    auto d = builtin("sl2R").datum;
    auto ps = ps_for(d, {2.0});
    bool pass = true;
    HeatOptions opt;
    opt.tol = 1e-12;
    for (double t : {10.0, 50.0}) {
        auto closed = K_t_closed(d, ps, {2.0}, t);
        auto quad = K_t_quadrature(d, ps, {2.0}, t, opt);
        if (std::fabs(quad.real() / closed.real() - 1.0) > 1e-6) pass = false;
    }
    // exponential-remainder slope
    std::vector<std::pair<double, double>> pts;
    for (double t : {20.0, 50.0, 80.0, 110.0, 140.0, 170.0, 200.0}) {
        auto it = I_t(d, ps, {2.0}, t, opt);
        auto kt = K_t_closed(d, ps, {2.0}, t);
        double rel = std::max(std::fabs(it.real() / kt.real() - 1.0), 1e-300);
        pts.push_back({t, std::log(rel)});
    }
    double st = 0, sy = 0, stt = 0, sty = 0, n = static_cast<double>(pts.size());
    for (auto [t, y] : pts) {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    double slope = (n * sty - st * sy) / (n * stt - st * st);
    if (!(slope < -0.05)) pass = false;
    std::printf("    remainder slope %.4f (< -0.05 required)\n", slope);
    report(7, "equal-rank regular closed form matches quadrature to 1e-6; remainder decays", pass);
}

void criterion_8() {
    bool pass = true;
    HeatOptions opt;
    opt.tol = 1e-8;
    for (const auto& name : catalog_names()) {
        auto d = builtin(name).datum;
        auto ps = ps_for(d, zero_vec(static_cast<std::size_t>(d.r0)));
        double v = small_t_diagnostic(d, ps, {zero_vec(static_cast<std::size_t>(d.r0)), {}}, 1e-3, opt);
        std::printf("    %-14s short-time diagnostic %.6f\n", name.c_str(), v);
        if (!(v > 0.99 && v < 1.01)) pass = false;
    }
    report(8, "short-time diagnostic in [0.99, 1.01] for all catalog data", pass);
}

void criterion_9() {
    auto d = builtin("sl2R").datum;
    const double inf = std::numeric_limits<double>::infinity();
    const double printed[3] = {3.0, 1.0, inf};
    bool pass = true;
    for (int i = 0; i < 3; ++i) {
        double lam = static_cast<double>(i);
        auto ps = ps_for(d, {lam});
        double v = ns_bundle(d, ps, {{lam}, {}}, 1.0);
        bool ok = (std::isinf(printed[i]) && std::isinf(v)) || std::fabs(v - printed[i]) < 1e-9;
        auto c = asymptotic_constants(d, ps, {{lam}, {}}, 3);
        std::printf("    lambda=%g: ns_bundle %s vs printed %s %s (gamma2_bar %+.2f, -2*beta1_bar %g)\n", lam,
                    std::isinf(v) ? "inf" : std::to_string(v).c_str(),
                    std::isinf(printed[i]) ? "inf" : std::to_string(printed[i]).c_str(), ok ? "ok" : "FAIL",
                    c.gamma2_bar, -2 * c.beta1_bar);
        pass = pass && ok;
    }
    // sl2C flat trivial: band {1,2} with ns = 1
    auto c2 = builtin("sl2C").datum;
    auto ps2 = ps_for(c2, zero_vec(1));
    auto rep = ns_flat(c2, ps2, {zero_vec(1), {}});
    bool band_ok = rep.band_lo == 1 && rep.band_hi == 2 && rep.per_degree.at(1).ns == 1.0 &&
                   rep.per_degree.at(2).ns == 1.0 && std::isinf(rep.per_degree.at(0).ns) &&
                   std::isinf(rep.per_degree.at(3).ns);
    std::printf("    sl2C flat-trivial band {%d,%d} with ns = %g: %s\n", rep.band_lo, rep.band_hi,
                rep.per_degree.at(1).ns, band_ok ? "ok" : "FAIL");
    pass = pass && band_ok;
    report(9, "Novikov-Shubin values", pass,
           pass ? "" : "sl2R lambda in {0,1} have gamma2_bar = -1/2 < 0, so the bundle invariant is inf; "
                       "the printed {3,1} presuppose gamma2_bar = 0 (see notes/decisions.md)");
}

void criterion_10() {
    bool pass = true;
    // Weyl orders for the named shapes
    if (weyl_group(builtin("sl2R").datum, WhichGroup::g).size() != 2) pass = false;
    if (weyl_group(builtin("sl3R").datum, WhichGroup::g).size() != 2) pass = false;
    if (weyl_group(builtin("a2split-test").datum, WhichGroup::g).size() != 6) pass = false;
    if (weyl_group(builtin("b2-test").datum, WhichGroup::g).size() != 8) pass = false;

    // module invariant sweep over every catalog datum
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-2, 2);
    for (const auto& name : catalog_names()) {
        auto d = builtin(name).datum;
        if (!validate_datum(d).ok()) pass = false;
        auto ps = ps_for(d, zero_vec(static_cast<std::size_t>(d.r0)));
        auto wg = weyl_group(d, WhichGroup::g);
        auto wk = weyl_group(d, WhichGroup::k);
        if (wgk_set(d, ps).size() * wk.size() != wg.size()) pass = false;
        for (const auto& w : wg) {
            auto f = decompose_w(d, ps, w);
            Mat prod = mul(f.w1.matrix, f.w2.matrix);
            for (std::size_t q = 0; q < prod.a.size(); ++q)
                if (std::fabs(prod.a[q] - w.matrix.a[q]) > 1e-8) pass = false;
        }
        // Weyl invariance of the character for a dominant integral test weight
        if (!ps.pos_k.empty()) {
            Vec lam = zero_vec(static_cast<std::size_t>(d.r0));
            for (int i : ps.pos_k) lam = add(lam, d.roots[static_cast<std::size_t>(i)].v);
            HighestWeight l{lam, {}};
            Vec y(static_cast<std::size_t>(d.r0));
            for (auto& x : y) x = u(rng);
            double base = character_value(d, ps, l, y);
            for (const auto& w : wk)
                if (std::fabs(character_value(d, ps, l, act(w.matrix, y)) - base) >
                    1e-10 * std::max(1.0, std::fabs(base)))
                    pass = false;
        }
    }

    // chamber-choice independence on the sl2R wall case lambda = 0
    auto d = builtin("sl2R").datum;
    auto ps_plus = make_positive_system(d, {d.find_root({2.0})});
    auto ps_minus = make_positive_system(d, {d.find_root({-2.0})});
    auto a = asymptotic_constants(d, ps_plus, {{0.0}, {}}, 5);
    auto b = asymptotic_constants(d, ps_minus, {{0.0}, {}}, 5);
    if (std::fabs(a.alpha0_bar.real() - b.alpha0_bar.real()) >
        3 * (a.alpha0_bar.real_err() + b.alpha0_bar.real_err()) + 1e-9)
        pass = false;
    if (std::fabs(a.beta1_bar - b.beta1_bar) > 1e-12) pass = false;
    if (std::fabs(a.gamma2_bar - b.gamma2_bar) > 1e-12) pass = false;

    report(10, "property suite: invariants, Weyl orders 2/2/6/8, wall-case independence", pass);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criteria_5_and_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d of 10 criteria failed\n", criteria_failed);
    return criteria_failed == 0 ? 0 : 1;
}
