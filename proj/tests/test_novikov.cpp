#include <doctest.h>

#include <cmath>
#include <limits>

#include "heattrace/catalog.hpp"
#include "heattrace/novikov.hpp"

using namespace heattrace;

namespace {

PositiveSystem ps_for(const CartanDatum& d, const Vec& lambda) {
    std::vector<int> pos_k;
    Vec g = detail::generic_positive_functional(d);
    for (std::size_t i = 0; i < d.roots.size(); ++i)
        if (d.roots[i].mult_k == 1 && dot(d.roots[i].v, g) > 0) pos_k.push_back(static_cast<int>(i));
    return choose_positive_system(d, pos_k, HighestWeight{lambda, {}});
}

const double inf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("delta_G") {
    CHECK(delta_G(builtin("sl2R").datum) == 0);
    CHECK(delta_G(builtin("sl2C").datum) == 1);
    CHECK(delta_G(builtin("sl3R").datum) == 1);
}

TEST_CASE("delta_G and m share parity for every catalog datum") {
    for (const auto& name : catalog_names()) {
        auto d = builtin(name).datum;
        CHECK((d.dim_p() - delta_G(d)) % 2 == 0);
    }
}

TEST_CASE("casimir scalar") {
    auto d = builtin("sl2R").datum;
    auto ps = ps_for(d, {0.0});
    CHECK(casimir_scalar(d, ps, {{0.0}, {}}) == doctest::Approx(0.0));
    // lambda^V|t0 = 1, lambda_a = 0: -(|2|^2 - |1|^2) = -3
    CHECK(casimir_scalar(d, ps, {{1.0}, {}}) == doctest::Approx(-3.0));
    // a nonzero lambda_a only adds -|lambda_a|^2
    CHECK(casimir_scalar(d, ps, {{1.0}, {0.7}}) == doctest::Approx(-3.0 - 0.49));
}

TEST_CASE("ns_bundle on sl2R") {
    auto d = builtin("sl2R").datum;
    // lambda = 2: gamma2_bar = 0 and beta1_bar = 0 -> infinite invariant
    CHECK(ns_bundle(d, ps_for(d, {2.0}), {{2.0}, {}}, 1.0) == inf);
    // lambda in {0,1}: gamma2_bar = -1/2 < 0, so the Casimir has a genuine
    // spectral gap (bottom 1) and the invariant is infinite; -2 beta1_bar
    // would be {3,1} only at gamma2_bar = 0 exactly
    CHECK(ns_bundle(d, ps_for(d, {0.0}), {{0.0}, {}}, 1.0) == inf);
    CHECK(ns_bundle(d, ps_for(d, {1.0}), {{1.0}, {}}, 1.0) == inf);
    CHECK_THROWS_AS(ns_bundle(d, ps_for(d, {3.0}), {{3.0}, {}}, 1.0), AssumptionViolated);
    CHECK_THROWS_AS(ns_bundle(d, ps_for(d, {2.0}), {{2.0}, {}}, 0.0), Error);
}

TEST_CASE("ns_bundle finite branch on sl2C at the band weight") {
    auto d = builtin("sl2C").datum;
    auto ps = ps_for(d, zero_vec(1));
    auto lam = band_weight(d, ps, {zero_vec(1), {}});
    CHECK(lam.lambda[0] == doctest::Approx(std::sqrt(2.0)));
    auto psl = ps_for(d, lam.lambda);
    double v = ns_bundle(d, psl, lam, 2.5);
    CHECK(v == doctest::Approx(1.0));  // -2 beta1_bar = delta(G)
    // consistency with the independently computed constants
    auto c = asymptotic_constants(d, psl, lam, 3);
    CHECK(v == doctest::Approx(-2.0 * c.beta1_bar));
}

TEST_CASE("ns_flat on sl2C: band {1,2} with ns = 1") {
    auto d = builtin("sl2C").datum;
    auto ps = ps_for(d, zero_vec(1));
    auto rep = ns_flat(d, ps, {zero_vec(1), {}});
    CHECK(rep.delta_g == 1);
    CHECK(rep.band_lo == 1);
    CHECK(rep.band_hi == 2);
    for (const auto& [i, deg] : rep.per_degree) {
        if (i >= 1 && i <= 2) {
            CHECK(deg.which == NSCase::c);
            CHECK(deg.ns == doctest::Approx(1.0));
        } else {
            CHECK(deg.which == NSCase::a);
            CHECK(deg.ns == inf);
        }
    }
}

TEST_CASE("ns_flat on sl2R: delta 0, band {1}, case b") {
    auto d = builtin("sl2R").datum;
    auto ps = ps_for(d, zero_vec(1));
    auto rep = ns_flat(d, ps, {zero_vec(1), {}});
    CHECK(rep.delta_g == 0);
    CHECK(rep.band_lo == 1);
    CHECK(rep.band_hi == 1);
    CHECK(rep.per_degree.at(1).which == NSCase::b);
    CHECK(rep.per_degree.at(0).which == NSCase::a);
    CHECK(rep.per_degree.at(2).which == NSCase::a);
}

TEST_CASE("ns_flat: nonzero lambda_a makes every degree case a") {
    auto d = builtin("sl2C").datum;
    auto ps = ps_for(d, zero_vec(1));
    auto rep = ns_flat(d, ps, {{0.3}, {0.5}});
    for (const auto& [i, deg] : rep.per_degree) CHECK(deg.which == NSCase::a);
}

TEST_CASE("band is symmetric about m/2") {
    for (const auto& name : catalog_names()) {
        auto d = builtin(name).datum;
        auto ps = ps_for(d, zero_vec(static_cast<std::size_t>(d.r0)));
        auto rep = ns_flat(d, ps, {zero_vec(static_cast<std::size_t>(d.r0)), {}});
        CHECK(rep.band_lo + rep.band_hi == d.dim_p());
    }
}

TEST_CASE("band-weight identity: delta1 = delta2 = {} and gamma2_bar + C/2 = -|lambda_a|^2/2") {
    for (const auto& name : {"sl2R", "sl2C", "sl3R", "b2-test", "a1xa1-test"}) {
        auto d = builtin(name).datum;
        auto ps0 = ps_for(d, zero_vec(static_cast<std::size_t>(d.r0)));
        FlatTwist tw{zero_vec(static_cast<std::size_t>(d.r0)), {}};
        auto lam = band_weight(d, ps0, tw);
        auto ps = ps_for(d, lam.lambda);
        auto cls = classify(d, ps, lam);
        CHECK(cls.decomp.pair.delta1.empty());
        CHECK(cls.decomp.pair.delta2.empty());
        auto c = asymptotic_constants(d, ps, lam, 9);
        CHECK(c.beta1_bar == doctest::Approx(-0.5 * delta_G(d)));
        double lhs = c.gamma2_bar + 0.5 * casimir_scalar(d, ps, tw);
        CHECK(lhs == doctest::Approx(0.0).epsilon(1e-10));
    }
}
