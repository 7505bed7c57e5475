#pragma once

// Built-in Cartan data with provenance, and the datum/weight text format.
// Datum files list one root per +- pair; the loader inserts the negatives.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "heattrace/errors.hpp"
#include "heattrace/rootdata.hpp"

namespace heattrace {

struct CatalogEntry {
    CartanDatum datum;
    std::string provenance;
    std::string oracle;  // how multiplicities / metric normalization were derived
};

namespace detail {

inline CartanDatum close_under_negation(CartanDatum d) {
    std::vector<RestrictedRoot> full;
    for (const auto& r : d.roots) {
        full.push_back(r);
        RestrictedRoot neg = r;
        neg.v = scale(r.v, -1.0);
        full.push_back(neg);
    }
    d.roots = std::move(full);
    return d;
}

inline RestrictedRoot root(Vec v, int mp, int mk) { return RestrictedRoot{std::move(v), mp, mk}; }

}  // namespace detail

inline std::vector<std::string> catalog_names() {
    return {"sl2R", "sl2C", "sl3R", "a2split-test", "b2-test", "a1xa1-test"};
}

inline CatalogEntry builtin(const std::string& name) {
    const double s2 = std::sqrt(2.0);
    CatalogEntry e;
    CartanDatum d;
    d.name = name;
    if (name == "sl2R") {
        d.r0 = 1;
        d.dim_a = 0;
        d.dim_tg = 0;
        d.roots = {detail::root({2.0}, 1, 0)};
        e.provenance = "G = SL(2,R), K = SO(2); B normalized so that sqrt(-1)k carries the standard metric.";
        e.oracle =
            "Adjoint action of U(1) on p_C splits into characters z^{+-2}; k is abelian, so R(k) is empty, "
            "the single restricted root pair is +-2 with dim p_alpha = 1, rho^g = 1 and c_g = |rho^g|^2 = 1.";
    } else if (name == "sl2C") {
        d.r0 = 1;
        d.dim_a = 1;
        d.dim_tg = 0;
        d.roots = {detail::root({s2}, 1, 1)};
        e.provenance = "G = SL(2,C) as a real group, K = SU(2), B(X,Y) = Re tr(XY).";
        e.oracle =
            "Explicit weight decomposition under the compact Cartan t = R.iH, H = diag(i,-i): |iH|_B^2 = 2, so the "
            "unit is iH/sqrt(2); ad(iH) has eigenvalues {+-2, 0} on each sl2 summand of g_C, giving one restricted "
            "root pair +-sqrt(2) with dim g_alpha = 2 split 1+1 between p and k; a = real diagonal, dim a = 1; "
            "m = n = 3.";
    } else if (name == "sl3R") {
        d.r0 = 1;
        d.dim_a = 1;
        d.dim_tg = 0;
        d.roots = {detail::root({1.0 / s2}, 1, 1), detail::root({s2}, 1, 0)};
        e.provenance = "G = SL(3,R), K = SO(3), t = so(2), B(X,Y) = tr(XY); non-reduced BC1 system.";
        e.oracle =
            "With E = e12 - e21, tr(E^2) = -2 gives the unit iE/sqrt(2); ad(E) on sl(3,C) has eigenvalues "
            "{+-2i, +-i, +-i, 0, 0}, so the restricted roots are +-1/sqrt(2) (dim 2: one p-copy, one k-copy) and "
            "+-2/sqrt(2) (dim 1, p); a = centralizer of t in p is one-dimensional; m = 5, n = 3.";
    } else if (name == "a2split-test") {
        d.r0 = 2;
        d.dim_a = 2;
        d.dim_tg = 0;
        const double h = std::sqrt(3.0) / 2.0;
        d.roots = {detail::root({1.0, 0.0}, 1, 0), detail::root({-0.5, h}, 1, 0), detail::root({0.5, h}, 1, 0)};
        e.provenance = "Synthetic rank-2 A2 datum, all multiplicities on the p side (split shape).";
        e.oracle = "Unit-length A2 roots at 60-degree spacing; m = dim a + 6 = 8, n = r0 = 2; |W| = 6.";
    } else if (name == "b2-test") {
        d.r0 = 2;
        d.dim_a = 0;
        d.dim_tg = 0;
        d.roots = {detail::root({1.0, 0.0}, 1, 0), detail::root({0.0, 1.0}, 1, 0), detail::root({1.0, 1.0}, 1, 1),
                   detail::root({1.0, -1.0}, 1, 1)};
        e.provenance = "Synthetic equal-rank B2 datum; long roots carry a k-copy, short roots are pure p.";
        e.oracle =
            "B2 = {+-e1, +-e2, +-e1+-e2}; the long roots form a reflection-closed A1 x A1 subsystem taken as R(k), "
            "so W(k) has order 4 inside |W(B2)| = 8; dim a = 0 makes the datum equal rank; m = 8, n = 6.";
    } else if (name == "a1xa1-test") {
        d.r0 = 2;
        d.dim_a = 1;
        d.dim_tg = 0;
        d.roots = {detail::root({1.0, 0.0}, 1, 0), detail::root({0.0, 1.0}, 1, 1)};
        e.provenance = "Synthetic A1 x A1 datum with one pure-p pair and one mixed pair.";
        e.oracle =
            "Orthogonal pairs +-e1 (dim 1, p) and +-e2 (dim 2, p+k); the orbits do not mix, so the multiplicity "
            "map is W-invariant; R(k) = {+-e2}; m = 4, n = 3.";
    } else {
        throw UnknownName("unknown catalog entry '" + name + "'");
    }
    e.datum = detail::close_under_negation(d);
    require_valid(e.datum);
    return e;
}

// ---------------------------------------------------------------------------
// datum text format

namespace detail {

inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// canonical representative of a +- pair: lexicographically positive member
inline bool lex_positive(const Vec& v) {
    for (double x : v) {
        if (x > 1e-12) return true;
        if (x < -1e-12) return false;
    }
    return false;
}

}  // namespace detail

inline CartanDatum parse_datum(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("datum parse error: ") + e.what());
    }
    CartanDatum d;
    try {
        d.name = j.at("name").get<std::string>();
        d.r0 = j.at("rank").get<int>();
        d.dim_a = j.at("dim_a").get<int>();
        d.dim_tg = j.at("dim_tg").get<int>();
        for (const auto& rj : j.at("roots")) {
            RestrictedRoot r;
            r.v = rj.at("coords").get<std::vector<double>>();
            r.mult_p = rj.at("mult_p").get<int>();
            r.mult_k = rj.at("mult_k").get<int>();
            d.roots.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("datum field error: ") + e.what());
    }
    d = detail::close_under_negation(d);
    require_valid(d);
    return d;
}

// Canonical form: fixed key order, 17 significant digits, roots listed once
// per +- pair and sorted lexicographically.
inline std::string serialize_datum(const CartanDatum& d) {
    std::vector<const RestrictedRoot*> reps;
    for (const auto& r : d.roots)
        if (detail::lex_positive(r.v)) reps.push_back(&r);
    std::sort(reps.begin(), reps.end(),
              [](const RestrictedRoot* a, const RestrictedRoot* b) { return lex_compare(a->v, b->v) < 0; });

    std::string out;
    out += "{\n";
    out += "  \"name\": " + nlohmann::json(d.name).dump() + ",\n";
    out += "  \"rank\": " + std::to_string(d.r0) + ",\n";
    out += "  \"dim_a\": " + std::to_string(d.dim_a) + ",\n";
    out += "  \"dim_tg\": " + std::to_string(d.dim_tg) + ",\n";
    out += "  \"roots\": [\n";
    for (std::size_t i = 0; i < reps.size(); ++i) {
        out += "    {\"coords\": [";
        for (std::size_t c = 0; c < reps[i]->v.size(); ++c) {
            if (c) out += ", ";
            out += detail::fmt17(reps[i]->v[c]);
        }
        out += "], \"mult_p\": " + std::to_string(reps[i]->mult_p);
        out += ", \"mult_k\": " + std::to_string(reps[i]->mult_k) + "}";
        if (i + 1 < reps.size()) out += ",";
        out += "\n";
    }
    out += "  ]\n}\n";
    return out;
}

inline HighestWeight parse_weight(const std::string& text, int r0) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("weight parse error: ") + e.what());
    }
    HighestWeight w;
    try {
        w.lambda = j.at("lambda").get<std::vector<double>>();
        if (j.contains("lambda_a")) w.lambda_a = j.at("lambda_a").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("weight field error: ") + e.what());
    }
    if (static_cast<int>(w.lambda.size()) != r0) throw ParseError("weight length does not match datum rank");
    return w;
}

}  // namespace heattrace
