// Command-line front end: analyses, t-sweeps, asymptotic fits, per-chamber
// tables, Novikov-Shubin reports and the verification suite.  Emits JSON/CSV
// suitable for offline plotting.  Exit codes: 0 ok, 1 verification failure,
// 2 usage error, 3 numerical-assumption violation.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "heattrace/catalog.hpp"
#include "heattrace/constants.hpp"
#include "heattrace/heattrace.hpp"
#include "heattrace/novikov.hpp"

namespace ht = heattrace;
using json = nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::string group = "sl2R";
    std::vector<double> weight;
    std::vector<double> weight_a;
    std::string weight_file;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    std::string t_spec = "40:400:12";
    std::string out;
    std::string format = "json";
    std::size_t mc_samples = 400000;
    std::string convention = "multiplicity";
    double vol = 1.0;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ht::CartanDatum load_group(const std::string& spec) {
    for (const auto& name : ht::catalog_names())
        if (name == spec) return ht::builtin(name).datum;
    std::ifstream in(spec);
    if (!in) throw ht::UnknownName("group '" + spec + "' is neither a catalog name nor a readable file");
    std::stringstream ss;
    ss << in.rdbuf();
    return ht::parse_datum(ss.str());
}

ht::HighestWeight make_weight(const ht::CartanDatum& d, const RunConfig& cfg) {
    if (!cfg.weight_file.empty()) {
        if (!cfg.weight.empty() || !cfg.weight_a.empty())
            throw ht::ParseError("--weight-file excludes --weight/--weight-a");
        std::ifstream in(cfg.weight_file);
        if (!in) throw ht::ParseError("cannot read weight file '" + cfg.weight_file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return ht::parse_weight(ss.str(), d.r0);
    }
    ht::HighestWeight w;
    w.lambda = cfg.weight;
    if (w.lambda.empty()) w.lambda = ht::zero_vec(static_cast<std::size_t>(d.r0));
    if (static_cast<int>(w.lambda.size()) != d.r0)
        throw ht::ParseError("--weight needs " + std::to_string(d.r0) + " coordinates");
    w.lambda_a = cfg.weight_a;
    return w;
}

std::vector<int> default_pos_k(const ht::CartanDatum& d) {
    std::vector<int> pos_k;
    ht::Vec g = ht::detail::generic_positive_functional(d);
    for (std::size_t i = 0; i < d.roots.size(); ++i)
        if (d.roots[i].mult_k == 1 && ht::dot(d.roots[i].v, g) > 0) pos_k.push_back(static_cast<int>(i));
    return pos_k;
}

struct TGrid {
    double t_min = 40, t_max = 400;
    int count = 12;
    std::vector<double> points() const {
        std::vector<double> t(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            t[static_cast<std::size_t>(i)] =
                count == 1 ? t_min : t_min * std::pow(t_max / t_min, double(i) / double(count - 1));
        return t;
    }
};

TGrid parse_grid(const std::string& spec) {
    TGrid g;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &g.t_min, &g.t_max, &g.count) != 3)
        throw ht::ParseError("--t expects min:max:count");
    if (g.t_min <= 0 || g.t_max < g.t_min) throw ht::ParseError("--t range must be positive and increasing");
    if (g.t_max > 500.0) throw ht::ParseError("--t max exceeds the supported cap 500 (double overflow guard)");
    if (g.count < 1) throw ht::ParseError("--t count must be >= 1");
    return g;
}

void write_output(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) return;
    std::ofstream out(cfg.out, std::ios::binary);
    out << text;
}

json metadata(const RunConfig& cfg, const ht::PositiveSystem& ps) {
    json m;
    m["seed"] = cfg.seed;
    m["tol"] = cfg.tol;
    m["mc_samples"] = cfg.mc_samples;
    m["convention"] = cfg.convention;
    m["tie_break_trace"] = ps.tie_break_trace;
    return m;
}

json estimate_json(const ht::Estimate& e) {
    json j;
    j["value"] = e.real();
    j["err"] = e.real_err();
    j["log_value"] = e.log_abs();
    j["kind"] = e.kind == ht::EstimateKind::mc ? "mc" : "quadrature";
    j["n_evals"] = e.n_evals;
    j["converged"] = e.converged;
    return j;
}

struct Loaded {
    ht::CartanDatum datum;
    ht::HighestWeight lambda;
    ht::PositiveSystem ps;
    ht::HeatOptions opt;
    ht::MultConvention conv;
};

Loaded load(const RunConfig& cfg) {
    Loaded L{load_group(cfg.group), {}, {}, {}, ht::MultConvention::multiplicity};
    L.lambda = make_weight(L.datum, cfg);
    L.ps = ht::choose_positive_system(L.datum, default_pos_k(L.datum), L.lambda);
    L.opt.tol = cfg.tol;
    L.opt.seed = cfg.seed;
    L.opt.mc_samples = cfg.mc_samples;
    if (cfg.convention == "plain") L.conv = ht::MultConvention::plain;
    return L;
}

int cmd_catalog_list() {
    for (const auto& name : ht::catalog_names()) {
        auto e = ht::builtin(name);
        std::printf("%-14s r0=%d dim_a=%d m=%d n=%d  %s\n", name.c_str(), e.datum.r0, e.datum.dim_a,
                    e.datum.dim_p(), e.datum.dim_k(), e.provenance.c_str());
    }
    return 0;
}

json constants_json(const ht::AsymptoticConstants& c) {
    json j;
    j["alpha01"] = estimate_json(c.alpha01);
    j["alpha12"] = estimate_json(c.alpha12);
    j["alpha2"] = c.alpha2;
    j["alpha0"] = estimate_json(c.alpha0);
    j["alpha0_bar"] = estimate_json(c.alpha0_bar);
    j["beta1"] = c.beta1;
    j["beta1_bar"] = c.beta1_bar;
    j["gamma2"] = c.gamma2;
    j["gamma2_bar"] = c.gamma2_bar;
    return j;
}

int cmd_analyze(const RunConfig& cfg) {
    auto L = load(cfg);
    auto cls = ht::classify(L.datum, L.ps, L.lambda);
    auto c = ht::asymptotic_constants(L.datum, L.ps, L.lambda, cfg.seed, L.opt, L.conv);
    auto spectrum = ht::classify_spectrum(c);

    json j;
    j["group"] = L.datum.name;
    j["lambda"] = L.lambda.lambda;
    json cl;
    cl["delta1_size"] = cls.decomp.pair.delta1.size();
    cl["delta2_size"] = cls.decomp.pair.delta2.size();
    cl["equal_rank"] = cls.equal_rank;
    cl["regular"] = cls.regular;
    cl["mu2"] = cls.mu2;
    j["classification"] = cl;
    j["constants"] = constants_json(c);
    json sp;
    sp["support_bottom"] = spectrum.bottom;
    sp["has_gap"] = spectrum.has_gap;
    sp["atom_mass"] = spectrum.atom_mass;
    sp["tempered"] = spectrum.tempered_note;
    j["spectral_measure"] = sp;
    if (cls.regular && cls.equal_rank) j["formal_degree"] = ht::formal_degree(L.datum, L.ps, L.lambda);
    // data with two-dimensional root spaces are sensitive to the product
    // convention in pi_1^2 / pi_2; flag them so both conventions get compared
    bool dim2 = false;
    for (const auto& r : L.datum.roots) dim2 = dim2 || r.dim() == 2;
    if (dim2)
        j["convention_note"] =
            "datum has dim-2 root spaces: alpha12/alpha2 depend on the exponent convention (--convention)";
    j["metadata"] = metadata(cfg, L.ps);

    std::string text = j.dump(2) + "\n";
    std::cout << text;
    write_output(cfg, text);
    return 0;
}

int cmd_trace(const RunConfig& cfg) {
    auto L = load(cfg);
    auto grid = parse_grid(cfg.t_spec);
    auto c = ht::asymptotic_constants(L.datum, L.ps, L.lambda, cfg.seed, L.opt, L.conv);

    std::string csv = "t,trace,trace_err,asymptote,ratio\n";
    json rows = json::array();
    for (double t : grid.points()) {
        auto s = ht::trace_G(L.datum, L.ps, L.lambda, t, L.opt);
        double log_asym = std::log(c.alpha0_bar.real()) + c.beta1_bar * std::log(t) + c.gamma2_bar * t;
        double asym = std::exp(log_asym);
        double ratio = std::exp(s.trace.log_abs() - log_asym);
        csv += fmt(t) + "," + fmt(s.trace.real()) + "," + fmt(s.trace.real_err()) + "," + fmt(asym) + "," +
               fmt(ratio) + "\n";
        json r;
        r["t"] = t;
        r["trace"] = s.trace.real();
        r["trace_err"] = s.trace.real_err();
        r["asymptote"] = asym;
        r["ratio"] = ratio;
        rows.push_back(std::move(r));
    }
    std::cout << csv;
    if (cfg.format == "csv") {
        write_output(cfg, csv);
    } else {
        json j;
        j["group"] = L.datum.name;
        j["lambda"] = L.lambda.lambda;
        j["rows"] = rows;
        j["metadata"] = metadata(cfg, L.ps);
        write_output(cfg, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_fit(const RunConfig& cfg) {
    auto L = load(cfg);
    auto grid = parse_grid(cfg.t_spec);
    if (grid.count < 4) throw ht::ParseError("--t count must be >= 4 for a fit");
    auto c = ht::asymptotic_constants(L.datum, L.ps, L.lambda, cfg.seed, L.opt, L.conv);

    std::vector<std::pair<double, double>> samples;
    for (double t : grid.points()) {
        auto s = ht::trace_G(L.datum, L.ps, L.lambda, t, L.opt);
        samples.push_back({t, s.trace.log_abs()});
    }
    auto fit = ht::fit_asymptotics(samples);

    json j;
    j["group"] = L.datum.name;
    j["lambda"] = L.lambda.lambda;
    json jf;
    jf["alpha"] = std::exp(fit.log_alpha);
    jf["beta"] = fit.beta;
    jf["gamma"] = fit.gamma;
    jf["residual_max"] = fit.residual_max;
    jf["condition"] = fit.condition;
    j["fitted"] = jf;
    json jc;
    jc["alpha0_bar"] = c.alpha0_bar.real();
    jc["beta1_bar"] = c.beta1_bar;
    jc["gamma2_bar"] = c.gamma2_bar;
    j["closed_form"] = jc;
    json jd;
    jd["alpha_rel"] = std::exp(fit.log_alpha) / c.alpha0_bar.real() - 1.0;
    jd["beta_abs"] = fit.beta - c.beta1_bar;
    jd["gamma_abs"] = fit.gamma - c.gamma2_bar;
    j["deviation"] = jd;
    j["metadata"] = metadata(cfg, L.ps);

    std::string text = j.dump(2) + "\n";
    std::cout << text;
    write_output(cfg, text);
    return 0;
}

int cmd_chambers(const RunConfig& cfg) {
    auto L = load(cfg);
    auto rep = ht::verify_theorems(L.datum, L.ps, L.lambda, cfg.seed, L.opt);

    json j;
    j["group"] = L.datum.name;
    j["lambda"] = L.lambda.lambda;
    json rows = json::array();
    for (std::size_t i = 0; i < rep.chambers.size(); ++i) {
        const auto& cc = rep.chambers[i];
        json r;
        r["w_index"] = i;
        r["eps_w2"] = cc.eps_w2;
        r["alpha_w"] = estimate_json(cc.alpha_w);
        r["beta_w"] = cc.beta_w;
        r["gamma_w"] = cc.gamma_w;
        r["A_sizes"] = {cc.a01.size(), cc.a12.size(), cc.a2.size()};
        r["B_sizes"] = {cc.b01.size(), cc.b12.size(), cc.b2.size()};
        rows.push_back(std::move(r));
    }
    j["chambers"] = rows;
    json th;
    th["w02_members"] = rep.w02_members;
    th["w01_members"] = rep.w01_members;
    th["gamma_ordering_ok"] = rep.gamma_ordering_ok;
    th["beta_ordering_ok"] = rep.beta_ordering_ok;
    th["sum_identity"] = {{"lhs", rep.sum_identity_lhs},
                          {"rhs", rep.sum_identity_rhs},
                          {"sigma", rep.sum_identity_sigma},
                          {"ok", rep.sum_identity_ok}};
    j["theorems"] = th;
    j["metadata"] = metadata(cfg, L.ps);

    std::string text = j.dump(2) + "\n";
    std::cout << text;
    write_output(cfg, text);
    return 0;
}

int cmd_novikov(const RunConfig& cfg) {
    auto L = load(cfg);
    ht::FlatTwist twist{L.lambda.lambda, L.lambda.lambda_a};
    auto rep = ht::ns_flat(L.datum, L.ps, twist);

    json j;
    j["group"] = L.datum.name;
    j["delta_G"] = rep.delta_g;
    j["band"] = {rep.band_lo, rep.band_hi};
    j["casimir_scalar"] = ht::casimir_scalar(L.datum, L.ps, twist);
    json per = json::array();
    for (const auto& [i, deg] : rep.per_degree) {
        json r;
        r["degree"] = i;
        r["case"] = deg.which == ht::NSCase::a ? "a" : (deg.which == ht::NSCase::b ? "b" : "c");
        r["ns"] = std::isinf(deg.ns) ? json("inf") : json(deg.ns);
        per.push_back(std::move(r));
    }
    j["per_degree"] = per;

    // bundle invariant, reading --weight as the K-weight lambda^E
    try {
        double v = ht::ns_bundle(L.datum, L.ps, L.lambda, cfg.vol, cfg.seed);
        j["ns_bundle"] = std::isinf(v) ? json("inf") : json(v);
    } catch (const ht::AssumptionViolated& e) {
        j["ns_bundle"] = std::string("n/a: ") + e.what();
    }
    j["metadata"] = metadata(cfg, L.ps);

    std::string text = j.dump(2) + "\n";
    std::cout << text;
    write_output(cfg, text);
    return 0;
}

// Compact invariant suite over one group; returns 1 on any failure.
int cmd_verify(const RunConfig& cfg) {
    auto L = load(cfg);
    const auto& d = L.datum;
    const auto& ps = L.ps;
    int failures = 0;
    auto check = [&failures](const std::string& name, bool ok) {
        std::printf("%-58s %s\n", name.c_str(), ok ? "pass" : "FAIL");
        if (!ok) ++failures;
    };
    auto guarded = [&](const std::string& name, auto&& fn) {
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            std::printf("  (%s: %s)\n", name.c_str(), e.what());
            ok = false;
        }
        check(name, ok);
    };

    guarded("datum axioms", [&] { return ht::validate_datum(d).ok(); });
    guarded("weyl group generation and signs", [&] {
        auto wg = ht::weyl_group(d, ht::WhichGroup::g);
        for (const auto& w : wg) {
            if (ht::detail::matrix_sign(w.matrix) != w.sign) return false;
            for (std::size_t i = 0; i < d.roots.size(); ++i)
                if (d.roots[static_cast<std::size_t>(w.perm[i])].dim() != d.roots[i].dim()) return false;
        }
        return true;
    });
    guarded("cone projection certificates (200 random vectors)", [&] {
        std::mt19937 rng(static_cast<unsigned>(cfg.seed));
        std::uniform_real_distribution<double> u(-3, 3);
        for (int trial = 0; trial < 200; ++trial) {
            ht::Vec v(static_cast<std::size_t>(d.r0));
            for (auto& x : v) x = u(rng);
            ht::Vec p = ht::cone_project(d, ps, v);
            if (std::fabs(ht::dot(ht::sub(v, p), p)) > 1e-9) return false;
            for (int i : ps.simple)
                if (ht::dot(d.roots[static_cast<std::size_t>(i)].v, p) < -1e-9) return false;
        }
        return true;
    });
    guarded("chamber additivity at t = 5", [&] {
        ht::Vec mu = ht::zero_vec(static_cast<std::size_t>(d.r0));
        for (std::size_t i = 0; i < ps.coweights.size(); ++i)
            ht::axpy(mu, 0.4 + 0.21 * double(i), ps.coweights[i]);
        auto full = ht::I_t(d, ps, mu, 5.0, L.opt);
        double sum = 0, err = full.real_err();
        for (const auto& w : ht::weyl_group(d, ht::WhichGroup::g)) {
            auto piece = ht::I_t_chamber(d, ps, mu, w, 5.0, L.opt);
            sum += piece.real();
            err += piece.real_err();
        }
        return std::fabs(sum - full.real()) <= 4 * err + 1e-9 * std::fabs(full.real());
    });
    guarded("ordering theorems and sum identity", [&] {
        auto rep = ht::verify_theorems(d, ps, L.lambda, cfg.seed, L.opt);
        return rep.gamma_ordering_ok && rep.beta_ordering_ok && rep.sum_identity_ok;
    });
    guarded("short-time diagnostic in [0.99, 1.01]", [&] {
        ht::HeatOptions o = L.opt;
        o.tol = std::max(o.tol, 1e-8);
        double v = ht::small_t_diagnostic(d, ps, L.lambda, 1e-3, o);
        return v > 0.99 && v < 1.01;
    });
    guarded("beta1_bar half-integer and gamma2 >= 0", [&] {
        auto c = ht::asymptotic_constants(d, ps, L.lambda, cfg.seed, L.opt, L.conv);
        return std::fabs(2 * c.beta1_bar - std::round(2 * c.beta1_bar)) < 1e-9 && c.beta1_bar <= 1e-12 &&
               c.gamma2 >= 0;
    });
    guarded("novikov band symmetry and parity", [&] {
        auto rep = ht::ns_flat(d, ps, {ht::zero_vec(static_cast<std::size_t>(d.r0)), {}});
        return rep.band_lo + rep.band_hi == d.dim_p() && (d.dim_p() - rep.delta_g) % 2 == 0;
    });

    std::printf("verify: %d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"large-time heat-trace asymptotics on symmetric spaces from restricted-root data"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--group", cfg.group, "catalog name or datum file path");
        sub->add_option("--weight", cfg.weight, "highest-weight coordinates (lambda^E or lambda^V|t0)")
            ->delimiter(',');
        sub->add_option("--weight-a", cfg.weight_a, "lambda^V restricted to a (novikov)")->delimiter(',');
        sub->add_option("--weight-file", cfg.weight_file, "weight file {lambda: [...], lambda_a: [...]}");
        sub->add_option("--seed", cfg.seed, "PRNG seed");
        sub->add_option("--tol", cfg.tol, "quadrature relative tolerance");
        sub->add_option("--t", cfg.t_spec, "geometric t grid min:max:count");
        sub->add_option("--out", cfg.out, "output file path");
        sub->add_option("--format", cfg.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--mc-samples", cfg.mc_samples, "Monte Carlo sample count");
        sub->add_option("--convention", cfg.convention, "multiplicity|plain (pi_1^2 / pi_2 exponents)")
            ->check(CLI::IsMember({"multiplicity", "plain"}));
        sub->add_option("--vol", cfg.vol, "quotient volume (scales the reported atom only)");
    };

    auto* cat = app.add_subcommand("catalog", "built-in Cartan data");
    cat->add_subcommand("list", "list catalog entries");

    auto* analyze = app.add_subcommand("analyze", "classification, constants, spectrum");
    auto* trace = app.add_subcommand("trace", "trace samples over a t grid");
    auto* fitc = app.add_subcommand("fit", "trace sweep plus asymptotic fit");
    auto* chambers = app.add_subcommand("chambers", "per-chamber constants and theorem checks");
    auto* novikov = app.add_subcommand("novikov", "Novikov-Shubin report");
    auto* verify = app.add_subcommand("verify", "invariant suite; nonzero exit on failure");
    for (auto* sub : {analyze, trace, fitc, chambers, novikov, verify}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cat->parsed()) return cmd_catalog_list();
        if (analyze->parsed()) return cmd_analyze(cfg);
        if (trace->parsed()) return cmd_trace(cfg);
        if (fitc->parsed()) return cmd_fit(cfg);
        if (chambers->parsed()) return cmd_chambers(cfg);
        if (novikov->parsed()) return cmd_novikov(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
    } catch (const ht::AssumptionViolated& e) {
        std::cerr << "numerical assumption violated: " << e.what() << "\n";
        return 3;
    } catch (const ht::IntegrabilityViolated& e) {
        std::cerr << "numerical assumption violated: " << e.what() << "\n";
        return 3;
    } catch (const ht::ToleranceAmbiguity& e) {
        std::cerr << "numerical assumption violated: " << e.what() << "\n";
        return 3;
    } catch (const ht::IllConditioned& e) {
        std::cerr << "numerical assumption violated: " << e.what() << "\n";
        return 3;
    } catch (const ht::LowAcceptance& e) {
        std::cerr << "numerical assumption violated: " << e.what() << "\n";
        return 3;
    } catch (const ht::TheoremViolation& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 1;
    } catch (const ht::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
