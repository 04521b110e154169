#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance.hpp"
#include "appendix.hpp"
#include "audits.hpp"
#include "counting.hpp"
#include "densities.hpp"
#include "dualgeom.hpp"
#include "expsums.hpp"

namespace delta_lab::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitAcceptance = 2;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Triple parse_triple(const std::string& s, const char* what) {
    Triple t{};
    std::stringstream ss(s);
    std::string tok;
    int k = 0;
    while (std::getline(ss, tok, ',')) {
        if (k == 3) throw ValidationError(std::string(what) + ": expected three comma-separated integers");
        try {
            size_t used = 0;
            t[size_t(k)] = std::stoll(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError(std::string(what) + ": not an integer: '" + tok + "'");
        }
        ++k;
    }
    if (k != 3) throw ValidationError(std::string(what) + ": expected three comma-separated integers");
    return t;
}

inline Json triple_json(const Triple& t) { return Json::array({t[0], t[1], t[2]}); }

// Flat key=value file; '#' starts a comment. Keys are long flag names without dashes.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int no = 0;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++no;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(no) + ": expected key=value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

// Inserts config entries after the subcommand unless the flag is already given.
inline std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::string path;
    std::vector<std::string> rest;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[++i];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
        else rest.push_back(args[i]);
    }
    if (path.empty()) return rest;
    auto given = [&](const std::string& key) {
        for (const auto& a : rest)
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
        return false;
    };
    std::vector<std::string> out;
    size_t sub = rest.size() > 1 ? 1 : rest.size();
    for (size_t i = 0; i <= sub && i < rest.size(); ++i) out.push_back(rest[i]);
    for (const auto& [k, v] : read_config(path)) {
        if (given(k)) continue;
        if (v == "true") out.push_back("--" + k);
        else if (v != "false") out.push_back("--" + k + "=" + v);
    }
    for (size_t i = sub + 1; i < rest.size(); ++i) out.push_back(rest[i]);
    return out;
}

// A result with a "rows" array is written as one CSV row per entry, otherwise as a single row.
inline std::string to_csv(const Json& j) {
    Json rows = j.contains("rows") ? j["rows"] : Json::array({j});
    if (rows.empty()) return "";
    std::vector<std::string> cols;
    for (auto it = rows[0].begin(); it != rows[0].end(); ++it)
        if (it.key() != "rows") cols.push_back(it.key());
    auto cell = [](const Json& v) {
        std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    };
    std::string out;
    for (size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + (r.contains(cols[i]) ? cell(r[cols[i]]) : "");
        out += "\n";
    }
    return out;
}

struct Common {
    std::string format = "json";
    std::string out;
    uint64_t seed = densities::kDefaultSeed;
    unsigned workers = default_workers();
};

struct Weights {
    double delta0 = 0.25, scale = 1.0;
    densities::WeightSpec spec() const { return {delta0, scale, "mollifier"}; }
};

inline void add_common(CLI::App* s, Common& c) {
    s->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--out", c.out, "output file (default stdout)");
    s->add_option("--seed", c.seed, "random seed");
    s->add_option("--workers", c.workers, "worker threads (default DELTA_LAB_WORKERS)")->check(CLI::PositiveNumber);
}

inline void add_weights(CLI::App* s, Weights& w) {
    s->add_option("--delta0", w.delta0, "inner radius of the y profile");
    s->add_option("--scale", w.scale, "support scale of the weight");
}

inline Json estimate_json(const densities::DensityEstimate& e, bool stochastic) {
    Json j{{"value", e.value}, {"method", densities::method_name(e.method)}, {"nodes", e.nodes}};
    if (stochastic) j["stderr"] = e.stderr_, j["seed"] = e.seed;
    else j["error_estimate"] = e.error_estimate;
    return j;
}

inline Json audit_json(const audits::AuditReport& r, const audits::AuditParams& P) {
    Json j{{"lemma", r.lemma}, {"statement", r.statement}, {"exact", r.exact}, {"box", P.box},
           {"qmax", P.qmax},   {"cases", r.cases},         {"violations", r.violations}};
    if (!r.exact) j["sup_ratio"] = r.sup_ratio, j["witness"] = r.witness;
    if (!r.first_violation.empty()) j["first_violation"] = r.first_violation;
    j["passed"] = r.passed();
    return j;
}

inline Json scan_json(const appendix::DiamondScanReport& r) {
    Json rows = Json::array();
    for (const auto& w : r.witnesses) rows.push_back(acceptance::witness_json(w));
    return {{"cubic", appendix::cubic_name(r.cubic)},
            {"c1", r.coeffs.c1},
            {"c2", r.coeffs.c2},
            {"p_range", {r.p_lo, r.p_hi}},
            {"box", r.box},
            {"locus", r.locus},
            {"evaluated", r.evaluated},
            {"excluded", r.excluded},
            {"sup_ratio", r.sup_ratio.str()},
            {"sup_ratio_approx", r.sup_ratio.convert_to<double>()},
            {"spot_checks", r.spot_checks},
            {"spot_mismatches", r.spot_mismatches},
            {"rows", rows}};
}

// Runs one invocation. Output goes to `out` unless --out names a file; diagnostics go to `err`.
inline int run(const std::vector<std::string>& argv_in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact exponential sums, dual geometry, densities and point counts", "delta_lab"};
    app.require_subcommand(1);
    Common C;
    Weights W;
    Json result;
    int code = kExitOk;

    // expsum
    auto* s_exp = app.add_subcommand("expsum", "evaluate S_q(m, n)");
    int64_t q = 0;
    std::string m_s = "0,0,0", n_s = "0,0,0", how = "auto";
    s_exp->add_option("--q", q, "modulus")->required();
    s_exp->add_option("--m", m_s, "m as a,b,c");
    s_exp->add_option("--n", n_s, "n as a,b,c");
    s_exp->add_option("--method", how, "auto, brute, reduced, closed or prime-power")
        ->check(CLI::IsMember({"auto", "brute", "reduced", "closed", "prime-power"}));
    add_common(s_exp, C);

    // audit
    auto* s_aud = app.add_subcommand("audit", "exact audit of a structure lemma");
    std::string lemma = "all";
    int64_t a_box = -1, a_qmax = -1;
    int a_rmax = -1;
    std::vector<int64_t> a_primes;
    s_aud->add_option("--lemma", lemma, "lemma id or all");
    s_aud->add_option("--box", a_box, "frequency box");
    s_aud->add_option("--qmax", a_qmax, "largest modulus");
    s_aud->add_option("--rmax", a_rmax, "largest prime exponent");
    s_aud->add_option("--primes", a_primes, "primes for prime-power audits")->delimiter(',');
    add_common(s_aud, C);

    // dual
    auto* s_dual = app.add_subcommand("dual", "enumerate or classify dual points");
    int64_t M = 3;
    bool no_coord = false;
    std::string dm, dn;
    s_dual->add_option("--M", M, "height bound");
    s_dual->add_flag("--no-coordinate", no_coord, "skip coordinate-degenerate points");
    s_dual->add_option("--m", dm, "classify a single point: m as a,b,c");
    s_dual->add_option("--n", dn, "classify a single point: n as a,b,c");
    add_common(s_dual, C);

    // density
    auto* s_den = app.add_subcommand("density", "archimedean densities");
    std::string d_method = "leray", d_t = "1,1,1";
    double eps = 1e-3, U = 1.0, rel_tol = 1e-4, abs_tol = 1e-6;
    uint64_t samples = 1'000'000;
    int64_t H = 100;
    s_den->add_option("--method", d_method, "leray, slab, ladder, lattice, lattice-sum, theta or constants")
        ->check(CLI::IsMember({"leray", "slab", "ladder", "lattice", "lattice-sum", "theta", "constants"}));
    s_den->add_option("--eps", eps, "slab half-width");
    s_den->add_option("--samples", samples, "Monte Carlo samples per slab");
    s_den->add_option("--t", d_t, "lattice direction a,b,c");
    s_den->add_option("--H", H, "lattice sum height");
    s_den->add_option("--U", U, "shell radius for theta");
    s_den->add_option("--rel-tol", rel_tol, "relative quadrature tolerance");
    s_den->add_option("--abs-tol", abs_tol, "absolute quadrature tolerance");
    add_weights(s_den, W);
    add_common(s_den, C);

    // count
    auto* s_cnt = app.add_subcommand("count", "weighted point count N(B)");
    int64_t B = 32;
    double theta = 0.75, sigma = 0;
    bool naive = false, ratio = false;
    s_cnt->add_option("--B", B, "height");
    s_cnt->add_option("--theta", theta, "stratum exponent");
    s_cnt->add_flag("--naive", naive, "full-box oracle (B <= 16)");
    s_cnt->add_flag("--ratio", ratio, "report R(B) against the predicted main term");
    s_cnt->add_option("--sigma-inf", sigma, "sigma_inf for --ratio (computed when absent)");
    add_weights(s_cnt, W);
    add_common(s_cnt, C);

    // series
    auto* s_ser = app.add_subcommand("series", "partial sums of the singular series and slope fit");
    int64_t x = 1'000'000, audit_t = 0;
    int points = 200;
    s_ser->add_option("--x", x, "upper end of the window");
    s_ser->add_option("--points", points, "fit points");
    s_ser->add_option("--audit", audit_t, "exact rational audit up to this t");
    add_common(s_ser, C);

    // hooley
    auto* s_hoo = app.add_subcommand("hooley", "Hooley averages S_T");
    int64_t T = 8;
    std::string h_d = "1,1,1";
    s_hoo->add_option("--T", T, "box size");
    s_hoo->add_option("--d", h_d, "d as a,b,c");
    add_common(s_hoo, C);

    // rho
    auto* s_rho = app.add_subcommand("rho", "zero counts of G_d^e over F_p^6");
    int64_t rp = 5;
    std::string r_d = "1,1,1", r_e = "1,1,1";
    bool hist = false;
    s_rho->add_option("--p", rp, "prime <= 13")->required();
    s_rho->add_option("--d", r_d, "d as a,b,c");
    s_rho->add_option("--e", r_e, "signs as a,b,c");
    s_rho->add_flag("--histogram", hist, "also count through the value histogram");
    add_common(s_rho, C);

    // appendix
    auto* s_app = app.add_subcommand("appendix", "appendix sums, counts and the Salie identity");
    int64_t ap = 5, c1 = -1, c2 = 0;
    std::string a_op = "sum";
    s_app->add_option("--p", ap, "odd prime")->required();
    s_app->add_option("--m", m_s, "m as a,b,c");
    s_app->add_option("--n", n_s, "n as a,b,c");
    s_app->add_option("--op", a_op, "sum, direct, family, counts or salie")
        ->check(CLI::IsMember({"sum", "direct", "family", "counts", "salie"}));
    s_app->add_option("--c1", c1, "family coefficient c1");
    s_app->add_option("--c2", c2, "family coefficient c2");
    add_common(s_app, C);

    // diamond
    auto* s_dia = app.add_subcommand("diamond", "scan |S_p(b)| / p^3 off the exceptional locus");
    std::string cubic = "F";
    int64_t P = 31, box = 2, p_lo = 5;
    s_dia->add_option("--cubic", cubic, "F, F2 or family")->check(CLI::IsMember({"F", "F2", "family"}));
    s_dia->add_option("--P", P, "prime bound");
    s_dia->add_option("--box", box, "height bound on b");
    s_dia->add_option("--p-lo", p_lo, "smallest prime");
    s_dia->add_option("--c1", c1, "family coefficient c1");
    s_dia->add_option("--c2", c2, "family coefficient c2");
    add_common(s_dia, C);

    // report
    auto* s_rep = app.add_subcommand("report", "run the acceptance suite");
    bool quick = false;
    std::vector<int> only;
    s_rep->add_flag("--quick", quick, "reduced sizes, same schema");
    s_rep->add_option("--only", only, "criterion ids")->delimiter(',');
    add_common(s_rep, C);

    std::vector<std::string> args;
    try {
        args = merge_config(argv_in);
    } catch (const ValidationError& e) {
        err << e.what() << "\n";
        return kExitValidation;
    }
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return kExitValidation;
    }

    try {
        if (*s_exp) {
            Freq f{parse_triple(m_s, "--m"), parse_triple(n_s, "--n")};
            if (q < 1) throw ValidationError("--q must be positive");
            BigInt v;
            std::string tag;
            if (how == "auto") {
                expsums::Method mt;
                v = expsums::s_q(q, f, &mt);
                tag = expsums::method_name(mt);
            } else if (how == "brute") {
                v = expsums::brute_force_full(q, f), tag = "brute_force";
            } else if (how == "reduced") {
                v = expsums::reduced_sum(q, f), tag = "reduced_sum";
            } else if (how == "closed") {
                if (!arith::is_prime(uint64_t(q)) || q < 5) throw ValidationError("closed form needs a prime q >= 5");
                v = expsums::closed_form_prime(q, f), tag = "closed_form";
            } else {
                auto fac = arith::factor(uint64_t(q));
                if (fac.factors.size() != 1) throw ValidationError("prime-power method needs q = p^r");
                v = expsums::prime_power(int64_t(fac.factors[0].first), fac.factors[0].second, f), tag = "prime_power";
            }
            result = {{"q", q}, {"value", v.str()}, {"method", tag}};
        } else if (*s_aud) {
            std::vector<std::string> ids;
            if (lemma == "all") ids = audits::lemma_ids();
            else {
                const auto& known = audits::lemma_ids();
                if (std::find(known.begin(), known.end(), lemma) == known.end())
                    throw ValidationError("unknown lemma '" + lemma + "'");
                ids = {lemma};
            }
            Json rows = Json::array();
            bool ok = true;
            for (const auto& id : ids) {
                auto Pm = audits::default_params(id, C.workers);
                if (a_box >= 0) Pm.box = a_box;
                if (a_qmax >= 0) Pm.qmax = a_qmax;
                if (a_rmax >= 0) Pm.rmax = a_rmax;
                if (!a_primes.empty()) Pm.primes = a_primes;
                auto r = audits::lemma_audit(id, Pm);
                ok = ok && r.passed();
                rows.push_back(audit_json(r, Pm));
                if (!r.passed()) err << "audit " << id << " failed: " << r.first_violation << "\n";
            }
            result = {{"passed", ok}, {"rows", rows}};
            if (!ok) code = kExitAcceptance;
        } else if (*s_dual) {
            if (!dm.empty() || !dn.empty()) {
                Freq f{parse_triple(dm.empty() ? "0,0,0" : dm, "--m"), parse_triple(dn.empty() ? "0,0,0" : dn, "--n")};
                if (f.is_zero()) throw ValidationError("dual: (m, n) must be non-zero");
                auto cls = dualgeom::classify_dual_point(f);
                result = {{"m", triple_json(f.m)},
                          {"n", triple_json(f.n)},
                          {"dual_form", to_string(dualgeom::dual_form(f))},
                          {"kind", dualgeom::kind_name(cls.kind)},
                          {"index", cls.index},
                          {"t", triple_json(cls.t)}};
            } else {
                auto pts = dualgeom::enumerate_dual_points(M, {!no_coord});
                Json rows = Json::array();
                for (const auto& p : pts)
                    rows.push_back({{"m", triple_json(p.f.m)},
                                    {"n", triple_json(p.f.n)},
                                    {"height", dualgeom::height(p.f)},
                                    {"kind", dualgeom::kind_name(p.cls.kind)},
                                    {"index", p.cls.index},
                                    {"t", triple_json(p.cls.t)}});
                result = {{"M", M}, {"count", pts.size()}, {"rows", rows}};
            }
        } else if (*s_den) {
            auto w = W.spec();
            densities::validate(w);
            densities::QuadOptions qo;
            qo.rel_tol = rel_tol, qo.abs_tol = abs_tol;
            if (d_method == "leray") {
                result = estimate_json(densities::sigma_inf_leray(w, qo, C.workers), false);
            } else if (d_method == "slab") {
                result = estimate_json(densities::sigma_inf_slab(w, eps, samples, C.seed, C.workers), true);
                result["eps"] = eps;
            } else if (d_method == "ladder") {
                auto L = densities::sigma_inf_slab_ladder(w, samples, C.seed, {1e-2, 1e-3 * std::sqrt(10.0), 1e-3},
                                                          C.workers);
                result = estimate_json(L.extrapolated, true);
                result["seed"] = C.seed;
                Json rows = Json::array();
                for (size_t k = 0; k < L.rungs.size(); ++k) {
                    Json r = estimate_json(L.rungs[k], true);
                    r["eps"] = L.eps[k];
                    rows.push_back(r);
                }
                result["rows"] = rows;
            } else if (d_method == "lattice") {
                Triple t = parse_triple(d_t, "--t");
                result = estimate_json(densities::sigma_lattice(t, w, qo), false);
                result["t"] = triple_json(t);
            } else if (d_method == "lattice-sum") {
                Triple t = parse_triple(d_t, "--t");
                result = estimate_json(densities::lattice_limit_sum(t, w, H), false);
                result["t"] = triple_json(t);
                result["H"] = H;
            } else if (d_method == "theta") {
                result = estimate_json(densities::theta(U, w, qo, C.workers), false);
                result["U"] = U;
            } else {
                auto e = densities::sigma_inf_leray(w, qo, C.workers);
                auto pc = densities::predicted_constants(e.value);
                result = {{"sigma_inf", pc.sigma_inf},        {"method", "leray_slice"},
                          {"zeta3", pc.zeta3},                {"leading_constant", pc.leading},
                          {"alpha", pc.alpha.str()},          {"beta", pc.beta.str()},
                          {"tau_inf_ratio", pc.tau_inf_ratio.str()}, {"tau_fin", pc.tau_fin},
                          {"peyre", pc.peyre},                {"peyre_coefficient", pc.peyre_coefficient.str()}};
            }
            result["delta0"] = w.delta0;
            result["scale"] = w.scale;
        } else if (*s_cnt) {
            auto w = W.spec();
            auto rep = naive ? counting::count_naive(B, w, theta) : counting::count_gcd_strata(B, w, theta, C.workers);
            Json rows = Json::array();
            for (const auto& s : rep.strata)
                rows.push_back({{"h_lo", s.h_lo}, {"h_hi", s.h_hi}, {"weighted", s.weighted}, {"raw", s.raw},
                                {"share", rep.weighted_count > 0 ? s.weighted / rep.weighted_count : 0.0}});
            result = {{"B", B},
                      {"method", naive ? "naive" : "congruence_walk"},
                      {"weighted_count", rep.weighted_count},
                      {"raw_count", rep.raw_count},
                      {"theta", rep.theta}};
            if (ratio) {
                if (sigma <= 0) sigma = densities::sigma_inf_leray(w, {}, C.workers).value;
                result["sigma_inf"] = sigma;
                result["R"] = rep.weighted_count / counting::main_term(B, sigma);
            }
            result["rows"] = rows;
        } else if (*s_ser) {
            if (x < 200 || x > counting::kSeriesMax) throw ValidationError("--x must lie in [200, 1e7]");
            auto S = counting::series_partial_sums(x);
            auto fit = counting::fit_partial_sums(S, x / 100, x, points);
            double target = double(1 / (2 * densities::zeta3()));
            Json rows = Json::array();
            for (size_t i = 0; i < fit.xs.size(); ++i) rows.push_back({{"log_t", fit.xs[i]}, {"partial_sum", fit.ys[i]}});
            result = {{"x", x},
                      {"window", {x / 100, x}},
                      {"slope", fit.slope},
                      {"intercept", fit.intercept},
                      {"residual", fit.residual},
                      {"target_slope", target}};
            if (audit_t > 0) {
                auto a = counting::series_exact_audit(audit_t);
                result["exact_audit"] = {{"t", a.t}, {"term_mismatches", a.term_mismatches}, {"max_rel_dev", a.max_rel_dev}};
            }
            result["rows"] = rows;
        } else if (*s_hoo) {
            auto st = counting::hooley_ST(T, parse_triple(h_d, "--d"), C.workers);
            result = {{"T", st.T},           {"d", triple_json(st.d)},   {"S0", st.s0.str()}, {"S1", st.s1.str()},
                      {"terms", st.terms},   {"ratio0", st.ratio0},      {"ratio1", st.ratio1}};
        } else if (*s_rho) {
            auto a = counting::rho_audit(rp, parse_triple(r_d, "--d"), parse_triple(r_e, "--e"));
            result = {{"p", a.p},
                      {"d", triple_json(a.d)},
                      {"e", triple_json(a.e)},
                      {"rho", a.rho},
                      {"main_coeff", a.main_coeff},
                      {"error_power", a.error_power},
                      {"normalized_error", a.normalized_error}};
            if (hist) result["rho_histogram"] = counting::rho_g_histogram(rp, a.d, a.e);
        } else if (*s_app) {
            Freq f{parse_triple(m_s, "--m"), parse_triple(n_s, "--n")};
            appendix::Cubic cb{c1, c2};
            result = {{"p", ap}, {"m", triple_json(f.m)}, {"n", triple_json(f.n)}, {"op", a_op}};
            if (a_op == "sum") {
                result["value"] = appendix::s_p_f2(ap, f, 1, C.workers).str();
                result["method"] = "gauss";
            } else if (a_op == "direct") {
                result["value"] = appendix::s_p_direct(ap, cb, f).str();
                result["c1"] = c1, result["c2"] = c2, result["method"] = "direct";
            } else if (a_op == "family") {
                result["value"] = appendix::s_p_family(ap, cb, f, 1, C.workers).str();
                result["c1"] = c1, result["c2"] = c2, result["method"] = "family";
            } else if (a_op == "counts") {
                appendix::require_odd_prime(ap, appendix::kGaussMaxP, "appendix counts");
                auto N = appendix::n_counts(ap, f);
                result["N1"] = N.n1, result["N2"] = N.n2, result["N3"] = N.n3, result["N4"] = N.n4;
                result["smooth_conic"] = appendix::smooth_conic(ap, f);
            } else {
                auto r = appendix::salie_identity_check(ap, f, C.workers);
                result["skipped"] = r.skipped;
                if (!r.skipped) {
                    result["holds"] = r.holds;
                    result["lhs"] = r.lhs.str();
                    result["rhs"] = r.rhs.str();
                    result["N"] = {r.counts.n1, r.counts.n2, r.counts.n3, r.counts.n4};
                }
            }
        } else if (*s_dia) {
            auto id = cubic == "F" ? appendix::CubicId::F : cubic == "F2" ? appendix::CubicId::F2 : appendix::CubicId::Family;
            result = scan_json(appendix::diamond_scan(id, P, box, {c1, c2}, p_lo, C.workers));
        } else if (*s_rep) {
            acceptance::Options o;
            o.quick = quick, o.workers = C.workers, o.seed = C.seed;
            auto cs = acceptance::run(o, only, [&](const acceptance::Criterion& c) {
                err << (c.passed ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << "\n";
            });
            result = acceptance::report_json(cs, o);
            Json rows = Json::array();
            for (const auto& c : cs) rows.push_back(acceptance::to_json(c));
            if (C.format == "csv") result["rows"] = rows;
            Json timings = acceptance::timings_json(cs);
            if (!C.out.empty()) {
                std::ofstream tf(C.out + ".timings.json");
                tf << timings.dump(2) << "\n";
            } else {
                err << "timings: " << timings.dump() << "\n";
            }
            for (const auto& c : cs)
                if (!c.passed) {
                    err << "criterion " << c.id << " (" << c.name << ") failed: " << c.failure << "\n";
                    code = kExitAcceptance;
                }
        }
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const GuardError& e) {
        err << "guard violation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << "\n";
        return kExitValidation;
    }

    std::string text = C.format == "csv" ? to_csv(result) : result.dump() + "\n";
    if (C.out.empty()) {
        out << text;
    } else {
        std::ofstream f(C.out);
        if (!f) {
            err << "cannot write " << C.out << "\n";
            return kExitValidation;
        }
        f << text;
    }
    return code;
}

}  // namespace delta_lab::cli
