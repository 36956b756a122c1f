#include "dirspec/cli_ops.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dirspec/coeffs.hpp"
#include "dirspec/errors.hpp"
#include "json_out.hpp"

namespace dirspec {

namespace {

using nlohmann::json;

Complex parse_complex(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(std::string(what) + " must be a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

PolyFunc parse_poly(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be a list of pairs");
    std::vector<Complex> coeffs;
    for (const auto& e : j) coeffs.push_back(parse_complex(e, what));
    return PolyFunc(std::move(coeffs));
}

std::string tolerances_json(const ProblemConfig& cfg) {
    return JsonOut()
        .field("ode_tol", JsonOut::num(cfg.ode.tol))
        .field("zero_tol", JsonOut::num(cfg.zero_tol))
        .object();
}

std::string witness_json(const Witness& w) {
    return JsonOut()
        .field("name", JsonOut::str(w.name))
        .field("value", JsonOut::complex_pair(w.value))
        .object();
}

std::string optional_int(const std::optional<int>& v) {
    return v ? JsonOut::num(*v) : "null";
}

} // namespace

ProblemConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    for (const char* key : {"b1", "b2", "q12_coeffs", "q21_coeffs", "boundary_rows"})
        if (!j.contains(key)) throw ConfigError(std::string("config missing key ") + key);

    double b1 = j["b1"].get<double>();
    double b2 = j["b2"].get<double>();
    if (!(b1 < 0.0 && 0.0 < b2)) throw ConfigError("config requires b1 < 0 < b2");

    PolyFunc q12 = parse_poly(j["q12_coeffs"], "q12_coeffs");
    PolyFunc q21 = parse_poly(j["q21_coeffs"], "q21_coeffs");

    const auto& rows = j["boundary_rows"];
    if (!rows.is_array() || rows.size() != 2 || rows[0].size() != 4 || rows[1].size() != 4)
        throw ConfigError("boundary_rows must be a 2x4 matrix of [re, im] pairs");
    std::array<std::array<Complex, 4>, 2> a;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c) a[r][c] = parse_complex(rows[r][c], "boundary_rows");

    std::optional<BoundarySpec> bc;
    try {
        bc.emplace(a);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    ProblemConfig cfg{DiracSystem(b1, b2, std::move(q12), std::move(q21)), *bc, 6,
                      kDefaultZeroTol, OdeOptions{}, 20.0, 80.0, 5, HalfPlane::Upper,
                      std::nullopt};

    if (j.contains("order_n")) cfg.order_n = j["order_n"].get<int>();
    if (cfg.order_n < 1 || cfg.order_n > kDefaultMaxOrder)
        throw ConfigError("order_n must lie in [1, 12]");

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (t.contains("zero_tol")) cfg.zero_tol = t["zero_tol"].get<double>();
        if (t.contains("ode_tol")) cfg.ode.tol = t["ode_tol"].get<double>();
        if (cfg.zero_tol < 0.0) throw ConfigError("zero_tol must be >= 0");
        if (cfg.ode.tol < 1e-13 || cfg.ode.tol > 1e-6)
            throw ConfigError("ode_tol must lie in [1e-13, 1e-6]");
    }
    if (j.contains("scan")) {
        const auto& s = j["scan"];
        if (s.contains("t_min")) cfg.t_min = s["t_min"].get<double>();
        if (s.contains("t_max")) cfg.t_max = s["t_max"].get<double>();
        if (s.contains("points")) cfg.scan_points = s["points"].get<int>();
        if (s.contains("halfplane")) {
            std::string hp = s["halfplane"].get<std::string>();
            if (hp == "upper")
                cfg.scan_halfplane = HalfPlane::Upper;
            else if (hp == "lower")
                cfg.scan_halfplane = HalfPlane::Lower;
            else
                throw ConfigError("scan.halfplane must be \"upper\" or \"lower\"");
        }
        if (!(cfg.t_min > 0.0 && cfg.t_max >= cfg.t_min) || cfg.scan_points < 1)
            throw ConfigError("scan grid requires 0 < t_min <= t_max and points >= 1");
    }
    if (j.contains("rect")) {
        const auto& r = j["rect"];
        for (const char* key : {"re_min", "re_max", "im_min", "im_max"})
            if (!r.contains(key)) throw ConfigError("rect needs re_min/re_max/im_min/im_max");
        try {
            cfg.rect.emplace(r["re_min"].get<double>(), r["re_max"].get<double>(),
                             r["im_min"].get<double>(), r["im_max"].get<double>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string cmd_classify(const ProblemConfig& cfg) {
    MinorSet ms = minors(cfg.bc);
    BcClass cl = classify(ms, cfg.sys.b1, cfg.sys.b2, cfg.zero_tol);
    PolyFunc P = p_function(cfg.sys, ms);

    std::vector<std::string> at0, at1;
    PolyFunc d = P;
    for (int k = 0; k <= cfg.order_n; ++k) {
        at0.push_back(JsonOut::complex_pair(d.eval(0.0)));
        at1.push_back(JsonOut::complex_pair(d.eval(1.0)));
        d = d.derivative();
    }

    auto minors_json = [](const MinorSet& m) {
        return JsonOut()
            .field("J12", JsonOut::complex_pair(m.J12))
            .field("J13", JsonOut::complex_pair(m.J13))
            .field("J14", JsonOut::complex_pair(m.J14))
            .field("J32", JsonOut::complex_pair(m.J32))
            .field("J34", JsonOut::complex_pair(m.J34))
            .field("J42", JsonOut::complex_pair(m.J42))
            .object();
    };
    // boundary data is accepted in any scaling; display normalizes by the
    // largest-magnitude minor
    double scale = ms.max_abs();
    Complex inv(scale > 0.0 ? 1.0 / scale : 1.0, 0.0);
    MinorSet normalized{ms.J12 * inv, ms.J34 * inv, ms.J32 * inv,
                        ms.J14 * inv, ms.J13 * inv, ms.J42 * inv};
    std::string pderivs = JsonOut()
                              .field("at0", JsonOut::array(at0))
                              .field("at1", JsonOut::array(at1))
                              .object();
    return JsonOut()
        .field("class", JsonOut::str(to_string(cl)))
        .field("minors", minors_json(ms))
        .field("minors_normalized", minors_json(normalized))
        .field("p_derivatives", pderivs)
        .field("tolerances", tolerances_json(cfg))
        .object();
}

std::string cmd_coefficients(const ProblemConfig& cfg) {
    CoefficientTable tbl = coefficient_table(cfg.sys, cfg.bc, cfg.order_n, cfg.zero_tol);
    C123Report c123 = lemma_c123_check(cfg.sys, cfg.bc);

    std::vector<std::string> cp, cm;
    for (const Complex& v : tbl.c_plus) cp.push_back(JsonOut::complex_pair(v));
    for (const Complex& v : tbl.c_minus) cm.push_back(JsonOut::complex_pair(v));

    std::vector<std::string> mism;
    for (const auto& m : c123.mismatches)
        mism.push_back(JsonOut()
                           .field("expected", JsonOut::complex_pair(m.expected))
                           .field("got", JsonOut::complex_pair(m.got))
                           .field("k", JsonOut::num(m.k))
                           .field("side", JsonOut::str(m.side == Sign::Plus ? "+" : "-"))
                           .object());
    std::string lemma = JsonOut()
                            .field("mismatches", JsonOut::array(mism))
                            .field("ok", JsonOut::boolean(c123.ok))
                            .object();
    return JsonOut()
        .field("c_minus", JsonOut::array(cm))
        .field("c_plus", JsonOut::array(cp))
        .field("k_minus", optional_int(tbl.k_minus))
        .field("k_plus", optional_int(tbl.k_plus))
        .field("lemma_c123", lemma)
        .field("n", JsonOut::num(tbl.n))
        .field("tolerances", tolerances_json(cfg))
        .object();
}

std::string cmd_scan(const ProblemConfig& cfg) {
    auto rows = ray_scan(cfg.sys, cfg.bc, cfg.scan_halfplane, cfg.scan_grid(), cfg.ode);
    std::string out = "t,re_norm,im_norm\n";
    for (const auto& [t, v] : rows)
        out += JsonOut::num(t) + "," + JsonOut::num(v.real()) + "," + JsonOut::num(v.imag()) +
               "\n";
    return out;
}

namespace {

std::string fits_json(const ProblemConfig& cfg, HalfPlane hp,
                      const CoefficientTable& tbl) {
    const auto& table = (hp == HalfPlane::Upper) ? tbl.c_plus : tbl.c_minus;
    std::optional<int> leading = (hp == HalfPlane::Upper) ? tbl.k_plus : tbl.k_minus;
    std::vector<std::string> fits;
    auto grid = cfg.scan_grid();
    for (int k = 0; k <= cfg.order_n; ++k) {
        // past the first nonzero coefficient the unknown (1+o(1)) factor
        // feeds back into the extracted limit, so those fits are marked
        bool contaminated = leading ? k > *leading : false;
        JsonOut f;
        f.field("K", JsonOut::num(k));
        f.field("contaminated", JsonOut::boolean(contaminated));
        try {
            std::vector<Complex> known(table.begin(), table.begin() + k);
            FitResult r = fit_leading_coefficient(cfg.sys, cfg.bc, hp, k, grid, known, cfg.ode);
            f.field("err_est", JsonOut::num(r.err_est));
            f.field("estimate_im", JsonOut::num(r.estimate.imag()));
            f.field("estimate_re", JsonOut::num(r.estimate.real()));
        } catch (const NoConvergence&) {
            f.field("error", JsonOut::str("NoConvergence"));
        }
        f.field("table", JsonOut::complex_pair(table[k]));
        fits.push_back(f.object());
    }
    return JsonOut::array(fits);
}

} // namespace

std::string cmd_verify_asymptotics(const ProblemConfig& cfg) {
    CoefficientTable tbl = coefficient_table(cfg.sys, cfg.bc, cfg.order_n, cfg.zero_tol);
    return JsonOut()
        .field("lower", fits_json(cfg, HalfPlane::Lower, tbl))
        .field("tolerances", tolerances_json(cfg))
        .field("upper", fits_json(cfg, HalfPlane::Upper, tbl))
        .object();
}

std::string cmd_eigenvalues(const ProblemConfig& cfg) {
    if (!cfg.rect) throw ConfigError("eigenvalues command needs a rect in the config");
    EigenvalueSet set = locate_zeros(cfg.sys, cfg.bc, *cfg.rect, cfg.ode);
    std::vector<std::string> evs;
    for (const Eigenvalue& ev : set.zeros)
        evs.push_back(JsonOut()
                          .field("lambda", JsonOut::complex_pair(ev.lambda))
                          .field("multiplicity", JsonOut::num(ev.multiplicity))
                          .field("refined", JsonOut::boolean(ev.refined))
                          .object());
    return JsonOut()
        .field("eigenvalues", JsonOut::array(evs))
        .field("tolerances", tolerances_json(cfg))
        .field("total_count", JsonOut::num(set.total_count))
        .object();
}

std::string cmd_report(const ProblemConfig& cfg) {
    Verdict v = verdict(cfg.sys, cfg.bc, cfg.order_n, cfg.zero_tol);
    CorroborationReport rep =
        numeric_corroboration(cfg.sys, cfg.bc, v, cfg.scan_grid(), cfg.ode, cfg.zero_tol);

    std::vector<std::string> ws;
    for (const Witness& w : v.witnesses) ws.push_back(witness_json(w));
    std::string verdict_json =
        JsonOut()
            .field("k_minus", optional_int(v.k_minus))
            .field("k_plus", optional_int(v.k_plus))
            .field("note", JsonOut::str(v.note))
            .field("order_used", JsonOut::num(v.order_used))
            .field("rule", JsonOut::str(v.rule))
            .field("status", JsonOut::str(to_string(v.status)))
            .field("witnesses", JsonOut::array(ws))
            .object();
    std::string corr =
        JsonOut()
            .field("applicable", JsonOut::boolean(rep.applicable))
            .field("decay_mode", JsonOut::boolean(rep.decay_mode))
            .field("decay_tail_ratio", JsonOut::num(rep.decay_tail_ratio))
            .field("fit_minus", JsonOut::complex_pair(rep.fit_minus))
            .field("fit_plus", JsonOut::complex_pair(rep.fit_plus))
            .field("floor_minus", JsonOut::num(rep.floor_minus))
            .field("floor_plus", JsonOut::num(rep.floor_plus))
            .field("suspect", JsonOut::boolean(rep.suspect))
            .object();
    return JsonOut()
        .field("corroboration", corr)
        .field("tolerances", tolerances_json(cfg))
        .field("verdict", verdict_json)
        .object();
}

} // namespace dirspec
