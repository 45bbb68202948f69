#include "hardylab/cli.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "hardylab/geometry.hpp"
#include "hardylab/intertwine.hpp"
#include "hardylab/spectra.hpp"
#include "hardylab/svg.hpp"
#include "hardylab/symbol_json.hpp"
#include "hardylab/wold.hpp"

namespace hardylab::cli {

namespace {

constexpr std::size_t kMinN = 16, kMaxN = 8192;
constexpr std::size_t kMinMesh = 64, kMaxMesh = std::size_t{1} << 20;

json cj(cplx c) { return complex_to_json(c); }

cplx parse_complex(const std::string& s) {
    const std::string t = std::regex_replace(s, std::regex("\\s+"), "");
    if (t.empty()) throw std::invalid_argument("empty complex number");
    if (t.front() == '[') return complex_from_json(json::parse(t));
    static const std::regex pair("^([-+]?[0-9.eE+-]+),([-+]?[0-9.eE+-]+)$");
    static const std::regex real("^[-+]?(?:[0-9]+\\.?[0-9]*|\\.[0-9]+)(?:[eE][-+]?[0-9]+)?$");
    static const std::regex imag("^([-+]?(?:[0-9]+\\.?[0-9]*|\\.[0-9]+)(?:[eE][-+]?[0-9]+)?)?([-+])?((?:[0-9]+\\.?[0-9]*|\\.[0-9]+)(?:[eE][-+]?[0-9]+)?)?i$");
    std::smatch m;
    try {
        if (std::regex_match(t, m, pair)) return {std::stod(m[1]), std::stod(m[2])};
        if (std::regex_match(t, real)) return {std::stod(t), 0.0};
        if (std::regex_match(t, m, imag)) {
            // a+bi, a-bi, bi, i, -i
            const std::string re = m[1], sign = m[2], im = m[3];
            if (sign.empty() && im.empty()) {
                // "bi" or "i" with the coefficient captured as the real part
                if (re.empty()) return {0.0, 1.0};
                if (re == "+" || re == "-") return {0.0, re == "-" ? -1.0 : 1.0};
                return {0.0, std::stod(re)};
            }
            const double b = im.empty() ? 1.0 : std::stod(im);
            return {re.empty() ? 0.0 : std::stod(re), sign == "-" ? -b : b};
        }
    } catch (const std::logic_error&) {
    }
    throw std::invalid_argument("cannot parse complex number '" + s + "' (use 0.5, 0.3,0.1, [re,im] or 0.2+0.6i)");
}

json read_json_argument(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return json::parse(arg);
    std::ifstream f(arg);
    if (!f) throw std::invalid_argument("cannot open '" + arg + "'");
    return json::parse(f);
}

Matrix parse_matrix(const std::string& arg) {
    const json j = read_json_argument(arg);
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a nonempty array of rows");
    const std::size_t n = j.size();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_array() || j[i].size() != n) throw std::invalid_argument("matrix must be square");
        for (std::size_t k = 0; k < n; ++k) m(i, k) = complex_from_json(j[i][k]);
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(cj(m(i, k)));
        rows.push_back(r);
    }
    return rows;
}

OperatorMatrix weighted_from_json(const json& j, std::size_t n, std::size_t mesh) {
    if (!j.is_object() || !j.contains("omega"))
        throw std::invalid_argument("operator term needs an \"omega\" symbol (and optional \"h\")");
    const auto omega = to_series(symbol_from_json(j.at("omega")), n);
    const auto h = j.contains("h") ? to_series(symbol_from_json(j.at("h")), n) : PowerSeries::constant(1.0, n);
    return weighted_composition_matrix(omega, h, n, mesh);
}

/// identity | c<symbol> | csv:PATH | {"omega": S, "h": S} | [terms...] (sum).
OperatorMatrix parse_x(const std::string& s, std::size_t n, std::size_t mesh) {
    if (s == "identity" || s == "I") return identity_operator(n);
    if (s.rfind("csv:", 0) == 0) {
        std::ifstream f(s.substr(4));
        if (!f) throw std::invalid_argument("cannot open '" + s.substr(4) + "'");
        auto m = read_matrix_csv(f);
        if (m.truncation != n)
            throw std::invalid_argument("matrix in " + s.substr(4) + " has N = " + std::to_string(m.truncation) +
                                        ", expected " + std::to_string(n));
        return m;
    }
    const auto first = s.find_first_not_of(" \t\n");
    if (first != std::string::npos && (s[first] == '{' || s[first] == '[')) {
        const json j = json::parse(s);
        if (j.is_object()) return weighted_from_json(j, n, mesh);
        OperatorMatrix sum{Matrix::Zero(n, n), n, n, ""};
        for (const auto& t : j) {
            const auto term = weighted_from_json(t, n, mesh);
            sum.entries += term.entries;
            sum.valid_block = std::min(sum.valid_block, term.valid_block);
            sum.label += (sum.label.empty() ? "" : "+") + term.label;
        }
        if (j.empty()) throw std::invalid_argument("empty operator list");
        return sum;
    }
    if (s.size() > 1 && s[0] == 'c') {
        const auto omega = parse_symbol_argument(s.substr(1));
        return composition_matrix(to_series(omega, n), n, mesh);
    }
    throw std::invalid_argument("cannot parse operator '" + s +
                                "' (identity, c<symbol>, csv:PATH, {\"omega\":..,\"h\":..} or a list of those)");
}

std::vector<cplx> parse_points(const std::vector<std::string>& v) {
    std::vector<cplx> out;
    for (const auto& s : v) out.push_back(parse_complex(s));
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot write " + path);
    f << text;
}

struct Outcome {
    json report;
    int code = kOk;
};

json sample_list(const std::vector<ContainmentSample>& v) {
    json a = json::array();
    for (const auto& s : v)
        a.push_back({{"z", cj(s.z)},
                     {"w", cj(s.w)},
                     {"valence", s.verdict.valence},
                     {"margin", s.verdict.margin},
                     {"status", to_string(s.verdict.status)}});
    return a;
}

// Window around a set of points, padded by 10 %.
std::pair<cplx, double> window(const std::vector<cplx>& pts) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const cplx p : pts) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
    }
    const double half = 0.55 * std::max({x1 - x0, y1 - y0, 1e-3});
    return {{(x0 + x1) / 2, (y0 + y1) / 2}, half};
}

const char* status_color(RegionStatus s) {
    switch (s) {
        case RegionStatus::inside: return svg_colors::in;
        case RegionStatus::outside: return svg_colors::out;
        default: return svg_colors::undetermined;
    }
}

const char* status_color(EEStatus s) {
    switch (s) {
        case EEStatus::in: return svg_colors::in;
        case EEStatus::out: return svg_colors::out;
        default: return svg_colors::undetermined;
    }
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    if (args.size() != 2 || args[0] != "--config") return args;
    std::ifstream f(args[1]);
    if (!f) throw std::invalid_argument("cannot open config '" + args[1] + "'");
    const json j = json::parse(f);
    if (!j.is_object() || !j.contains("command")) throw std::invalid_argument("config needs a \"command\" field");
    std::vector<std::string> out{j.at("command").get<std::string>()};
    if (j.contains("args")) {
        for (const auto& [k, v] : j.at("args").items()) {
            const std::string flag = "--" + k;
            auto scalar = [](const json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
            if (v.is_boolean()) {
                if (v.get<bool>()) out.push_back(flag);
            } else if (v.is_array() && !(v.size() == 2 && v[0].is_number() && v[1].is_number())) {
                for (const auto& e : v) {
                    out.push_back(flag);
                    out.push_back(scalar(e));
                }
            } else {
                out.push_back(flag);
                out.push_back(scalar(v));
            }
        }
    }
    return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    try {
        args = expand_config(raw_args);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    CLI::App app{"Truncated Hardy-space operator toolkit: Toeplitz intertwining, extended eigenvalues, geometry"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    std::size_t n = 0, mesh = kDefaultMesh;
    std::string out_path;
    std::map<std::string, std::size_t> default_n_for;
    auto common = [&](CLI::App* sc, std::size_t default_n) {
        default_n_for[sc->get_name()] = default_n;
        sc->add_option("--N", n, "Truncation size (default " + std::to_string(default_n) + ")")
            ->check(CLI::Range(kMinN, kMaxN));
        sc->add_option("--mesh", mesh, "Boundary mesh size M")
            ->check(CLI::Range(kMinMesh, kMaxMesh))
            ->capture_default_str();
        sc->add_option("--out", out_path, "Write the JSON report here instead of stdout");
    };
    std::function<Outcome()> action;

    // series ---------------------------------------------------------------
    std::string symbol_arg;
    std::vector<std::string> at;
    auto* c_series = app.add_subcommand("series", "Taylor coefficients of a symbol");
    c_series->add_option("--symbol", symbol_arg, "Symbol (shorthand, JSON or file)")->required();
    c_series->add_option("--at", at, "Evaluation points inside the disc");
    c_series->callback([&] {
        action = [&] {
            const auto s = parse_symbol_argument(symbol_arg);
            const auto e = to_series_with_note(s, n);
            const auto sup = sup_norm_estimate(s, mesh);
            json coeffs = json::array();
            for (const cplx c : e.series.coeffs()) coeffs.push_back(cj(c));
            json values = json::array();
            for (const cplx z : parse_points(at)) {
                const auto v = evaluate_with_tail(e.series, z, sup_norm_upper_bound(s));
                values.push_back({{"z", cj(z)},
                                  {"series", cj(v.value)},
                                  {"closed_form", cj(evaluate(s, z))},
                                  {"tail_bound", v.tail_bound}});
            }
            return Outcome{{{"symbol", symbol_to_json(s)},
                            {"description", s.describe()},
                            {"note", e.note},
                            {"tail_energy", e.tail_energy},
                            {"exact_degree", e.series.exact_degree() ? json(*e.series.exact_degree()) : json()},
                            {"coeffs", coeffs},
                            {"sup_estimate", {{"value", sup.value}, {"mesh", sup.mesh}, {"radius", sup.radius}}},
                            {"values", values}}};
        };
    });
    common(c_series, 64);

    // build-operator --------------------------------------------------------
    std::string kind = "toeplitz", omega_arg, h_arg, csv_path;
    bool want_norm = false;
    auto* c_build = app.add_subcommand("build-operator", "Build T_phi or C_{omega,h} and dump it as CSV");
    c_build->add_option("--kind", kind, "toeplitz | composition | wcomp")
        ->check(CLI::IsMember({"toeplitz", "composition", "wcomp"}))
        ->capture_default_str();
    c_build->add_option("--symbol", symbol_arg, "Symbol phi for toeplitz");
    c_build->add_option("--omega", omega_arg, "Self-map omega");
    c_build->add_option("--weight", h_arg, "Weight h (wcomp)");
    c_build->add_option("--csv", csv_path, "Matrix CSV output path");
    c_build->add_flag("--norm", want_norm, "Estimate the operator norm by power iteration");
    c_build->callback([&] {
        action = [&] {
            OperatorMatrix m;
            if (kind == "toeplitz") {
                if (symbol_arg.empty()) throw std::invalid_argument("--symbol is required for toeplitz");
                m = toeplitz_matrix(parse_symbol_argument(symbol_arg), n);
            } else {
                if (omega_arg.empty()) throw std::invalid_argument("--omega is required for " + kind);
                const auto w = to_series(parse_symbol_argument(omega_arg), n);
                const auto h = (kind == "wcomp" && !h_arg.empty()) ? to_series(parse_symbol_argument(h_arg), n)
                                                                    : PowerSeries::constant(1.0, n);
                m = weighted_composition_matrix(w, h, n, mesh);
            }
            if (!csv_path.empty()) {
                std::ofstream f(csv_path);
                if (!f) throw std::invalid_argument("cannot write " + csv_path);
                write_matrix_csv(f, m);
            }
            json r{{"label", m.label},
                   {"N", m.truncation},
                   {"valid_block", m.valid_block},
                   {"frobenius", m.entries.norm()},
                   {"csv", csv_path.empty() ? json() : json(csv_path)}};
            if (want_norm) {
                const PowerIterationOptions po;
                const auto ne = operator_norm(m, po);
                r["norm"] = {{"value", ne.value}, {"iterations", ne.iterations}, {"converged", ne.converged}};
                r["tolerances"] = {{"power_iteration_tol", po.tolerance}, {"max_iterations", po.max_iterations}};
            }
            return Outcome{r};
        };
    });
    common(c_build, 64);

    // check-intertwine --------------------------------------------------------
    std::string phi_arg, psi_arg, x_arg;
    bool want_field = false;
    auto* c_check = app.add_subcommand("check-intertwine", "Residual of X T_phi = T_psi X on the exact block");
    c_check->add_option("--phi", phi_arg, "Symbol phi")->required();
    c_check->add_option("--psi", psi_arg, "Symbol psi")->required();
    c_check->add_option("--x", x_arg, "identity | c<symbol> | csv:PATH | {\"omega\":..,\"h\":..} | list")->required();
    c_check->add_flag("--field", want_field, "Also sample the eigen field F(z) = X^* K_z");
    c_check->callback([&] {
        action = [&] {
            const auto phi = parse_symbol_argument(phi_arg), psi = parse_symbol_argument(psi_arg);
            const auto x = parse_x(x_arg, n, mesh);
            const PowerIterationOptions po;
            const auto r = intertwine_residual(x, to_series(phi, n), to_series(psi, n), po);
            json rep{{"phi", symbol_to_json(phi)},
                     {"psi", symbol_to_json(psi)},
                     {"x", x.label},
                     {"N", n},
                     {"valid_block", r.valid_block},
                     {"block_rule", r.block_rule},
                     {"residual", r.residual},
                     {"residual_frobenius", r.residual_frobenius},
                     {"max_abs_entry", r.max_abs_entry},
                     {"scale", r.scale},
                     {"relative_residual", r.relative_residual},
                     {"norms", {{"x", r.norm_x}, {"phi", r.norm_phi}, {"psi", r.norm_psi}, {"converged", r.norms_converged}}},
                     {"exact_inputs", r.exact_inputs},
                     {"exact_zero", r.exact_zero()},
                     {"tolerances", {{"exact_zero", 1e-12}, {"power_iteration_tol", po.tolerance}}}};
            if (want_field) {
                const auto f = eigen_field(x, phi, psi, disc_samples(2, 8, 0.6));
                json a = json::array();
                for (const auto& s : f.samples)
                    a.push_back({{"z", cj(s.z)},
                                 {"norm_f", s.norm_f},
                                 {"relative_residual", s.relative_residual},
                                 {"tail_bound", s.tail_bound},
                                 {"in_zero_set", s.in_zero_set}});
                rep["eigen_field"] = {{"samples", a}, {"zero_threshold", f.zero_threshold}, {"zero_count", f.zero_count}};
            }
            return Outcome{rep};
        };
    });
    common(c_check, 256);

    // deddens ---------------------------------------------------------------
    std::size_t cutoff = 16;
    auto* c_ded = app.add_subcommand("deddens", "Finite-rank intertwiner of T_phi (phi inner) with T_z");
    c_ded->add_option("--phi", phi_arg, "Inner symbol phi")->required();
    c_ded->add_option("--cutoff", cutoff, "Number of f_n beyond f_0 (<= N/8)")->capture_default_str();
    c_ded->add_option("--at", at, "Eigen-field sample points");
    c_ded->callback([&] {
        action = [&] {
            const auto phi = parse_symbol_argument(phi_arg);
            const auto d = deddens_inner_X(phi, n, cutoff);
            auto pts = parse_points(at);
            if (pts.empty()) pts = {0.5, cplx{0.0, 0.4}, cplx{-0.3, 0.2}};
            const auto f = eigen_field(d, phi, pts);
            const double bound = 10.0 * std::sqrt(d.basis.max_tail_energy);
            json a = json::array();
            bool field_ok = true;
            for (const auto& s : f.samples) {
                const bool ok = s.in_zero_set || s.relative_residual <= 10.0 * s.tail_bound;
                field_ok = field_ok && ok;
                a.push_back({{"z", cj(s.z)},
                             {"norm_f", s.norm_f},
                             {"relative_residual", s.relative_residual},
                             {"tail_bound", s.tail_bound},
                             {"in_zero_set", s.in_zero_set},
                             {"pass", ok}});
            }
            const bool gram_ok = d.basis.gram_defect <= 10.0 * d.basis.max_tail_energy + 1e-14;
            const bool restricted_ok = d.restricted_residual <= bound + 1e-14;
            json tails = d.basis.tail_energy;
            return Outcome{{{"phi", symbol_to_json(phi)},
                            {"N", n},
                            {"cutoff", cutoff},
                            {"gram_defect", d.basis.gram_defect},
                            {"tail_energy", tails},
                            {"max_tail_energy", d.basis.max_tail_energy},
                            {"restricted_residual", d.restricted_residual},
                            {"restricted_bound", bound},
                            {"norm_x", d.norm_x.value},
                            {"eigen_field", a},
                            {"pass", {{"gram", gram_ok}, {"restricted", restricted_ok}, {"field", field_ok}}},
                            {"tolerances", {{"gram_factor", 10.0}, {"restricted_factor", 10.0}, {"field_factor", 10.0},
                                            {"zero_threshold", f.zero_threshold}}}},
                           (gram_ok && restricted_ok && field_ok) ? kOk : kMath};
        };
    });
    common(c_ded, 1024);

    // recover ---------------------------------------------------------------
    double tol = 1e-6;
    std::size_t rings = 4, per_ring = 16;
    double r_max = 0.9;
    auto* c_rec = app.add_subcommand("recover", "Recover h and omega from a candidate weighted composition operator");
    c_rec->add_option("--x", x_arg, "Operator (as in check-intertwine)")->required();
    c_rec->add_option("--tol", tol, "Consistency tolerance")->capture_default_str();
    c_rec->add_option("--rings", rings)->capture_default_str();
    c_rec->add_option("--per-ring", per_ring)->capture_default_str();
    c_rec->add_option("--rmax", r_max)->check(CLI::Range(0.0, 0.999))->capture_default_str();
    c_rec->callback([&] {
        action = [&] {
            const auto x = parse_x(x_arg, n, mesh);
            const auto r = recover_weighted_comp(x, disc_samples(rings, per_ring, r_max), tol);
            json a = json::array();
            for (const auto& s : r.samples)
                a.push_back({{"z", cj(s.z)},
                             {"h", cj(s.h)},
                             {"omega", cj(s.omega)},
                             {"h_zero", s.h_zero},
                             {"power_defect", s.power_defect},
                             {"consistent", s.consistent}});
            return Outcome{{{"x", x.label},
                            {"N", n},
                            {"samples", a},
                            {"zero_count", r.zero_count},
                            {"max_abs_omega", r.max_abs_omega},
                            {"max_power_defect", r.max_power_defect},
                            {"consistent", r.consistent},
                            {"tolerances", {{"consistency", tol}, {"zero_threshold", kZeroThreshold}}}}};
        };
    });
    common(c_rec, 128);

    // vandermonde -------------------------------------------------------------
    std::vector<std::string> omegas, hs;
    bool branches = false;
    auto* c_van = app.add_subcommand("vandermonde", "Vandermonde system for a sum of weighted composition operators");
    c_van->add_option("--phi", phi_arg, "Symbol phi")->required();
    c_van->add_option("--psi", psi_arg, "Symbol psi")->required();
    c_van->add_option("--omega", omegas, "Self-maps omega_j (repeatable)");
    c_van->add_option("--weight", hs, "Weights h_j (repeatable, default 1)");
    c_van->add_flag("--branches", branches, "phi = z^2+z: use omega = -1/2 +- sqrt(psi + 1/4)");
    c_van->callback([&] {
        action = [&] {
            const auto phi = parse_symbol_argument(phi_arg), psi = parse_symbol_argument(psi_arg);
            std::vector<PowerSeries> w, h;
            if (branches) {
                if (!phi.is_z2z()) throw std::invalid_argument("--branches needs phi = z^2 + z");
                const auto root = series_sqrt(to_series(psi, n).plus_constant(0.25));
                w = {root.plus_constant(-0.5), (root * cplx{-1.0}).plus_constant(-0.5)};
            } else {
                for (const auto& o : omegas) w.push_back(to_series(parse_symbol_argument(o), n));
            }
            if (w.empty()) throw std::invalid_argument("give --omega terms or --branches");
            for (std::size_t j = 0; j < w.size(); ++j)
                h.push_back(j < hs.size() ? to_series(parse_symbol_argument(hs[j]), n) : PowerSeries::constant(1.0, n));
            const auto samples = disc_samples(2, 16, 0.9);
            const auto r = vandermonde_system_check(w, h, phi, psi, samples);
            OperatorMatrix y{Matrix::Zero(n, n), n, n, "sum"};
            for (std::size_t j = 0; j < w.size(); ++j) y.entries += weighted_composition_matrix(w[j], h[j], n, mesh).entries;
            const auto ir = intertwine_residual(y, to_series(phi, n), to_series(psi, n));
            const auto rec = recover_weighted_comp(y, samples);
            json a = json::array();
            for (const auto& s : r.samples) {
                json om = json::array(), u = json::array();
                for (const cplx c : s.omega) om.push_back(cj(c));
                for (const cplx c : s.u) u.push_back(cj(c));
                a.push_back({{"z", cj(s.z)}, {"omega", om}, {"u", u}, {"system_residual", s.system_residual},
                             {"min_gap", s.min_gap}});
            }
            json col = json::array();
            for (const cplx c : r.collisions) col.push_back(cj(c));
            return Outcome{{{"phi", symbol_to_json(phi)},
                            {"psi", symbol_to_json(psi)},
                            {"N", n},
                            {"terms", w.size()},
                            {"certificates", r.certificates},
                            {"samples", a},
                            {"max_system_residual", r.max_system_residual},
                            {"max_u", r.max_u},
                            {"collisions", col},
                            {"intertwine", {{"residual", ir.residual}, {"max_abs_entry", ir.max_abs_entry},
                                            {"valid_block", ir.valid_block}, {"block_rule", ir.block_rule}}},
                            {"recovery", {{"consistent", rec.consistent}, {"max_power_defect", rec.max_power_defect}}},
                            {"tolerances", {{"collision", r.collision_tolerance}, {"recovery", rec.tolerance}}}}};
        };
    });
    common(c_van, 128);

    // image-test --------------------------------------------------------------
    SamplingPlan plan;
    bool stop_first = false;
    std::string svg_path, raster_path;
    std::size_t raster_side = 200;
    auto* c_img = app.add_subcommand("image-test", "Is psi(U) inside phi(U)? (necessary condition for intertwining)");
    c_img->add_option("--psi", psi_arg, "Inner symbol psi")->required();
    c_img->add_option("--phi", phi_arg, "Containing symbol phi")->required();
    c_img->add_option("--radial", plan.radial)->check(CLI::Range(1, 4096))->capture_default_str();
    c_img->add_option("--angular", plan.angular)->check(CLI::Range(1, 65536))->capture_default_str();
    c_img->add_option("--rmax", plan.r_max)->check(CLI::Range(0.0, 0.999999))->capture_default_str();
    c_img->add_flag("--stop-first", stop_first, "Stop at the first violation");
    c_img->add_option("--svg", svg_path, "SVG plot path");
    c_img->add_option("--raster-csv", raster_path, "CSV raster of phi's valence (x, y, valence, status)");
    c_img->add_option("--raster-side", raster_side)->check(CLI::Range(8, 2048))->capture_default_str();
    c_img->callback([&] {
        action = [&] {
            const auto psi = parse_symbol_argument(psi_arg), phi = parse_symbol_argument(phi_arg);
            plan.stop_at_first_violation = stop_first;
            plan.mesh = mesh;
            const RegionClassifier cls(phi, mesh, plan.valence_radius);
            const auto r = image_contained(psi, cls, plan);
            std::vector<cplx> frame;
            if (!cls.closed_form()) frame = cls.curve();
            for (const auto& s : r.violations) frame.push_back(s.w);
            const auto pts = plan_points(plan);
            for (std::size_t k = 0; k < pts.size(); k += std::max<std::size_t>(1, pts.size() / 512))
                frame.push_back(evaluate(psi, pts[k]));
            const auto [centre, half] = window(frame);
            if (!raster_path.empty() || !svg_path.empty()) {
                std::ostringstream csv;
                csv << "x,y,valence,status\n";
                SvgCanvas canvas(centre, half);
                const double step = 2.0 * half / double(raster_side);
                for (std::size_t i = 0; i < raster_side; ++i)
                    for (std::size_t j = 0; j < raster_side; ++j) {
                        const cplx w{centre.real() - half + step * (j + 0.5), centre.imag() + half - step * (i + 0.5)};
                        const auto v = cls.classify(w);
                        csv << w.real() << "," << w.imag() << "," << v.valence << "," << to_string(v.status) << "\n";
                        if (v.status != RegionStatus::outside)
                            canvas.cell(w, step, step, v.status == RegionStatus::inside ? "#c8e6c9" : "#eeeeee");
                    }
                if (!raster_path.empty()) write_text(raster_path, csv.str());
                if (!svg_path.empty()) {
                    if (!cls.closed_form()) canvas.polyline(cls.curve(), svg_colors::curve, 1.5);
                    for (std::size_t k = 0; k < pts.size(); k += std::max<std::size_t>(1, pts.size() / 2048))
                        canvas.dot(evaluate(psi, pts[k]), 1.2, "#455a64");
                    for (const auto& s : r.violations) canvas.dot(s.w, 3.0, status_color(s.verdict.status));
                    for (const auto& s : r.unresolved_samples) canvas.dot(s.w, 3.0, svg_colors::undetermined);
                    canvas.title("psi(U) vs phi(U): " + psi.describe() + " in " + phi.describe());
                    canvas.legend("phi(U) (valence >= 1)", "#c8e6c9");
                    canvas.legend("boundary of phi(r U)", svg_colors::curve);
                    canvas.legend("psi sample images", "#455a64");
                    canvas.legend("violation", svg_colors::out);
                    canvas.legend("unresolved", svg_colors::undetermined);
                    canvas.save(svg_path);
                }
            }
            return Outcome{{{"psi", symbol_to_json(psi)},
                            {"phi", symbol_to_json(phi)},
                            {"total", r.total},
                            {"inside", r.inside},
                            {"outside", r.outside},
                            {"unresolved", r.unresolved},
                            {"fraction_inside", r.fraction_inside},
                            {"contained", r.contained()},
                            {"closure_contained", r.closure_contained()},
                            {"stopped_early", r.stopped_early},
                            {"violations", sample_list(r.violations)},
                            {"unresolved_samples", sample_list(r.unresolved_samples)},
                            {"tolerances", {{"valence_radius", plan.valence_radius}, {"mesh", mesh},
                                            {"radial", plan.radial}, {"angular", plan.angular}, {"r_max", plan.r_max},
                                            {"max_listed", kMaxListed}}}},
                           r.outside > 0 ? kMath : kOk};
        };
    });
    common(c_img, 64);

    // ee-scan -----------------------------------------------------------------
    std::string grid_arg = "default";
    EEOptions eopt;
    auto* c_ee = app.add_subcommand("ee-scan", "Extended-eigenvalue verdicts over a lambda grid");
    c_ee->add_option("--symbol", symbol_arg, "Symbol phi")->required();
    c_ee->add_option("--grid", grid_arg, "default (64x64 over [-6,6]^2) | SIDE:HALF | JSON list of lambdas")
        ->capture_default_str();
    c_ee->add_option("--radial", eopt.plan.radial, "Necessary-test sampling rings")->capture_default_str();
    c_ee->add_option("--angular", eopt.plan.angular, "Necessary-test samples per ring")->capture_default_str();
    c_ee->add_option("--svg", svg_path, "SVG plot of the verdict raster");
    c_ee->callback([&] {
        action = [&] {
            const auto phi = parse_symbol_argument(symbol_arg);
            std::vector<cplx> grid;
            std::size_t side = 0;
            double half = 6.0;
            if (grid_arg == "default") {
                side = 64;
            } else if (const auto colon = grid_arg.find(':'); colon != std::string::npos && grid_arg[0] != '[') {
                side = std::stoul(grid_arg.substr(0, colon));
                half = std::stod(grid_arg.substr(colon + 1));
                if (side < 2 || side > 1024 || !(half > 0)) throw std::invalid_argument("bad --grid SIDE:HALF");
            } else {
                for (const auto& e : read_json_argument(grid_arg)) grid.push_back(complex_from_json(e));
            }
            if (side) grid = square_grid(side, half);
            eopt.truncation = n;
            eopt.certificate_mesh = mesh;
            eopt.plan.mesh = mesh;
            const auto rep = ee_scan(phi, grid, eopt);
            const bool z2z = phi.is_z2z();
            std::optional<RegionClassifier> zc;
            if (z2z) zc.emplace(SymbolSpec::z2z(), mesh);
            json verdicts = json::array();
            std::size_t counts[3] = {0, 0, 0};
            std::size_t compared = 0, agree = 0;
            for (const auto& v : rep.verdicts) {
                ++counts[static_cast<int>(v.status)];
                json j{{"lambda", cj(v.lambda)},
                       {"necessary", v.necessary_pass},
                       {"constructive", v.constructive_pass},
                       {"status", to_string(v.status)},
                       {"method", v.method},
                       {"failure", v.failure},
                       {"reason", v.reason}};
                if (z2z) {
                    const auto p = ee_predicate_z2z(v.lambda, &*zc);
                    j["predicate"] = p.resolved ? json(p.member) : json();
                    if (p.resolved && v.status != EEStatus::undetermined) {
                        ++compared;
                        agree += (v.status == EEStatus::in) == p.member;
                    }
                }
                verdicts.push_back(j);
            }
            if (!svg_path.empty()) {
                double cell = 0.0;
                cplx centre{};
                double whalf = half;
                if (side) {
                    cell = 2.0 * half / double(side - 1);
                    whalf = half + cell;
                } else {
                    const auto w = window(rep.grid);
                    centre = w.first;
                    whalf = w.second;
                }
                SvgCanvas canvas(centre, whalf);
                for (const auto& v : rep.verdicts) {
                    if (cell > 0)
                        canvas.cell(v.lambda, cell, cell, status_color(v.status));
                    else
                        canvas.dot(v.lambda, 4.0, status_color(v.status));
                }
                if (z2z) {
                    std::vector<cplx> c;
                    for (int k = 0; k < 2048; ++k) {
                        const cplx u = std::polar(1.0, 2.0 * std::numbers::pi * k / 2048.0);
                        c.push_back(-4.0 * (u * u + u));
                    }
                    canvas.polyline(c, svg_colors::curve, 2.0);
                    canvas.legend("boundary of -4 phi(U)", svg_colors::curve);
                }
                canvas.title("extended eigenvalues of T_phi, phi = " + phi.describe());
                canvas.legend("in", svg_colors::in);
                canvas.legend("out", svg_colors::out);
                canvas.legend("undetermined", svg_colors::undetermined);
                canvas.save(svg_path);
            }
            json r{{"symbol", symbol_to_json(phi)},
                   {"N", n},
                   {"grid", grid_arg},
                   {"verdicts", verdicts},
                   {"counts", {{"in", counts[0]}, {"out", counts[1]}, {"undetermined", counts[2]}}},
                   {"tolerances", {{"composition", kCompositionTolerance}, {"pointwise", kPointwiseTolerance},
                                   {"self_map_margin", kSelfMapMargin}, {"certificate_mesh", mesh},
                                   {"necessary_radial", eopt.plan.radial}, {"necessary_angular", eopt.plan.angular},
                                   {"valence_radius", eopt.plan.valence_radius}}}};
            if (z2z) r["predicate_agreement"] = {{"compared", compared}, {"agree", agree}};
            return Outcome{r};
        };
    });
    common(c_ee, 128);

    // wold-check --------------------------------------------------------------
    std::vector<std::string> lambdas;
    unsigned p_max = 4;
    std::size_t wcut = 60;
    auto* c_wold = app.add_subcommand("wold-check", "Kernel identities for S = T_psi, psi inner");
    c_wold->add_option("--psi", psi_arg, "Inner symbol psi")->required();
    c_wold->add_option("--lambda", lambdas, "Points (default 0, 0.3, 0.6i)");
    c_wold->add_option("--p-max", p_max, "Highest derivative order")->check(CLI::Range(0u, 8u))->capture_default_str();
    c_wold->add_option("--cutoff", wcut, "Series cutoff C")->capture_default_str();
    c_wold->callback([&] {
        action = [&] {
            const auto psi = parse_symbol_argument(psi_arg);
            const WoldOptions wo;
            const auto d = wold_data(psi, n, wo);
            auto pts = parse_points(lambdas);
            if (pts.empty()) pts = {0.0, 0.3, cplx{0.0, 0.6}};
            if (wcut + p_max + 1 >= n) throw std::invalid_argument("cutoff + p-max must stay below N");
            json cols = json::array();
            bool all = true;
            for (Eigen::Index c = 0; c < d.Wbasis.cols(); ++c) {
                const auto o = shift_orbit(d, std::size_t(c), wcut + p_max);
                json per = json::array();
                for (const cplx l : pts) {
                    const auto k = wold_kernel_check(d, o, l, wcut);
                    json ders = json::array();
                    bool ok = k.residual <= k.bound;
                    for (unsigned p = 1; p <= p_max; ++p) {
                        const auto r = wold_derivative_check(d, o, p, l, wcut);
                        ok = ok && r.residual <= r.bound;
                        ders.push_back({{"p", p}, {"residual", r.residual}, {"bound", r.bound}});
                    }
                    all = all && ok;
                    per.push_back({{"lambda", cj(l)},
                                   {"kernel", {{"residual", k.residual}, {"bound", k.bound}}},
                                   {"derivatives", ders},
                                   {"pass", ok}});
                }
                cols.push_back({{"column", c}, {"w_defect", d.w_defect[std::size_t(c)]}, {"checks", per}});
            }
            return Outcome{{{"psi", symbol_to_json(psi)},
                            {"N", n},
                            {"cutoff", wcut},
                            {"basis_size", d.Wbasis.cols()},
                            {"orthonormality_defect", d.orthonormality_defect},
                            {"isometry_defect", d.isometry_defect},
                            {"sup_estimate", d.sup_estimate},
                            {"columns", cols},
                            {"pass", all},
                            {"tolerances", {{"inner_tolerance", wo.inner_tolerance}, {"max_basis", wo.max_basis}}}},
                           all ? kOk : kMath};
        };
    });
    common(c_wold, 1024);

    // finite-dim ----------------------------------------------------------------
    std::string a_arg, b_arg, lambda_arg = "1";
    std::size_t planted = 0;
    unsigned seed = 1;
    double fd_tol = 1e-8;
    auto* c_fd = app.add_subcommand("finite-dim", "Y = a b^T with YB = AY for a common eigenvalue lambda");
    c_fd->add_option("--A", a_arg, "Matrix A (JSON rows or file)");
    c_fd->add_option("--B", b_arg, "Matrix B");
    c_fd->add_option("--lambda", lambda_arg, "Common eigenvalue")->capture_default_str();
    c_fd->add_option("--planted", planted, "Random pair of this size with a planted common eigenvalue")
        ->check(CLI::Range(1, 64));
    c_fd->add_option("--seed", seed, "Seed for --planted")->capture_default_str();
    c_fd->add_option("--tol", fd_tol, "Relative eigenvalue tolerance")->capture_default_str();
    c_fd->callback([&] {
        action = [&] {
            Matrix a, b;
            cplx lam = parse_complex(lambda_arg);
            if (planted) {
                std::mt19937 rng(seed);
                std::normal_distribution<double> g;
                auto rnd = [&] {
                    Matrix m(planted, planted);
                    for (std::size_t i = 0; i < planted; ++i)
                        for (std::size_t k = 0; k < planted; ++k) m(i, k) = cplx{g(rng), g(rng)};
                    return m;
                };
                const Matrix s = rnd(), t = rnd();
                Matrix da = Matrix::Zero(planted, planted), db = da;
                for (std::size_t i = 0; i < planted; ++i) {
                    da(i, i) = i == 0 ? lam : cplx{g(rng), g(rng)} + 4.0;
                    db(i, i) = i == 0 ? lam : cplx{g(rng), g(rng)} - 4.0;
                }
                a = s * da * s.inverse();
                b = t * db * t.inverse();
            } else {
                if (a_arg.empty() || b_arg.empty()) throw std::invalid_argument("give --A and --B, or --planted");
                a = parse_matrix(a_arg);
                b = parse_matrix(b_arg);
            }
            const auto p = finite_dim_partner(a, b, lam, fd_tol);
            return Outcome{{{"lambda", cj(lam)},
                            {"size", a.rows()},
                            {"Y", matrix_to_json(p.y)},
                            {"sigma_a", p.sigma_a},
                            {"sigma_b", p.sigma_b},
                            {"residual", p.residual},
                            {"eigen_residual", p.eigen_residual},
                            {"scale", p.scale},
                            {"y_norm", p.y.norm()},
                            {"tolerances", {{"eigenvalue", fd_tol}}}}};
        };
    });
    common(c_fd, 16);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    if (n == 0) n = default_n_for.at(command);
    Outcome res;
    try {
        res = action();
    } catch (const MathError& e) {
        res = Outcome{{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}, kMath};
        err << "math error (" << e.kind() << "): " << e.what() << "\n";
    } catch (const json::exception& e) {
        err << "usage error: malformed JSON: " << e.what() << "\n" << "schema: " << kSymbolSchemaHint << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::out_of_range& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }
    res.report["command"] = command;
    res.report["exit_code"] = res.code;
    const std::string text = res.report.dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        try {
            write_text(out_path, text);
        } catch (const std::exception& e) {
            err << "usage error: " << e.what() << "\n";
            return kUsage;
        }
    }
    return res.code;
}

}  // namespace hardylab::cli
