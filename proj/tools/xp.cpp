// xp: command-line front end for the xpmodels library.
//
// Exit status: 0 success, 2 usage error, 1 numerical or I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xpmodels/dynamics.hpp"
#include "xpmodels/errors.hpp"
#include "xpmodels/io.hpp"
#include "xpmodels/models.hpp"
#include "xpmodels/quantum.hpp"
#include "xpmodels/riemann.hpp"
#include "xpmodels/semiclassics.hpp"

namespace {

using nlohmann::json;
using xp::io::fmt;
using xp::models::XpModel;

// --config FILE: a JSON object whose keys are long flag names. Arrays give
// repeated values; the "param" key may also be an object {name: value}.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, val] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (key == "param" && val.is_object()) {
                for (const auto& [k, v] : val.items()) item.inputs.push_back(k + "=" + scalar(v));
            } else if (val.is_array()) {
                for (const auto& v : val) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(val));
            }
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_number()) return fmt(v.get<double>());
        throw CLI::ConversionError("unsupported config value " + v.dump());
    }
};

struct Flags {
    std::string model;
    std::vector<std::string> params;
    std::string table;
    double hbar = 1.0;
    double theta = 0.0;
    std::string format = "csv";
    std::string out;
    std::optional<double> tol;
    std::optional<double> emax;
    std::optional<double> emin;
    std::vector<double> energy;
    int points = 20;
    std::vector<double> at;
    int periods = 1;
    std::string solver = "auto";
    std::string family;
    std::string profile;
    std::string curve;
    std::optional<double> lo, hi;
    std::string zeros;
    std::optional<double> alpha;
    bool plot_data = false;
};

xp::models::Params parse_params(const std::vector<std::string>& kv) {
    xp::models::Params p;
    for (const auto& s : kv) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw xp::UsageError("--param expects name=value, got '" + s + "'");
        const std::string name = s.substr(0, eq), val = s.substr(eq + 1);
        double v = 0;
        try {
            std::size_t used = 0;
            v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw xp::UsageError("--param " + name + ": not a number '" + val + "'");
        }
        if (!std::isfinite(v)) throw xp::UsageError("--param " + name + " must be finite");
        p[name] = v;
    }
    return p;
}

XpModel build_model(const Flags& f) {
    if (!f.table.empty()) {
        std::ifstream in(f.table);
        if (!in) throw xp::IngestionError("cannot open table '" + f.table + "'", 0);
        return xp::io::read_tabulated_csv(in, f.hbar);
    }
    if (f.model.empty()) throw xp::UsageError("--model is required for this command");
    return xp::models::make_model(f.model, parse_params(f.params), f.hbar);
}

// Energies from --energy, or a grid from --emin/--emax/--points.
std::vector<double> energies(const Flags& f, std::optional<double> default_min = {}) {
    if (!f.energy.empty()) return f.energy;
    if (!f.emax) throw xp::UsageError("give --energy values or an --emax (with --emin) grid");
    const double a = f.emin ? *f.emin : default_min.value_or(0.0);
    if (!(*f.emax > a)) throw xp::UsageError("--emax must exceed --emin");
    std::vector<double> e(f.points);
    for (int i = 0; i < f.points; ++i) e[i] = a + (*f.emax - a) * i / (f.points - 1);
    return e;
}

struct Output {
    std::ostringstream text;
    bool json_mode;
};

// ---------------------------------------------------------------------------

void cmd_catalog(const Flags&, Output& o) {
    const auto cat = xp::models::catalog();
    if (o.json_mode) {
        json arr = json::array();
        for (const auto& e : cat) arr.push_back({{"kind", e.kind}, {"params", e.params}, {"description", e.description}});
        o.text << json{{"command", "catalog"}, {"models", arr}}.dump(2) << '\n';
        return;
    }
    o.text << "kind,params,description\n";
    for (const auto& e : cat) {
        std::string ps;
        for (const auto& p : e.params) ps += (ps.empty() ? "" : ";") + p;
        o.text << e.kind << ',' << ps << ",\"" << e.description << "\"\n";
    }
}

void cmd_curvature(const Flags& f, Output& o) {
    const XpModel m = build_model(f);
    if (f.at.empty()) throw xp::UsageError("curvature needs --at");
    json pts = json::array();
    if (!o.json_mode) o.text << "x,R,degraded\n";
    for (double x : f.at) {
        const auto c = xp::models::scalar_curvature(m, x);
        if (o.json_mode)
            pts.push_back({{"x", x}, {"R", c.R}, {"degraded", c.degraded}});
        else
            o.text << fmt(x) << ',' << fmt(c.R) << ',' << (c.degraded ? 1 : 0) << '\n';
    }
    if (o.json_mode)
        o.text << json{{"command", "curvature"}, {"model", xp::io::model_to_json(m)}, {"points", pts}}.dump(2) << '\n';
}

void cmd_trajectory(const Flags& f, Output& o) {
    const XpModel m = build_model(f);
    if (f.energy.size() != 1) throw xp::UsageError("trajectory needs exactly one --energy");
    xp::dynamics::OrbitOptions opts;
    if (f.tol) opts.tol = *f.tol;
    const auto tr = xp::dynamics::integrate_orbit(m, f.energy[0], f.periods, opts);
    const auto chart = xp::models::lightcone_chart(m, xp::models::ChartChoice::generic_identity);

    if (o.json_mode) {
        json t = json::array(), x = json::array(), p = json::array(), xp_ = json::array(), xm = json::array();
        for (const auto& s : tr.samples) {
            const auto [a, b] = chart.to_lightcone(s.t, s.x);
            t.push_back(s.t), x.push_back(s.x), p.push_back(s.p), xp_.push_back(a), xm.push_back(b);
        }
        o.text << json{{"command", "trajectory"},
                       {"model", xp::io::model_to_json(m)},
                       {"energy", tr.energy},
                       {"eta", tr.eta},
                       {"open", tr.open},
                       {"period", tr.open ? json(nullptr) : json(tr.period)},
                       {"bounce_times", tr.bounce_times},
                       {"signed_area", tr.signed_area},
                       {"samples", {{"t", t}, {"x", x}, {"p", p}, {"xplus", xp_}, {"xminus", xm}}}}
                          .dump(2)
               << '\n';
        return;
    }
    const char sep = f.plot_data ? ' ' : ',';
    o.text << (f.plot_data ? "# t x p xplus xminus\n" : "t,x,p,xplus,xminus\n");
    for (const auto& s : tr.samples) {
        const auto [a, b] = chart.to_lightcone(s.t, s.x);
        o.text << fmt(s.t) << sep << fmt(s.x) << sep << fmt(s.p) << sep << fmt(a) << sep << fmt(b) << '\n';
    }
    if (f.plot_data) {
        // second gnuplot data block: the wall x = lower in the same chart
        o.text << "\n\n# boundary xplus xminus\n";
        const double t0 = tr.samples.front().t, t1 = tr.samples.back().t;
        const int n = 200;
        for (int i = 0; i <= n; ++i) {
            const double t = t0 + (t1 - t0) * i / n;
            const auto [a, b] = chart.to_lightcone(t, m.domain().lower);
            o.text << fmt(a) << ' ' << fmt(b) << '\n';
        }
    }
}

void cmd_period(const Flags& f, Output& o) {
    const XpModel m = build_model(f);
    const auto es = energies(f, xp::semiclassics::threshold_energy(m));
    json rows = json::array();
    if (!o.json_mode) o.text << "E,T\n";
    for (double E : es) {
        const double T = xp::dynamics::period(m, E);
        if (o.json_mode)
            rows.push_back({{"E", E}, {"T", T}});
        else
            o.text << fmt(E) << ',' << fmt(T) << '\n';
    }
    if (o.json_mode)
        o.text << json{{"command", "period"}, {"model", xp::io::model_to_json(m)}, {"periods", rows}}.dump(2) << '\n';
}

void cmd_count(const Flags& f, Output& o, bool closed) {
    const XpModel m = build_model(f);
    const auto es = energies(f, xp::semiclassics::threshold_energy(m));
    xp::semiclassics::CountingCurve c;
    if (closed) {
        c.source = xp::semiclassics::CurveSource::closed_form;
        c.hbar = m.hbar();
        auto sorted = es;
        std::sort(sorted.begin(), sorted.end());
        for (double E : sorted)
            c.samples.emplace_back(E, xp::semiclassics::count_closed(f.model, E, m.params(), m.hbar()));
    } else {
        c = xp::semiclassics::counting_curve(m, es);
    }
    if (o.json_mode) {
        json s = json::array();
        for (const auto& [E, n] : c.samples) s.push_back({E, n});
        o.text << json{{"command", "count"},
                       {"model", xp::io::model_to_json(m)},
                       {"source", xp::semiclassics::to_string(c.source)},
                       {"hbar", c.hbar},
                       {"samples", s}}
                          .dump(2)
               << '\n';
    } else if (f.plot_data) {
        o.text << "# E n\n";
        for (const auto& [E, n] : c.samples) o.text << fmt(E) << ' ' << fmt(n) << '\n';
    } else {
        xp::io::write_curve_csv(o.text, c);
    }
}

// n(E) through a monotone cubic over the samples.
xp::semiclassics::CountTarget curve_target(const xp::semiclassics::CountingCurve& c) {
    if (c.samples.size() < 3) throw xp::UsageError("counting curve needs at least 3 samples");
    std::vector<double> e, n;
    for (const auto& [E, v] : c.samples) {
        e.push_back(E);
        n.push_back(v);
    }
    auto interp = std::make_shared<const xp::numerics::MonotoneCubic>(e, n);
    return {[interp](double E) { return (*interp)(E); }, [interp](double E) { return interp->derivative(E); }};
}

void cmd_invert(const Flags& f, Output& o) {
    using namespace xp::semiclassics;
    if (f.profile.empty() == f.curve.empty()) throw xp::UsageError("invert needs exactly one of --profile or --curve");
    const auto params = parse_params(f.params);
    Family fam;
    CountTarget target;
    double lower;
    if (!f.profile.empty()) {
        auto np = named_profile(f.profile, params, f.hbar);
        fam = np.family;
        target = np.target;
        lower = np.lower;
        if (!f.family.empty() && f.family != to_string(fam))
            throw xp::UsageError("profile '" + f.profile + "' belongs to the " + to_string(fam) + " family");
    } else {
        std::ifstream in(f.curve);
        if (!in) throw xp::IngestionError("cannot open curve '" + f.curve + "'", 0);
        const auto c = xp::io::read_curve_csv(in);
        target = curve_target(c);
        fam = f.family == "standard" ? Family::standard : Family::xp;
        const double e0 = c.samples.front().first;
        lower = fam == Family::xp ? e0 / 2 : e0;
        if (auto it = params.find(fam == Family::xp ? "w0" : "V0"); it != params.end()) lower = it->second;
    }
    InversionResult r;
    if (fam == Family::xp) {
        const double x0 = params.count("x0") ? params.at("x0") : lower;
        const double a = f.lo.value_or(lower), b = f.hi.value_or(20 * lower);
        if (!(b > a)) throw xp::UsageError("--hi must exceed --lo");
        std::vector<double> grid(f.points);
        for (int i = 0; i < f.points; ++i) grid[i] = a * std::pow(b / a, static_cast<double>(i) / (f.points - 1));
        grid.front() = a;
        grid.back() = b;
        r = abel_invert_xp(target, lower, x0, f.hbar, grid);
    } else {
        const double a = f.lo.value_or(lower), b = f.hi.value_or(lower + 100);
        if (!(b > a)) throw xp::UsageError("--hi must exceed --lo");
        std::vector<double> grid(f.points);
        for (int i = 0; i < f.points; ++i) grid[i] = a + (b - a) * i / (f.points - 1);
        r = abel_invert_standard(target, lower, f.hbar, grid);
    }
    if (o.json_mode) {
        json prof = json::array();
        for (const auto& [v, x] : r.profile) prof.push_back({v, x});
        o.text << json{{"command", "invert"},
                       {"family", to_string(r.family)},
                       {"monotone", r.monotone},
                       {"hbar", f.hbar},
                       {"profile", prof}}
                          .dump(2)
               << '\n';
    } else if (f.plot_data) {
        o.text << (r.family == Family::xp ? "# w x\n" : "# V x\n");
        for (const auto& [v, x] : r.profile) o.text << fmt(v) << ' ' << fmt(x) << '\n';
    } else {
        xp::io::write_inversion_csv(o.text, r);
    }
}

// If the symmetric image of m is w = a z on (z0, inf), returns (a, z0).
std::optional<std::pair<double, double>> linear_image(const XpModel& m) {
    if (m.kind() == xp::models::Kind::constant) return std::nullopt;
    try {
        const auto img = m.gauge() == xp::models::Gauge::symmetric ? m : xp::models::to_symmetric_gauge(m).second;
        const double z0 = img.domain().lower;
        if (!(z0 > 0)) return std::nullopt;
        const double a = img.w(2 * z0) / (2 * z0);
        for (double s : {1.0, 1.5, 3.0, 10.0, 100.0}) {
            const double z = z0 * s;
            if (std::abs(img.w(z) - a * z) > 1e-9 * a * z) return std::nullopt;
        }
        return std::pair{a, z0};
    } catch (const xp::DomainError&) {
        return std::nullopt;
    }
}

xp::quantum::SpectrumResult solve_spectrum(const Flags& f, const XpModel& m, double emax) {
    using namespace xp::quantum;
    if (m.kind() == xp::models::Kind::constant) {
        if (f.solver != "auto") throw xp::UsageError("the constant model has exact formulas; drop --solver");
        const double lp = m.maybe_param("c").value_or(m.maybe_param("lp").value_or(0));
        return constant_model_spectrum(lp, f.theta, m.hbar());
    }
    const auto lin = linear_image(m);
    const bool bessel = f.solver == "bessel" || (f.solver == "auto" && lin);
    if (bessel) {
        if (!lin) throw xp::UsageError("the bessel solver needs a model equivalent to w = alpha z");
        // H = a z (p + 1/p) has a times the spectrum of a = 1
        const double a = lin->first;
        ModelIOptions opts;
        if (f.tol) opts.root_tol = *f.tol;
        auto s = modelI_spectrum(lin->second, f.theta, emax / a, m.hbar(), opts);
        for (auto& e : s.eigenvalues) e.E *= a;
        for (auto& e : s.flagged) e *= a;
        if (s.zero_mode_norm) s.zero_mode_norm = zero_mode(m, f.theta).norm;
        return s;
    }
    ShootOptions opts;
    if (f.tol) opts.root_tol = *f.tol;
    return shoot_spectrum(m, f.theta, emax, opts);
}

void cmd_spectrum(const Flags& f, Output& o) {
    const XpModel m = build_model(f);
    if (!f.emax && m.kind() != xp::models::Kind::constant) throw xp::UsageError("spectrum needs --emax");
    const auto s = solve_spectrum(f, m, f.emax.value_or(0));
    if (o.json_mode) {
        auto j = xp::io::spectrum_to_json(s, xp::io::model_to_json(m));
        j["command"] = "spectrum";
        o.text << j.dump(2) << '\n';
    } else if (f.plot_data) {
        o.text << "# index E residual\n";
        for (const auto& e : s.eigenvalues) o.text << e.index << ' ' << fmt(e.E) << ' ' << fmt(e.residual) << '\n';
    } else {
        xp::io::write_spectrum_csv(o.text, s);
    }
}

void cmd_scatter(const Flags& f, Output& o) {
    const XpModel m = build_model(f);
    if (m.kind() != xp::models::Kind::constant) throw xp::UsageError("scatter applies to the constant model");
    const double lp = m.maybe_param("c").value_or(m.maybe_param("lp").value_or(0));
    const auto es = energies(f, 2 * lp);
    std::vector<xp::quantum::ScatteringState> st;
    for (double E : es) st.push_back(xp::quantum::constant_model_scattering(E, lp, f.theta, m.hbar()));
    const auto bound = xp::quantum::constant_bound_state(lp, f.theta, m.hbar());
    if (o.json_mode) {
        json rows = json::array();
        for (const auto& s : st)
            rows.push_back({{"E", s.E},
                            {"eta", s.eta},
                            {"u", s.u},
                            {"k_plus", s.k_plus},
                            {"k_minus", s.k_minus},
                            {"A", {s.A.real(), s.A.imag()}},
                            {"B", {s.B.real(), s.B.imag()}}});
        json b = nullptr;
        if (bound)
            b = {{"E0", bound->E0}, {"k0", {bound->k0.real(), bound->k0.imag()}}, {"C", bound->C},
                 {"mean_x", bound->mean_x}};
        o.text << json{{"command", "scatter"},
                       {"model", xp::io::model_to_json(m)},
                       {"theta", f.theta},
                       {"continuum", {-2 * lp, 2 * lp}},
                       {"bound_state", b},
                       {"states", rows}}
                          .dump(2)
               << '\n';
        return;
    }
    o.text << "E,eta,u,k_plus,k_minus,A_re,A_im,B_re,B_im\n";
    for (const auto& s : st)
        o.text << fmt(s.E) << ',' << s.eta << ',' << fmt(s.u) << ',' << fmt(s.k_plus) << ',' << fmt(s.k_minus) << ','
               << fmt(s.A.real()) << ',' << fmt(s.A.imag()) << ',' << fmt(s.B.real()) << ',' << fmt(s.B.imag())
               << '\n';
}

void cmd_zero_mode(const Flags& f, Output& o) {
    const XpModel m = build_model(f);
    const auto z = xp::quantum::zero_mode(m, f.theta);
    const bool present = z.norm.has_value() || z.divergent;
    if (o.json_mode) {
        o.text << json{{"command", "zero-mode"},
                       {"model", xp::io::model_to_json(m)},
                       {"theta", f.theta},
                       {"present", present},
                       {"normalizable", z.norm.has_value()},
                       {"norm", z.norm ? json(*z.norm) : json(nullptr)}}
                          .dump(2)
               << '\n';
        return;
    }
    o.text << "theta,present,norm\n" << fmt(f.theta) << ',' << (present ? 1 : 0) << ','
           << (z.norm ? fmt(*z.norm) : std::string(z.divergent ? "inf" : "")) << '\n';
}

void cmd_compare(const Flags& f, Output& o) {
    const XpModel m = build_model(f);
    const auto s = solve_spectrum(f, m, f.emax.value_or(200.0));
    std::optional<xp::riemann::ZerosTable> zeros;
    if (!f.zeros.empty()) zeros = xp::riemann::load_zeros(f.zeros);
    xp::riemann::Identification id;
    const auto lin = linear_image(m);
    id.alpha = f.alpha.value_or(lin ? lin->first : 1.0);
    if (lin) id.z0 = lin->second;
    const auto rep = xp::riemann::compare_spectrum(s, zeros, id);
    if (o.json_mode) {
        auto j = xp::io::report_to_json(rep);
        j["command"] = "compare";
        j["model"] = xp::io::model_to_json(m);
        o.text << j.dump(2) << '\n';
    } else if (f.plot_data) {
        o.text << "# n E t smooth offset\n";
        for (const auto& r : rep.rows)
            o.text << r.n << ' ' << fmt(r.E) << ' ' << fmt(r.t) << ' ' << fmt(r.smooth) << ' ' << fmt(r.offset) << '\n';
    } else {
        xp::io::write_report_csv(o.text, rep);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra, semiclassics and geometry of H = U(x) p + V(x)/p models", "xp"};
    app.require_subcommand(1, 1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file with default flag values");

    Flags f;
    auto finite = CLI::Validator(
        [](std::string& s) {
            double v = 0;
            try {
                v = std::stod(s);
            } catch (...) {
                return std::string("not a number");
            }
            return std::isfinite(v) ? std::string() : std::string("must be finite");
        },
        "FINITE");
    app.add_option("--model", f.model, "catalog kind (see `xp catalog`)");
    app.add_option("--param", f.params, "model parameter name=value (repeatable)");
    app.add_option("--table", f.table, "tabulated w profile, CSV with x,w columns");
    app.add_option("--hbar", f.hbar, "Planck constant")->check(CLI::PositiveNumber & finite);
    app.add_option("--theta", f.theta, "self-adjoint extension angle")->check(finite);
    app.add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", f.out, "output file (default stdout)");
    app.add_option("--tol", f.tol, "root / ODE tolerance")->check(CLI::PositiveNumber & finite);
    app.add_option("--emax", f.emax, "largest energy")->check(CLI::PositiveNumber & finite);
    app.add_option("--emin", f.emin, "smallest energy of a grid")->check(finite);
    app.add_option("--energy", f.energy, "explicit energies")->check(finite);
    app.add_option("--points", f.points, "grid size")->check(CLI::Range(2, 1000000));
    app.add_option("--at", f.at, "evaluation points")->check(finite);
    app.add_option("--periods", f.periods, "orbit periods")->check(CLI::Range(1, 100000));
    app.add_option("--solver", f.solver, "spectrum solver")->check(CLI::IsMember({"auto", "bessel", "shoot"}));
    app.add_option("--family", f.family, "inversion family")->check(CLI::IsMember({"xp", "standard"}));
    app.add_option("--profile", f.profile, "built-in counting target")
        ->check(CLI::IsMember({"wu-sprung", "mussardo", "linear-log"}));
    app.add_option("--curve", f.curve, "counting curve CSV to invert");
    app.add_option("--lo", f.lo, "inversion grid start")->check(CLI::PositiveNumber & finite);
    app.add_option("--hi", f.hi, "inversion grid end")->check(CLI::PositiveNumber & finite);
    app.add_option("--zeros", f.zeros, "zeta zero ordinates, one per line");
    app.add_option("--alpha", f.alpha, "identification t = E / (hbar alpha)")->check(CLI::PositiveNumber & finite);
    app.add_flag("--plot-data", f.plot_data, "whitespace-separated columns for plotting");
    bool closed = false;

    auto sub = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };
    auto* s_catalog = sub("catalog", "list model kinds and parameters");
    auto* s_curv = sub("curvature", "scalar curvature R at --at points");
    auto* s_traj = sub("trajectory", "classical orbit at one --energy");
    auto* s_period = sub("period", "orbit period T(E)");
    auto* s_count = sub("count", "semiclassical counting function n(E)");
    s_count->add_flag("--closed", closed, "use the closed form instead of quadrature");
    auto* s_inv = sub("invert", "rebuild a profile from a counting function");
    auto* s_spec = sub("spectrum", "eigenvalues with the nonlocal boundary condition");
    auto* s_scat = sub("scatter", "constant-model scattering states");
    auto* s_zero = sub("zero-mode", "the E = 0 state and its norm");
    auto* s_cmp = sub("compare", "compare a spectrum with the smooth zero count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    Output o{{}, f.format == "json"};
    try {
        if (f.plot_data && o.json_mode) throw xp::UsageError("--plot-data and --format json are exclusive");
        if (*s_catalog) cmd_catalog(f, o);
        else if (*s_curv) cmd_curvature(f, o);
        else if (*s_traj) cmd_trajectory(f, o);
        else if (*s_period) cmd_period(f, o);
        else if (*s_count) cmd_count(f, o, closed);
        else if (*s_inv) cmd_invert(f, o);
        else if (*s_spec) cmd_spectrum(f, o);
        else if (*s_scat) cmd_scatter(f, o);
        else if (*s_zero) cmd_zero_mode(f, o);
        else if (*s_cmp) cmd_compare(f, o);
    } catch (const xp::UsageError& e) {
        std::cerr << "xp: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "xp: " << e.what() << '\n';
        return 1;
    }

    if (f.out.empty()) {
        std::cout << o.text.str();
        return std::cout ? 0 : 1;
    }
    std::ofstream file(f.out, std::ios::binary);
    file << o.text.str();
    if (!file) {
        std::cerr << "xp: cannot write '" << f.out << "'\n";
        return 1;
    }
    return 0;
}
