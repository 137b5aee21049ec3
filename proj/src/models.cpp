#include "xpmodels/models.hpp"

#include <algorithm>
#include <cmath>

#include "xpmodels/errors.hpp"

namespace xp::models {

using numerics::inf;

std::string to_string(Kind k) {
    switch (k) {
        case Kind::linear: return "linear";
        case Kind::berry_keating: return "berry-keating";
        case Kind::model_iii: return "model-III";
        case Kind::constant: return "constant";
        case Kind::cosh: return "cosh";
        case Kind::linear_log: return "linear-log";
        case Kind::power: return "power";
        case Kind::tabulated: return "tabulated";
        case Kind::custom: return "custom";
    }
    return "custom";
}

std::string to_string(Gauge g) {
    switch (g) {
        case Gauge::generic: return "generic";
        case Gauge::symmetric: return "symmetric";
        case Gauge::p_gauge: return "p-gauge";
    }
    return "generic";
}

Kind kind_from_string(const std::string& s) {
    static const std::pair<const char*, Kind> names[] = {
        {"linear", Kind::linear},         {"berry-keating", Kind::berry_keating},
        {"model-III", Kind::model_iii},   {"model-iii", Kind::model_iii},
        {"constant", Kind::constant},     {"cosh", Kind::cosh},
        {"linear-log", Kind::linear_log}, {"power", Kind::power},
        {"tabulated", Kind::tabulated},   {"custom", Kind::custom},
    };
    for (const auto& [name, k] : names)
        if (s == name) return k;
    throw UsageError("unknown model kind '" + s + "'");
}

XpModel::XpModel(Kind kind, Params params, Gauge gauge, DomainInterval domain, double hbar,
                 std::shared_ptr<const Profile> profile)
    : kind_(kind), params_(std::move(params)), gauge_(gauge), domain_(domain), hbar_(hbar),
      profile_(std::move(profile)) {
    if (!(hbar > 0) || !std::isfinite(hbar)) throw DomainError("hbar must be positive");
    if (!(domain.lower < domain.upper)) throw DomainError("empty domain");
    if (!profile_ || !profile_->U || !profile_->V) throw UsageError("model without gauge functions");
}

void XpModel::check_domain(double x) const {
    if (!domain_.contains(x))
        throw DomainError("x = " + std::to_string(x) + " outside the model domain");
}

double XpModel::U(double x) const {
    check_domain(x);
    return profile_->U(x);
}

double XpModel::V(double x) const {
    check_domain(x);
    return profile_->V(x);
}

double XpModel::w(double x) const {
    check_domain(x);
    if (profile_->jet) return profile_->jet(x).w;
    if (gauge_ == Gauge::symmetric) return profile_->U(x);
    return std::sqrt(profile_->U(x) * profile_->V(x));
}

WJet XpModel::jet(double x) const {
    if (!profile_->jet) throw UsageError("model has no analytic derivatives");
    check_domain(x);
    return profile_->jet(x);
}

double XpModel::param(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw UsageError("model has no parameter '" + name + "'");
    return it->second;
}

std::optional<double> XpModel::maybe_param(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) return std::nullopt;
    return it->second;
}

XpModel XpModel::with_hbar(double hbar) const {
    if (kind_ == Kind::cosh) return make_model(to_string(kind_), params_, hbar);
    return XpModel(kind_, params_, gauge_, domain_, hbar, profile_);
}

namespace {

std::shared_ptr<const Profile> symmetric_profile(RealFn w, std::function<WJet(double)> jet) {
    auto p = std::make_shared<Profile>();
    p->U = w;
    p->V = w;
    p->jet = std::move(jet);
    return p;
}

XpModel symmetric_from_jet(Kind kind, Params params, DomainInterval dom, double hbar,
                           std::function<WJet(double)> jet) {
    auto w = [jet](double x) { return jet(x).w; };
    return XpModel(kind, std::move(params), Gauge::symmetric, dom, hbar, symmetric_profile(w, std::move(jet)));
}

double require_positive(const Params& p, const std::string& name, std::optional<double> fallback = {}) {
    auto it = p.find(name);
    double v;
    if (it != p.end()) {
        v = it->second;
    } else if (fallback) {
        v = *fallback;
    } else {
        throw UsageError("missing parameter '" + name + "'");
    }
    if (!(v > 0) || !std::isfinite(v)) throw DomainError("parameter '" + name + "' must be positive");
    return v;
}

double optional_value(const Params& p, const std::string& name, double fallback) {
    auto it = p.find(name);
    if (it == p.end()) return fallback;
    if (!std::isfinite(it->second)) throw DomainError("parameter '" + name + "' must be finite");
    return it->second;
}

void reject_unknown(const Params& p, std::initializer_list<const char*> allowed, const std::string& kind) {
    for (const auto& [k, v] : p) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw UsageError("parameter '" + k + "' not used by kind " + kind);
    }
}

bool has(const Params& p, const char* k) { return p.count(k) != 0; }

}  // namespace

XpModel make_model(const std::string& kind_name, const Params& params, double hbar) {
    const Kind kind = kind_from_string(kind_name);
    const std::string kname = to_string(kind);
    if (!(hbar > 0) || !std::isfinite(hbar)) throw DomainError("hbar must be positive");

    switch (kind) {
        case Kind::linear: {
            if (has(params, "lx") || has(params, "lp")) {
                reject_unknown(params, {"lx", "lp"}, kname);
                const double lx = require_positive(params, "lx"), lp = require_positive(params, "lp");
                auto prof = std::make_shared<Profile>();
                prof->U = [](double x) { return x; };
                prof->V = [lp](double x) { return lp * lp * x; };
                return XpModel(kind, params, Gauge::generic, {lx, inf}, hbar, prof);
            }
            reject_unknown(params, {"alpha", "h"}, kname);
            const double a = require_positive(params, "alpha", 1.0), h = require_positive(params, "h");
            Params rec{{"alpha", a}, {"h", h}};
            return symmetric_from_jet(kind, rec, {h, inf}, hbar,
                                      [a](double x) { return WJet{a * x, a, 0.0}; });
        }
        case Kind::berry_keating: {
            if (has(params, "lx") || has(params, "lp")) {
                reject_unknown(params, {"lx", "lp"}, kname);
                const double lx = require_positive(params, "lx"), lp = require_positive(params, "lp");
                auto prof = std::make_shared<Profile>();
                prof->U = [lx](double x) { return x + lx * lx / x; };
                prof->V = [lx, lp](double x) { return lp * lp * (x + lx * lx / x); };
                return XpModel(kind, params, Gauge::generic, {0.0, inf}, hbar, prof);
            }
            reject_unknown(params, {"h"}, kname);
            const double h = require_positive(params, "h");
            const double h2 = h * h;
            return symmetric_from_jet(kind, params, {0.0, inf}, hbar, [h2](double x) {
                return WJet{x + h2 / x, 1.0 - h2 / (x * x), 2.0 * h2 / (x * x * x)};
            });
        }
        case Kind::model_iii: {
            reject_unknown(params, {"lx", "lp"}, kname);
            const double lx = require_positive(params, "lx"), lp = require_positive(params, "lp");
            auto prof = std::make_shared<Profile>();
            prof->U = [lx](double x) { return (x * x + lx * lx) / x; };
            prof->V = [lp](double x) { return lp * lp * x; };
            return XpModel(kind, params, Gauge::generic, {0.0, inf}, hbar, prof);
        }
        case Kind::constant: {
            reject_unknown(params, {"c", "lp"}, kname);
            const double c = has(params, "c") ? require_positive(params, "c") : require_positive(params, "lp");
            return symmetric_from_jet(kind, {{"c", c}}, {0.0, inf}, hbar,
                                      [c](double) { return WJet{c, 0.0, 0.0}; });
        }
        case Kind::cosh: {
            reject_unknown(params, {"w0", "mu"}, kname);
            const double w0 = require_positive(params, "w0"), mu = require_positive(params, "mu");
            const double k = 1.0 / (2.0 * mu * hbar);
            return symmetric_from_jet(kind, params, {0.0, inf}, hbar, [w0, k](double x) {
                const double c = std::cosh(k * x), s = std::sinh(k * x);
                return WJet{w0 * c, w0 * k * s, w0 * k * k * c};
            });
        }
        case Kind::linear_log: {
            reject_unknown(params, {"alpha", "beta", "lower"}, kname);
            const double a = require_positive(params, "alpha");
            const double b = optional_value(params, "beta", 0.0);
            const double lo = optional_value(params, "lower", 1.0);
            if (!(lo > 0)) throw DomainError("linear-log lower end must be positive");
            // w is convex for b < 0 with its minimum at -b/a, and increasing otherwise
            const double xmin = b < 0 ? std::max(lo, -b / a) : lo;
            if (!(a * xmin + b * std::log(xmin) > 0)) throw DomainError("linear-log profile not positive on its domain");
            Params rec{{"alpha", a}, {"beta", b}, {"lower", lo}};
            return symmetric_from_jet(kind, rec, {lo, inf}, hbar, [a, b](double x) {
                return WJet{a * x + b * std::log(x), a + b / x, -b / (x * x)};
            });
        }
        case Kind::power: {
            reject_unknown(params, {"A", "exponent", "lower"}, kname);
            const double A = require_positive(params, "A");
            auto it = params.find("exponent");
            if (it == params.end()) throw UsageError("missing parameter 'exponent'");
            const double e = it->second;
            if (e == 0.0) throw DomainError("power exponent 0 is the constant kind");
            if (!(e > 0) || !std::isfinite(e)) throw DomainError("power exponent must be positive");
            const double lo = optional_value(params, "lower", 1.0);
            if (!(lo > 0)) throw DomainError("power lower end must be positive");
            Params rec{{"A", A}, {"exponent", e}, {"lower", lo}};
            return symmetric_from_jet(kind, rec, {lo, inf}, hbar, [A, e](double x) {
                const double v = A * std::pow(x, e);
                return WJet{v, e * v / x, e * (e - 1.0) * v / (x * x)};
            });
        }
        case Kind::tabulated:
        case Kind::custom:
            break;
    }
    throw UsageError("kind " + kname + " cannot be built from parameters alone");
}

XpModel make_symmetric(RealFn w, DomainInterval domain, double hbar, std::function<WJet(double)> jet, Kind kind,
                       Params params) {
    if (!w) throw UsageError("missing w");
    return XpModel(kind, std::move(params), Gauge::symmetric, domain, hbar, symmetric_profile(std::move(w), std::move(jet)));
}

XpModel make_generic(RealFn U, RealFn V, DomainInterval domain, double hbar, Kind kind, Params params) {
    auto p = std::make_shared<Profile>();
    p->U = std::move(U);
    p->V = std::move(V);
    return XpModel(kind, std::move(params), Gauge::generic, domain, hbar, p);
}

XpModel make_tabulated(std::vector<double> x, std::vector<double> w, double hbar) {
    if (x.size() != w.size()) throw UsageError("tabulated x and w differ in length");
    if (x.size() < 3) throw UsageError("tabulated model needs at least 3 samples");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(w[i])) throw DomainError("tabulated samples must be finite");
        if (!(w[i] > 0)) throw DomainError("tabulated w must be positive");
        if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("tabulated x must be strictly ascending");
    }
    DomainInterval dom{x.front(), x.back()};
    auto p = std::make_shared<const numerics::MonotoneCubic>(std::move(x), std::move(w));
    auto wf = [p](double t) { return (*p)(t); };
    // No analytic jet: curvature of an interpolant goes through finite differences.
    return make_symmetric(wf, dom, hbar, {}, Kind::tabulated, {});
}

double w_scalar(const XpModel& m, double x) { return m.w(x); }

namespace {

// x -> offset + int_lower^x r(y) dy for a positive rate r, with its inverse.
struct MonotoneIntegral {
    RealFn rate;
    double lower, upper, offset;
    numerics::Quadrature quad;

    double forward(double x) const {
        if (x == lower) return offset;
        if (x < lower || x > upper) throw DomainError("gauge map evaluated outside its domain");
        try {
            return offset + numerics::integrate(rate, lower, x, quad).value;
        } catch (const ConvergenceError&) {
            throw DivergentMapError("gauge map integral does not converge");
        }
    }

    double forward_total() const {
        if (std::isfinite(upper)) return forward(upper);
        try {
            const double v = offset + numerics::integrate(rate, lower, inf, quad).value;
            return (std::isfinite(v) && v < 1e15) ? v : inf;
        } catch (const ConvergenceError&) {
            return inf;
        }
    }

    // Safeguarded Newton on forward(x) = target.
    double inverse(double target, double total) const {
        if (target < offset || target > total) throw DomainError("inverse gauge map outside the image");
        if (target == offset) return lower;
        double a = lower, b;
        if (std::isfinite(upper)) {
            b = upper;
        } else {
            double step = std::max(1.0, std::abs(lower));
            b = lower + step;
            while (forward(b) < target) {
                a = b;
                step *= 2;
                b = lower + step;
                if (!std::isfinite(b)) throw DomainError("inverse gauge map did not bracket");
            }
        }
        double x = 0.5 * (a + b);
        for (int it = 0; it < 200; ++it) {
            const double fx = forward(x) - target;
            if (fx == 0) return x;
            if (fx > 0) b = x; else a = x;
            const double r = rate(x);
            double xn = x - fx / r;
            if (!(xn > a && xn < b) || !std::isfinite(xn)) xn = 0.5 * (a + b);
            const double dx = std::abs(xn - x);
            x = xn;
            if (dx <= 1e-15 * std::max(1.0, std::abs(x)) || b - a <= 4e-16 * std::max(1.0, std::abs(x))) return x;
        }
        return x;
    }
};

GaugeMap build_map(RealFn rate, const XpModel& m, double new_lower, const numerics::Quadrature& q) {
    auto mi = std::make_shared<MonotoneIntegral>(MonotoneIntegral{rate, m.domain().lower, m.domain().upper, new_lower, q});
    // Probe the lower end so that divergence is reported at construction.
    const double lo = m.domain().lower;
    const double probe = std::isfinite(m.domain().upper) ? 0.5 * (lo + m.domain().upper)
                                                         : lo + std::max(1.0, std::abs(lo));
    const double fp = mi->forward(probe);
    if (!std::isfinite(fp)) throw DivergentMapError("gauge map integral diverges at the lower end");
    const double total = mi->forward_total();
    GaugeMap g;
    g.forward = [mi](double x) { return mi->forward(x); };
    g.inverse = [mi, total](double y) { return mi->inverse(y, total); };
    g.jacobian = [rate](double x) { return rate(x); };
    g.new_lower = new_lower;
    g.new_upper = total;
    return g;
}

double default_symmetric_lower(const XpModel& m) {
    switch (m.kind()) {
        case Kind::linear:
        case Kind::model_iii:
            if (auto lx = m.maybe_param("lx"), lp = m.maybe_param("lp"); lx && lp) return *lx * *lp;
            return m.domain().lower;
        case Kind::berry_keating:
            return 0.0;
        default:
            return m.domain().lower;
    }
}

}  // namespace

std::pair<GaugeMap, XpModel> to_symmetric_gauge(const XpModel& m, const GaugeOptions& opts) {
    if (m.gauge() == Gauge::symmetric && (!opts.new_lower || *opts.new_lower == m.domain().lower)) {
        GaugeMap id;
        id.forward = [](double x) { return x; };
        id.inverse = [](double x) { return x; };
        id.jacobian = [](double) { return 1.0; };
        id.new_lower = m.domain().lower;
        id.new_upper = m.domain().upper;
        return {id, m};
    }
    auto prof = m.profile();
    RealFn rate = [prof](double x) { return std::sqrt(prof->V(x) / prof->U(x)); };
    const double lo = opts.new_lower.value_or(default_symmetric_lower(m));
    GaugeMap g = build_map(rate, m, lo, opts.quad);
    auto inv = g.inverse;
    RealFn w = [prof, inv](double xp) {
        const double x = inv(xp);
        return std::sqrt(prof->U(x) * prof->V(x));
    };
    XpModel out = make_symmetric(w, {g.new_lower, g.new_upper}, m.hbar(), {}, m.kind(), m.params());
    return {g, out};
}

std::pair<GaugeMap, XpModel> to_p_gauge(const XpModel& m, const GaugeOptions& opts) {
    auto prof = m.profile();
    const Gauge gauge = m.gauge();
    auto wfun = [prof, gauge](double x) {
        if (prof->jet) return prof->jet(x).w;
        if (gauge == Gauge::symmetric) return prof->U(x);
        return std::sqrt(prof->U(x) * prof->V(x));
    };
    RealFn rate = [wfun](double x) { return 1.0 / wfun(x); };
    GaugeMap g = build_map(rate, m, opts.new_lower.value_or(0.0), opts.quad);
    auto inv = g.inverse;
    auto p = std::make_shared<Profile>();
    p->U = [](double) { return 1.0; };
    p->V = [wfun, inv](double xp) {
        const double w = wfun(inv(xp));
        return w * w;
    };
    XpModel out(m.kind(), m.params(), Gauge::p_gauge, {g.new_lower, g.new_upper}, m.hbar(), p);
    return {g, out};
}

namespace {

// Stencil layout for a point near the domain edge.
struct Stencil {
    double h;
    int shift;  // 0 central, +1 forward, -1 backward
};

Stencil choose_stencil(const DomainInterval& d, double x, double h) {
    const bool left_ok = x - 2 * h > d.lower;
    const bool right_ok = x + 2 * h < d.upper;
    if (left_ok && right_ok) return {h, 0};
    if (right_ok) return {h, 1};
    if (left_ok) return {h, -1};
    throw DomainError("domain too narrow for a curvature stencil");
}

double d1(const std::function<double(double)>& f, double x, Stencil s) {
    const double h = s.h;
    if (s.shift == 0)
        return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
    const double sh = s.shift * h;
    return (-25 * f(x) + 48 * f(x + sh) - 36 * f(x + 2 * sh) + 16 * f(x + 3 * sh) - 3 * f(x + 4 * sh)) / (12 * sh);
}

double d2(const std::function<double(double)>& f, double x, Stencil s) {
    const double h = s.h;
    if (s.shift == 0)
        return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
    const double sh = s.shift * h;
    return (45 * f(x) - 154 * f(x + sh) + 214 * f(x + 2 * sh) - 156 * f(x + 3 * sh) + 61 * f(x + 4 * sh) -
            10 * f(x + 5 * sh)) / (12 * h * h);
}

}  // namespace

Curvature scalar_curvature_fd(const XpModel& m, double x) {
    const auto& d = m.domain();
    if (!d.contains(x)) throw DomainError("curvature requested outside the model domain");
    auto prof = m.profile();
    if (m.gauge() == Gauge::symmetric) {
        const double h = std::max(1e-5, 1e-4 * std::abs(x));
        Stencil s = choose_stencil(d, x, h);
        // one-sided stencils reach 5h
        if (s.shift != 0 && (x + 5 * s.shift * h <= d.lower || x + 5 * s.shift * h >= d.upper))
            throw DomainError("domain too narrow for a curvature stencil");
        auto w = [prof](double t) { return prof->U(t); };
        return {-2.0 * d2(w, x, s) / w(x), s.shift != 0};
    }
    // Nested first derivatives amplify round-off, so this path uses a wider step.
    const double h = std::max(1e-5, 1e-3 * std::abs(x));
    Stencil s = choose_stencil(d, x, h);
    auto W = [prof](double t) { return prof->U(t) * prof->V(t); };
    auto g = [&](double t) { return d1(W, t, choose_stencil(d, t, h)) / prof->V(t); };
    const bool degraded = !(x - 4 * h > d.lower && x + 4 * h < d.upper);
    return {-d1(g, x, s) / prof->V(x), degraded};
}

Curvature scalar_curvature(const XpModel& m, double x) {
    if (m.has_analytic_jet()) {
        const WJet j = m.jet(x);
        return {-2.0 * j.d2w / j.w, false};
    }
    return scalar_curvature_fd(m, x);
}

ChartChoice chart_from_string(const std::string& s) {
    if (s == "flat-linear") return ChartChoice::flat_linear;
    if (s == "flat-constant") return ChartChoice::flat_constant;
    if (s == "generic-identity" || s == "identity") return ChartChoice::generic_identity;
    throw UsageError("unknown chart '" + s + "'");
}

LightConeChart lightcone_chart(const XpModel& m, ChartChoice choice) {
    LightConeChart c;
    switch (choice) {
        case ChartChoice::flat_linear: {
            if (m.kind() != Kind::linear || m.gauge() != Gauge::symmetric)
                throw UsageError("flat-linear chart needs the symmetric linear model");
            const double a = m.param("alpha"), h = m.param("h");
            c.f = [a](double z) { return std::log(z) / (2 * a); };
            c.g = c.f;
            c.conformal_factor = [h](double, double) { return h; };
            c.to_lightcone = [a, h](double x0, double x1) {
                const double xp = std::exp(2 * a * x0);
                return std::pair{xp, (x1 / h) * (x1 / h) / xp};
            };
            return c;
        }
        case ChartChoice::flat_constant: {
            if (m.kind() != Kind::constant) throw UsageError("flat-constant chart needs the constant model");
            const double cc = m.param("c");
            c.f = [](double z) { return z; };
            c.g = c.f;
            c.conformal_factor = [cc](double, double) { return 2 * cc; };
            c.to_lightcone = [cc](double x0, double x1) { return std::pair{x0, x1 / cc - x0}; };
            return c;
        }
        case ChartChoice::generic_identity: {
            auto prof = m.profile();
            RealFn rate = [prof](double y) { return 1.0 / prof->U(y); };
            auto mi = std::make_shared<MonotoneIntegral>(
                MonotoneIntegral{rate, m.domain().lower, m.domain().upper, 0.0, numerics::Quadrature{1e-13, 1e-12, 4000}});
            const double total = mi->forward_total();
            c.f = [](double z) { return z; };
            c.g = c.f;
            c.conformal_factor = [mi, prof, total](double xp, double xm) {
                const double x1 = mi->inverse(xp + xm, total);
                return 2.0 * std::sqrt(prof->U(x1) * prof->V(x1));
            };
            c.to_lightcone = [mi](double x0, double x1) { return std::pair{x0, mi->forward(x1) - x0}; };
            return c;
        }
    }
    throw UsageError("unknown chart");
}

std::vector<CatalogEntry> catalog() {
    return {
        {"linear", {"alpha", "h"}, "w = alpha x on (h, inf); or U = x, V = lp^2 x on (lx, inf) with lx, lp"},
        {"berry-keating", {"h"}, "w = x + h^2/x on (0, inf); or U = x + lx^2/x, V = lp^2 U with lx, lp"},
        {"model-III", {"lx", "lp"}, "U = (x^2 + lx^2)/x, V = lp^2 x on (0, inf)"},
        {"constant", {"c"}, "w = c on (0, inf)"},
        {"cosh", {"w0", "mu"}, "w = w0 cosh(x / (2 mu hbar)) on (0, inf)"},
        {"linear-log", {"alpha", "beta", "lower"}, "w = alpha x + beta log x on (lower, inf), lower defaults to 1"},
        {"power", {"A", "exponent", "lower"}, "w = A x^exponent on (lower, inf), lower defaults to 1"},
    };
}

}  // namespace xp::models
