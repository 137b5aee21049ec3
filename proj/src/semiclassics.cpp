#include "xpmodels/semiclassics.hpp"

#include <algorithm>
#include <cmath>

#include "xpmodels/dynamics.hpp"
#include "xpmodels/errors.hpp"
#include "xpmodels/riemann.hpp"

namespace xp::semiclassics {

using models::Gauge;
using models::XpModel;
using numerics::pi;

std::string to_string(CurveSource s) {
    switch (s) {
        case CurveSource::quadrature: return "quadrature";
        case CurveSource::closed_form: return "closed-form";
        case CurveSource::external: return "external";
    }
    return "external";
}

std::string to_string(Family f) { return f == Family::xp ? "xp" : "standard"; }

namespace {

// Tolerant quadrature: a budget overrun with a small error estimate is accepted.
double integrate_tolerant(const RealFn& f, double a, double b, const numerics::Quadrature& q,
                          numerics::EndpointHint hint, double accept_rel) {
    try {
        return numerics::integrate(f, a, b, q, hint).value;
    } catch (const ConvergenceError& e) {
        if (e.error_estimate <= accept_rel * std::abs(e.best_estimate) + q.abs_tol) return e.best_estimate;
        throw;
    }
}

double w_any(const XpModel& m, double x) {
    const auto& p = m.profile();
    if (p->jet) return p->jet(x).w;
    if (m.gauge() == Gauge::symmetric) return p->U(x);
    return std::sqrt(p->U(x) * p->V(x));
}

}  // namespace

double threshold_energy(const XpModel& m) { return 2.0 * dynamics::w_minimum(m).second; }

double count_states(const XpModel& m, double E) {
    const auto tp = dynamics::turning_points(m, E);
    if (!std::isfinite(tp.x_M)) throw DomainError("orbit does not close: infinitely many states");
    if (tp.x_M <= tp.x_m) return 0.0;
    const double aE = std::abs(E);
    const bool sym = m.gauge() == Gauge::symmetric;
    const auto& prof = m.profile();
    auto f = [&](double x) {
        const double w = w_any(m, x);
        const double U = sym ? w : prof->U(x);
        const double disc = (aE - 2 * w) * (aE + 2 * w);
        return disc > 0 ? std::sqrt(disc) / U : 0.0;
    };
    const double mid = tp.x_m > 0 ? std::sqrt(tp.x_m * tp.x_M) : 0.5 * (tp.x_m + tp.x_M);
    numerics::Quadrature q{1e-14, 1e-13, 4000};
    const double area = integrate_tolerant(f, tp.x_m, mid, q, numerics::EndpointHint::inverse_sqrt_left, 1e-10) +
                        integrate_tolerant(f, mid, tp.x_M, q, numerics::EndpointHint::inverse_sqrt_right, 1e-10);
    return area / (2 * pi * m.hbar());
}

CountingCurve counting_curve(const XpModel& m, const std::vector<double>& energies) {
    CountingCurve c;
    c.hbar = m.hbar();
    c.source = CurveSource::quadrature;
    std::vector<double> es(energies);
    std::sort(es.begin(), es.end());
    for (double E : es) c.samples.emplace_back(E, count_states(m, E));
    return c;
}

double count_closed(const std::string& kind, double E, const models::Params& params, double hbar) {
    if (!(hbar > 0)) throw DomainError("hbar must be positive");
    auto get = [&](const char* k, std::optional<double> def = {}) {
        auto it = params.find(k);
        if (it != params.end()) return it->second;
        if (def) return *def;
        throw UsageError(std::string("missing parameter '") + k + "'");
    };
    const double aE = std::abs(E);
    if (kind == "linear") {
        const double a = get("alpha", 1.0), w0 = a * get("h");
        if (aE < 2 * w0) throw ClassicallyForbiddenError("E below 2 w0");
        const double r = 2 * w0 / aE;
        return aE / (2 * pi * hbar * a) * (std::acosh(1 / r) - std::sqrt((1 - r) * (1 + r)));
    }
    if (kind == "berry-keating") {
        const double h = get("h");
        if (aE < 4 * h) throw ClassicallyForbiddenError("E below 4 h");
        const double m = 1 - 16 * h * h / (aE * aE);
        const auto ke = numerics::elliptic_KE(m);
        return aE / (2 * pi * hbar) * (ke.K - ke.E);
    }
    if (kind == "cosh" || kind == "harmonic-cosh") {
        const double w0 = get("w0"), mu = get("mu");
        if (aE < 2 * w0) throw ClassicallyForbiddenError("E below 2 w0");
        const double omega = 2 * w0 / (mu * hbar);
        return aE / (hbar * omega) - mu;
    }
    throw UsageError("no closed-form count for kind '" + kind + "'");
}

std::vector<double> geometric_grid(double a, double b, int per_decade) {
    if (!(a > 0) || !(b >= a)) throw DomainError("geometric grid needs 0 < a <= b");
    if (per_decade < 1) throw UsageError("per_decade must be positive");
    const int n = std::max(1, static_cast<int>(std::ceil(std::log10(b / a) * per_decade)));
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = a * std::pow(b / a, static_cast<double>(i) / n);
    g.front() = a;
    g.back() = b;
    return g;
}

namespace {

// Derivative of F on [lo, inf): central difference, forward near the lower end.
double diff(const RealFn& F, double E, double lo) {
    const double h = std::max(1e-4, 1e-6 * std::abs(E));
    if (E - h >= lo) return (F(E + h) - F(E - h)) / (2 * h);
    return (-3 * F(E) + 4 * F(E + h) - F(E + 2 * h)) / (2 * h);
}

bool is_monotone(const std::vector<std::pair<double, double>>& prof) {
    for (std::size_t i = 1; i < prof.size(); ++i)
        if (prof[i].second < prof[i - 1].second) return false;
    return true;
}

}  // namespace

InversionResult abel_invert_xp(const CountTarget& target, double w0, double x0, double hbar,
                               const std::vector<double>& w_grid) {
    if (!target.n) throw UsageError("inversion needs n(E)");
    if (!(w0 > 0) || !(hbar > 0)) throw DomainError("w0 and hbar must be positive");
    // g(E) = E d/dE (n(2E)/E)
    RealFn g;
    if (target.dn) {
        g = [&](double E) { return 2 * target.dn(2 * E) - target.n(2 * E) / E; };
    } else {
        RealFn F = [&](double E) { return target.n(2 * E) / E; };
        g = [F, w0](double E) { return E * diff(F, E, w0); };
    }
    InversionResult res;
    res.family = Family::xp;
    numerics::Quadrature q{1e-13, 1e-11, 2000};
    for (double w : w_grid) {
        if (w < w0) throw DomainError("inversion grid starts below w0");
        if (w == w0) {
            res.profile.emplace_back(w, x0);
            continue;
        }
        const double phi0 = std::asin(w0 / w);
        auto f = [&](double phi) { return g(w * std::sin(phi)); };
        const double I = integrate_tolerant(f, phi0, pi / 2, q, numerics::EndpointHint::none, 1e-8);
        res.profile.emplace_back(w, x0 + 2 * hbar * w * I);
    }
    res.monotone = is_monotone(res.profile);
    return res;
}

InversionResult abel_invert_standard(const CountTarget& target, double V0, double hbar,
                                     const std::vector<double>& V_grid) {
    if (!target.n && !target.dn) throw UsageError("inversion needs n(E)");
    if (!(hbar > 0)) throw DomainError("hbar must be positive");
    RealFn dn = target.dn ? target.dn : RealFn([&](double E) { return diff(target.n, E, V0); });
    InversionResult res;
    res.family = Family::standard;
    numerics::Quadrature q{1e-13, 1e-11, 2000};
    for (double V : V_grid) {
        if (V < V0) throw DomainError("inversion grid starts below V0");
        if (V == V0) {
            res.profile.emplace_back(V, 0.0);
            continue;
        }
        // E = V - t^2 removes the inverse square root at E = V
        auto f = [&](double t) { return 2 * dn(V - t * t); };
        const double I = integrate_tolerant(f, 0.0, std::sqrt(V - V0), q, numerics::EndpointHint::none, 1e-8);
        res.profile.emplace_back(V, hbar * I);
    }
    res.monotone = is_monotone(res.profile);
    return res;
}

double recover_linear_term(const RealFn& n_target, const InversionResult& inv, double hbar,
                           const std::vector<double>& energies) {
    if (inv.family != Family::xp) throw UsageError("linear-term recovery applies to the xp family");
    if (!inv.monotone) throw DomainError("inverted profile is not monotone");
    std::vector<double> xs, ws;
    for (const auto& [w, x] : inv.profile) {
        if (!xs.empty() && !(x > xs.back())) continue;
        xs.push_back(x);
        ws.push_back(w);
    }
    const XpModel rebuilt = models::make_tabulated(xs, ws, hbar);
    double num = 0, den = 0;
    for (double E : energies) {
        if (E > 2 * ws.back()) throw DomainError("energy beyond the inverted profile");
        const double d = n_target(E) - count_states(rebuilt, E);
        num += d * E;
        den += E * E;
    }
    if (den == 0) throw UsageError("no energies for the linear fit");
    return num / den;
}

PowerFit power_law_scaling(const XpModel& m, double E_lo, double E_hi, int points) {
    if (m.kind() != models::Kind::power) throw UsageError("power-law scaling applies to the power kind");
    if (m.param("exponent") == 1.0) throw UsageError("exponent 1 is the linear kind");
    if (points < 3) throw UsageError("need at least 3 energies");
    if (!(E_lo > threshold_energy(m)) || !(E_hi > E_lo)) throw DomainError("energy range must lie above threshold");
    std::vector<double> lx, ly;
    for (int i = 0; i < points; ++i) {
        const double E = E_lo * std::pow(E_hi / E_lo, static_cast<double>(i) / (points - 1));
        lx.push_back(std::log(E));
        ly.push_back(std::log(count_states(m, E)));
    }
    double mx = 0, my = 0;
    for (int i = 0; i < points; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= points;
    my /= points;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < points; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    PowerFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.max_residual = 0;
    for (int i = 0; i < points; ++i)
        fit.max_residual = std::max(fit.max_residual, std::abs(ly[i] - fit.intercept - fit.slope * lx[i]));
    fit.flagged = fit.max_residual > 1e-2;
    return fit;
}

double riemann_smooth_count(double t) { return riemann::smooth_zero_count(t); }

NamedProfile named_profile(const std::string& name, const models::Params& params, double hbar) {
    if (name == "wu-sprung") {
        return {Family::standard,
                {[](double E) { return riemann_smooth_count(E); },
                 [](double E) { return std::log(E / (2 * pi)) / (2 * pi); }},
                0.0};
    }
    if (name == "mussardo") {
        return {Family::standard,
                {[](double E) { return numerics::log_integral(E); }, [](double E) { return 1 / std::log(E); }},
                2.0};
    }
    if (name == "linear-log") {
        auto it0 = params.find("w0"), itm = params.find("mu");
        if (it0 == params.end() || itm == params.end()) throw UsageError("linear-log profile needs w0 and mu");
        const double w0 = it0->second, mu = itm->second;
        if (!(w0 > 0)) throw DomainError("w0 must be positive");
        RealFn n = [w0, mu, hbar](double E) {
            const double r = 2 * w0 / E;
            return E / (2 * pi * hbar) * (std::acosh(1 / r) - std::sqrt((1 - r) * (1 + r))) + mu;
        };
        RealFn dn = [w0, hbar](double E) { return std::acosh(E / (2 * w0)) / (2 * pi * hbar); };
        return {Family::xp, {n, dn}, w0};
    }
    throw UsageError("unknown profile '" + name + "'");
}

}  // namespace xp::semiclassics
