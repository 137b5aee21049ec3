#include "xpmodels/quantum.hpp"

#include <algorithm>
#include <cmath>

#include "xpmodels/dynamics.hpp"
#include "xpmodels/errors.hpp"
#include "xpmodels/numerics.hpp"

namespace xp::quantum {

using models::Gauge;
using models::XpModel;
using numerics::pi;

double wrap_angle(double theta) {
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");
    double t = std::remainder(theta, 2 * pi);
    if (t <= -pi) t += 2 * pi;
    return t;
}

namespace {

constexpr Complex I{0.0, 1.0};

bool time_reversal_angle(double theta) {
    const double t = wrap_angle(theta);
    return std::abs(t) < 1e-14 || std::abs(t - pi) < 1e-14;
}

bool is_pi(double theta) { return std::abs(wrap_angle(theta) - pi) < 1e-14; }

void check_hbar(double hbar) {
    if (!(hbar > 0) || !std::isfinite(hbar)) throw DomainError("hbar must be positive");
}

// Index of the eigenvalue sitting on phase level Gamma.
long phase_index(double Gamma, double theta) { return std::lround((Gamma - theta) / (2 * pi) - 1); }

// Index of -E given the phase of E, using Gamma(-E) = 2 pi - Gamma(E).
long mirrored_index(double Gamma, double theta) { return phase_index(2 * pi - Gamma, theta); }

void sort_spectrum(SpectrumResult& r) {
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
              [](const Eigenvalue& a, const Eigenvalue& b) { return a.E < b.E; });
}

// ---------------------------------------------------------------------------
// model I

struct ModelIScaled {
    double s0, hbar;
    Complex K(double E) const { return numerics::bessel_k(Complex(0.5, -0.5 * E / hbar), s0); }
};

double modelI_step(double E, double s0, double hbar) {
    const double eps = std::abs(E) / hbar;
    const double L = eps > s0 ? std::log(eps / s0) : 0.0;
    return hbar * std::min(1.0, pi / (2 * std::max(1.0, L)));
}

// Scan E from 0 toward dir * E_max; returns roots with their phase labels.
void modelI_scan(const ModelIScaled& sc, double theta, double E_max, int dir, double root_tol,
                 std::vector<std::pair<double, double>>& roots /* (E, Gamma) */) {
    const Complex half = std::exp(0.5 * I * theta);
    auto g = [&](double E) {
        const Complex K = sc.K(E);
        return (half * K).real() / std::abs(K);
    };
    auto unwrap = [](double prev, double a) { return prev + std::remainder(a - prev, 2 * pi); };
    double E = 0.0, gE = g(0.0), argK = 0.0;
    while (dir * E < E_max) {
        const double En = dir * std::min(std::abs(E) + modelI_step(E, sc.s0, sc.hbar), E_max);
        const Complex Kn = sc.K(En);
        const double gn = (half * Kn).real() / std::abs(Kn);
        const double argn = unwrap(argK, std::arg(Kn));
        if (gE * gn < 0) {
            const auto br = dir > 0 ? numerics::make_bracket(g, E, En) : numerics::make_bracket(g, En, E);
            const double r = numerics::find_root(g, br, root_tol * std::max(1.0, std::abs(En)));
            const double ar = unwrap(argK, std::arg(sc.K(r)));
            roots.emplace_back(r, pi - 2 * ar);
        } else if (gn == 0.0) {
            roots.emplace_back(En, pi - 2 * argn);
        }
        E = En;
        gE = gn;
        argK = argn;
    }
}

}  // namespace

double modelI_secular(double E, double z0, double theta, double hbar) {
    check_hbar(hbar);
    if (!(z0 > 0)) throw DomainError("z0 must be positive");
    const Complex K = numerics::bessel_k(Complex(0.5, -0.5 * E / hbar), z0 / hbar);
    return 2 * (std::exp(0.5 * I * theta) * K).real();
}

double modelI_residual(double E, double z0, double theta, double hbar) {
    check_hbar(hbar);
    if (!(z0 > 0)) throw DomainError("z0 must be positive");
    const Complex nu(0.5, -0.5 * E / hbar);
    const Complex K = numerics::bessel_k(nu, z0 / hbar), Km1 = numerics::bessel_k(nu - 1.0, z0 / hbar);
    return std::abs(std::exp(I * theta) * K + Km1) / std::abs(K);
}

SpectrumResult modelI_spectrum(double z0, double theta, double E_max, double hbar, const ModelIOptions& opts) {
    check_hbar(hbar);
    if (!(z0 > 0)) throw DomainError("z0 must be positive");
    if (!(E_max > 0)) throw DomainError("E_max must be positive");
    if (E_max / hbar > 1500) throw DomainError("E_max / hbar above 1500: K_nu(z0) underflows");
    SpectrumResult res;
    res.theta = theta;
    res.hbar = hbar;
    res.solver = "bessel";
    const ModelIScaled sc{z0 / hbar, hbar};
    const bool mirror = opts.mirror && time_reversal_angle(theta);

    std::vector<std::pair<double, double>> roots;
    const double g0 = std::cos(0.5 * theta);  // secular value at E = 0 over K_{1/2}
    if (std::abs(g0) < 1e-14) roots.emplace_back(0.0, pi);
    modelI_scan(sc, theta, E_max, +1, opts.root_tol, roots);
    if (!mirror) modelI_scan(sc, theta, E_max, -1, opts.root_tol, roots);

    for (const auto& [E, Gamma] : roots) {
        const double resid = modelI_residual(E, z0, theta, hbar);
        res.eigenvalues.push_back({E, resid, phase_index(Gamma, theta)});
        if (mirror && E > 0) res.eigenvalues.push_back({-E, modelI_residual(-E, z0, theta, hbar), mirrored_index(Gamma, theta)});
        const double frac = (Gamma - theta) / (2 * pi) - 1;
        if (std::abs(frac - std::round(frac)) > 1e-3) res.flagged.push_back(E);
    }
    sort_spectrum(res);
    if (is_pi(theta)) res.zero_mode_norm = zero_mode(models::make_model("linear", {{"alpha", 1.0}, {"h", z0}}, hbar), theta).norm;
    return res;
}

std::vector<Complex> modelI_eigenfunction(double E, double z0, double hbar, const std::vector<double>& z_grid) {
    check_hbar(hbar);
    const Complex nu(0.5, -0.5 * E / hbar);
    std::vector<Complex> out;
    out.reserve(z_grid.size());
    for (double z : z_grid) {
        if (!(z >= z0)) throw DomainError("eigenfunction grid must lie in [z0, inf)");
        const double s = z / hbar;
        out.push_back(std::exp((1.0 - nu) * std::log(s)) * numerics::bessel_k(nu, s));
    }
    return out;
}

double modelI_boundary_residual(double E, double z0, double theta, double hbar, double z_cut) {
    check_hbar(hbar);
    if (!(z_cut > z0)) throw DomainError("z_cut must exceed z0");
    const Complex nu(0.5, -0.5 * E / hbar);
    auto phi = [&](double z) {
        const double s = z / hbar;
        return std::exp((1.0 - nu) * std::log(s)) * numerics::bessel_k(nu, s);
    };
    const double sc = z_cut / hbar;
    const Complex tail = hbar * std::exp((1.0 - nu) * std::log(sc)) * numerics::bessel_k(nu - 1.0, sc);
    const Complex phi0 = phi(z0);
    numerics::Quadrature q{1e-15 * std::abs(phi0), 1e-11, 4000};
    const Complex body = numerics::integrate_complex(phi, z0, z_cut, q).value;
    return std::abs(std::exp(I * theta) * hbar * phi0 + body + tail) / (hbar * std::abs(phi0));
}

// ---------------------------------------------------------------------------
// shooting

namespace {

struct Coefficients {
    const XpModel* m;
    bool sym;
    double lower;

    // (sqrt(V/U), U) at x, nudged off a singular end point.
    std::pair<double, double> at(double x) const {
        const auto& p = m->profile();
        for (int k = 0; k < 3; ++k) {
            double r, U;
            if (sym) {
                r = 1.0;
                U = p->jet ? p->jet(x).w : p->U(x);
            } else {
                U = p->U(x);
                r = std::sqrt(p->V(x) / U);
            }
            if (std::isfinite(r) && !std::isnan(U)) return {r, U};
            x += 1e-12 * std::max(1.0, std::abs(x));
        }
        throw DomainError("coefficients not finite near x = " + std::to_string(x));
    }
    double w(double x) const {
        const auto [r, U] = at(x);
        return r * U;
    }
};

double z_distance(const Coefficients& c, double x) {
    if (c.sym) return x - c.lower;
    numerics::Quadrature q{1e-10, 1e-8, 2000};
    return numerics::integrate([&](double y) { return c.at(y).first; }, c.lower, x, q,
                               numerics::EndpointHint::inverse_sqrt_left)
        .value;
}

double cutoff(const XpModel& m, double E_scale) {
    const Coefficients c{&m, m.gauge() == Gauge::symmetric, m.domain().lower};
    if (!std::isfinite(c.lower)) throw UnsupportedModelError("shooting needs a finite lower end");
    const double hbar = m.hbar();
    const double target_w = 5 * std::abs(E_scale);
    const double xstar = dynamics::w_minimum(m).first;
    const double scale = std::max(1.0, std::abs(c.lower));
    // smallest distance d with a condition, by doubling then bisection
    auto smallest = [&](const std::function<bool(double)>& ok, double d) {
        double lo = 0.0;
        while (!ok(c.lower + d)) {
            lo = d;
            d *= 2;
            if (d > 1e15 * scale) throw UnsupportedModelError("w stays bounded: the spectrum is not discrete");
        }
        double hi = d;
        for (int i = 0; i < 60 && hi - lo > 1e-10 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (ok(c.lower + mid) ? hi : lo) = mid;
        }
        return c.lower + hi;
    };
    const double x_z = smallest([&](double x) { return z_distance(c, x) >= 60 * hbar; }, 60 * hbar);
    double x = std::max(x_z, xstar);
    if (c.w(x) < target_w)
        x = smallest([&](double y) { return y >= x && c.w(y) >= target_w; }, std::max(x - c.lower, 1e-3 * scale));
    return x;
}

struct PhaseRun {
    std::vector<double> x;
    std::vector<std::vector<double>> y;  // (gamma, log|phi|, arg phi)
};

PhaseRun integrate_phase(const XpModel& m, double E, double x_inf, double tol, bool with_amplitude,
                         std::vector<double> samples = {}) {
    const Coefficients c{&m, m.gauge() == Gauge::symmetric, m.domain().lower};
    const double hbar = m.hbar();
    const double a = E / (2 * c.w(x_inf));
    if (std::abs(a) >= 1) throw DomainError("cutoff inside the classically allowed region");
    std::vector<double> y0{pi + std::asin(a)};
    if (with_amplitude) {
        y0.push_back(0.0);
        y0.push_back(0.0);
    }
    auto field = [&](double x, std::span<const double> y, std::span<double> dy) {
        const auto [r, U] = c.at(x);
        const double s = std::sin(y[0]), co = std::cos(y[0]);
        const double eu = std::isfinite(U) ? E / U : 0.0;
        dy[0] = (-2 * r * s - eu) / hbar;
        if (y.size() > 1) {
            dy[1] = r * co / hbar;
            dy[2] = (r * s + eu) / hbar;
        }
    };
    numerics::OdeOptions opts;
    opts.tol = tol;
    opts.sample_times = std::move(samples);
    auto path = numerics::ode_integrate(field, y0, x_inf, c.lower, opts);
    return {std::move(path.t), std::move(path.y)};
}

double phase_with_cutoff(const XpModel& m, double E, double x_inf, double tol) {
    return integrate_phase(m, E, x_inf, tol, false).y.back()[0];
}

// Scan E from 0 toward dir * E_max, solving Gamma(E) = theta + 2 pi (k + 1).
void shoot_scan(const XpModel& m, double theta, double E_max, int dir, double x_inf, const ShootOptions& opts,
                SpectrumResult& res, bool mirror) {
    const double hbar = m.hbar();
    auto Gamma = [&](double E) { return phase_with_cutoff(m, E, x_inf, opts.ode_tol); };
    double E = 0.0, G = pi;  // Gamma(0) = pi exactly: the seed is a fixed point
    double h = std::min(E_max / 50, 0.1 * hbar);
    while (dir * E < E_max) {
        const double En = dir * std::min(std::abs(E) + h, E_max);
        const double Gn = Gamma(En);
        if (std::abs(Gn - G) > pi && h > 1e-6 * hbar) {
            h *= 0.5;
            continue;
        }
        const double glo = std::min(G, Gn), ghi = std::max(G, Gn);
        const long k_lo = static_cast<long>(std::floor((glo - theta) / (2 * pi))) - 1;
        const long k_hi = static_cast<long>(std::ceil((ghi - theta) / (2 * pi))) - 1;
        for (long k = k_lo; k <= k_hi; ++k) {
            const double L = theta + 2 * pi * (k + 1);
            // a level on the start point belongs to the previous interval
            if (!((L > G && L <= Gn) || (L < G && L >= Gn))) continue;
            double root;
            if (L == Gn) {
                root = En;
            } else {
                auto f = [&](double e) { return Gamma(e) - L; };
                const auto br = dir > 0 ? numerics::make_bracket(f, E, En) : numerics::make_bracket(f, En, E);
                root = numerics::find_root(f, br, opts.root_tol * std::max(1.0, std::abs(En)));
            }
            const double Gr = Gamma(root);
            const double resid = 2 * std::abs(std::sin(0.5 * (Gr - theta)));
            res.eigenvalues.push_back({root, resid, k});
            if ((Gn - G) * dir < 0) res.flagged.push_back(root);  // phase running backwards
            if (mirror) res.eigenvalues.push_back({-root, resid, mirrored_index(L, theta)});
        }
        // keep the phase change per step near pi/2
        const double slope = std::abs(Gn - G) / h;
        h = std::clamp(0.5 * pi / std::max(slope, 1e-300), 0.25 * h, 2.0 * h);
        E = En;
        G = Gn;
    }
}

}  // namespace

double shooting_cutoff(const XpModel& m, double E_scale) { return cutoff(m, E_scale); }

double boundary_phase(const XpModel& m, double E, double E_scale, double ode_tol) {
    const double x_inf = cutoff(m, std::max(std::abs(E), std::abs(E_scale)));
    return phase_with_cutoff(m, E, x_inf, ode_tol);
}

SpectrumResult shoot_spectrum(const XpModel& m, double theta, double E_max, const ShootOptions& opts) {
    if (!(E_max > 0)) throw DomainError("E_max must be positive");
    SpectrumResult res;
    res.theta = theta;
    res.hbar = m.hbar();
    res.solver = "shoot";
    const double x_inf = cutoff(m, E_max);
    const bool mirror = opts.mirror && time_reversal_angle(theta);
    if (is_pi(theta)) {
        res.eigenvalues.push_back({0.0, 0.0, -1});
        res.zero_mode_norm = zero_mode(m, theta).norm;
    }
    shoot_scan(m, theta, E_max, +1, x_inf, opts, res, mirror);
    if (!mirror) shoot_scan(m, theta, E_max, -1, x_inf, opts, res, false);
    sort_spectrum(res);
    return res;
}

std::vector<Complex> shoot_eigenfunction(const XpModel& m, double E, const std::vector<double>& x_grid, double ode_tol) {
    const double lower = m.domain().lower;
    double x_inf = cutoff(m, E);
    for (double x : x_grid) {
        if (!(x >= lower)) throw DomainError("grid point below the domain");
        x_inf = std::max(x_inf, x);
    }
    std::vector<double> order(x_grid);
    std::sort(order.begin(), order.end(), std::greater<>());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    if (order.empty() || order.back() != lower) order.push_back(lower);
    const auto run = integrate_phase(m, E, x_inf, ode_tol, true, order);
    const auto& base = run.y.back();
    std::vector<Complex> out;
    out.reserve(x_grid.size());
    for (double x : x_grid) {
        const auto it = std::find(run.x.begin(), run.x.end(), x);
        const auto& y = run.y[static_cast<std::size_t>(it - run.x.begin())];
        out.push_back(std::exp(Complex(y[1] - base[1], y[2] - base[2])));
    }
    return out;
}

// ---------------------------------------------------------------------------

ZeroMode zero_mode(const XpModel& m, double theta) {
    ZeroMode zm;
    if (!is_pi(theta)) return zm;
    const XpModel sym = m.gauge() == Gauge::symmetric ? m : models::to_symmetric_gauge(m).second;
    const double z0 = sym.domain().lower, hbar = sym.hbar();
    const auto& p = sym.profile();
    auto w = [&](double z) { return p->jet ? p->jet(z).w : p->U(z); };
    // e^{-2 z0/hbar} int_0^inf e^{-t} / w(z0 + hbar t / 2) dt hbar / 2
    auto f = [&](double t) {
        const double wz = w(z0 + 0.5 * hbar * t);
        return std::exp(-t) / wz;
    };
    try {
        numerics::Quadrature q{1e-300, 1e-12, 4000};
        const double head = numerics::integrate(f, 0.0, 1.0, q, numerics::EndpointHint::inverse_sqrt_left).value;
        const double tail = numerics::integrate(f, 1.0, numerics::inf, q, numerics::EndpointHint::exponential_tail).value;
        const double val = std::exp(-2 * z0 / hbar) * 0.5 * hbar * (head + tail);
        if (!std::isfinite(val)) throw ConvergenceError("norm integral not finite", val, numerics::inf);
        zm.norm = val;
    } catch (const ConvergenceError&) {
        zm.divergent = true;
    }
    return zm;
}

Complex symmetry_defect(const std::function<Complex(double)>& phi1, const std::function<Complex(double)>& phi2,
                        double z0, double hbar) {
    check_hbar(hbar);
    numerics::Quadrature q{1e-15, 1e-13, 4000};
    const Complex I1 = numerics::integrate_complex(phi1, z0, numerics::inf, q).value;
    const Complex I2 = numerics::integrate_complex(phi2, z0, numerics::inf, q).value;
    return -hbar * std::conj(phi1(z0)) * phi2(z0) + std::conj(I1) * I2 / hbar;
}

// ---------------------------------------------------------------------------
// constant model

std::optional<BoundState> constant_bound_state(double lp, double theta, double hbar) {
    check_hbar(hbar);
    if (!(lp > 0)) throw DomainError("lp must be positive");
    const double t = wrap_angle(theta);
    const double c = std::cos(t);
    if (!(c > 1e-15)) return std::nullopt;
    BoundState b;
    b.E0 = 2 * lp * std::sin(t);
    b.k0 = lp / hbar * std::exp(-I * t);
    b.C = std::sqrt(2 * lp * c / hbar);
    b.mean_x = hbar / (2 * lp * c);
    return b;
}

SpectrumResult constant_model_spectrum(double lp, double theta, double hbar) {
    SpectrumResult res;
    res.theta = theta;
    res.hbar = hbar;
    res.solver = "constant";
    res.continuum = std::make_pair(-2 * lp, 2 * lp);
    if (auto b = constant_bound_state(lp, theta, hbar)) {
        // -e^{i theta} psi(0) + (lp/hbar) int psi, with psi = e^{-k0 x}
        const double resid = std::abs(-std::exp(I * wrap_angle(theta)) + lp / (hbar * b->k0));
        res.eigenvalues.push_back({b->E0, resid, 0});
    }
    return res;
}

ScatteringState constant_model_scattering(double E, double lp, double theta, double hbar) {
    check_hbar(hbar);
    if (!(lp > 0)) throw DomainError("lp must be positive");
    if (!(std::abs(E) > 2 * lp)) throw DomainError("energy inside the gap |E| <= 2 lp");
    ScatteringState s;
    s.E = E;
    s.eta = E > 0 ? 1 : -1;
    s.u = std::acosh(std::abs(E) / (2 * lp));
    s.k_plus = s.eta * lp * std::exp(s.u) / hbar;
    s.k_minus = s.eta * lp * std::exp(-s.u) / hbar;
    const Complex eth = std::exp(I * theta);
    const double den = std::sqrt(8 * pi * hbar * (std::cosh(s.u) - s.eta * std::sin(theta)));
    s.A = (eth - I * double(s.eta) * std::exp(s.u)) / den;
    s.B = -(eth - I * double(s.eta) * std::exp(-s.u)) / den;
    return s;
}

Complex scattering_wavefunction(const ScatteringState& s, double x) {
    return s.A * std::exp(I * (s.k_plus * x)) + s.B * std::exp(I * (s.k_minus * x));
}

Complex constant_bilinear(const ScatteringState& s1, const ScatteringState& s2) {
    const double k1[2] = {s1.k_plus, s1.k_minus}, k2[2] = {s2.k_plus, s2.k_minus};
    const Complex a1[2] = {std::conj(s1.A), std::conj(s1.B)}, a2[2] = {s2.A, s2.B};
    Complex sum = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) sum += a1[i] * a2[j] / (k1[i] - k2[j]);
    return sum;
}

OrthonormalityReport orthonormality_check(double lp, double theta, double hbar, const std::vector<double>& energies) {
    const auto b = constant_bound_state(lp, theta, hbar);
    if (!b) throw DomainError("no bound state for this theta");
    OrthonormalityReport rep;
    const double kr = b->k0.real();
    numerics::Quadrature q{1e-14, 1e-12, 4000};
    auto dens = [&](double x) { return b->C * b->C * std::exp(-2 * kr * x); };
    rep.bound_norm = numerics::integrate(dens, 0.0, numerics::inf, q).value;
    rep.bound_mean_x = numerics::integrate([&](double x) { return x * dens(x); }, 0.0, numerics::inf, q).value;

    std::vector<ScatteringState> states;
    for (double E : energies) states.push_back(constant_model_scattering(E, lp, theta, hbar));
    const Complex k0c = std::conj(b->k0);
    for (const auto& s : states) {
        const Complex lim = b->C * (s.A / (k0c - I * s.k_plus) + s.B / (k0c - I * s.k_minus));
        rep.overlap_limit = std::max(rep.overlap_limit, std::abs(lim));
    }
    if (!states.empty()) {
        // int_0^L e^{(ik - k0*) x} dx in closed form; the integrand cancels too well for quadrature
        const auto& s = states.front();
        auto piece = [&](double k, double L) { return (1.0 - std::exp((I * k - k0c) * L)) / (k0c - I * k); };
        for (double L = hbar / lp; L <= 64 * hbar / lp * (1 + 1e-12); L *= 2) {
            const Complex v = b->C * (s.A * piece(s.k_plus, L) + s.B * piece(s.k_minus, L));
            rep.overlap.emplace_back(L, std::abs(v));
        }
    }
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = 0; j < states.size(); ++j)
            if (states[i].E != states[j].E)
                rep.max_bilinear = std::max(rep.max_bilinear, std::abs(constant_bilinear(states[i], states[j])));
    return rep;
}

}  // namespace xp::quantum
