#include "xpmodels/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "xpmodels/errors.hpp"

namespace xp::dynamics {

using models::Gauge;
using models::XpModel;
using numerics::inf;

namespace {

// w in any gauge, straight from the profile (no domain check).
double w_raw(const XpModel& m, double x) {
    const auto& p = m.profile();
    if (p->jet) return p->jet(x).w;
    if (m.gauge() == Gauge::symmetric) return p->U(x);
    return std::sqrt(p->U(x) * p->V(x));
}

// Bisection to adjacent doubles on a sign change of g over [a, b].
double bisect(const std::function<double(double)>& g, double a, double b) {
    double ga = g(a);
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double gm = g(mid);
        if (gm == 0) return mid;
        if ((gm < 0) == (ga < 0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double w_prime(const XpModel& m, double x) {
    if (m.has_analytic_jet()) return m.jet(x).dw;
    const auto& d = m.domain();
    const double h = std::max(1e-6, 1e-5 * std::abs(x));
    auto w = [&](double t) { return w_raw(m, t); };
    if (x - 2 * h > d.lower && x + 2 * h < d.upper)
        return (-w(x + 2 * h) + 8 * w(x + h) - 8 * w(x - h) + w(x - 2 * h)) / (12 * h);
    const double s = (x - 2 * h > d.lower) ? -h : h;
    return (-25 * w(x) + 48 * w(x + s) - 36 * w(x + 2 * s) + 16 * w(x + 3 * s) - 3 * w(x + 4 * s)) / (12 * s);
}

double hamiltonian(const XpModel& m, double x, double p) {
    if (m.gauge() == Gauge::symmetric) return m.w(x) * (p + 1.0 / p);
    return m.U(x) * p + m.V(x) / p;
}

Momenta momentum_branches(const XpModel& m, double x, double E) {
    const double w = m.w(x);
    const double disc = (E - 2 * w) * (E + 2 * w);
    if (disc < 0) throw ClassicallyForbiddenError("|E| < 2 w(x): no real momentum");
    const double r = std::sqrt(disc);
    // the larger-magnitude root directly, the other through p+ p- = 1
    if (E >= 0) {
        const double big = (E + r) / (2 * w);
        return {big, 1.0 / big};
    }
    const double big = (E - r) / (2 * w);
    return {1.0 / big, big};
}

std::pair<double, double> w_minimum(const XpModel& m) {
    const auto& d = m.domain();
    auto w = [&](double x) { return w_raw(m, x); };

    // geometric grid from the lower end, then golden-section refinement
    const double scale = std::max(1.0, std::abs(d.lower));
    std::vector<double> xs;
    if (std::isfinite(w(d.lower))) xs.push_back(d.lower);
    for (int k = -50; k <= 60; ++k) {
        const double x = d.lower + scale * std::ldexp(1.0, k);
        if (x > d.upper) break;
        if (x > d.lower) xs.push_back(x);
    }
    if (std::isfinite(d.upper)) xs.push_back(d.upper);
    std::size_t kmin = 0;
    double wmin = inf;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = w(xs[i]);
        if (std::isfinite(v) && v < wmin) {
            wmin = v;
            kmin = i;
        }
    }
    if (!std::isfinite(wmin)) throw DomainError("w is not finite on the domain");
    double xstar = xs[kmin];
    if (kmin > 0 && kmin + 1 < xs.size()) {
        double a = xs[kmin - 1], b = xs[kmin + 1];
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - gr * (b - a), e = a + gr * (b - a);
        double fc = w(c), fe = w(e);
        for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
            if (fc < fe) {
                b = e;
                e = c;
                fe = fc;
                c = b - gr * (b - a);
                fc = w(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + gr * (b - a);
                fe = w(e);
            }
        }
        const double xm = 0.5 * (a + b);
        if (w(xm) <= wmin) {
            xstar = xm;
            wmin = w(xm);
        }
    }
    return {xstar, wmin};
}

TurningPoints turning_points(const XpModel& m, double E) {
    const auto& d = m.domain();
    const double aE = std::abs(E);
    if (!(aE > 0) || !std::isfinite(aE)) throw ClassicallyForbiddenError("no classical orbit at this energy");
    auto w = [&](double x) { return w_raw(m, x); };
    const double scale = std::max(1.0, std::abs(d.lower));
    const double wl = w(d.lower);
    const bool lower_finite = std::isfinite(wl);
    const auto [xstar, wmin] = w_minimum(m);
    if (aE < 2 * wmin * (1 - 1e-14)) throw ClassicallyForbiddenError("|E| below the classical minimum 2 min w");
    if (aE <= 2 * wmin) return {xstar, xstar, xstar == d.lower};

    auto g = [&](double x) { return 2 * w(x) - aE; };
    TurningPoints tp;
    // right turning point
    double step = std::max(scale, std::abs(xstar) - d.lower) * 1e-3;
    double a = xstar, b = xstar + step;
    tp.x_M = inf;
    while (b <= d.upper && std::isfinite(b)) {
        const double gb = g(b);
        if (gb >= 0 || !std::isfinite(gb)) {
            tp.x_M = std::isfinite(gb) ? bisect(g, a, b) : bisect([&](double x) {
                const double v = g(x);
                return std::isfinite(v) ? v : 1.0;
            }, a, b);
            break;
        }
        a = b;
        step *= 2;
        b = xstar + step;
    }
    if (!std::isfinite(tp.x_M) && std::isfinite(d.upper) && g(d.upper) >= 0) tp.x_M = bisect(g, a, d.upper);

    // left turning point, or the wall
    if (xstar == d.lower || (lower_finite && 2 * wl <= aE)) {
        tp.x_m = d.lower;
        tp.pinned = true;
        return tp;
    }
    double lo = xstar;
    for (int k = 1; k < 1100; ++k) {
        const double x = d.lower + (xstar - d.lower) * std::ldexp(1.0, -k);
        if (x <= d.lower) break;
        const double gx = g(x);
        if (gx >= 0 || !std::isfinite(gx)) {
            tp.x_m = bisect([&](double y) {
                const double v = g(y);
                return std::isfinite(v) ? v : 1.0;
            }, x, lo);
            return tp;
        }
        lo = x;
    }
    tp.x_m = d.lower;
    tp.pinned = true;
    return tp;
}

double period(const XpModel& m, double E) {
    const TurningPoints tp = turning_points(m, E);
    if (!std::isfinite(tp.x_M)) throw DomainError("orbit does not close: no period");
    if (tp.x_M <= tp.x_m) return 0.0;
    const double aE = std::abs(E);
    const auto& prof = m.profile();
    const bool sym = m.gauge() == Gauge::symmetric;
    auto f = [&](double x) {
        const double U = sym ? w_raw(m, x) : prof->U(x);
        const double w = w_raw(m, x);
        const double disc = (aE - 2 * w) * (aE + 2 * w);
        if (!(disc > 0)) return 0.0;
        return aE / (U * std::sqrt(disc));
    };
    const double mid = tp.x_m > 0 ? std::sqrt(tp.x_m * tp.x_M) : 0.5 * (tp.x_m + tp.x_M);
    numerics::Quadrature q{1e-15, 1e-12, 4000};
    // a pinned end is regular, but nearly singular for short orbits; the substitution costs nothing
    const auto left_hint = numerics::EndpointHint::inverse_sqrt_left;
    // Very short orbits lose digits in E - 2w; accept a best estimate that is still good to 1e-6.
    auto piece = [&](double a, double b, numerics::EndpointHint hint) {
        try {
            return numerics::integrate(f, a, b, q, hint).value;
        } catch (const ConvergenceError& e) {
            if (e.error_estimate <= 1e-6 * std::abs(e.best_estimate)) return e.best_estimate;
            throw;
        }
    };
    return piece(tp.x_m, mid, left_hint) + piece(mid, tp.x_M, numerics::EndpointHint::inverse_sqrt_right);
}

namespace {

struct RunResult {
    std::vector<Sample> samples;
    std::vector<double> bounce_times;
    double t_final;
    double area;
};

// Integrates Hamilton's equations (plus the area int p dx) from (x0, p0).
// Stops at t_end, or when the orbit comes back to x_return moving right.
RunResult run_orbit(const XpModel& m, double x0, double p0, double t_end, double dt,
                    std::optional<double> x_return, double max_h, double tol) {
    const auto& d = m.domain();
    auto wfun = [&](double x) {
        double v = w_raw(m, x);
        if (!std::isfinite(v) && x < d.lower) v = w_raw(m, d.lower);
        return v;
    };
    numerics::OdeField field = [&](double, std::span<const double> y, std::span<double> dy) {
        const double x = y[0], p = y[1];
        const double xd = wfun(x) * (1 - 1 / (p * p));
        dy[0] = xd;
        dy[1] = -w_prime(m, std::max(x, d.lower)) * (p + 1 / p);
        dy[2] = p * xd;
    };
    numerics::DormandPrince dp(field, 3, tol);
    const bool has_wall = std::isfinite(w_raw(m, d.lower));

    RunResult out;
    std::vector<double> y = {x0, p0, 0.0}, buf(3);
    double t = 0.0;
    double h = std::min(dp.initial_step(t, y, 1.0), max_h);
    out.samples.push_back({0.0, x0, p0});
    long next_sample = 1;
    bool turned = false;

    auto emit_until = [&](double t1) {
        if (!(dt > 0)) return;
        while (true) {
            const double ts = next_sample * dt;
            if (ts > t1 || ts > t_end * (1 + 1e-14)) break;
            dp.interpolate(ts, buf);
            out.samples.push_back({ts, buf[0], buf[1]});
            ++next_sample;
        }
    };
    auto locate = [&](double a, double b, double level, bool rising) {
        while (b - a > 1e-12 * std::max(1.0, std::abs(b))) {
            const double mid = 0.5 * (a + b);
            dp.interpolate(mid, buf);
            if ((buf[0] - level > 0) == rising) b = mid; else a = mid;
        }
        return 0.5 * (a + b);
    };

    for (long step = 0; step < 5'000'000; ++step) {
        if (t >= t_end) break;
        double hh = std::min(h, t_end - t);
        if (t_end - t - hh < 1e-12 * std::max(1.0, t_end)) hh = t_end - t;
        auto st = dp.attempt(t, y, hh);
        if (!st.accepted) {
            h = st.next_h;
            if (!(h > 1e-14 * std::max(1.0, std::abs(t)))) throw IntegrationError("step size underflow", t, y);
            continue;
        }
        if (!std::isfinite(st.y1[0]) || !std::isfinite(st.y1[1])) throw IntegrationError("non-finite state", t, y);

        if (has_wall && st.y1[0] < d.lower) {
            // bounce on the wall: p -> 1/p keeps the energy
            const double tev = locate(st.t0, st.t1, d.lower, false);
            emit_until(tev);
            dp.interpolate(tev, buf);
            out.bounce_times.push_back(tev);
            y = {d.lower, 1.0 / buf[1], buf[2]};
            t = tev;
            turned = true;
            h = std::min(st.next_h, max_h);
            continue;
        }
        if (x_return) {
            if (st.y1[0] > st.y0[0]) turned = true;
            if (turned && st.y1[0] >= *x_return) {
                const double tr = locate(st.t0, st.t1, *x_return, true);
                emit_until(tr);
                dp.interpolate(tr, buf);
                out.t_final = tr;
                out.area = buf[2];
                return out;
            }
        }
        emit_until(st.t1);
        t = st.t1;
        y = st.y1;
        h = std::min(st.next_h, max_h);
    }
    if (x_return) throw IntegrationError("open orbit did not come back", t, y);
    if (t < t_end) throw IntegrationError("step budget exhausted", t, y);
    if (out.samples.back().t < t_end * (1 - 1e-12)) out.samples.push_back({t_end, y[0], y[1]});
    out.t_final = t_end;
    out.area = y[2];
    return out;
}

}  // namespace

Trajectory integrate_orbit(const XpModel& m, double E, int periods, const OrbitOptions& opts) {
    if (m.gauge() != Gauge::symmetric) throw UsageError("orbit integration needs the symmetric gauge");
    if (periods < 1) throw UsageError("periods must be at least 1");
    if (opts.samples_per_period < 2) throw UsageError("samples_per_period must be at least 2");
    const auto& d = m.domain();
    const TurningPoints tp = turning_points(m, E);

    Trajectory tr;
    tr.energy = E;
    tr.eta = E > 0 ? 1 : -1;
    tr.open = !std::isfinite(tp.x_M);

    if (!tr.open && tp.x_M <= tp.x_m) {
        // minimal orbit: the particle rests at the bottom with |p| = 1
        tr.samples.push_back({0.0, tp.x_m, static_cast<double>(tr.eta)});
        return tr;
    }
    RunResult r;
    if (!tr.open) {
        tr.period = period(m, E);
        r = run_orbit(m, tp.x_M, tr.eta, periods * tr.period, tr.period / opts.samples_per_period, std::nullopt,
                      tr.period / 20, opts.tol);
    } else {
        const double xs = opts.x_start.value_or(d.lower + std::max(1.0, std::abs(d.lower)));
        const Momenta mb = momentum_branches(m, xs, E);
        const double p_in = std::abs(mb.p_plus) < 1 ? mb.p_plus : mb.p_minus;  // moving left
        const RunResult probe = run_orbit(m, xs, p_in, inf, 0.0, xs, inf, opts.tol);
        const double T = probe.t_final;
        r = run_orbit(m, xs, p_in, T, T / opts.samples_per_period, std::nullopt, T / 20, opts.tol);
    }
    tr.samples = std::move(r.samples);
    tr.bounce_times = std::move(r.bounce_times);
    tr.signed_area = r.area;
    return tr;
}

WorldlineSegment lightcone_worldline(const XpModel& m, double E, double t0) {
    if (m.kind() != models::Kind::linear || m.gauge() != Gauge::symmetric)
        throw UsageError("light-cone worldlines need the symmetric linear model");
    const double a = m.param("alpha"), h = m.param("h"), w0 = a * h;
    if (!(E > 2 * w0)) throw ClassicallyForbiddenError("E must exceed 2 w0 for a classical orbit");
    WorldlineSegment s;
    s.alpha = a;
    s.q = std::exp(2 * t0) * std::pow(h, 1 / a);
    s.epsilon = std::acosh(E / (2 * w0)) / a;
    s.a_plus = std::pow(s.q, -a);
    s.a_minus = std::pow(s.q, a);
    s.rhs = E / w0;
    const double qa = std::pow(s.q, a);
    s.start = {qa * std::exp(-a * s.epsilon), std::exp(a * s.epsilon) / qa};
    s.end = {qa * std::exp(a * s.epsilon), std::exp(-a * s.epsilon) / qa};
    return s;
}

WorldlineSegment next_segment(const WorldlineSegment& s) {
    WorldlineSegment n = s;
    const double a = s.alpha;
    n.q = s.q * std::exp(2 * s.epsilon);
    n.a_plus = std::pow(n.q, -a);
    n.a_minus = std::pow(n.q, a);
    const double qa = std::pow(n.q, a);
    n.start = {qa * std::exp(-a * s.epsilon), std::exp(a * s.epsilon) / qa};
    n.end = {qa * std::exp(a * s.epsilon), std::exp(-a * s.epsilon) / qa};
    return n;
}

GeodesicReport geodesic_residual(const XpModel& m, const Trajectory& traj) {
    GeodesicReport rep;
    const auto& s = traj.samples;
    const std::size_t n = s.size();
    if (n < 9) {
        rep.nodes_skipped = n;
        return rep;
    }
    auto straddles = [&](double ta, double tb) {
        for (double tb_ : traj.bounce_times)
            if (tb_ >= ta && tb_ <= tb) return true;
        return false;
    };
    auto d1 = [](double fm2, double fm1, double fp1, double fp2, double h) {
        return (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
    };
    for (std::size_t i = 4; i + 4 < n; ++i) {
        const double h = s[i + 1].t - s[i].t;
        bool uniform = h > 0;
        for (std::size_t j = i - 4; j < i + 4 && uniform; ++j)
            uniform = std::abs((s[j + 1].t - s[j].t) - h) <= 1e-9 * h;
        if (!uniform || straddles(s[i - 4].t, s[i + 4].t)) {
            ++rep.nodes_skipped;
            continue;
        }
        double u[5];
        bool ok = true;
        for (int k = -2; k <= 2 && ok; ++k) {
            const std::size_t j = i + k;
            const double xd = d1(s[j - 2].x, s[j - 1].x, s[j + 1].x, s[j + 2].x, h);
            const double w = m.w(s[j].x);
            const double r = xd / w;
            if (std::abs(r) >= 0.99) ok = false;
            u[k + 2] = 1.0 / (2 * w * std::sqrt(1 - r));
        }
        if (!ok) {
            ++rep.nodes_skipped;
            continue;
        }
        const double udot = d1(u[0], u[1], u[3], u[4], h);
        const double res = std::abs(udot / u[2] + 2 * w_prime(m, s[i].x));
        rep.max_residual = std::max(rep.max_residual, res);
        ++rep.nodes_used;
    }
    return rep;
}

}  // namespace xp::dynamics
