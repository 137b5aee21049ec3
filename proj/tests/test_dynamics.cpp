#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "xpmodels/dynamics.hpp"
#include "xpmodels/errors.hpp"

using namespace xp;
using namespace xp::models;
using namespace xp::dynamics;

namespace {

// Orbit quadrature written independently: tanh-sinh on the raw integrand.
double period_oracle(const std::function<double(double)>& w, double xm, double xM, double E) {
    return oracle::tanh_sinh([&](double x) {
        const double d = E * E - 4 * w(x) * w(x);
        return d > 0 ? E / (w(x) * std::sqrt(d)) : 0.0;
    }, xm, xM, 1e-12);
}

}  // namespace

TEST_CASE("momentum branches") {
    auto c = make_model("constant", {{"c", 1.0}});
    auto mb = momentum_branches(c, 3.0, 5.0);
    CHECK(mb.p_plus == doctest::Approx((5 + std::sqrt(21.0)) / 2).epsilon(1e-15));
    CHECK(mb.p_minus == doctest::Approx((5 - std::sqrt(21.0)) / 2).epsilon(1e-14));
    auto eq = momentum_branches(c, 3.0, 2.0);
    CHECK(eq.p_plus == 1.0);
    CHECK(eq.p_minus == 1.0);
    CHECK_THROWS_AS(momentum_branches(c, 3.0, 1.9), ClassicallyForbiddenError);

    auto bk = make_model("berry-keating", {{"h", 1.0}});
    for (int i = 0; i < 20; ++i) {
        const double x = 0.3 + 0.37 * i, E = 2 * bk.w(x) + 0.5 * i + 0.01;
        auto b = momentum_branches(bk, x, E);
        CHECK(b.p_plus * b.p_minus == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(hamiltonian(bk, x, b.p_plus) == doctest::Approx(E).epsilon(1e-13));
        auto n = momentum_branches(bk, x, -E);
        CHECK(n.p_plus == doctest::Approx(-b.p_minus).epsilon(1e-14));
    }
}

TEST_CASE("turning points") {
    const double tp2 = 2 * oracle::pi;
    auto lin = make_model("linear", {{"alpha", 1.0}, {"h", tp2}});
    auto t1 = turning_points(lin, 4 * tp2);
    CHECK(t1.pinned);
    CHECK(t1.x_m == tp2);
    CHECK(t1.x_M == doctest::Approx(2 * tp2).epsilon(1e-15));
    auto t0 = turning_points(lin, 2 * tp2);
    CHECK(t0.x_m == tp2);
    CHECK(t0.x_M == doctest::Approx(tp2));
    CHECK_THROWS_AS(turning_points(lin, 2 * tp2 - 0.01), ClassicallyForbiddenError);

    const double h = 1.3;
    auto bk = make_model("berry-keating", {{"h", h}});
    for (double E : {5.3, 8.0, 50.0, 1000.0}) {
        auto t = turning_points(bk, E);
        CHECK(!t.pinned);
        CHECK(t.x_m * t.x_M == doctest::Approx(h * h).epsilon(1e-13));
        CHECK(2 * bk.w(t.x_M) == doctest::Approx(E).epsilon(1e-14));
    }
    auto c = make_model("constant", {{"c", 1.0}});
    CHECK(std::isinf(turning_points(c, 3.0).x_M));
    auto ll = make_model("linear-log", {{"alpha", 1.0}, {"beta", -0.5}});
    auto tl = turning_points(ll, 4.0);
    CHECK(2 * ll.w(tl.x_M) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("periods") {
    const double tp2 = 2 * oracle::pi;
    auto lin = make_model("linear", {{"alpha", 1.0}, {"h", tp2}});
    CHECK(period(lin, 4 * tp2) == doctest::Approx(1.3169578969248166).epsilon(1e-12));
    CHECK(period(lin, 2 * tp2) == 0.0);
    CHECK(period(lin, 2 * tp2 * (1 + 1e-8)) < 2e-4);
    const double a = 2.5, h = 0.7;
    auto lin2 = make_model("linear", {{"alpha", a}, {"h", h}});
    for (double E : {4.0, 10.0, 100.0})
        CHECK(period(lin2, E) == doctest::Approx(std::acosh(E / (2 * a * h)) / a).epsilon(1e-11));

    auto bk = make_model("berry-keating", {{"h", 1.0}});
    for (double E : {4.5, 10.0, 60.0}) {
        // E - 2w = 2 (x - x_m)(x_M - x) / x with x_m x_M = 1 removes the cancellation at the ends
        const double a = E / 4, xM = a + std::sqrt(a * a - 1), xm = 1 / xM;
        const double ref = oracle::tanh_sinh_ends([&](double da, double db) {
            const double x = xm + da, w = x + 1 / x;
            return E / (w * std::sqrt(2 * da * db / x * (E + 2 * w)));
        }, xm, xM);
        CHECK(period(bk, E) == doctest::Approx(ref).epsilon(1e-11));
    }
    // 30-digit reference
    CHECK(period(bk, 4.5) == doctest::Approx(1.664637668768788).epsilon(1e-12));
    auto ch = make_model("cosh", {{"w0", 1.0}, {"mu", 1.0}});
    for (double E : {3.0, 20.0}) {
        auto t = turning_points(ch, E);
        CHECK(t.pinned);
        const double ref = period_oracle([](double x) { return std::cosh(x / 2); }, 0.0, t.x_M, E);
        CHECK(period(ch, E) == doctest::Approx(ref).epsilon(1e-8));
    }
    // generic gauge gives the same period as its symmetric image
    auto m3 = make_model("model-III", {{"lx", 1.0}, {"lp", 1.0}});
    auto l1 = make_model("linear", {{"alpha", 1.0}, {"h", 1.0}});
    for (double E : {3.0, 12.0}) CHECK(period(m3, E) == doctest::Approx(period(l1, E)).epsilon(1e-9));
    CHECK_THROWS_AS(period(make_model("constant", {{"c", 1.0}}), 3.0), DomainError);
}

TEST_CASE("model I orbit follows the closed form") {
    const double alpha = 1.0, h = 2 * oracle::pi, E = 40.0;
    auto lin = make_model("linear", {{"alpha", alpha}, {"h", h}});
    auto tr = integrate_orbit(lin, E, 3);
    const double T = tr.period;
    CHECK(T == doctest::Approx(std::acosh(E / (2 * alpha * h)) / alpha).epsilon(1e-12));
    CHECK(tr.bounce_times.size() == 3);
    CHECK(tr.samples.size() >= 3 * 200);
    // x_M at t = 0 means t0 = -log(E / 2 alpha) / (2 alpha), shifted by T after each bounce
    const double t0 = -std::log(E / (2 * alpha)) / (2 * alpha);
    double worst = 0, worst_p = 0, worst_E = 0;
    for (const auto& s : tr.samples) {
        int n = 0;
        for (double tb : tr.bounce_times)
            if (s.t > tb) ++n;
        const double u = s.t - (t0 + n * T);
        const double x2 = (E / alpha) * std::exp(2 * alpha * u) - std::exp(4 * alpha * u);
        const double p2 = (E / alpha) * std::exp(-2 * alpha * u) - 1;
        worst = std::max(worst, std::abs(s.x * s.x - x2) / x2);
        worst_p = std::max(worst_p, std::abs(s.p * s.p - p2) / p2);
        worst_E = std::max(worst_E, std::abs(hamiltonian(lin, s.x, s.p) - E) / E);
        CHECK(s.p > 0);
        CHECK(s.x >= h);
    }
    CHECK(worst <= 1e-6);
    CHECK(worst_p <= 1e-6);
    CHECK(worst_E <= 1e-8);
    // the wall is reached where e^{2 alpha (t - t0)} = E/(2 alpha) + sqrt((E/(2 alpha))^2 - h^2)
    const double A = E / (2 * alpha);
    const double tf = t0 + std::log(A + std::sqrt(A * A - h * h)) / (2 * alpha);
    for (int k = 0; k < 3; ++k) CHECK(tr.bounce_times[k] == doctest::Approx(tf + k * T).epsilon(1e-10));
}

TEST_CASE("orbit invariants") {
    std::vector<std::pair<XpModel, double>> cases = {
        {make_model("linear", {{"alpha", 1.0}, {"h", 1.0}}), 15.0},
        {make_model("berry-keating", {{"h", 1.0}}), 12.0},
        {make_model("cosh", {{"w0", 1.0}, {"mu", 1.0}}), 9.0},
        {make_model("power", {{"A", 1.0}, {"exponent", 2.0}}), 30.0},
    };
    for (auto& [m, E] : cases) {
        CAPTURE(to_string(m.kind()));
        for (double sgn : {1.0, -1.0}) {
            auto tr = integrate_orbit(m, sgn * E, 2);
            const double xM = turning_points(m, E).x_M;
            double drift = 0;
            for (const auto& s : tr.samples) {
                drift = std::max(drift, std::abs(hamiltonian(m, s.x, s.p) - sgn * E) / E);
                CHECK((s.p > 0) == (sgn > 0));
            }
            CHECK(drift <= 1e-8);
            // one period later the particle is back
            double gap = 0;
            const double T = tr.period;
            const std::size_t per = 400;  // default samples per period
            for (std::size_t i = 0; i + per < tr.samples.size(); ++i) {
                CHECK(tr.samples[i + per].t == doctest::Approx(tr.samples[i].t + T).epsilon(1e-12));
                gap = std::max(gap, std::abs(tr.samples[i + per].x - tr.samples[i].x));
            }
            CHECK(gap <= 1e-5 * xM);
            // clockwise for E > 0: int p dx has the sign of E, magnitude the enclosed area
            CHECK((tr.signed_area > 0) == (sgn > 0));
            auto tp = turning_points(m, E);
            const double area = oracle::tanh_sinh([&](double x) {
                const double w = m.w(x), d = E * E - 4 * w * w;
                return d > 0 ? std::sqrt(d) / w : 0.0;
            }, tp.x_m, tp.x_M, 1e-12);
            CHECK(std::abs(tr.signed_area) == doctest::Approx(2 * area).epsilon(1e-6));
        }
    }
}

TEST_CASE("time reversal") {
    auto bk = make_model("berry-keating", {{"h", 1.0}});
    auto a = integrate_orbit(bk, 7.0, 1), b = integrate_orbit(bk, -7.0, 1);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].x == doctest::Approx(b.samples[i].x).epsilon(1e-9));
        CHECK(a.samples[i].p == doctest::Approx(-b.samples[i].p).epsilon(1e-9));
    }
}

TEST_CASE("bounce keeps the energy") {
    auto lin = make_model("linear", {{"alpha", 1.0}, {"h", 2.0}});
    for (double p : {0.01, 0.3, 0.9, -0.5})
        CHECK(hamiltonian(lin, 2.0, 1 / p) == doctest::Approx(hamiltonian(lin, 2.0, p)).epsilon(1e-15));
}

TEST_CASE("light-cone worldline of model I") {
    const double alpha = 1.0, h = 2 * oracle::pi, w0 = alpha * h, E = 30.0;
    auto lin = make_model("linear", {{"alpha", alpha}, {"h", h}});
    const double t0 = -std::log(E / (2 * alpha)) / (2 * alpha);
    auto seg = lightcone_worldline(lin, E, t0);
    CHECK(seg.rhs == doctest::Approx(E / w0));
    CHECK(seg.start.first * seg.start.second == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(seg.end.first * seg.end.second == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(seg.a_plus * seg.start.first + seg.a_minus * seg.start.second == doctest::Approx(seg.rhs).epsilon(1e-13));
    auto nxt = next_segment(seg);
    CHECK(nxt.start.first == doctest::Approx(seg.end.first).epsilon(1e-13));
    const double T = 0.5 * std::log(nxt.q / seg.q);
    CHECK(T == doctest::Approx(std::acosh(E / (2 * w0)) / alpha).epsilon(1e-13));

    // integrated orbit on the straight line, segment by segment
    auto tr = integrate_orbit(lin, E, 2);
    auto chart = lightcone_chart(lin, ChartChoice::flat_linear);
    double worst = 0;
    for (const auto& s : tr.samples) {
        int n = 0;
        for (double tb : tr.bounce_times)
            if (s.t > tb) ++n;
        auto sg = lightcone_worldline(lin, E, t0 + n * tr.period);
        auto [xp, xm] = chart.to_lightcone(s.t, s.x);
        worst = std::max(worst, std::abs(sg.a_plus * xp + sg.a_minus * xm - sg.rhs) / sg.rhs);
    }
    CHECK(worst <= 1e-6);
    CHECK_THROWS_AS(lightcone_worldline(lin, 2 * w0, 0.0), ClassicallyForbiddenError);
}

TEST_CASE("geodesic residual") {
    auto lin = make_model("linear", {{"alpha", 1.0}, {"h", 2 * oracle::pi}});
    auto tr = integrate_orbit(lin, 40.0, 2);
    auto rep = geodesic_residual(lin, tr);
    CHECK(rep.nodes_used > 100);
    CHECK(rep.max_residual <= 1e-5);

    auto bk = make_model("berry-keating", {{"h", 1.0}});
    // |w'| reaches ~100 near x_m, so nested differences hit a round-off floor near 5e-5
    auto rb = geodesic_residual(bk, integrate_orbit(bk, 10.0, 1, {4000}));
    CHECK(rb.nodes_used > 1000);
    CHECK(rb.max_residual <= 1e-4);

    auto con = make_model("constant", {{"c", 1.0}});
    auto open = integrate_orbit(con, 3.0, 1);
    CHECK(open.open);
    CHECK(open.bounce_times.size() == 1);
    auto rc = geodesic_residual(con, open);
    CHECK(rc.nodes_used > 50);
    CHECK(rc.max_residual <= 1e-6);
    // straight incoming and outgoing segments: xdot = c (1 - 1/p^2) with p = e^{-eps}, e^{eps}
    const double eps = std::acosh(1.5);
    const auto& s0 = open.samples[1];
    CHECK(s0.p == doctest::Approx(std::exp(-eps)).epsilon(1e-10));

    // negative control: a path that is not a solution
    Trajectory fake;
    for (int i = 0; i < 400; ++i) {
        const double t = 0.01 * i;
        fake.samples.push_back({t, 10 + std::sin(t), 1.0});
    }
    CHECK(geodesic_residual(lin, fake).max_residual > 0.1);
}
