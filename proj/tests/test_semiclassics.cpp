#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "xpmodels/dynamics.hpp"
#include "xpmodels/errors.hpp"
#include "xpmodels/models.hpp"
#include "xpmodels/semiclassics.hpp"

using namespace xp;
using namespace xp::semiclassics;
using models::make_model;

namespace {

// K(m) - E(m) by the arithmetic-geometric mean, kept apart from the library.
double agm_k_minus_e(double m) {
    double a = 1, b = std::sqrt(1 - m), c2sum = 0.5 * m, pow2 = 0.5;
    for (int it = 0; it < 40 && std::abs(a - b) > 1e-15 * a; ++it) {
        const double an = 0.5 * (a + b), cn = 0.5 * (a - b);
        b = std::sqrt(a * b);
        a = an;
        pow2 *= 2;
        c2sum += pow2 * cn * cn;
    }
    const double K = oracle::pi / (2 * a);
    return K * c2sum;
}

double linear_count(double E, double alpha, double w0, double hbar) {
    const double r = 2 * w0 / E;
    return E / (2 * oracle::pi * hbar * alpha) * (std::acosh(1 / r) - std::sqrt(1 - r * r));
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST_CASE("linear count matches the closed form") {
    const double w0 = 2 * oracle::pi;
    auto m = make_model("linear", {{"alpha", 1.0}, {"h", w0}});
    CHECK(rel(count_states(m, 40.0), linear_count(40.0, 1.0, w0, 1.0)) < 1e-8);
    CHECK(rel(count_states(m, -40.0), linear_count(40.0, 1.0, w0, 1.0)) < 1e-8);
    CHECK(count_states(m, 2 * w0) == 0.0);
    CHECK(rel(count_closed("linear", 40.0, {{"alpha", 1.0}, {"h", w0}}, 1.0), linear_count(40.0, 1.0, w0, 1.0)) < 1e-14);

    auto m2 = make_model("linear", {{"alpha", 0.5}, {"h", 3.0}}, 0.25);
    for (double E : {3.5, 10.0, 1e3}) CHECK(rel(count_states(m2, E), linear_count(E, 0.5, 1.5, 0.25)) < 1e-8);
    CHECK_THROWS_AS(count_states(m, 1.0), ClassicallyForbiddenError);
}

TEST_CASE("Berry-Keating count matches the elliptic form") {
    auto m = make_model("berry-keating", {{"h", 1.0}});
    for (double E : {4.5, 10.0, 100.0}) {
        const double ref = E / (2 * oracle::pi) * agm_k_minus_e(1 - 16 / (E * E));
        CHECK(rel(count_states(m, E), ref) < 1e-8);
        CHECK(rel(count_closed("berry-keating", E, {{"h", 1.0}}, 1.0), ref) < 1e-12);
    }
    CHECK(count_closed("berry-keating", 4.0, {{"h", 1.0}}, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(count_states(m, 4.0) == 0.0);
}

TEST_CASE("cosh count is exactly linear in E") {
    const double w0 = 1.5, mu = 0.7, hbar = 0.5;
    auto m = make_model("cosh", {{"w0", w0}, {"mu", mu}}, hbar);
    for (double E : {3.0, 3.1, 7.0, 40.0}) {
        const double ref = mu * (E / (2 * w0) - 1);
        CHECK(std::abs(count_states(m, E) - ref) < 1e-9 * std::max(1.0, ref));
        CHECK(std::abs(count_closed("harmonic-cosh", E, {{"w0", w0}, {"mu", mu}}, hbar) - ref) < 1e-13 * std::max(1.0, ref));
    }
    CHECK_THROWS_AS(count_closed("power", 3.0, {}, 1.0), UsageError);
}

TEST_CASE("count is invariant under the change to the symmetric gauge") {
    auto m3 = make_model("model-III", {{"lx", 1.3}, {"lp", 0.8}});
    auto sym = models::to_symmetric_gauge(m3).second;
    const double th = threshold_energy(m3);
    CHECK(th == doctest::Approx(2 * 1.3 * 0.8).epsilon(1e-10));
    for (double E : {2.5, 5.0, 30.0}) {
        const double a = count_states(m3, E), b = count_states(sym, E);
        CHECK(rel(a, b) < 1e-8);
    }
}

TEST_CASE("dn/dE times 2 pi hbar equals the period") {
    struct Case {
        models::XpModel m;
        double E;
    };
    std::vector<Case> cases = {
        {make_model("linear", {{"alpha", 1.0}, {"h", 1.0}}), 5.0},
        {make_model("berry-keating", {{"h", 1.0}}), 9.0},
        {make_model("cosh", {{"w0", 1.0}, {"mu", 2.0}}), 6.0},
        {make_model("model-III", {{"lx", 1.0}, {"lp", 1.0}}), 7.0},
        {make_model("power", {{"A", 1.0}, {"exponent", 2.0}}), 12.0},
        {make_model("linear-log", {{"alpha", 1.0}, {"beta", 0.5}}), 8.0},
    };
    for (const auto& c : cases) {
        const double h = 1e-4 * c.E;
        const double dn = (count_states(c.m, c.E + h) - count_states(c.m, c.E - h)) / (2 * h);
        CHECK(rel(2 * oracle::pi * c.m.hbar() * dn, dynamics::period(c.m, c.E)) < 1e-5);
    }
}

TEST_CASE("count vanishes at threshold for every kind") {
    std::vector<models::XpModel> ms = {
        make_model("linear", {{"alpha", 2.0}, {"h", 1.0}}),
        make_model("berry-keating", {{"h", 0.5}}),
        make_model("cosh", {{"w0", 1.0}, {"mu", 1.0}}),
        make_model("model-III", {{"lx", 1.0}, {"lp", 2.0}}),
        make_model("power", {{"A", 1.0}, {"exponent", 0.5}}),
    };
    for (const auto& m : ms) {
        const double th = threshold_energy(m);
        CHECK(count_states(m, th) == 0.0);
        const double n1 = count_states(m, th * (1 + 1e-6));
        CHECK(n1 >= 0.0);
        CHECK(n1 < 1e-6);
    }
}

TEST_CASE("xp inversion recovers the linear model") {
    const double w0 = 2.0;
    CountTarget t{[=](double E) { return linear_count(E, 1.0, w0, 1.0); },
                  [=](double E) { return std::acosh(E / (2 * w0)) / (2 * oracle::pi); }};
    const auto grid = geometric_grid(w0, 20 * w0, 40);
    auto inv = abel_invert_xp(t, w0, w0, 1.0, grid);
    CHECK(inv.monotone);
    double worst = 0;
    for (auto [w, x] : inv.profile) worst = std::max(worst, std::abs(x - w));
    CHECK(worst < 1e-9);

    // finite-difference derivative path
    auto inv_fd = abel_invert_xp({t.n, {}}, w0, w0, 1.0, grid);
    worst = 0;
    for (auto [w, x] : inv_fd.profile) worst = std::max(worst, std::abs(x - w));
    CHECK(worst < 1e-6);
}

TEST_CASE("round trip through the quadrature count") {
    const double w0 = 1.0;
    auto m = make_model("linear", {{"alpha", 1.0}, {"h", w0}});
    CountTarget t{[&](double E) { return count_states(m, E); }, {}};
    const auto grid = geometric_grid(2 * w0, 20 * w0, 6);
    auto inv = abel_invert_xp(t, w0, w0, 1.0, grid);
    for (auto [w, x] : inv.profile) CHECK(std::abs(x - w) < 1e-6);
}

TEST_CASE("linear-log target gives the log-corrected profile") {
    const double w0 = 1.5, mu = 0.8, hbar = 0.7;
    auto np = named_profile("linear-log", {{"w0", w0}, {"mu", mu}}, hbar);
    CHECK(np.family == Family::xp);
    const auto grid = geometric_grid(w0, 30 * w0, 20);
    auto inv = abel_invert_xp(np.target, w0, 0.0, hbar, grid);
    auto inv_fd = abel_invert_xp({np.target.n, {}}, w0, 0.0, hbar, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        const double ref = w - w0 - 2 * mu * hbar * std::acosh(w / w0);
        CHECK(std::abs(inv.profile[i].second - ref) < 1e-6);
        CHECK(std::abs(inv_fd.profile[i].second - ref) < 1e-6);
    }
    // large mu bends x(w) backwards near w0
    auto bent = abel_invert_xp(named_profile("linear-log", {{"w0", 1.0}, {"mu", 5.0}}, 1.0).target, 1.0, 0.0, 1.0,
                               geometric_grid(1.0, 10.0, 20));
    CHECK_FALSE(bent.monotone);
}

TEST_CASE("xp inversion is blind to a term linear in E") {
    const double w0 = 1.0, gamma = 0.37;
    auto base = named_profile("linear-log", {{"w0", w0}, {"mu", 0.2}}, 1.0).target;
    CountTarget shifted{[&](double E) { return base.n(E) + gamma * E; }, [&](double E) { return base.dn(E) + gamma; }};
    const auto grid = geometric_grid(w0, 20 * w0, 20);
    auto a = abel_invert_xp(base, w0, 0.0, 1.0, grid), b = abel_invert_xp(shifted, w0, 0.0, 1.0, grid);
    auto c = abel_invert_xp({shifted.n, {}}, w0, 0.0, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(a.profile[i].second - b.profile[i].second) < 1e-8);
        CHECK(std::abs(a.profile[i].second - c.profile[i].second) < 1e-6);
    }
}

TEST_CASE("recounting the inverted profile recovers the lost linear term") {
    const double w0 = 1.0, gamma = 0.25;
    CountTarget lin{[=](double E) { return linear_count(E, 1.0, w0, 1.0); },
                    [=](double E) { return std::acosh(E / (2 * w0)) / (2 * oracle::pi); }};
    auto inv = abel_invert_xp(lin, w0, w0, 1.0, geometric_grid(w0, 40 * w0, 100));
    auto n_target = [&](double E) { return lin.n(E) + gamma * E; };
    const double g = recover_linear_term(n_target, inv, 1.0, {4.0, 8.0, 16.0, 32.0, 64.0});
    CHECK(g == doctest::Approx(gamma).epsilon(1e-4));
    CHECK_THROWS_AS(recover_linear_term(n_target, inv, 1.0, {1000.0}), DomainError);
}

TEST_CASE("standard inversion") {
    SUBCASE("harmonic spectrum gives a square-root profile") {
        const double omega = 1.7, hbar = 0.9;
        CountTarget t{[=](double E) { return E / (hbar * omega); }, {}};
        for (auto [V, x] : abel_invert_standard(t, 0.0, hbar, {0.5, 2.0, 9.0, 100.0}).profile)
            CHECK(rel(x, 2 * std::sqrt(V) / omega) < 1e-8);
    }
    SUBCASE("smooth zero count gives the Wu-Sprung profile") {
        auto np = named_profile("wu-sprung", {}, 1.0);
        CHECK(np.family == Family::standard);
        auto inv = abel_invert_standard(np.target, np.lower, 1.0, {10.0, 100.0, 1e4});
        for (auto [V, x] : inv.profile) {
            const double ref = std::sqrt(V) / oracle::pi * std::log(2 * V / (oracle::pi * std::exp(2.0)));
            CHECK(std::abs(x - ref) < 1e-8 * std::max(1.0, std::abs(ref)));
        }
        // finite-difference path on the same target
        auto fd = abel_invert_standard({np.target.n, {}}, np.lower, 1.0, {100.0});
        CHECK(fd.profile[0].second == doctest::Approx(inv.profile[1].second).epsilon(1e-5));
    }
    SUBCASE("prime counting gives sqrt(V)/log V growth") {
        auto np = named_profile("mussardo", {}, 1.0);
        auto inv = abel_invert_standard(np.target, np.lower, 1.0, {1e3, 1e6, 1e9});
        CHECK(inv.monotone);
        double prev = 10;
        for (auto [V, x] : inv.profile) {
            const double ratio = x * std::log(V) / (2 * std::sqrt(V));
            CHECK(std::abs(ratio - 1) < prev);
            prev = std::abs(ratio - 1);
        }
        CHECK(prev < 0.1);
    }
}

TEST_CASE("power-law scaling of the count") {
    auto half = make_model("power", {{"A", 1.0}, {"exponent", 0.5}});
    auto fit = power_law_scaling(half, 1e3, 1e5);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.02));
    CHECK_FALSE(fit.flagged);

    auto two = make_model("power", {{"A", 1.0}, {"exponent", 2.0}});
    fit = power_law_scaling(two, 1e4, 1e7);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.02));

    CHECK_THROWS_AS(power_law_scaling(make_model("power", {{"A", 1.0}, {"exponent", 1.0}}), 10, 100), UsageError);
    CHECK_THROWS_AS(power_law_scaling(make_model("linear", {{"h", 1.0}}), 10, 100), UsageError);
}

TEST_CASE("counting curve and grid helpers") {
    auto m = make_model("linear", {{"h", 1.0}});
    auto c = counting_curve(m, {9.0, 3.0, 5.0});
    REQUIRE(c.samples.size() == 3);
    CHECK(c.samples[0].first == 3.0);
    CHECK(c.samples[1].second <= c.samples[2].second);
    auto g = geometric_grid(1.0, 100.0, 200);
    CHECK(g.size() == 401);
    CHECK(g.back() == 100.0);
    CHECK_THROWS_AS(geometric_grid(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(count_states(make_model("constant", {{"c", 1.0}}), 3.0), DomainError);
    CHECK(riemann_smooth_count(2 * oracle::pi * std::exp(1.0)) == doctest::Approx(7.0 / 8.0).epsilon(1e-14));
}
