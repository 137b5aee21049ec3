#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "oracles.hpp"
#include "xpmodels/errors.hpp"
#include "xpmodels/quantum.hpp"
#include "xpmodels/riemann.hpp"

using namespace xp;
using oracle::pi;

TEST_CASE("smooth zero count") {
    CHECK(riemann::smooth_zero_count(2 * pi * std::exp(1.0)) == doctest::Approx(0.875).epsilon(1e-15));
    CHECK_THROWS_AS(riemann::smooth_zero_count(0.0), DomainError);
    CHECK_THROWS_AS(riemann::smooth_zero_count(-3.0), DomainError);

    // derivative log(t/2pi)/2pi, checked by a fourth-order difference
    for (double t : {20.0, 100.0, 1000.0, 1e5}) {
        const double h = 1e-3 * t;
        auto N = riemann::smooth_zero_count;
        const double d = (-N(t + 2 * h) + 8 * N(t + h) - 8 * N(t - h) + N(t - 2 * h)) / (12 * h);
        CHECK(std::abs(d - std::log(t / (2 * pi)) / (2 * pi)) < 1e-8);
    }
    double prev = riemann::smooth_zero_count(2 * pi * std::exp(1.0));
    for (double t = 20; t < 2000; t *= 1.1) {
        const double v = riemann::smooth_zero_count(t);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("zeros table ingestion") {
    auto two = riemann::parse_zeros("14.134725\n21.022040\n");
    REQUIRE(two.ordinates.size() == 2);
    CHECK(two.ordinates[0] == 14.134725);
    CHECK(two.ordinates[1] == 21.022040);

    CHECK(riemann::parse_zeros("").ordinates.empty());
    CHECK(riemann::parse_zeros("# nothing here\n\n   \n").ordinates.empty());
    CHECK(riemann::parse_zeros("# header\n  14.1 \r\n\n# mid\n21.0\n").ordinates.size() == 2);

    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            riemann::parse_zeros(text);
        } catch (const IngestionError& e) {
            return e.line;
        }
        return 0;
    };
    CHECK(line_of("21.0\n14.1\n") == 2);
    CHECK(line_of("# c\n14.1\n14.1\n") == 3);
    CHECK(line_of("14.1\nabc\n") == 2);
    CHECK(line_of("14.1 21.0\n") == 1);
    CHECK(line_of("-3\n") == 1);
    CHECK(line_of("nan\n") == 1);

    CHECK_THROWS_AS(riemann::load_zeros("/nonexistent/zeros.txt"), IngestionError);
}

TEST_CASE("zeros table file and counting") {
    const auto z = riemann::load_zeros(std::string(XP_TEST_DATA_DIR) + "/zeta_zeros.txt");
    REQUIRE(z.ordinates.size() == 100);
    CHECK(z.ordinates.front() == doctest::Approx(14.134725141734695).epsilon(1e-13));
    CHECK(z.count_below(100.0) == 29);
    CHECK(std::abs(static_cast<double>(z.count_below(100.0)) - riemann::smooth_zero_count(100.0)) <= 1.0);
    CHECK(z.count_below(14.0) == 0);
    CHECK(z.count_below(z.ordinates.front()) == 1);
    CHECK(*z.nearest_distance(14.0) == doctest::Approx(0.134725141734695).epsilon(1e-10));
    CHECK_FALSE(riemann::ZerosTable{}.nearest_distance(1.0).has_value());

    // the fluctuating part averages out over the table
    double s = 0;
    int m = 0;
    for (double t = 20; t < 230; t += 0.5, ++m) s += static_cast<double>(z.count_below(t)) - riemann::smooth_zero_count(t);
    CHECK(std::abs(s / m) < 0.15);
}

TEST_CASE("model I offsets approach 11/8") {
    const auto spec = quantum::modelI_spectrum(2 * pi, 0.0, 200.0);
    const auto z = riemann::load_zeros(std::string(XP_TEST_DATA_DIR) + "/zeta_zeros.txt");
    const auto rep = riemann::compare_spectrum(spec, z);
    CHECK(rep.z0 == doctest::Approx(2 * pi));
    CHECK(rep.has_zeros);
    REQUIRE(!rep.rows.empty());
    int in_range = 0;
    for (const auto& r : rep.rows) {
        CHECK(r.E > 0);
        CHECK(std::isfinite(r.offset));
        REQUIRE(r.fluctuation.has_value());
        REQUIRE(r.nearest_zero.has_value());
        if (r.E >= 100 && r.E <= 200) {
            ++in_range;
            CHECK(std::abs(r.offset - 11.0 / 8.0) < 0.1);
        }
    }
    CHECK(in_range > 10);
    // leading terms cancel
    CHECK(std::abs(rep.rows.back().offset / static_cast<double>(rep.rows.back().n)) < 0.05);
    CHECK(rep.min_offset <= rep.mean_offset);
    CHECK(rep.mean_offset <= rep.max_offset);

    const auto bare = riemann::compare_spectrum(spec, std::nullopt);
    CHECK_FALSE(bare.has_zeros);
    CHECK_FALSE(bare.rows.front().fluctuation.has_value());
}

TEST_CASE("comparison is invariant under joint rescaling of E and hbar") {
    const auto spec = quantum::modelI_spectrum(2 * pi, 0.0, 120.0);
    const auto base = riemann::compare_spectrum(spec, std::nullopt);
    for (double lam : {0.5, 3.0, 17.0}) {
        auto scaled = spec;
        scaled.hbar *= lam;
        for (auto& ev : scaled.eigenvalues) ev.E *= lam;
        const auto rep = riemann::compare_spectrum(scaled, std::nullopt);
        REQUIRE(rep.rows.size() == base.rows.size());
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            CHECK(rep.rows[i].n == base.rows[i].n);
            CHECK(std::abs(rep.rows[i].t - base.rows[i].t) <= 1e-12 * base.rows[i].t);
            CHECK(std::abs(rep.rows[i].offset - base.rows[i].offset) <= 1e-12);
        }
        // the solver itself respects the same scaling, z0 -> lam z0
        const auto solved = quantum::modelI_spectrum(2 * pi * lam, 0.0, 120.0 * lam, lam);
        const auto rep2 = riemann::compare_spectrum(solved, std::nullopt);
        REQUIRE(rep2.rows.size() == base.rows.size());
        for (std::size_t i = 0; i < rep2.rows.size(); ++i)
            CHECK(std::abs(rep2.rows[i].offset - base.rows[i].offset) < 1e-8);
    }
}

TEST_CASE("comparison preconditions") {
    quantum::SpectrumResult empty;
    CHECK_THROWS_AS(riemann::compare_spectrum(empty, std::nullopt), UsageError);
    const auto spec = quantum::modelI_spectrum(2 * pi, 0.0, 30.0);
    riemann::Identification id;
    id.alpha = 0;
    CHECK_THROWS_AS(riemann::compare_spectrum(spec, std::nullopt, id), UsageError);
    id.alpha = 2;
    const auto rep = riemann::compare_spectrum(spec, std::nullopt, id);
    CHECK(rep.rows.front().t == doctest::Approx(rep.rows.front().E / 2));
}
