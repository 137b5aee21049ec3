#include <doctest.h>

#include <cmath>
#include <sstream>

#include "xpmodels/errors.hpp"
#include "xpmodels/io.hpp"

using namespace xp;

TEST_CASE("17-digit formatting re-reads exactly") {
    for (double v : {0.1, 1.0 / 3.0, 6.283185307179586, -2.5e-300, 1e300}) CHECK(std::stod(io::fmt(v)) == v);
    CHECK(io::fmt(numerics::inf) == "inf");
    CHECK(io::fmt(std::nan("")) == "nan");
}

TEST_CASE("model record round trip") {
    for (const auto& [kind, params] :
         std::vector<std::pair<std::string, models::Params>>{{"linear", {{"h", 2.0}}},
                                                             {"model-III", {{"lx", 2.0}, {"lp", 3.0}}},
                                                             {"cosh", {{"w0", 1.0}, {"mu", 0.5}}}}) {
        const auto m = models::make_model(kind, params, 0.7);
        const auto j = io::model_to_json(m);
        CHECK(j["domain"]["upper"].is_null());
        const auto back = io::model_from_json(nlohmann::json::parse(j.dump()));
        CHECK(back.kind() == m.kind());
        CHECK(back.hbar() == m.hbar());
        CHECK(back.params() == m.params());
        CHECK(back.w(3.0) == m.w(3.0));
    }
    CHECK_THROWS_AS(io::model_from_json(nlohmann::json::parse(R"({"params": {}})")), UsageError);
    CHECK_THROWS_AS(io::model_from_json(nlohmann::json::parse(R"({"kind": "linear", "params": {"h": "x"}})")),
                    UsageError);
}

TEST_CASE("counting curve and inversion CSV round trip") {
    semiclassics::CountingCurve c;
    c.hbar = 0.5;
    c.source = semiclassics::CurveSource::closed_form;
    c.samples = {{1.0, 0.1}, {2.0, 1.0 / 3.0}, {3.5, 7.25}};
    std::stringstream ss;
    io::write_curve_csv(ss, c);
    CHECK(ss.str().rfind("# source=closed-form\n", 0) == 0);
    const auto back = io::read_curve_csv(ss);
    CHECK(back.source == c.source);
    CHECK(back.hbar == c.hbar);
    CHECK(back.samples == c.samples);

    semiclassics::InversionResult r;
    r.family = semiclassics::Family::standard;
    r.profile = {{0.0, 0.0}, {1.0, 0.25}, {2.0, 0.2}};
    r.monotone = false;
    std::stringstream s2;
    io::write_inversion_csv(s2, r);
    const auto r2 = io::read_inversion_csv(s2);
    CHECK(r2.family == r.family);
    CHECK(r2.profile == r.profile);
    CHECK_FALSE(r2.monotone);
}

TEST_CASE("CSV ingestion errors carry the line") {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            io::read_curve_csv(in);
        } catch (const IngestionError& e) {
            return e.line;
        }
        return 999;
    };
    CHECK(line_of("# source=quadrature\nE,n\n1,2\n2,x\n") == 4);
    CHECK(line_of("E,n\n1,2,3\n") == 2);
    CHECK(line_of("") == 0);
    CHECK(line_of("E,n\n2,1\n1,2\n") == 0);
}

TEST_CASE("tabulated profile CSV") {
    std::stringstream ss;
    io::write_tabulated_csv(ss, {1, 2, 3, 4}, {1, 2, 3, 4});
    const auto m = io::read_tabulated_csv(ss, 1.0);
    CHECK(m.kind() == models::Kind::tabulated);
    CHECK(m.w(2.5) == doctest::Approx(2.5).epsilon(1e-14));

    // inversion output order (w, x) is accepted
    std::istringstream swapped("# source=inversion\nw,x\n1,10\n2,11\n4,12\n");
    const auto m2 = io::read_tabulated_csv(swapped, 1.0);
    CHECK(m2.domain().lower == 10);
    CHECK(m2.w(11) == doctest::Approx(2.0));

    std::istringstream bad("a,b\n1,2\n");
    CHECK_THROWS_AS(io::read_tabulated_csv(bad, 1.0), IngestionError);
    std::istringstream neg("x,w\n1,1\n2,-1\n3,1\n");
    CHECK_THROWS_AS(io::read_tabulated_csv(neg, 1.0), IngestionError);
}

TEST_CASE("spectrum and report serialization") {
    quantum::SpectrumResult s;
    s.theta = 0.25;
    s.hbar = 1;
    s.solver = "bessel";
    s.eigenvalues = {{-1.5, 1e-14, -1}, {1.5, 2e-14, 0}};
    s.zero_mode_norm = 0.125;
    std::ostringstream csv;
    io::write_spectrum_csv(csv, s);
    CHECK(csv.str() == "index,E,residual\n-1,-1.5,1e-14\n0,1.5,2e-14\n");
    const auto j = io::spectrum_to_json(s, nlohmann::json::object());
    CHECK(j["eigenvalues"].size() == 2);
    CHECK(j["zero_mode_norm"] == 0.125);
    CHECK(j["continuum"].is_null());

    const auto rep = riemann::compare_spectrum(s, std::nullopt);
    std::ostringstream rc;
    io::write_report_csv(rc, rep);
    CHECK(rc.str().rfind("n,E,t,smooth,offset\n0,1.5,", 0) == 0);
    CHECK(io::report_to_json(rep)["rows"].size() == 1);
}
