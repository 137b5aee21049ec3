#include "xpmodels/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "xpmodels/errors.hpp"

namespace xp::io {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, std::size_t line) {
    const std::string t = trim(tok);
    double v = 0;
    const char* first = t.data();
    const char* last = first + t.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc() || ptr != last)
        throw IngestionError("line " + std::to_string(line) + ": not a number: '" + t + "'", line);
    return v;
}

// Comment lines of the form "# key=value" land in `meta`; the first other
// non-empty line is the column header; every later line must hold two numbers.
struct TwoColumn {
    std::map<std::string, std::string> meta;
    std::string col0, col1;
    std::vector<std::pair<double, double>> rows;
};

TwoColumn read_two_column(std::istream& in) {
    TwoColumn t;
    std::string raw;
    std::size_t line = 0;
    bool have_header = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '#') {
            const std::string body = trim(s.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string::npos) t.meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
            continue;
        }
        const auto comma = s.find(',');
        if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
            throw IngestionError("line " + std::to_string(line) + ": expected two comma-separated columns", line);
        if (!have_header) {
            t.col0 = trim(s.substr(0, comma));
            t.col1 = trim(s.substr(comma + 1));
            have_header = true;
            continue;
        }
        t.rows.emplace_back(parse_number(s.substr(0, comma), line), parse_number(s.substr(comma + 1), line));
    }
    if (!have_header) throw IngestionError("missing column header", 0);
    return t;
}

}  // namespace

json model_to_json(const models::XpModel& m) {
    json params = json::object();
    for (const auto& [k, v] : m.params()) params[k] = v;
    return {{"kind", models::to_string(m.kind())},
            {"params", params},
            {"gauge", models::to_string(m.gauge())},
            {"domain", {{"lower", finite_or_null(m.domain().lower)}, {"upper", finite_or_null(m.domain().upper)}}},
            {"hbar", m.hbar()}};
}

models::XpModel model_from_json(const json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "tabulated" || kind == "custom")
            throw UsageError("model records can only rebuild catalog kinds");
        models::Params params;
        if (j.contains("params"))
            for (const auto& [k, v] : j.at("params").items()) params[k] = v.get<double>();
        const double hbar = j.value("hbar", 1.0);
        return models::make_model(kind, params, hbar);
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed model record: ") + e.what());
    }
}

models::XpModel read_tabulated_csv(std::istream& in, double hbar) {
    const auto t = read_two_column(in);
    const bool swapped = t.col0 == "w" && t.col1 == "x";
    if (!swapped && !(t.col0 == "x" && t.col1 == "w"))
        throw IngestionError("tabulated profile needs an 'x,w' or 'w,x' header", 0);
    std::vector<double> xs, ws;
    for (const auto& [a, b] : t.rows) {
        xs.push_back(swapped ? b : a);
        ws.push_back(swapped ? a : b);
    }
    try {
        return models::make_tabulated(xs, ws, hbar);
    } catch (const DomainError& e) {
        throw IngestionError(std::string("invalid tabulated profile: ") + e.what(), 0);
    }
}

void write_tabulated_csv(std::ostream& out, const std::vector<double>& x, const std::vector<double>& w) {
    out << "x,w\n";
    for (std::size_t i = 0; i < x.size(); ++i) out << fmt(x[i]) << ',' << fmt(w[i]) << '\n';
}

void write_curve_csv(std::ostream& out, const semiclassics::CountingCurve& c) {
    out << "# source=" << semiclassics::to_string(c.source) << '\n';
    out << "# hbar=" << fmt(c.hbar) << '\n';
    out << "E,n\n";
    for (const auto& [E, n] : c.samples) out << fmt(E) << ',' << fmt(n) << '\n';
}

semiclassics::CountingCurve read_curve_csv(std::istream& in) {
    const auto t = read_two_column(in);
    semiclassics::CountingCurve c;
    c.source = semiclassics::CurveSource::external;
    if (auto it = t.meta.find("source"); it != t.meta.end()) {
        if (it->second == "quadrature") c.source = semiclassics::CurveSource::quadrature;
        if (it->second == "closed-form") c.source = semiclassics::CurveSource::closed_form;
    }
    if (auto it = t.meta.find("hbar"); it != t.meta.end()) c.hbar = parse_number(it->second, 0);
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (i > 0 && !(t.rows[i].first > t.rows[i - 1].first))
            throw IngestionError("counting curve energies must be strictly ascending", 0);
    c.samples = t.rows;
    return c;
}

void write_inversion_csv(std::ostream& out, const semiclassics::InversionResult& r) {
    out << "# source=inversion\n";
    out << "# family=" << semiclassics::to_string(r.family) << '\n';
    out << "# monotone=" << (r.monotone ? "true" : "false") << '\n';
    out << (r.family == semiclassics::Family::xp ? "w,x\n" : "V,x\n");
    for (const auto& [a, x] : r.profile) out << fmt(a) << ',' << fmt(x) << '\n';
}

semiclassics::InversionResult read_inversion_csv(std::istream& in) {
    const auto t = read_two_column(in);
    semiclassics::InversionResult r;
    r.family = t.col0 == "V" ? semiclassics::Family::standard : semiclassics::Family::xp;
    if (auto it = t.meta.find("family"); it != t.meta.end())
        r.family = it->second == "standard" ? semiclassics::Family::standard : semiclassics::Family::xp;
    r.profile = t.rows;
    r.monotone = true;
    for (std::size_t i = 1; i < r.profile.size(); ++i)
        if (r.profile[i].second < r.profile[i - 1].second) r.monotone = false;
    return r;
}

json spectrum_to_json(const quantum::SpectrumResult& s, const json& model) {
    json ev = json::array();
    for (const auto& e : s.eigenvalues) ev.push_back({{"index", e.index}, {"E", e.E}, {"residual", e.residual}});
    json j = {{"theta", s.theta}, {"hbar", s.hbar}, {"solver", s.solver}, {"model", model}, {"eigenvalues", ev}};
    j["zero_mode_norm"] = s.zero_mode_norm ? json(*s.zero_mode_norm) : json(nullptr);
    j["continuum"] = s.continuum ? json::array({s.continuum->first, s.continuum->second}) : json(nullptr);
    j["flagged"] = s.flagged;
    return j;
}

void write_spectrum_csv(std::ostream& out, const quantum::SpectrumResult& s) {
    out << "index,E,residual\n";
    for (const auto& e : s.eigenvalues) out << e.index << ',' << fmt(e.E) << ',' << fmt(e.residual) << '\n';
}

json report_to_json(const riemann::ComparisonReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json o = {{"n", row.n}, {"E", row.E}, {"t", row.t}, {"smooth", row.smooth}, {"offset", row.offset}};
        if (row.nearest_zero) o["nearest_zero"] = *row.nearest_zero;
        if (row.fluctuation) o["fluctuation"] = *row.fluctuation;
        rows.push_back(o);
    }
    return {{"identification", {{"alpha", r.alpha}, {"hbar", r.hbar}, {"z0", r.z0}}},
            {"rows", rows},
            {"summary", {{"mean_offset", r.mean_offset}, {"max_offset", r.max_offset}, {"min_offset", r.min_offset}}},
            {"has_zeros", r.has_zeros}};
}

void write_report_csv(std::ostream& out, const riemann::ComparisonReport& r) {
    out << "n,E,t,smooth,offset";
    if (r.has_zeros) out << ",nearest_zero,fluctuation";
    out << '\n';
    for (const auto& row : r.rows) {
        out << row.n << ',' << fmt(row.E) << ',' << fmt(row.t) << ',' << fmt(row.smooth) << ',' << fmt(row.offset);
        if (r.has_zeros)
            out << ',' << fmt(row.nearest_zero.value_or(std::nan(""))) << ','
                << fmt(row.fluctuation.value_or(std::nan("")));
        out << '\n';
    }
}

}  // namespace xp::io
