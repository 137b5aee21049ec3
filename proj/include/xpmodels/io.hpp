#pragma once

// Serialization of models, curves, spectra and comparison reports.
// CSV numbers are written with 17 significant digits so they re-read exactly.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "xpmodels/models.hpp"
#include "xpmodels/quantum.hpp"
#include "xpmodels/riemann.hpp"
#include "xpmodels/semiclassics.hpp"

namespace xp::io {

using nlohmann::json;

/// "%.17g"; non-finite values print as inf, -inf, nan.
std::string fmt(double v);

/// {kind, params, gauge, domain: {lower, upper (null for +inf)}, hbar}.
json model_to_json(const models::XpModel& m);
/// Catalog kinds only. Throws UsageError for a malformed record.
models::XpModel model_from_json(const json& j);

/// Two columns with a header row, x,w. A w,x header (inversion output) is accepted too.
models::XpModel read_tabulated_csv(std::istream& in, double hbar);
void write_tabulated_csv(std::ostream& out, const std::vector<double>& x, const std::vector<double>& w);

void write_curve_csv(std::ostream& out, const semiclassics::CountingCurve& c);
semiclassics::CountingCurve read_curve_csv(std::istream& in);

void write_inversion_csv(std::ostream& out, const semiclassics::InversionResult& r);
semiclassics::InversionResult read_inversion_csv(std::istream& in);

json spectrum_to_json(const quantum::SpectrumResult& s, const json& model);
void write_spectrum_csv(std::ostream& out, const quantum::SpectrumResult& s);

json report_to_json(const riemann::ComparisonReport& r);
void write_report_csv(std::ostream& out, const riemann::ComparisonReport& r);

}  // namespace xp::io
