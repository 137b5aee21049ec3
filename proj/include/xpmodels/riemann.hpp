#pragma once

// Comparison of computed spectra with the smooth count of Riemann zeros and,
// optionally, with a table of zero ordinates.

#include <optional>
#include <string>
#include <vector>

#include "xpmodels/quantum.hpp"

namespace xp::riemann {

/// (t/2pi)(log(t/2pi) - 1) + 7/8. Throws DomainError for t <= 0.
double smooth_zero_count(double t);

struct ZerosTable {
    std::vector<double> ordinates;  // strictly ascending, positive
    std::string source_path;

    /// Number of ordinates <= t.
    std::size_t count_below(double t) const;
    /// Distance to the closest ordinate; empty table gives nullopt.
    std::optional<double> nearest_distance(double t) const;
};

/// One decimal ordinate per line; blank lines and lines starting with '#' are
/// skipped. Throws IngestionError with the 1-based line number.
ZerosTable load_zeros(const std::string& path);
ZerosTable parse_zeros(const std::string& text, const std::string& source = "<memory>");

struct Identification {
    double alpha = 1.0;
    std::optional<double> hbar;  // defaults to the spectrum's hbar
    std::optional<double> z0;    // reported only; defaults to 2 pi hbar
};

struct ComparisonRow {
    long n;
    double E;
    double t;       // E / (hbar alpha)
    double smooth;  // smooth_zero_count(t)
    double offset;  // smooth - n
    std::optional<double> nearest_zero;  // |t - closest ordinate|
    std::optional<double> fluctuation;   // N_zeros(t) - smooth(t)
};

struct ComparisonReport {
    double alpha = 1.0;
    double hbar = 1.0;
    double z0 = 0.0;
    std::vector<ComparisonRow> rows;  // positive eigenvalues only, ascending
    double mean_offset = 0.0;
    double max_offset = 0.0;
    double min_offset = 0.0;
    bool has_zeros = false;
};

/// Throws UsageError for an empty spectrum or alpha <= 0.
ComparisonReport compare_spectrum(const quantum::SpectrumResult& spec, const std::optional<ZerosTable>& zeros,
                                  const Identification& ident = {});

}  // namespace xp::riemann
