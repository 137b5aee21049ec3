#pragma once

// Semiclassical state counting n(E) = area / (2 pi hbar) and the Abel-type
// inversions that rebuild a profile from a prescribed n(E).

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xpmodels/models.hpp"

namespace xp::semiclassics {

using RealFn = std::function<double(double)>;

enum class CurveSource { quadrature, closed_form, external };
std::string to_string(CurveSource s);

struct CountingCurve {
    std::vector<std::pair<double, double>> samples;  // (E, n), E ascending
    CurveSource source = CurveSource::quadrature;
    double hbar = 1.0;
};

/// n(E) = (1/2 pi hbar) int_{x_m}^{x_M} dx/U sqrt(E^2 - 4 U V), any gauge, |E| symmetric.
/// Throws ClassicallyForbiddenError below threshold and DomainError for open orbits.
double count_states(const models::XpModel& m, double E);

CountingCurve counting_curve(const models::XpModel& m, const std::vector<double>& energies);

/// Closed forms: linear (alpha, h), berry-keating (h), cosh (w0, mu).
/// Throws UsageError for kinds without one.
double count_closed(const std::string& kind, double E, const models::Params& params, double hbar);

/// Lowest energy with a classical orbit, 2 inf w.
double threshold_energy(const models::XpModel& m);

enum class Family { xp, standard };
std::string to_string(Family f);

struct InversionResult {
    std::vector<std::pair<double, double>> profile;  // (w or V, x)
    Family family = Family::xp;
    bool monotone = true;  // x non-decreasing in w
};

struct CountTarget {
    RealFn n;
    RealFn dn;  // dn/dE; finite differences of n when empty
};

/// x(w) = x0 + 2 hbar w int_{w0}^{w} dE E d/dE(n(2E)/E) / sqrt(w^2 - E^2), evaluated
/// with E = w sin(phi). `n` only needs to be defined for energies >= 2 w0.
InversionResult abel_invert_xp(const CountTarget& target, double w0, double x0, double hbar,
                               const std::vector<double>& w_grid);

/// x(V) = hbar int_{V0}^{V} dE n'(E) / sqrt(V - E), evaluated with E = V - t^2.
InversionResult abel_invert_standard(const CountTarget& target, double V0, double hbar,
                                     const std::vector<double>& V_grid);

/// Geometric grid from a to b with `per_decade` points per factor of 10 (a and b included).
std::vector<double> geometric_grid(double a, double b, int per_decade = 200);

/// The xp inversion cannot see a term gamma E in n(E). Rebuilds w(x) from the
/// inversion, recounts, and returns the least-squares gamma of n_target - n_rebuilt.
double recover_linear_term(const RealFn& n_target, const InversionResult& inv, double hbar,
                           const std::vector<double>& energies);

struct PowerFit {
    double slope;
    double intercept;
    double max_residual;  // in log n
    bool flagged;         // residual above 1e-2: not in the asymptotic regime
};

/// Least-squares slope of log n against log E for a power-kind model.
PowerFit power_law_scaling(const models::XpModel& m, double E_lo, double E_hi, int points = 20);

/// Built-in counting targets used by the CLI.
///   wu-sprung   standard family, n = smooth zero count, V0 = 0
///   mussardo    standard family, n = Li(E), V0 = 2
///   linear-log  xp family, n = linear-model count + mu, needs w0 and mu
struct NamedProfile {
    Family family;
    CountTarget target;
    double lower;  // V0 or w0
};
NamedProfile named_profile(const std::string& name, const models::Params& params, double hbar);

/// Smooth Riemann zero count (t/2pi)(log(t/2pi) - 1) + 7/8.
double riemann_smooth_count(double t);

}  // namespace xp::semiclassics
