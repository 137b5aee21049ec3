#pragma once

// Model presentations H = U(x) p + V(x)/p, the reparametrizations that relate
// them, and the scalar curvature of the associated 1+1 dimensional metric.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xpmodels/numerics.hpp"

namespace xp::models {

enum class Kind { linear, berry_keating, model_iii, constant, cosh, linear_log, power, tabulated, custom };
enum class Gauge { generic, symmetric, p_gauge };

std::string to_string(Kind k);
std::string to_string(Gauge g);
Kind kind_from_string(const std::string& s);  // throws UsageError

struct DomainInterval {
    double lower;
    double upper = numerics::inf;
    bool contains(double x) const { return x >= lower && x <= upper; }
};

/// w and its first two derivatives at a point.
struct WJet {
    double w, dw, d2w;
};

using Params = std::map<std::string, double>;
using RealFn = std::function<double(double)>;

/// Gauge functions of a presentation. `jet` is only set for symmetric-gauge
/// profiles with analytic derivatives.
struct Profile {
    RealFn U;
    RealFn V;
    std::function<WJet(double)> jet;
};

/// Immutable model presentation. Copies share the underlying profile.
class XpModel {
public:
    XpModel(Kind kind, Params params, Gauge gauge, DomainInterval domain, double hbar,
            std::shared_ptr<const Profile> profile);

    Kind kind() const { return kind_; }
    const Params& params() const { return params_; }
    Gauge gauge() const { return gauge_; }
    const DomainInterval& domain() const { return domain_; }
    double hbar() const { return hbar_; }

    double U(double x) const;
    double V(double x) const;
    /// Scalar w = u v = sqrt(U V); equals the symmetric-gauge w in any gauge.
    double w(double x) const;
    bool has_analytic_jet() const { return static_cast<bool>(profile_->jet); }
    WJet jet(double x) const;  // throws UsageError without an analytic jet

    double param(const std::string& name) const;  // throws UsageError when missing
    std::optional<double> maybe_param(const std::string& name) const;

    /// Same presentation with a different hbar (catalog kinds only rebuild when hbar enters w).
    XpModel with_hbar(double hbar) const;

    const std::shared_ptr<const Profile>& profile() const { return profile_; }

private:
    void check_domain(double x) const;
    Kind kind_;
    Params params_;
    Gauge gauge_;
    DomainInterval domain_;
    double hbar_;
    std::shared_ptr<const Profile> profile_;
};

/// Catalog constructor. Kinds and parameters:
///   linear          alpha (1), h            w = alpha x on (h, inf)
///                   lx, lp                  U = x, V = lp^2 x on (lx, inf)
///   berry-keating   h                       w = x + h^2/x on (0, inf)
///                   lx, lp                  U = x + lx^2/x, V = lp^2 U
///   model-III       lx, lp                  U = (x^2 + lx^2)/x, V = lp^2 x on (0, inf)
///   constant        c (or lp)               w = c on (0, inf)
///   cosh            w0, mu                  w = w0 cosh(x / (2 mu hbar)) on (0, inf)
///   linear-log      alpha, beta, lower (1)  w = alpha x + beta log x
///   power           A, exponent, lower (1)  w = A x^exponent
XpModel make_model(const std::string& kind, const Params& params, double hbar = 1.0);

/// Symmetric-gauge model from a user-supplied w (used by inversion and tests).
XpModel make_symmetric(RealFn w, DomainInterval domain, double hbar,
                       std::function<WJet(double)> jet = {}, Kind kind = Kind::custom, Params params = {});

/// Generic (U, V) model from user-supplied gauge functions.
XpModel make_generic(RealFn U, RealFn V, DomainInterval domain, double hbar, Kind kind = Kind::custom,
                     Params params = {});

/// Symmetric-gauge model from samples of w, interpolated by a monotone
/// piecewise cubic (Fritsch-Carlson). Samples must be strictly ascending in x
/// and positive in w.
XpModel make_tabulated(std::vector<double> x, std::vector<double> w, double hbar);

double w_scalar(const XpModel& m, double x);

struct GaugeMap {
    RealFn forward;   // x -> x'
    RealFn inverse;   // x' -> x
    RealFn jacobian;  // dx'/dx
    double new_lower;
    double new_upper;
};

struct GaugeOptions {
    std::optional<double> new_lower;  // default: the catalog convention
    numerics::Quadrature quad{1e-13, 1e-12, 4000};
};

/// Map x' = l'_x + int_{lower}^x v/u dy and the symmetric-gauge image
/// w'(x') = w(f^{-1}(x')). Throws DivergentMapError when v/u is not
/// integrable at the lower end.
std::pair<GaugeMap, XpModel> to_symmetric_gauge(const XpModel& m, const GaugeOptions& opts = {});

/// Map x' = l'_x + int_{lower}^x dy / w and V_p(x') = w^2(f^{-1}(x')); l'_x defaults to 0.
std::pair<GaugeMap, XpModel> to_p_gauge(const XpModel& m, const GaugeOptions& opts = {});

struct Curvature {
    double R;
    bool degraded;  // one-sided stencil near the domain edge
};

/// Ricci scalar. Analytic -2 w''/w when the model has an analytic jet,
/// otherwise -(1/V) (W'/V)' with W = U V by finite differences.
Curvature scalar_curvature(const XpModel& m, double x);

/// Finite-difference curvature regardless of analytic jets (used for cross-checks).
Curvature scalar_curvature_fd(const XpModel& m, double x);

enum class ChartChoice { flat_linear, flat_constant, generic_identity };
ChartChoice chart_from_string(const std::string& s);

struct LightConeChart {
    RealFn f;  // x^0 = f(x^+)
    RealFn g;  // int_{lower}^{x^1} dy/U = f(x^+) + g(x^-)
    std::function<double(double, double)> conformal_factor;  // e^chi at (x^+, x^-)
    /// Point (x^0, x^1) to light-cone coordinates.
    std::function<std::pair<double, double>(double, double)> to_lightcone;
};

LightConeChart lightcone_chart(const XpModel& m, ChartChoice choice);

/// Catalog description used by the CLI `catalog` subcommand.
struct CatalogEntry {
    std::string kind;
    std::vector<std::string> params;
    std::string description;
};
std::vector<CatalogEntry> catalog();

}  // namespace xp::models
