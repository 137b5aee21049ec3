#pragma once

// Shared numerical kernels: adaptive quadrature, root location, ODE
// integration and the few special functions the rest of the library needs.
// Everything here is pure and reentrant.

#include <array>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace xp::numerics {

using Complex = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Tolerances for the adaptive quadrature engine.
struct Quadrature {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;

    void validate() const;
};

/// Endpoint behaviour of an integrand. The inverse-sqrt hints also suit
/// integrands that vanish like a square root at that end.
enum class EndpointHint {
    none,
    inverse_sqrt_left,   // x = a + s^2
    inverse_sqrt_right,  // x = b - s^2
    exponential_tail,    // b = +inf, s = exp(-(x - a))
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    int evaluations = 0;
};

struct ComplexQuadResult {
    Complex value{};
    double err_est = 0.0;
    int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) panel bisection on [a, b]; b may be +inf.
/// Throws ConvergenceError (carrying the best estimate) when the subdivision
/// budget is exhausted.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const Quadrature& q = {}, EndpointHint hint = EndpointHint::none);

ComplexQuadResult integrate_complex(const std::function<Complex(double)>& f, double a,
                                    double b, const Quadrature& q = {},
                                    EndpointHint hint = EndpointHint::none);

struct RootBracket {
    double lo;
    double hi;
    double f_lo;
    double f_hi;
};

/// Evaluates f at both ends and validates the sign change.
RootBracket make_bracket(const std::function<double(double)>& f, double lo, double hi);

/// Bisection to width `tol`, then one guarded secant step.
double find_root(const std::function<double(double)>& f, const RootBracket& bracket,
                 double tol = 1e-10);

/// Walks a grid x_{k+1} = x_k + step(x_k) over [e_lo, e_hi] and returns one
/// bracket per sign change, in ascending order.
std::vector<RootBracket> scan_brackets(const std::function<double(double)>& f, double e_lo,
                                       double e_hi, const std::function<double(double)>& step);

// ---------------------------------------------------------------------------
// ODE integration: Dormand-Prince 5(4) with continuous extension.

using OdeField = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeOptions {
    double tol = 1e-10;
    double initial_step = 0.0;  // 0: automatic
    double max_step = inf;
    long max_steps = 2'000'000;
    std::vector<double> sample_times;  // when non-empty, the path holds exactly these times
};

struct OdePath {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
};

/// One adaptive stepper, exposed so callers can do their own event handling.
class DormandPrince {
public:
    DormandPrince(OdeField field, std::size_t dim, double tol);

    struct Step {
        double t0, t1;
        std::vector<double> y0, y1;
        bool accepted;
        double next_h;
    };

    /// Attempts one step of size h from (t, y). Rejected steps leave the
    /// dense-output state untouched.
    Step attempt(double t, std::span<const double> y, double h);

    /// Dense output inside the last accepted step.
    void interpolate(double t, std::span<double> out) const;

    double initial_step(double t, std::span<const double> y, double direction) const;
    std::size_t dim() const { return dim_; }
    void evaluate(double t, std::span<const double> y, std::span<double> dydt) const {
        field_(t, y, dydt);
    }

private:
    OdeField field_;
    std::size_t dim_;
    double tol_;
    std::vector<std::vector<double>> k_;
    std::vector<double> tmp_;
    // continuous extension of the last accepted step
    double dense_t0_ = 0.0, dense_h_ = 0.0;
    std::vector<double> r1_, r2_, r3_, r4_, r5_;
    bool fsal_valid_ = false;
    double fsal_t_ = 0.0;
    std::vector<double> fsal_y_;
};

/// Integrates from t0 to t1 (either direction). Throws IntegrationError on
/// non-finite states or step-size underflow.
OdePath ode_integrate(const OdeField& field, std::vector<double> y0, double t0, double t1,
                      const OdeOptions& opts = {});

// ---------------------------------------------------------------------------
// Special functions.

enum class BesselRoute { contour, series, asymptotic };

struct BesselValue {
    Complex value;
    BesselRoute route;
};

/// Modified Bessel function K_nu(z) for complex order and real z > 0.
Complex bessel_k(Complex nu, double z);
BesselValue bessel_k_detail(Complex nu, double z);

/// Integral representation 1/2 int exp(-z cosh s + nu s) ds on a path lifted
/// into the strip |Im s| < pi/2 to follow the saddle. Exposed for cross-checks.
Complex bessel_k_contour(Complex nu, double z, double tol = 1e-14);

/// Ascending-series route through I_{+-nu}. Valid for non-integer nu.
Complex bessel_k_series(Complex nu, double z);

/// log Gamma(s) for complex s (principal branch of the shifted Stirling sum).
Complex log_gamma(Complex s);

struct EllipticKE {
    double K;  // +inf when m == 1
    double E;
    bool K_infinite;
};

/// Complete elliptic integrals of the first and second kind, parameter m = k^2.
EllipticKE elliptic_KE(double m);

/// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Outside the nodes the end cubics are extended.
class MonotoneCubic {
public:
    /// x strictly ascending, at least two nodes. Throws DomainError otherwise.
    MonotoneCubic(std::vector<double> x, std::vector<double> y);
    double operator()(double t) const { return eval(t)[0]; }
    double derivative(double t) const { return eval(t)[1]; }
    /// value, first and second derivative
    std::array<double, 3> eval(double t) const;
    const std::vector<double>& nodes() const { return x_; }

private:
    std::vector<double> x_, y_, d_;
};

/// Offset logarithmic integral Li(x) = int_2^x dy / log y.
double log_integral(double x, const Quadrature& q = {});

}  // namespace xp::numerics
