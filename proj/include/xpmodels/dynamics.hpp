#pragma once

// Classical motion on the level sets w(x) (p + 1/p) = E: momentum branches,
// turning points, periods, wall bounces and the light-cone picture.

#include <optional>
#include <vector>

#include "xpmodels/models.hpp"

namespace xp::dynamics {

struct Momenta {
    double p_plus;
    double p_minus;
};

/// p = (E ± sqrt(E^2 - 4 w^2)) / (2w). Throws ClassicallyForbiddenError when |E| < 2w(x).
Momenta momentum_branches(const models::XpModel& m, double x, double E);

struct TurningPoints {
    double x_m;
    double x_M;           // +inf for orbits that escape
    bool pinned = false;  // x_m sits on the domain's lower end
};

/// (x*, w(x*)) at the minimum of w, or the lower end when w increases from there.
std::pair<double, double> w_minimum(const models::XpModel& m);

/// Roots of 2 w(x) = |E| for a w that is monotone or has a single minimum.
/// Throws ClassicallyForbiddenError when |E| is below 2 inf w.
TurningPoints turning_points(const models::XpModel& m, double E);

/// T_E = int_{x_m}^{x_M} dx/U |E| / sqrt(E^2 - 4 U V).
double period(const models::XpModel& m, double E);

struct Sample {
    double t, x, p;
};

struct Trajectory {
    std::vector<Sample> samples;
    double energy = 0.0;
    int eta = 1;  // sign of p, conserved
    std::vector<double> bounce_times;
    double signed_area = 0.0;  // accumulated int p dx
    bool open = false;         // escapes to +inf instead of closing
    double period = 0.0;       // T_E for closed orbits
};

struct OrbitOptions {
    int samples_per_period = 400;
    double tol = 1e-12;
    /// Starting point for open orbits (incoming branch). Defaults to lower + max(1, |lower|).
    std::optional<double> x_start;
};

/// Integrates Hamilton's equations in the symmetric gauge. Closed orbits start
/// at x_M with |p| = 1 and run for `periods` periods; open orbits come in from
/// x_start, bounce, and stop when they get back to x_start.
Trajectory integrate_orbit(const models::XpModel& m, double E, int periods, const OrbitOptions& opts = {});

double hamiltonian(const models::XpModel& m, double x, double p);

/// Straight worldline q^{-alpha} x+ + q^{alpha} x- = E / w0 of the linear model
/// in the flat chart, and its end points on the hyperbola x+ x- = 1.
struct WorldlineSegment {
    double a_plus, a_minus, rhs;
    double q, epsilon;  // cosh(alpha epsilon) = E / (2 w0)
    double alpha;
    std::pair<double, double> start;  // (x+, x-) where the segment leaves the wall
    std::pair<double, double> end;    // where it comes back
};

WorldlineSegment lightcone_worldline(const models::XpModel& m, double E, double t0);

/// Segment after the next bounce: q_n = e^{2 epsilon} q_{n-1}.
WorldlineSegment next_segment(const WorldlineSegment& s);

struct GeodesicReport {
    double max_residual = 0.0;
    std::size_t nodes_used = 0;
    std::size_t nodes_skipped = 0;
};

/// Residual of d2x+/ds2 + 2 w'(x) (dx+/ds)^2 = 0 in the identity chart, by
/// finite differences of x(t) and of dx+/ds along the samples, normalized by
/// (dx+/ds)^2. Nodes whose stencil straddles a bounce or where |xdot/w| >= 0.99
/// are skipped.
GeodesicReport geodesic_residual(const models::XpModel& m, const Trajectory& traj);

/// w'(x): analytic when the model has a jet, central differences otherwise.
double w_prime(const models::XpModel& m, double x);

}  // namespace xp::dynamics
