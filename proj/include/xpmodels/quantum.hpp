#pragma once

// Quantum spectra of H = U p + V/p with the nonlocal boundary condition
//   e^{i theta} hbar u psi(l) + int v psi = 0,
// which in the symmetric gauge reads e^{i theta} hbar phi(z0) + int phi dz = 0.
//
// Writing chi = hbar phi' - i E phi / w, the decaying solution has |chi| = |phi|
// everywhere, so chi/phi = e^{i gamma} with
//   hbar gamma' = -2 sin gamma - E / w,
// and E is an eigenvalue iff gamma(z0) = theta mod 2 pi. The unwrapped phase
// Gamma(E) = gamma(z0) labels the eigenvalues: n = (Gamma - theta)/(2 pi) - 1.

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xpmodels/models.hpp"

namespace xp::quantum {

using Complex = std::complex<double>;

struct Eigenvalue {
    double E;
    double residual;  // |e^{i theta} + chi/phi| style residual of the boundary condition
    long index;       // phase label, ascending with E
};

struct SpectrumResult {
    double theta = 0.0;
    double hbar = 1.0;
    std::string solver;
    std::vector<Eigenvalue> eigenvalues;  // ascending E
    std::optional<double> zero_mode_norm;
    std::optional<std::pair<double, double>> continuum;  // gap edges (-a, a): continuum outside
    std::vector<double> flagged;  // candidates whose phase crossing was not clean
};

/// Reduce theta to (-pi, pi].
double wrap_angle(double theta);

// ---------------------------------------------------------------------------
// Model I, w(z) = z on (z0, inf): phi = (z/hbar)^{1-nu} K_nu(z/hbar), nu = 1/2 - iE/(2 hbar).

/// 2 Re(e^{i theta/2} K_nu(z0/hbar)) = e^{-i theta/2} (e^{i theta} K_nu + K_{nu-1}), real for real E.
double modelI_secular(double E, double z0, double theta, double hbar = 1.0);

/// |e^{i theta} K_nu + K_{nu-1}| / |K_nu| at z0/hbar.
double modelI_residual(double E, double z0, double theta, double hbar = 1.0);

struct ModelIOptions {
    bool mirror = true;  // for theta in {0, pi}: scan E > 0 and reflect
    double root_tol = 1e-11;
};

SpectrumResult modelI_spectrum(double z0, double theta, double E_max, double hbar = 1.0,
                               const ModelIOptions& opts = {});

/// phi(z) = (z/hbar)^{1-nu} K_nu(z/hbar) on z >= z0.
std::vector<Complex> modelI_eigenfunction(double E, double z0, double hbar, const std::vector<double>& z_grid);

/// |e^{i theta} hbar phi(z0) + int phi| / (hbar |phi(z0)|), with the integral done by
/// quadrature up to z_cut and in closed form beyond.
double modelI_boundary_residual(double E, double z0, double theta, double hbar, double z_cut);

// ---------------------------------------------------------------------------
// General models by shooting on the phase equation, in the model's own gauge:
//   hbar dgamma/dx = -2 sqrt(V/U) sin gamma - E / U.

struct ShootOptions {
    double ode_tol = 1e-12;
    double root_tol = 1e-10;
    bool mirror = true;
};

/// Unwrapped boundary phase Gamma(E), integrated inward from x_inf where
/// |E| / (2 w) <= 0.1 and the symmetric-gauge distance is at least 60 hbar.
/// `E_scale` (>= |E|) fixes x_inf so that a scan uses one cutoff.
double boundary_phase(const models::XpModel& m, double E, double E_scale = 0.0, double ode_tol = 1e-12);

/// Cutoff point x_inf used for energies up to |E_scale|.
double shooting_cutoff(const models::XpModel& m, double E_scale);

/// Throws UnsupportedModelError when w does not grow without bound.
SpectrumResult shoot_spectrum(const models::XpModel& m, double theta, double E_max, const ShootOptions& opts = {});

/// Decaying solution phi(x) sampled on `x_grid` (inside the domain), scaled so phi(lower) = 1.
/// In the generic gauge this is u psi = phi in the reference's coordinates.
std::vector<Complex> shoot_eigenfunction(const models::XpModel& m, double E, const std::vector<double>& x_grid,
                                         double ode_tol = 1e-12);

// ---------------------------------------------------------------------------

struct ZeroMode {
    std::optional<double> norm;  // int e^{-2z/hbar}/w dz
    bool divergent = false;
};

/// The E = 0 state e^{-z/hbar} satisfies the boundary condition only for theta = pi.
ZeroMode zero_mode(const models::XpModel& m, double theta);

/// Omega_12 = -hbar phi1*(z0) phi2(z0) + hbar^{-1} (int phi1)* (int phi2) for decaying
/// functions of the symmetric coordinate; zero on the self-adjoint domain.
Complex symmetry_defect(const std::function<Complex(double)>& phi1, const std::function<Complex(double)>& phi2,
                        double z0, double hbar);

// ---------------------------------------------------------------------------
// Constant model H = p + lp^2/p on (0, inf), with the boundary condition
// -e^{i theta} psi(0) + (lp/hbar) int psi = 0.

struct BoundState {
    double E0;
    Complex k0;     // psi = C e^{-k0 x}
    double C;       // normalization
    double mean_x;  // <x>
};

/// Present iff cos theta > 0.
std::optional<BoundState> constant_bound_state(double lp, double theta, double hbar = 1.0);

SpectrumResult constant_model_spectrum(double lp, double theta, double hbar = 1.0);

struct ScatteringState {
    double E;
    int eta;
    double u;  // |E| = 2 lp cosh u
    double k_plus, k_minus;
    Complex A, B;
};

/// Throws DomainError inside the gap |E| <= 2 lp.
ScatteringState constant_model_scattering(double E, double lp, double theta, double hbar = 1.0);

/// psi_E(x) = A e^{i k+ x} + B e^{i k- x}.
Complex scattering_wavefunction(const ScatteringState& s, double x);

/// (A*, B*) M (A', B')^T with M_ij = 1/(k_i - k'_j).
Complex constant_bilinear(const ScatteringState& s1, const ScatteringState& s2);

struct OrthonormalityReport {
    double bound_norm = 0.0;    // int |psi0|^2 by quadrature
    double bound_mean_x = 0.0;  // int x |psi0|^2 by quadrature
    std::vector<std::pair<double, double>> overlap;  // (L, |int_0^L psi0* psi_E|) for the first E
    double overlap_limit = 0.0;  // |L -> inf value| over all E
    double max_bilinear = 0.0;   // over all pairs with E != E'
};

OrthonormalityReport orthonormality_check(double lp, double theta, double hbar, const std::vector<double>& energies);

}  // namespace xp::quantum
