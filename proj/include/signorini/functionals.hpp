#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "signorini/grid.hpp"
#include "signorini/parabolic.hpp"

namespace signorini {

struct FrequencyParams {
    double delta = 0.75;   // truncation exponent (1 + delta > kappa0 required)
    double sigma = 0.5;    // parabolic truncation exponent
    double ell = 4.0;      // parabolic truncation order
    double C_mono = 0.0;   // constant C in e^{C r^{1-delta}}
    double C_par = 0.0;    // constant C in e^{C r^{1-sigma}}

    // Throws std::invalid_argument (names the field); needs a for the gap condition.
    void validate(double a) const;
};

// Truncation exponent with gap width (1+a)/2: delta = (1-a)/4 + 1/2.
double default_delta(double a);

struct QuadratureOptions {
    int resolution = 32;    // polar panels on the half-sphere
    int radial_points = 24; // Gauss-Legendre points for volume integrals in the radius
    bool estimate_error = true;  // repeat with resolution/2 and report the difference
};

// Sampled r -> functional values on balls centred at a thin point.
// Volume and surface integrals are over the full ball (the even reflection
// doubles the upper half).
struct RadialProfile {
    int n = 1;
    double a = 0.0;
    std::array<double, 2> center{0.0, 0.0};
    std::optional<double> time;
    std::vector<double> radii;

    std::vector<double> H, G, D;
    std::vector<double> I;           // surface form  int v <grad v, nu> |y|^a
    std::vector<double> I_identity;  // D + int v f |y|^a
    std::vector<double> vf;          // int_B v f |y|^a
    std::vector<double> N;           // r I / H
    std::vector<double> dissipation; // (2/r^{n+2}) int (d_nu v - kappa0 v / r)^2 |y|^a
    std::vector<double> quad_err;    // relative error estimate of (H, I) from two rule orders
    std::vector<std::uint8_t> floored;  // H below the floor

    // Filled by the functions below.
    std::vector<double> Phi_delta;
    std::vector<std::uint8_t> truncated;
    std::vector<double> W_k0, W_0, W_identity;

    std::vector<double> H_par, Phi_par;
    std::vector<double> H_par_tail;  // kernel mass outside the box (tail bound)

    std::size_t size() const { return radii.size(); }
};

// H, G, D, I (both forms), N and the Weiss dissipation density on balls
// B_r(center); f may be empty (treated as 0). Throws if a ball leaves the box.
RadialProfile elliptic_quantities(const Field& v, const Field* f, const std::array<double, 2>& center,
                                  const std::vector<double>& radii, const QuadratureOptions& opts = {});

double h_floor(const Field& v);

// Phi_delta = e^{C r^{1-delta}} (n + a + 2N) on {H > r^{n+a+2+2 delta}}, else
// e^{C r^{1-delta}} (n + a + 2 + 2 delta).
void truncated_almgren(RadialProfile& p, const FrequencyParams& params);

// W_kappa = I / r^{n+a-1+2kappa} - kappa H / r^{n+a+2kappa}, W_0 with D in place of I,
// and W_identity = H / r^{n+3} (N - kappa0) for kappa = kappa0.
void weiss(RadialProfile& p);
std::vector<double> weiss_kappa(const RadialProfile& p, double kappa);

struct MonotonicityAudit {
    bool passed = false;
    double C = 0.0;  // smallest C >= 0 making the corrected sequence nondecreasing
    int violation_index = -1;  // first violating step at C = 0 (-1 if none)
    double min_derivative_margin = 0.0;  // min over steps of (dW/dr + C p r^{p-1}) - dissipation
    std::vector<double> corrected;
};

// r -> W(v,r) + C r^{(1+a)/2} on the sampled radii; slack per step. Also reports the
// finite-difference derivative against the dissipation term.
MonotonicityAudit weiss_monotonicity_audit(const RadialProfile& p, double slack = 1e-3, double C_max = 1e6);
// Generic check of a sampled sequence with correction C * r^p.
MonotonicityAudit monotonicity_audit(const std::vector<double>& radii, const std::vector<double>& values, double p,
                                     double slack, double C_max);

// Phi_delta nondecreasing with slack per step.
bool is_nondecreasing(const std::vector<double>& values, double slack, int* violation = nullptr);

// Smallest C in [0, C_max] making every profile's Phi_delta nondecreasing (slack per step);
// returns nullopt if none.
std::optional<double> calibrate_almgren_constant(std::vector<RadialProfile> profiles, FrequencyParams params,
                                                 double slack = 1e-3, double C_max = 50.0);

// Almgren rescaling v(c + rX) / d_r, d_r = (H(v,r) / r^{n+a})^{1/2}, on a unit box grid.
Field almgren_rescale(const Field& v, const std::array<double, 2>& center, double r, const QuadratureOptions& opts = {});
// Homogeneous rescaling v(c + rX) / r^{(3-a)/2} on a unit box grid.
Field homogeneous_rescale(const Field& v, const std::array<double, 2>& center, double r);

// Lemma-style identity checks: relative mismatch of I vs I_identity and of the
// finite-difference H' vs (n+a)/r H + 2I at interior radii.
struct IdentityCheck {
    double energy_identity = 0.0;
    double h_prime_identity = 0.0;
};
IdentityCheck identity_checks(const RadialProfile& p);

// Weighted backward heat kernel c(n,a) |t|^{-(n+a+1)/2} exp(|X|^2 / 4t), t < 0.
double heat_kernel(int n, double a, std::span<const double> X, double t);
double heat_kernel_constant(int n, double a);

struct ParabolicOptions {
    int hermite_points = 16;   // per thin axis
    int laguerre_points = 16;  // vertical
    int time_points = 16;
};

// Zero-obstacle slices v_k = U_k - psi(., t_k) (psi extended constant in y).
std::vector<Field> zero_obstacle_slices(const Trajectory& traj, const ParabolicProblem& problem);

// H^par(r) = r^{-2} int_{t0-r^2}^{t0} int U^2 G_a(X - x0, t - t0) |y|^a dX dt over the half
// space; slices are interpolated linearly in time. Kernel mass at points outside
// the box is dropped and reported in H_par_tail.
RadialProfile parabolic_H(const std::vector<Field>& slices, const std::vector<double>& times,
                          const std::array<double, 2>& center, double t0, const std::vector<double>& radii,
                          const ParabolicOptions& opts = {});

struct ParabolicFrequency {
    RadialProfile profile;
    double kappa_hat = 0.0;  // value at the smallest radius
    bool noisy = false;      // adjacent estimates differ by more than 10%
    bool monotone = false;   // nondecreasing with 1e-2 slack
};

ParabolicFrequency parabolic_frequency(const std::vector<Field>& slices, const std::vector<double>& times,
                                       const std::array<double, 2>& center, double t0,
                                       const std::vector<double>& radii, const FrequencyParams& params,
                                       const ParabolicOptions& opts = {});

// Geometric radii from r_min to r_max (inclusive).
std::vector<double> geometric_radii(double r_min, double r_max, int count);

// Largest radius of a ball centred at `center` that stays inside the box.
double max_ball_radius(const WeightedGrid& g, const std::array<double, 2>& center);
// Smallest trusted radius: four cells of the coarser of the thin and vertical spacings near the thin set.
double min_trusted_radius(const WeightedGrid& g);

void write_profile_csv(std::ostream& os, const RadialProfile& p);

}  // namespace signorini
