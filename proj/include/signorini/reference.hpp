#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "signorini/grid.hpp"

namespace signorini {

// Minimal homogeneity kappa0 = (3-a)/2.
inline double kappa0(double a) { return 0.5 * (3.0 - a); }

// Member of the (3-a)/2-homogeneous family
//   c (<x,e> + sqrt(<x,e>^2 + y^2))^s (<x,e> - s sqrt(<x,e>^2 + y^2)),  s = (1-a)/2,
// translated by `shift` in the thin directions.
struct PrototypeParams {
    double a = 0.0;
    double c = 1.0;
    std::array<double, 2> e{1.0, 0.0};
    std::array<double, 2> shift{0.0, 0.0};

    void validate() const;
};

// X = (x1, [x2,] y) with the thin dimension given by X.size() - 1.
double vhat0(const PrototypeParams& p, std::span<const double> X);

// Gradient (d/dx1, [d/dx2,] d/dy) at a point with y != 0 or <x,e> != 0.
std::vector<double> vhat0_gradient(const PrototypeParams& p, std::span<const double> X);

// Weighted vertical flux |y|^a d_y v, finite up to the thin set.
double vhat0_weighted_flux(const PrototypeParams& p, std::span<const double> X);

Field sample_prototype(GridPtr grid, const PrototypeParams& p);

struct PrototypeAudit {
    double min_thin_value = 0.0;          // min over thin nodes of vhat0(x,0)
    double max_positive_dtn = 0.0;        // max |d_y^a| over thin nodes with vhat0 > 0
    double max_interior_residual = 0.0;   // max |A vhat0| / transmissibility sum over interior nodes
    double consistency_bound = 0.0;       // allowance used for the interior residual
    double dtn_bound = 0.0;               // allowance used for the positivity-set trace
    double max_smooth_residual = 0.0;     // max |A v| / cell weight away from the origin (pointwise L_a v / |y|^a)
    double smooth_bound = 0.0;
    bool passed = false;
};

// Checks thin nonnegativity, d_y^a = 0 on the positivity set and the discrete
// equation at interior nodes for any sampled field (defaults to vhat0).
PrototypeAudit vhat0_signorini_audit(const PrototypeParams& p, GridPtr grid);
PrototypeAudit signorini_audit(const Field& sampled);

// C_s = 2^(2s-1) Gamma(s) / Gamma(1-s), s in (0,1).
double extension_constant(double s);

struct DtnCheck {
    double relative_l2_error = 0.0;
    double decay_at_top = 0.0;  // |U| at y = Y relative to the thin data for a single mode
    int iters = 0;
    bool converged = false;
};

// Solves div(y^a grad U) = 0 with U(x,0) = u_thin, U(x,Y) = 0 and zero lateral
// flux, then compares -C_s d_y^a U against the spectral symbol applied to u_thin.
// u_thin must be a finite combination of cos(k x) modes compatible with the
// Neumann box [-R,R] (R a multiple of pi / k); modes are passed explicitly.
struct CosineMode {
    double k = 1.0;
    double amplitude = 1.0;
};
DtnCheck dtn_identity_check(const GridSpec& spec, std::span<const CosineMode> modes, double tol = 1e-10,
                            int max_iter = 400000);

// Fit of a thin-field-free homogeneous profile: minimises the weighted L2
// distance on the unit half-sphere between samples and members c * vhat0(e).
struct HomogeneousFit {
    double c = 0.0;
    double theta = 0.0;  // direction e = (cos theta, sin theta) for n = 2; 0 or pi for n = 1
    double distance = 0.0;
    double relative_distance = 0.0;
};

// `sampler(X)` returns the function to fit at points X of the upper unit
// half-sphere. Coarse search over theta followed by golden-section refinement;
// c is solved in closed form for each theta.
HomogeneousFit fit_homogeneous(int n, double a, const std::function<double(std::span<const double>)>& sampler);

}  // namespace signorini
