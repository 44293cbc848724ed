#pragma once

#include <cstdint>
#include <vector>

#include "signorini/grid.hpp"

namespace signorini {

enum class ThinCondition {
    Signorini,  // min{v - psi, -d_y^a v} = 0
    Dirichlet,  // thin values prescribed by the boundary field
};

enum class LateralCondition {
    Dirichlet,  // values on |x_i| = R taken from the boundary field
    Neumann,    // zero flux through |x_i| = R
};

// Elliptic thin obstacle problem
//   div(y^a grad v) - shift y^a v = y^a f   in the box above the thin set,
//   min{v - psi, -d_y^a v} = 0              on the thin set,
// with Dirichlet data on the outer boundary. shift > 0 arises from implicit
// time stepping.
struct EllipticProblem {
    GridPtr grid;
    Field f;
    ThinField psi;
    // Values at every fixed node; entries at free nodes are ignored.
    Field boundary;
    double shift = 0.0;
    ThinCondition thin = ThinCondition::Signorini;
    LateralCondition lateral = LateralCondition::Dirichlet;
    // Extra fixed nodes (e.g. everything outside a ball). Empty means none.
    std::vector<std::uint8_t> fixed_mask;

    // Throws std::invalid_argument on shape mismatch or incompatible data.
    void validate() const;
    bool is_fixed(std::size_t node) const;
};

enum class Sweep {
    PointLexicographic,  // serial projected SOR, thin node last in each column
    LineRedBlack,        // projected column-line SOR, red-black over columns (OpenMP)
};

struct SolverParams {
    double tol = 1e-8;
    int max_iter = 200000;
    double omega = 1.5;
    std::vector<double> epsilon_schedule{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    Sweep sweep = Sweep::LineRedBlack;
    int check_every = 10;
    // Record the discrete energy after every sweep.
    bool record_energy = false;

    void validate() const;
};

struct SignoriniSolution {
    Field v;
    ThinField thin_value;  // v - psi on the thin set
    ThinField reaction;    // lambda = -d_y^a v from the discrete flux balance
    double pde_residual = 0.0;
    double comp_residual = 0.0;
    int iters = 0;
    bool converged = false;
    std::vector<double> residual_history;
    std::vector<double> energy_history;

    double contact_fraction() const;
};

struct Residuals {
    double pde = 0.0;   // max scaled equation residual at free non-thin nodes (and penalized thin nodes)
    double comp = 0.0;  // max scaled |min(v - psi, lambda)| over Signorini thin nodes
};

// Penalty nonlinearity: eps + s/eps for s <= -2 eps^2, s/(2 eps) on (-2 eps^2, 0), 0 for s >= 0.
double beta_eps(double s, double eps);

SignoriniSolution solve_pgs(const EllipticProblem& problem, const SolverParams& params);
// Same with an explicit starting field (free-node values are used as the initial iterate).
SignoriniSolution solve_pgs(const EllipticProblem& problem, const SolverParams& params, const Field& initial);

// Thin-node Neumann condition d_y^a v = beta_eps(v - psi) in place of the constraint.
SignoriniSolution solve_penalized(const EllipticProblem& problem, const SolverParams& params, double epsilon);
SignoriniSolution solve_penalized(const EllipticProblem& problem, const SolverParams& params, double epsilon,
                                  const Field& initial);

// Residual norms relative to max(|v|, |boundary|, 1e-300). Both are scaled by
// the node's diagonal so they are in units of v.
Residuals residuals(const EllipticProblem& problem, const Field& v);

// Algebraic reaction (b - A v + shift w v) / area at each thin node.
ThinField discrete_reaction(const EllipticProblem& problem, const Field& v);

// Discrete energy 1/2 sum T (dv)^2 + 1/2 sum shift w v^2 + sum w f v over free nodes.
double discrete_energy(const EllipticProblem& problem, const Field& v);

// Half-domain Dirichlet form 1/2 sum over all faces T (dv)^2.
double dirichlet_form(const WeightedGrid& grid, std::span<const double> v);

}  // namespace signorini
