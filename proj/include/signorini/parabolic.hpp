#pragma once

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "signorini/elliptic.hpp"

namespace signorini {

// Space-time data as functions of a node point X = (x1, [x2,] y) and time.
using SpaceTimeFn = std::function<double(std::span<const double> X, double t)>;
// Thin obstacle as a function of the thin point x = (x1, x2) and time.
using ObstacleFn = std::function<double(const std::array<double, 2>& x, double t)>;

// Parabolic thin obstacle problem
//   |y|^a U_t - div(|y|^a grad U) = |y|^a F   above the thin set,
//   min{U - psi, -d_y^a U} = 0                 on the thin set,
// with U = lateral on the outer boundary and U = phi0 at t0.
// The march uses nt levels t_k = t0 + k (T - t0) / (nt - 1), k = 0..nt-1.
struct ParabolicProblem {
    GridPtr grid;
    double t0 = 0.0;
    double T = 1.0;
    int nt = 11;
    SpaceTimeFn F;        // empty means F = 0
    ObstacleFn psi;       // empty means psi = 0
    SpaceTimeFn lateral;  // outer-boundary data; empty means the values of phi0
    Field phi0;
    LateralCondition lateral_condition = LateralCondition::Dirichlet;

    void validate() const;
    double dt() const { return nt > 1 ? (T - t0) / (nt - 1) : 0.0; }
    double time(int k) const { return t0 + k * dt(); }

    Field sample_F(double t) const;
    ThinField sample_psi(double t) const;
    Field sample_lateral(double t) const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SignoriniSolution> fields;  // fields[0] carries phi0
    std::vector<Field> ut;                  // ut[k] = (U_k - U_{k-1}) / dt, ut[0] empty
    double dt = 0.0;

    std::size_t size() const { return times.size(); }
};

// Elliptic problem of one implicit Euler step:
//   div(y^a grad U) - y^a U / dt = y^a (-F(t_next) - U_prev / dt),  obstacle psi(t_next).
EllipticProblem implicit_step_problem(const Field& prev, double t_next, const ParabolicProblem& problem);

SignoriniSolution step_implicit(const Field& prev, double t_next, const ParabolicProblem& problem,
                                const SolverParams& params);

// Thrown when an inner solve fails; carries the failing step index.
struct StepFailure : std::runtime_error {
    int step;
    StepFailure(int k, const std::string& what) : std::runtime_error(what), step(k) {}
};

// Full implicit Euler march. Throws StepFailure if a step does not converge.
Trajectory solve(const ParabolicProblem& problem, const SolverParams& params);

// Same march with the penalized thin condition at every step (F_eps = F).
Trajectory penalized_march(const ParabolicProblem& problem, const SolverParams& params, double epsilon);

// Residual of slice k for the time-frozen problem
//   div(y^a grad U_k) = y^a (ut_k - F(t_k)),  min{U_k - psi, -d_y^a U_k} = 0,
// measured with the elliptic residual norms; returns max(pde, comp).
double reduction_check(const Trajectory& traj, const ParabolicProblem& problem, int k);

// Cylinder {|x - center| <= radius, y <= y_max, t in [t_begin, t_end]} in the thin
// norm (max over axes).
struct Cylinder {
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.5;
    double y_max = 0.5;
    double t_begin = -1e300;
    double t_end = 1e300;
};

// sup |ut| over nodes and steps inside the cylinder.
double time_derivative_bound(const Trajectory& traj, const Cylinder& region);

// Max over steps of ||U_k - V_k||_inf (trajectories on the same grid and step count).
double trajectory_distance(const Trajectory& A, const Trajectory& B);

}  // namespace signorini
