#pragma once

#include <optional>
#include <string>
#include <vector>

#include "signorini/elliptic.hpp"
#include "signorini/parabolic.hpp"
#include "signorini/reference.hpp"

namespace signorini {

// Parameters of the built-in problems. Only the fields relevant to `name` are read.
struct ProblemParams {
    std::string name = "prototype";
    GridSpec grid;
    double c = 1.0;          // prototype amplitude
    double theta = 0.3;      // tilt angle of e (tilted-prototype)
    double value = 1.0;      // constant data
    double f0 = 1.0;         // constant right-hand side (driven-F)
    // moving-obstacle: rounded tent psi = height - slope (sqrt(z^2 + tip^2) - tip),
    // z = x1 - x_start - speed t; nearly harmonic away from the tip.
    double height = 0.3;
    double slope = 0.5;
    double tip = 0.1;
    double speed = 0.5;
    double x_start = -0.1;
    double t0 = 0.0;
    double T = 0.4;
    int nt = 21;

    void validate() const;
};

// prototype, constant, tilted-prototype, driven-F, quadratic, moving-obstacle.
const std::vector<std::string>& problem_names();
bool is_known_problem(const std::string& name);
bool is_time_dependent(const std::string& name);

// Elliptic instance (moving-obstacle is frozen at t0).
EllipticProblem make_elliptic_problem(const ProblemParams& p, GridPtr grid = nullptr);

// Parabolic instance started from the discrete elliptic solution at t0 (for the
// stationary problems this is their discrete steady state).
ParabolicProblem make_parabolic_problem(const ProblemParams& p, const SolverParams& solver, GridPtr grid = nullptr);

// Closed-form solution where the problem has one (prototype, tilted-prototype,
// constant, quadratic).
std::optional<Field> exact_solution(const ProblemParams& p, GridPtr grid);

// Prototype parameters behind a prototype-like problem.
PrototypeParams prototype_params(const ProblemParams& p);

// Lower end of the graph window along e1: the moving obstacle's contact set is an
// interval, and only its leading front (ahead of the final tip position) is a graph.
double graph_window_lo(const ProblemParams& p);

// Right-hand side of the zero-obstacle slice v = U - psi of a parabolic slice:
// f_v = ut - F - Laplacian_x psi, with the thin Laplacian of psi by centred differences.
Field zero_obstacle_rhs(const Trajectory& traj, const ParabolicProblem& problem, std::size_t k);

}  // namespace signorini
