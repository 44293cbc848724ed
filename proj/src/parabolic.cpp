#include "signorini/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace signorini {

void ParabolicProblem::validate() const {
    if (!grid) throw std::invalid_argument("parabolic: missing grid");
    if (nt < 1) throw std::invalid_argument("parabolic.nt: need at least one time level");
    if (nt > 1 && !(T > t0)) throw std::invalid_argument("parabolic.T: must exceed t0");
    if (phi0.values.size() != grid->node_count()) throw std::invalid_argument("parabolic.phi0: shape does not match grid");
    const ThinField psi0 = sample_psi(t0);
    const double scale = std::max(1.0, phi0.max_abs());
    for (std::size_t t = 0; t < grid->thin_count(); ++t) {
        if (phi0.values[grid->index(t, 0)] < psi0.values[t] - 1e-10 * scale) {
            throw std::invalid_argument("parabolic.phi0: below the obstacle at thin node " + std::to_string(t));
        }
    }
}

namespace {

std::vector<double> node_point(const WeightedGrid& g, std::size_t k) {
    const auto xp = g.thin_point(g.thin_of(k));
    std::vector<double> X(static_cast<std::size_t>(g.n() + 1));
    X[0] = xp[0];
    if (g.n() == 2) X[1] = xp[1];
    X[static_cast<std::size_t>(g.n())] = g.y()[g.level_of(k)];
    return X;
}

}  // namespace

Field ParabolicProblem::sample_F(double t) const {
    Field out(grid);
    if (!F) return out;
    for (std::size_t k = 0; k < grid->node_count(); ++k) out.values[k] = F(node_point(*grid, k), t);
    return out;
}

ThinField ParabolicProblem::sample_psi(double t) const {
    ThinField out(grid);
    if (!psi) return out;
    for (std::size_t i = 0; i < grid->thin_count(); ++i) out.values[i] = psi(grid->thin_point(i), t);
    return out;
}

Field ParabolicProblem::sample_lateral(double t) const {
    if (!lateral) return phi0;
    Field out(grid);
    for (std::size_t k = 0; k < grid->node_count(); ++k) out.values[k] = lateral(node_point(*grid, k), t);
    return out;
}

EllipticProblem implicit_step_problem(const Field& prev, double t_next, const ParabolicProblem& problem) {
    const double dt = problem.dt();
    if (!(dt > 0.0)) throw std::invalid_argument("step_implicit: dt must be positive");
    EllipticProblem e;
    e.grid = problem.grid;
    e.shift = 1.0 / dt;
    e.f = problem.sample_F(t_next);
    for (std::size_t k = 0; k < e.f.values.size(); ++k) e.f.values[k] = -e.f.values[k] - prev.values[k] / dt;
    e.psi = problem.sample_psi(t_next);
    e.boundary = problem.sample_lateral(t_next);
    e.lateral = problem.lateral_condition;
    return e;
}

SignoriniSolution step_implicit(const Field& prev, double t_next, const ParabolicProblem& problem,
                                const SolverParams& params) {
    const EllipticProblem e = implicit_step_problem(prev, t_next, problem);
    SignoriniSolution sol = solve_pgs(e, params, prev);
    sol.v.time = t_next;
    return sol;
}

namespace {

SignoriniSolution initial_slice(const ParabolicProblem& problem) {
    SignoriniSolution s;
    s.v = problem.phi0;
    s.v.time = problem.t0;
    const ThinField psi = problem.sample_psi(problem.t0);
    s.thin_value = ThinField(problem.grid);
    for (std::size_t t = 0; t < problem.grid->thin_count(); ++t) {
        s.thin_value.values[t] = s.v.values[problem.grid->index(t, 0)] - psi.values[t];
    }
    s.reaction = ThinField(problem.grid);
    s.converged = true;
    return s;
}

template <class Step>
Trajectory march(const ParabolicProblem& problem, Step&& step) {
    problem.validate();
    Trajectory traj;
    traj.dt = problem.dt();
    traj.times.push_back(problem.t0);
    traj.fields.push_back(initial_slice(problem));
    traj.ut.emplace_back();
    for (int k = 1; k < problem.nt; ++k) {
        const double t = problem.time(k);
        SignoriniSolution sol = step(traj.fields.back().v, t);
        if (!sol.converged) {
            throw StepFailure(k, "parabolic: inner solve did not converge at step " + std::to_string(k) +
                                     " (residual " + std::to_string(std::max(sol.pde_residual, sol.comp_residual)) + ")");
        }
        Field ut(problem.grid);
        const auto& prev = traj.fields.back().v.values;
        for (std::size_t i = 0; i < ut.values.size(); ++i) ut.values[i] = (sol.v.values[i] - prev[i]) / traj.dt;
        ut.time = t;
        traj.times.push_back(t);
        traj.fields.push_back(std::move(sol));
        traj.ut.push_back(std::move(ut));
    }
    return traj;
}

}  // namespace

Trajectory solve(const ParabolicProblem& problem, const SolverParams& params) {
    return march(problem, [&](const Field& prev, double t) { return step_implicit(prev, t, problem, params); });
}

Trajectory penalized_march(const ParabolicProblem& problem, const SolverParams& params, double epsilon) {
    return march(problem, [&](const Field& prev, double t) {
        const EllipticProblem e = implicit_step_problem(prev, t, problem);
        SignoriniSolution sol = solve_penalized(e, params, epsilon, prev);
        sol.v.time = t;
        return sol;
    });
}

double reduction_check(const Trajectory& traj, const ParabolicProblem& problem, int k) {
    if (k < 1 || static_cast<std::size_t>(k) >= traj.size()) throw std::out_of_range("reduction_check: step index");
    EllipticProblem e;
    e.grid = problem.grid;
    e.f = problem.sample_F(traj.times[k]);
    const auto& ut = traj.ut[static_cast<std::size_t>(k)].values;
    for (std::size_t i = 0; i < e.f.values.size(); ++i) e.f.values[i] = ut[i] - e.f.values[i];
    e.psi = problem.sample_psi(traj.times[k]);
    e.boundary = traj.fields[static_cast<std::size_t>(k)].v;
    e.lateral = problem.lateral_condition;
    const Residuals r = residuals(e, traj.fields[static_cast<std::size_t>(k)].v);
    return std::max(r.pde, r.comp);
}

double time_derivative_bound(const Trajectory& traj, const Cylinder& region) {
    double sup = 0.0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        if (traj.times[k] < region.t_begin || traj.times[k] > region.t_end) continue;
        const Field& ut = traj.ut[k];
        const WeightedGrid& g = *ut.grid;
        for (std::size_t t = 0; t < g.thin_count(); ++t) {
            const auto x = g.thin_point(t);
            double d = std::abs(x[0] - region.center[0]);
            if (g.n() == 2) d = std::max(d, std::abs(x[1] - region.center[1]));
            if (d > region.radius) continue;
            for (int j = 0; j < g.ny() && g.y()[j] <= region.y_max; ++j) {
                sup = std::max(sup, std::abs(ut.values[g.index(t, j)]));
            }
        }
    }
    return sup;
}

double trajectory_distance(const Trajectory& A, const Trajectory& B) {
    if (A.size() != B.size()) throw std::invalid_argument("trajectory_distance: step counts differ");
    double d = 0.0;
    for (std::size_t k = 0; k < A.size(); ++k) {
        const auto& a = A.fields[k].v.values;
        const auto& b = B.fields[k].v.values;
        if (a.size() != b.size()) throw std::invalid_argument("trajectory_distance: grids differ");
        for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

}  // namespace signorini
