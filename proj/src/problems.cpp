#include "signorini/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace signorini {

const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names{"prototype", "constant",  "tilted-prototype",
                                                "driven-F",  "quadratic", "moving-obstacle"};
    return names;
}

bool is_known_problem(const std::string& name) {
    const auto& n = problem_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

bool is_time_dependent(const std::string& name) { return name == "moving-obstacle"; }

void ProblemParams::validate() const {
    if (!is_known_problem(name)) throw std::invalid_argument("problem.name: unknown built-in problem '" + name + "'");
    grid.validate();
    if (!(c > 0.0)) throw std::invalid_argument("problem.c: amplitude must be positive");
    if (name == "tilted-prototype" && grid.n != 2) throw std::invalid_argument("problem.n: tilted-prototype needs n = 2");
    if (name == "moving-obstacle") {
        if (!(height > 0.0)) throw std::invalid_argument("problem.height: must be positive");
        if (!(slope > 0.0)) throw std::invalid_argument("problem.slope: must be positive");
        if (!(tip > 0.0)) throw std::invalid_argument("problem.tip: must be positive");
        if (nt < 2) throw std::invalid_argument("solver.nt: need at least two time levels");
        if (!(T > t0)) throw std::invalid_argument("problem.T: must exceed t0");
        // Zero lateral data must sit above the obstacle.
        for (double t : {t0, T}) {
            const double near = grid.R - std::abs(x_start + speed * t);
            if (height - slope * (std::sqrt(near * near + tip * tip) - tip) > 0.0) {
                throw std::invalid_argument("problem.x_start: obstacle support reaches the lateral boundary");
            }
        }
    }
}

PrototypeParams prototype_params(const ProblemParams& p) {
    PrototypeParams pp;
    pp.a = p.grid.a;
    pp.c = p.c;
    if (p.name == "tilted-prototype") pp.e = {std::cos(p.theta), std::sin(p.theta)};
    return pp;
}

namespace {

GridPtr grid_for(const ProblemParams& p, GridPtr grid) {
    p.validate();
    if (grid) return grid;
    return build_grid(p.grid);
}

Field sample_nodes(GridPtr g, const std::function<double(std::span<const double>)>& fn) {
    Field out(g);
    std::vector<double> X(static_cast<std::size_t>(g->n() + 1));
    for (std::size_t k = 0; k < g->node_count(); ++k) {
        const auto x = g->thin_point(g->thin_of(k));
        X[0] = x[0];
        if (g->n() == 2) X[1] = x[1];
        X[static_cast<std::size_t>(g->n())] = g->y()[g->level_of(k)];
        out.values[k] = fn(X);
    }
    return out;
}

ObstacleFn moving_cap(const ProblemParams& p) {
    const double h = p.height, k = p.slope, rho = p.tip, c = p.speed, x0 = p.x_start;
    return [=](const std::array<double, 2>& x, double t) {
        const double z = x[0] - x0 - c * t;
        return h - k * (std::sqrt(z * z + rho * rho) - rho);
    };
}

}  // namespace

std::optional<Field> exact_solution(const ProblemParams& p, GridPtr grid) {
    grid = grid_for(p, grid);
    const double a = grid->a();
    if (p.name == "prototype" || p.name == "tilted-prototype") return sample_prototype(grid, prototype_params(p));
    if (p.name == "constant") return Field(grid, p.value);
    if (p.name == "quadratic") {
        return sample_nodes(grid, [&](std::span<const double> X) {
            const double y = X.back();
            return p.c * (X[0] * X[0] - y * y / (1.0 + a));
        });
    }
    return std::nullopt;
}

EllipticProblem make_elliptic_problem(const ProblemParams& p, GridPtr grid) {
    grid = grid_for(p, grid);
    EllipticProblem e;
    e.grid = grid;
    e.f = Field(grid);
    e.psi = ThinField(grid);
    if (auto exact = exact_solution(p, grid)) {
        e.boundary = *exact;
    } else if (p.name == "driven-F") {
        e.boundary = sample_prototype(grid, prototype_params(p));
        e.f = Field(grid, p.f0);
    } else if (p.name == "moving-obstacle") {
        e.boundary = Field(grid);
        const ObstacleFn psi = moving_cap(p);
        for (std::size_t t = 0; t < grid->thin_count(); ++t) e.psi.values[t] = psi(grid->thin_point(t), p.t0);
    } else {
        throw std::invalid_argument("problem.name: no elliptic instance for '" + p.name + "'");
    }
    return e;
}

ParabolicProblem make_parabolic_problem(const ProblemParams& p, const SolverParams& solver, GridPtr grid) {
    grid = grid_for(p, grid);
    ParabolicProblem q;
    q.grid = grid;
    q.t0 = p.t0;
    q.T = p.T;
    q.nt = p.nt;
    if (p.name == "moving-obstacle") {
        q.psi = moving_cap(p);
        const SignoriniSolution s = solve_pgs(make_elliptic_problem(p, grid), solver);
        if (!s.converged) throw std::runtime_error("moving-obstacle: initial elliptic solve did not converge");
        q.phi0 = s.v;
        q.lateral = [](std::span<const double>, double) { return 0.0; };
        return q;
    }
    if (!exact_solution(p, grid)) throw std::invalid_argument("problem.name: no parabolic instance for '" + p.name + "'");
    // Start from the discrete steady state so the march is stationary to solver tolerance.
    const SignoriniSolution s = solve_pgs(make_elliptic_problem(p, grid), solver);
    if (!s.converged) throw std::runtime_error(p.name + ": initial elliptic solve did not converge");
    q.phi0 = s.v;
    return q;
}

double graph_window_lo(const ProblemParams& p) {
    if (p.name == "moving-obstacle") return p.x_start + p.speed * p.T;
    return -1e300;
}

Field zero_obstacle_rhs(const Trajectory& traj, const ParabolicProblem& problem, std::size_t k) {
    const WeightedGrid& g = *problem.grid;
    const double t = traj.times.at(k);
    Field f = problem.sample_F(t);
    for (double& v : f.values) v = -v;
    if (k > 0) {
        const auto& ut = traj.ut.at(k).values;
        for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += ut[i];
    }
    if (problem.psi) {
        const double h = g.hx();
        for (std::size_t th = 0; th < g.thin_count(); ++th) {
            const auto x = g.thin_point(th);
            const double p0 = problem.psi(x, t);
            double lap = 0.0;
            for (int axis = 0; axis < g.n(); ++axis) {
                auto xp = x, xm = x;
                xp[axis] += h;
                xm[axis] -= h;
                lap += (problem.psi(xp, t) - 2.0 * p0 + problem.psi(xm, t)) / (h * h);
            }
            for (int j = 0; j < g.ny(); ++j) f.values[g.index(th, j)] -= lap;
        }
    }
    f.time = t;
    return f;
}

}  // namespace signorini
