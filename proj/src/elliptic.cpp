#include "signorini/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace signorini {

void EllipticProblem::validate() const {
    if (!grid) throw std::invalid_argument("problem: missing grid");
    const std::size_t nodes = grid->node_count();
    if (f.values.size() != nodes) throw std::invalid_argument("problem.f: shape does not match grid");
    if (boundary.values.size() != nodes) throw std::invalid_argument("problem.boundary: shape does not match grid");
    if (psi.values.size() != grid->thin_count()) throw std::invalid_argument("problem.psi: shape does not match thin set");
    if (!fixed_mask.empty() && fixed_mask.size() != nodes) throw std::invalid_argument("problem.fixed_mask: shape does not match grid");
    if (!(shift >= 0.0) || !std::isfinite(shift)) throw std::invalid_argument("problem.shift: must be finite and >= 0");
    for (double v : f.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("problem.f: non-finite value");
    }
    if (thin == ThinCondition::Signorini) {
        // Compatibility on the part of the thin set where data is prescribed.
        for (std::size_t t = 0; t < grid->thin_count(); ++t) {
            const std::size_t k = grid->index(t, 0);
            if (!is_fixed(k)) continue;
            const double gap = boundary.values[k] - psi.values[t];
            if (gap < -1e-12 * std::max(1.0, std::abs(psi.values[t]))) {
                throw std::invalid_argument("problem.boundary: Dirichlet data below the obstacle at thin node " +
                                            std::to_string(t));
            }
        }
    }
}

bool EllipticProblem::is_fixed(std::size_t node) const {
    if (!fixed_mask.empty() && fixed_mask[node]) return true;
    const int j = grid->level_of(node);
    if (j == grid->ny() - 1) return true;
    if (j == 0 && thin == ThinCondition::Dirichlet) return true;
    return lateral == LateralCondition::Dirichlet && grid->on_lateral_boundary(grid->thin_of(node));
}

void SolverParams::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("solver.tol: must be positive");
    if (max_iter < 0) throw std::invalid_argument("solver.max_iter: must be non-negative");
    if (!(omega > 0.0 && omega < 2.0)) throw std::invalid_argument("solver.omega: must lie in (0,2)");
    for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
        if (!(epsilon_schedule[i] > 0.0)) throw std::invalid_argument("solver.epsilon_schedule: entries must be positive");
        if (i > 0 && !(epsilon_schedule[i] < epsilon_schedule[i - 1])) {
            throw std::invalid_argument("solver.epsilon_schedule: must be strictly decreasing");
        }
    }
    if (check_every < 1) throw std::invalid_argument("solver.check_every: must be >= 1");
}

double SignoriniSolution::contact_fraction() const {
    if (thin_value.values.empty()) return 0.0;
    const double scale = std::max(v.max_abs(), 1e-300);
    std::size_t contact = 0;
    for (double s : thin_value.values) contact += s <= 1e-7 * scale ? 1 : 0;
    return static_cast<double>(contact) / static_cast<double>(thin_value.values.size());
}

double beta_eps(double s, double eps) {
    if (s >= 0.0) return 0.0;
    if (s > -2.0 * eps * eps) return s / (2.0 * eps);
    return eps + s / eps;
}

namespace {

enum class Closure { Signorini, Penalized };

// Solves D s + A beta_eps(s) = Q for s; the left side is strictly increasing.
double solve_penalty_scalar(double D, double A, double Q, double eps) {
    if (Q >= 0.0) return Q / D;
    const double mid = Q / (D + A / (2.0 * eps));
    if (mid > -2.0 * eps * eps) return mid;
    return (Q - A * eps) / (D + A / eps);
}

struct Neighbor {
    std::size_t thin;
    double factor;  // transverse dx for n = 2, 1 for n = 1
};

class Kernel {
public:
    Kernel(const EllipticProblem& p, Closure closure, double eps, double omega)
        : p_(p), g_(*p.grid), closure_(closure), eps_(eps), omega_(omega) {
        const std::size_t nodes = g_.node_count();
        fixed_.resize(nodes);
        b_.resize(nodes);
        m_.resize(nodes);
        for (std::size_t k = 0; k < nodes; ++k) {
            fixed_[k] = p.is_fixed(k) ? 1 : 0;
            const double w = g_.cell_weight(k);
            b_[k] = w * p.f.values[k];
            m_[k] = p.shift * w;
        }
        neighbors_.resize(g_.thin_count());
        for (std::size_t t = 0; t < g_.thin_count(); ++t) {
            const auto c = g_.thin_coords(t);
            for (int axis = 0; axis < g_.n(); ++axis) {
                for (int dir : {-1, 1}) {
                    const auto nb = g_.thin_neighbor(t, axis, dir);
                    if (!nb) continue;
                    const double factor = g_.n() == 2 ? g_.dx(c[1 - axis]) : 1.0;
                    neighbors_[t].push_back({*nb, factor});
                }
            }
            bool any_free = false;
            for (int j = 0; j < g_.ny(); ++j) any_free |= !fixed_[g_.index(t, j)];
            if (any_free) {
                const int parity = g_.n() == 1 ? c[0] % 2 : (c[0] + c[1]) % 2;
                (parity == 0 ? red_ : black_).push_back(t);
            }
        }
        txj_.resize(static_cast<std::size_t>(g_.ny()));
        for (int j = 0; j < g_.ny(); ++j) txj_[j] = g_.wy(j) / g_.hx();
    }

    bool fixed(std::size_t k) const { return fixed_[k] != 0; }

    // Equation data at a free node: D u = q (+ thin closure).
    void node_data(std::span<const double> u, std::size_t t, int j, double& D, double& q) const {
        const std::size_t k = g_.index(t, j);
        const double area = g_.thin_area(t);
        D = m_[k];
        q = -b_[k];
        if (j > 0) {
            const double T = g_.ty(j - 1) * area;
            D += T;
            q += T * u[k - 1];
        }
        if (j < g_.ny() - 1) {
            const double T = g_.ty(j) * area;
            D += T;
            q += T * u[k + 1];
        }
        for (const auto& nb : neighbors_[t]) {
            const double T = txj_[j] * nb.factor;
            D += T;
            q += T * u[g_.index(nb.thin, j)];
        }
    }

    double thin_update(double D, double q, double area, double psi) const {
        if (closure_ == Closure::Signorini) return std::max(q / D, psi);
        return psi + solve_penalty_scalar(D, area, q - D * psi, eps_);
    }

    double relax_thin(double old, double target, double psi) const {
        const double next = old + omega_ * (target - old);
        return closure_ == Closure::Signorini ? std::max(next, psi) : next;
    }

    void point_sweep(std::vector<double>& u) const {
        const int ny = g_.ny();
        for (std::size_t t = 0; t < g_.thin_count(); ++t) {
            for (int j = ny - 2; j >= 0; --j) {
                const std::size_t k = g_.index(t, j);
                if (fixed_[k]) continue;
                double D, q;
                node_data(u, t, j, D, q);
                if (j == 0) {
                    const double psi = p_.psi.values[t];
                    u[k] = relax_thin(u[k], thin_update(D, q, g_.thin_area(t), psi), psi);
                } else {
                    u[k] += omega_ * (q / D - u[k]);
                }
            }
        }
    }

    void line_sweep(std::vector<double>& u) const {
        for (const auto* color : {&red_, &black_}) {
            const auto count = static_cast<std::ptrdiff_t>(color->size());
#pragma omp parallel
            {
                std::vector<double> alpha(static_cast<std::size_t>(g_.ny()));
                std::vector<double> beta(static_cast<std::size_t>(g_.ny()));
#pragma omp for schedule(static)
                for (std::ptrdiff_t c = 0; c < count; ++c) {
                    column_solve(u, (*color)[static_cast<std::size_t>(c)], alpha, beta);
                }
            }
        }
    }

    // Exact solve of the column subproblem (with its one-node constraint at the
    // bottom) followed by over-relaxation; x-neighbours are held fixed.
    void column_solve(std::vector<double>& u, std::size_t t, std::vector<double>& alpha, std::vector<double>& beta) const {
        const int ny = g_.ny();
        const double area = g_.thin_area(t);
        const std::size_t base = g_.index(t, 0);
        // Elimination from the top: u_j = alpha_j u_{j-1} + beta_j.
        double alpha_up = 0.0, beta_up = 0.0;
        double den0 = 1.0, q0 = 0.0;
        for (int j = ny - 1; j >= 0; --j) {
            const std::size_t k = base + static_cast<std::size_t>(j);
            if (fixed_[k]) {
                alpha[j] = 0.0;
                beta[j] = u[k];
                alpha_up = 0.0;
                beta_up = u[k];
                continue;
            }
            double d = m_[k];
            double r = -b_[k];
            for (const auto& nb : neighbors_[t]) {
                const double T = txj_[j] * nb.factor;
                d += T;
                r += T * u[g_.index(nb.thin, j)];
            }
            double lower = 0.0;
            if (j > 0) {
                lower = g_.ty(j - 1) * area;
                d += lower;
            }
            if (j < ny - 1) {
                const double upper = g_.ty(j) * area;
                d += upper;
                // Row: -lower u_{j-1} + d u_j - upper u_{j+1} = r.
                d -= upper * alpha_up;
                r += upper * beta_up;
            }
            if (j == 0) {
                den0 = d;
                q0 = r;
            } else {
                alpha[j] = lower / d;
                beta[j] = r / d;
            }
            alpha_up = alpha[j];
            beta_up = beta[j];
        }
        double below;
        if (fixed_[base]) {
            below = u[base];
        } else {
            const double psi = p_.psi.values[t];
            const double target = thin_update(den0, q0, area, psi);
            u[base] = relax_thin(u[base], target, psi);
            below = target;
        }
        // Back substitution with the exact column values, relaxing each node.
        for (int j = 1; j < ny; ++j) {
            const std::size_t k = base + static_cast<std::size_t>(j);
            if (fixed_[k]) {
                below = u[k];
                continue;
            }
            const double target = alpha[j] * below + beta[j];
            u[k] += omega_ * (target - u[k]);
            below = target;
        }
    }

    double energy(std::span<const double> u) const {
        double e = dirichlet_form(g_, u);
        for (std::size_t k = 0; k < g_.node_count(); ++k) {
            if (fixed_[k]) continue;
            e += 0.5 * m_[k] * u[k] * u[k] + b_[k] * u[k];
        }
        return e;
    }

    Residuals residuals(std::span<const double> u) const {
        double scale = 1e-300;
        for (std::size_t k = 0; k < g_.node_count(); ++k) scale = std::max(scale, std::abs(u[k]));
        double pde = 0.0, comp = 0.0;
        for (std::size_t k = 0; k < g_.node_count(); ++k) {
            if (fixed_[k]) continue;
            const std::size_t t = g_.thin_of(k);
            const int j = g_.level_of(k);
            double D, q;
            node_data(u, t, j, D, q);
            const double res = q - D * u[k];  // flux_sum - shift w u - b
            if (j == 0) {
                const double s = u[k] - p_.psi.values[t];
                const double lambda = -res / D;
                comp = std::max(comp, std::abs(std::min(s, lambda)));
                if (closure_ == Closure::Penalized) {
                    const double area = g_.thin_area(t);
                    pde = std::max(pde, std::abs(res - area * beta_eps(s, eps_)) / D);
                }
            } else {
                pde = std::max(pde, std::abs(res) / D);
            }
        }
        return {pde / scale, comp / scale};
    }

    ThinField reaction(const Field& u) const {
        ThinField out(p_.grid);
        for (std::size_t t = 0; t < g_.thin_count(); ++t) {
            const std::size_t k = g_.index(t, 0);
            double D, q;
            node_data(u.values, t, 0, D, q);
            out.values[t] = (D * u.values[k] - q) / g_.thin_area(t);
        }
        return out;
    }

private:
    const EllipticProblem& p_;
    const WeightedGrid& g_;
    Closure closure_;
    double eps_;
    double omega_;
    std::vector<std::uint8_t> fixed_;
    std::vector<double> b_;
    std::vector<double> m_;
    std::vector<std::vector<Neighbor>> neighbors_;
    std::vector<std::size_t> red_;
    std::vector<std::size_t> black_;
    std::vector<double> txj_;
};

Field starting_field(const EllipticProblem& p, const Field* initial) {
    // Without an explicit iterate the free nodes start from zero.
    Field u = initial ? *initial : Field(p.grid, 0.0);
    if (u.values.size() != p.grid->node_count()) throw std::invalid_argument("solver: initial field shape mismatch");
    u.grid = p.grid;
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        if (p.is_fixed(k)) u.values[k] = p.boundary.values[k];
    }
    if (p.thin == ThinCondition::Signorini) {
        for (std::size_t t = 0; t < p.grid->thin_count(); ++t) {
            const std::size_t k = p.grid->index(t, 0);
            if (!p.is_fixed(k)) u.values[k] = std::max(u.values[k], p.psi.values[t]);
        }
    }
    return u;
}

SignoriniSolution run(const EllipticProblem& problem, const SolverParams& params, Closure closure, double eps,
                      const Field* initial) {
    problem.validate();
    params.validate();
    const Kernel kernel(problem, closure, eps, params.omega);
    SignoriniSolution sol;
    sol.v = starting_field(problem, initial);
    auto& u = sol.v.values;

    auto check = [&]() {
        const Residuals r = kernel.residuals(u);
        sol.pde_residual = r.pde;
        sol.comp_residual = r.comp;
        const double worst = closure == Closure::Signorini ? std::max(r.pde, r.comp) : r.pde;
        sol.residual_history.push_back(worst);
        return worst <= params.tol;
    };

    if (params.record_energy) sol.energy_history.push_back(kernel.energy(u));
    sol.converged = check();
    while (!sol.converged && sol.iters < params.max_iter) {
        if (params.sweep == Sweep::PointLexicographic) {
            kernel.point_sweep(u);
        } else {
            kernel.line_sweep(u);
        }
        ++sol.iters;
        if (params.record_energy) sol.energy_history.push_back(kernel.energy(u));
        if (sol.iters % params.check_every == 0 || sol.iters == params.max_iter) sol.converged = check();
    }
    if (!params.record_energy) sol.energy_history.clear();

    sol.thin_value = ThinField(problem.grid);
    for (std::size_t t = 0; t < problem.grid->thin_count(); ++t) {
        sol.thin_value.values[t] = u[problem.grid->index(t, 0)] - problem.psi.values[t];
    }
    sol.reaction = kernel.reaction(sol.v);
    return sol;
}

}  // namespace

SignoriniSolution solve_pgs(const EllipticProblem& problem, const SolverParams& params) {
    return run(problem, params, Closure::Signorini, 0.0, nullptr);
}

SignoriniSolution solve_pgs(const EllipticProblem& problem, const SolverParams& params, const Field& initial) {
    return run(problem, params, Closure::Signorini, 0.0, &initial);
}

SignoriniSolution solve_penalized(const EllipticProblem& problem, const SolverParams& params, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("solve_penalized: epsilon must be positive");
    return run(problem, params, Closure::Penalized, epsilon, nullptr);
}

SignoriniSolution solve_penalized(const EllipticProblem& problem, const SolverParams& params, double epsilon,
                                  const Field& initial) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("solve_penalized: epsilon must be positive");
    return run(problem, params, Closure::Penalized, epsilon, &initial);
}

Residuals residuals(const EllipticProblem& problem, const Field& v) {
    problem.validate();
    if (v.values.size() != problem.grid->node_count()) throw std::invalid_argument("residuals: shape mismatch");
    const Kernel kernel(problem, Closure::Signorini, 0.0, 1.0);
    return kernel.residuals(v.values);
}

ThinField discrete_reaction(const EllipticProblem& problem, const Field& v) {
    problem.validate();
    const Kernel kernel(problem, Closure::Signorini, 0.0, 1.0);
    return kernel.reaction(v);
}

double discrete_energy(const EllipticProblem& problem, const Field& v) {
    problem.validate();
    const Kernel kernel(problem, Closure::Signorini, 0.0, 1.0);
    return kernel.energy(v.values);
}

double dirichlet_form(const WeightedGrid& g, std::span<const double> u) {
    double e = 0.0;
    for (std::size_t t = 0; t < g.thin_count(); ++t) {
        const double area = g.thin_area(t);
        for (int j = 0; j + 1 < g.ny(); ++j) {
            const std::size_t k = g.index(t, j);
            const double d = u[k + 1] - u[k];
            e += 0.5 * g.ty(j) * area * d * d;
        }
        for (int axis = 0; axis < g.n(); ++axis) {
            const auto nb = g.thin_neighbor(t, axis, +1);
            if (!nb) continue;
            for (int j = 0; j < g.ny(); ++j) {
                const double d = u[g.index(*nb, j)] - u[g.index(t, j)];
                e += 0.5 * g.x_face_transmissibility(t, axis, j) * d * d;
            }
        }
    }
    return e;
}

}  // namespace signorini
