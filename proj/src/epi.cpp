#include "signorini/epi.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "signorini/quadrature.hpp"
#include "signorini/reference.hpp"

namespace signorini {

void EpiParams::validate() const {
    if (!(a > -1.0 && a < 1.0)) throw std::invalid_argument("epi.a: must lie in (-1,1)");
    if (count < 1) throw std::invalid_argument("epi.count: must be positive");
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw std::invalid_argument("epi.theta: must be finite and >= 0");
    if (!(theta_max > 0.0)) throw std::invalid_argument("epi.theta_max: must be positive");
    if (modes < 0) throw std::invalid_argument("epi.modes: must be >= 0");
    solver.validate();
}

namespace {

struct Angular {
    double G, dG;  // profile and its phi-derivative
};

Angular profile(double a, const EpiPerturbation& p, double t, double phi) {
    PrototypeParams pp;
    pp.a = a;
    const double X[2] = {std::cos(phi), std::sin(phi)};
    const auto grad = vhat0_gradient(pp, X);
    Angular out;
    out.G = vhat0(pp, X);
    out.dG = -X[1] * grad[0] + X[0] * grad[1];
    double P = 0.5 * p.d * (1.0 - std::cos(phi));
    double dP = 0.5 * p.d * std::sin(phi);
    for (std::size_t k = 0; k < p.c.size(); ++k) {
        const double m = static_cast<double>(k + 1);
        P += p.c[k] * std::sin(m * phi);
        dP += p.c[k] * m * std::cos(m * phi);
    }
    out.G += t * P;
    out.dG += t * dP;
    return out;
}

// Angular integrals over the full circle (even reflection doubles the upper half).
struct Moments {
    double grad = 0.0;  // int (kappa^2 G^2 + G'^2) |sin|^a
    double mass = 0.0;  // int G^2 |sin|^a
};

Moments moments(double a, const EpiPerturbation& p, double t, bool perturbation_only) {
    // G'^2 behaves like sin^{-2a} at the negative thin axis, so there the gradient term
    // is integrated as (G'^2 sin^{2a}) against sin^{-a}; near the positive axis G' is
    // bounded and the sin^a rule is used. Both rules are symmetric about phi = pi/2.
    static thread_local HalfSphereRule mass_rule, grad_rule;
    if (mass_rule.size() == 0 || mass_rule.p != a) {
        mass_rule = half_sphere_rule(1, a, 64, 4);
        grad_rule = half_sphere_rule(1, -a, 64, 4);
    }
    const double k = kappa0(a);
    auto eval = [&](std::span<const double> X) {
        const double phi = std::atan2(X[1], X[0]);
        Angular A = profile(a, p, t, phi);
        if (perturbation_only) {
            const Angular B = profile(a, p, 0.0, phi);
            A.G -= B.G;
            A.dG -= B.dG;
        }
        return A;
    };
    Moments m;
    for (std::size_t i = 0; i < mass_rule.size(); ++i) {
        const Angular A = eval(mass_rule.point(i));
        m.mass += 2.0 * mass_rule.weights[i] * A.G * A.G;
    }
    m.grad = k * k * m.mass;
    for (std::size_t i = 0; i < mass_rule.size(); ++i) {
        const auto X = mass_rule.point(i);
        if (X[0] < 0.0) continue;
        const Angular A = eval(X);
        m.grad += 2.0 * mass_rule.weights[i] * A.dG * A.dG;
    }
    for (std::size_t i = 0; i < grad_rule.size(); ++i) {
        const auto X = grad_rule.point(i);
        if (X[0] >= 0.0) continue;
        const Angular A = eval(X);
        m.grad += 2.0 * grad_rule.weights[i] * A.dG * A.dG * std::pow(X[1], 2.0 * a);
    }
    return m;
}

double sobolev_sq(double a, const Moments& m) {
    const double k = kappa0(a);
    return m.grad / (2.0 * k + a) + m.mass / (2.0 * k + a + 2.0);
}

double homogeneous_value(double a, const EpiPerturbation& p, double t, double x, double y) {
    const double rho = std::hypot(x, y);
    if (rho == 0.0) return 0.0;
    return std::pow(rho, kappa0(a)) * profile(a, p, t, std::atan2(std::abs(y), x)).G;
}

}  // namespace

HomogeneousEnergy homogeneous_energy(double a, const EpiPerturbation& p, double t) {
    const double k = kappa0(a);
    const Moments m = moments(a, p, t, false);
    HomogeneousEnergy e;
    e.W0 = m.grad / (2.0 * k + a) - k * m.mass;
    const Moments z = moments(a, p, 0.0, false);
    const Moments d = moments(a, p, t, true);
    e.distance = std::sqrt(sobolev_sq(a, d) / sobolev_sq(a, z));
    return e;
}

EpiSample epi_sample(const EpiParams& params, const EpiPerturbation& p, double theta, GridPtr grid) {
    params.validate();
    const double a = params.a;
    EpiSample s;
    s.perturbation = p;
    if (p.d < 0.0) {
        s.rejected = true;
        return s;
    }
    // Scale the perturbation to the requested relative distance.
    const double unit = homogeneous_energy(a, p, 1.0).distance;
    const double t = unit > 0.0 ? theta / unit : 0.0;
    const HomogeneousEnergy he = homogeneous_energy(a, p, t);
    s.distance = he.distance;
    s.W0_w = he.W0;
    s.out_of_hypothesis = he.distance > params.theta_max;
    const Moments m = moments(a, p, t, false);
    if (!(he.W0 > params.zero_guard * std::max(m.grad, 1e-300))) {
        s.skipped = true;
        return s;
    }

    if (!grid) {
        GridSpec gs;
        gs.n = 1;
        gs.a = a;
        gs.R = 1.0;
        gs.Y = 1.0;
        gs.nx = params.nx;
        gs.ny = params.ny;
        grid = build_grid(gs);
    }
    const WeightedGrid& g = *grid;
    EllipticProblem e;
    e.grid = grid;
    e.f = Field(grid);
    e.psi = ThinField(grid);
    e.boundary = Field(grid);
    e.fixed_mask.assign(g.node_count(), 0);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        const double x = g.thin_point(g.thin_of(k))[0];
        const double y = g.y()[g.level_of(k)];
        e.boundary.values[k] = homogeneous_value(a, p, t, x, y);
        e.fixed_mask[k] = std::hypot(x, y) >= 1.0 ? 1 : 0;
    }
    for (std::size_t th = 0; th < g.thin_count(); ++th) {
        if (e.boundary.values[g.index(th, 0)] < 0.0) {
            s.rejected = true;
            return s;
        }
    }
    const SignoriniSolution sol = solve_pgs(e, params.solver, e.boundary);
    s.converged = sol.converged;
    s.iters = sol.iters;
    // Full-space Dirichlet integral is four times the half-space discrete form.
    const double dE = dirichlet_form(g, sol.v.values) - dirichlet_form(g, e.boundary.values);
    s.W0_competitor = s.W0_w + 4.0 * dE;
    s.ratio = s.W0_competitor / s.W0_w;
    return s;
}

EpiReport epi_check(const EpiParams& params) {
    params.validate();
    EpiReport r;
    r.a = params.a;
    GridSpec gs;
    gs.n = 1;
    gs.a = params.a;
    gs.R = 1.0;
    gs.Y = 1.0;
    gs.nx = params.nx;
    gs.ny = params.ny;
    const GridPtr grid = build_grid(gs);
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> ud(0.2, 1.0);
    std::normal_distribution<double> nd(0.0, 1.0);
    // Draw until `count` samples carry a positive W0(w); skipped and rejected draws
    // stay in the report. The cap keeps hopeless parameter choices finite.
    const int max_draws = 4 * params.count;
    int evaluated = 0;
    for (int draw = 0; draw < max_draws && evaluated < params.count; ++draw) {
        EpiPerturbation p;
        p.d = ud(rng);
        p.c.resize(static_cast<std::size_t>(params.modes));
        for (std::size_t k = 0; k < p.c.size(); ++k) p.c[k] = nd(rng) / static_cast<double>(k + 1);
        EpiSample s = epi_sample(params, p, params.theta, grid);
        s.index = draw;
        if (!s.skipped && !s.rejected) ++evaluated;
        r.samples.push_back(std::move(s));
    }
    r.max_ratio = -1e300;
    for (const auto& s : r.samples) {
        if (s.rejected || s.skipped || s.out_of_hypothesis || !s.converged) continue;
        r.max_ratio = std::max(r.max_ratio, s.ratio);
        ++r.used;
    }
    if (r.used == 0) r.max_ratio = std::nan("");
    r.kappa_hat = 1.0 - r.max_ratio;
    return r;
}

void write_epi_csv(std::ostream& os, const EpiReport& r) {
    os << "index,distance,W0_w,W0_competitor,ratio,rejected,skipped,out_of_hypothesis,converged,iters\n";
    os.precision(12);
    for (const auto& s : r.samples) {
        os << s.index << ',' << s.distance << ',' << s.W0_w << ',' << s.W0_competitor << ',' << s.ratio << ','
           << s.rejected << ',' << s.skipped << ',' << s.out_of_hypothesis << ',' << s.converged << ',' << s.iters
           << '\n';
    }
}

}  // namespace signorini
