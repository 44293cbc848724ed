#include <doctest.h>

#include <cmath>
#include <random>

#include "signorini/free_boundary.hpp"
#include "signorini/functionals.hpp"
#include "signorini/parabolic.hpp"
#include "signorini/problems.hpp"
#include "signorini/reference.hpp"

using namespace signorini;

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

GridSpec random_spec(Rng& rng, int n, int nx_max = 33) {
    GridSpec s;
    s.n = n;
    s.a = uniform(rng, -0.9, 0.9);
    s.nx = std::uniform_int_distribution<int>(5, nx_max)(rng) | 1;
    s.ny = std::uniform_int_distribution<int>(3, 17)(rng);
    s.y_grading = uniform(rng, 1.0, 3.0);
    s.R = uniform(rng, 0.5, 2.0);
    s.Y = uniform(rng, 0.5, 2.0);
    return s;
}

double max_diff(const Field& u, const Field& v) {
    double m = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) m = std::max(m, std::abs(u[k] - v[k]));
    return m;
}

// Smooth positive boundary data plus a random right-hand side on a small box.
EllipticProblem random_problem(Rng& rng, double a, int nx) {
    GridSpec s;
    s.a = a;
    s.nx = nx;
    s.ny = (nx - 1) / 2 + 1;
    auto g = build_grid(s);
    EllipticProblem pr;
    pr.grid = g;
    pr.psi = ThinField(g);
    pr.boundary = Field(g);
    pr.f = Field(g);
    const double b0 = uniform(rng, 0.3, 0.8), b1 = uniform(rng, -0.3, 0.3), f0 = uniform(rng, -2.0, 2.0),
                 f1 = uniform(rng, -3.0, 3.0);
    for (std::size_t k = 0; k < g->node_count(); ++k) {
        const double x = g->thin_point(g->thin_of(k))[0], y = g->y()[g->level_of(k)];
        pr.boundary[k] = b0 + b1 * x + 0.2 * y;
        pr.f[k] = f0 + f1 * x;
    }
    return pr;
}

SolverParams tight(double tol = 1e-10) {
    SolverParams sp;
    sp.tol = tol;
    return sp;
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("grid: weights and transmissibilities are positive") {
    Rng rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = build_grid(random_spec(rng, 1 + trial % 2, 17));
        for (std::size_t k = 0; k < g->node_count(); ++k) REQUIRE(g->cell_weight(k) > 0.0);
        for (int j = 0; j + 1 < g->ny(); ++j) {
            REQUIRE(g->ty(j) > 0.0);
            for (std::size_t t = 0; t < g->thin_count(); t += 3) {
                for (int axis = 0; axis < g->n(); ++axis) {
                    if (g->thin_neighbor(t, axis, 1)) REQUIRE(g->x_face_transmissibility(t, axis, j) > 0.0);
                }
            }
        }
    }
}

TEST_CASE("grid: operator is self-adjoint with homogeneous closure") {
    Rng rng(102);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = build_grid(random_spec(rng, 1 + trial % 2, 17));
        Field u(g), v(g);
        for (std::size_t k = 0; k < g->node_count(); ++k) {
            if (g->kind(k) != NodeKind::Interior) continue;
            u[k] = uniform(rng, -1.0, 1.0);
            v[k] = uniform(rng, -1.0, 1.0);
        }
        const auto Au = apply_weighted_operator(*g, u), Av = apply_weighted_operator(*g, v);
        double uAv = 0.0, vAu = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < g->node_count(); ++k) {
            uAv += u[k] * Av.value[k];
            vAu += v[k] * Au.value[k];
            scale += std::abs(u[k] * Av.value[k]);
        }
        CHECK(std::abs(uAv - vAu) <= 1e-12 * scale);
        double vAv = 0.0;
        for (std::size_t k = 0; k < g->node_count(); ++k) vAv += v[k] * Av.value[k];
        CHECK(vAv == doctest::Approx(-2.0 * dirichlet_form(*g, v.values)).epsilon(1e-12));
    }
}

TEST_CASE("grid: kernel is annihilated for random coefficients") {
    Rng rng(103);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = build_grid(random_spec(rng, 1 + trial % 2));
        const double c[4] = {uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)};
        Field u(g);
        for (std::size_t k = 0; k < g->node_count(); ++k) {
            const auto x = g->thin_point(g->thin_of(k));
            u[k] = c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * g->eta(g->level_of(k));
        }
        const auto r = apply_weighted_operator(*g, u);
        for (std::size_t k = 0; k < g->node_count(); ++k) {
            if (r.defined[k]) CHECK(std::abs(r.value[k]) <= 1e-11 * transmissibility_sum(*g, k));
        }
    }
}

TEST_CASE("grid: x1^2 consistency does not degrade under refinement") {
    Rng rng(104);
    for (int trial = 0; trial < 5; ++trial) {
        const double a = uniform(rng, -0.9, 0.9);
        double prev = 1e300;
        for (int nx : {9, 17, 33}) {
            GridSpec s;
            s.a = a;
            s.nx = nx;
            s.ny = 9;
            const auto g = build_grid(s);
            Field u(g);
            for (std::size_t k = 0; k < u.size(); ++k) u[k] = std::pow(g->thin_point(g->thin_of(k))[0], 2);
            const auto r = apply_weighted_operator(*g, u);
            double err = 0.0;
            for (std::size_t k = 0; k < u.size(); ++k) {
                if (r.defined[k]) err = std::max(err, std::abs(r.value[k] / (2.0 * g->cell_weight(k)) - 1.0));
            }
            CHECK(err <= std::max(0.5 * prev, 1e-12));
            prev = err;
        }
    }
}

TEST_CASE("elliptic: complementarity, solver agreement and energy descent") {
    Rng rng(201);
    for (int trial = 0; trial < 8; ++trial) {
        const double a = uniform(rng, -0.8, 0.8);
        const auto pr = random_problem(rng, a, 17);
        auto sp = tight();
        sp.record_energy = true;
        sp.sweep = trial % 2 ? Sweep::LineRedBlack : Sweep::PointLexicographic;
        const auto sol = solve_pgs(pr, sp);
        REQUIRE(sol.converged);
        const double scale = std::max({sol.v.max_abs(), sol.reaction.max_abs(), 1.0});
        for (std::size_t t = 0; t < sol.thin_value.size(); ++t) {
            CHECK(sol.thin_value[t] >= -sp.tol * scale);
            if (pr.grid->on_lateral_boundary(t)) continue;  // Dirichlet rim carries no reaction law
            CHECK(std::abs(std::min(sol.thin_value[t], sol.reaction[t])) <= 1e-6 * scale);
        }
        const auto r = residuals(pr, sol.v);
        CHECK(r.comp <= sp.tol);
        for (std::size_t i = 1; i < sol.energy_history.size(); ++i) {
            CHECK(sol.energy_history[i] <= sol.energy_history[i - 1] + 1e-12 * (1.0 + std::abs(sol.energy_history[0])));
        }
        const double eps = sp.epsilon_schedule.back();
        const auto pen = solve_penalized(pr, sp, eps);
        CHECK(max_diff(pen.v, sol.v) <= 10 * sp.tol + 5.0 * eps * scale);
    }
}

TEST_CASE("elliptic: comparison principle") {
    Rng rng(202);
    for (int trial = 0; trial < 8; ++trial) {
        const auto p2 = random_problem(rng, uniform(rng, -0.8, 0.8), 17);
        auto p1 = p2;
        for (std::size_t k = 0; k < p1.boundary.size(); ++k) {
            p1.boundary[k] += uniform(rng, 0.0, 0.1);
            p1.f[k] -= uniform(rng, 0.0, 1.0);
        }
        const auto sp = tight();
        const auto v1 = solve_pgs(p1, sp), v2 = solve_pgs(p2, sp);
        for (std::size_t k = 0; k < v1.v.size(); ++k) CHECK(v1.v[k] >= v2.v[k] - sp.tol);
    }
}

TEST_CASE("elliptic: prototype contact set for random parameters") {
    Rng rng(203);
    for (int trial = 0; trial < 4; ++trial) {
        ProblemParams pp;
        pp.grid.a = uniform(rng, -0.8, 0.8);
        pp.grid.nx = 33;
        pp.grid.ny = 17;
        pp.c = uniform(rng, 0.5, 2.0);
        const auto pr = make_elliptic_problem(pp);
        const auto sol = solve_pgs(pr, tight());
        const auto P = partition(sol, 1e-10);
        const auto& g = *pr.grid;
        for (std::size_t t = 0; t < g.thin_count(); ++t) {
            if (std::abs(g.x()[t]) > g.hx()) CHECK(bool(P.contact[t]) == (g.x()[t] < 0.0));
        }
    }
}

TEST_CASE("parabolic: reduction, stationarity and penalization trend") {
    Rng rng(301);
    for (int trial = 0; trial < 4; ++trial) {
        const double a = uniform(rng, -0.8, 0.8);
        const double f0 = uniform(rng, -1.0, 1.0), f1 = uniform(rng, 0.5, 2.0), w = uniform(rng, 1.0, 5.0);
        ParabolicProblem q;
        GridSpec s;
        s.a = a;
        s.nx = 17;
        s.ny = 9;
        q.grid = build_grid(s);
        q.T = 0.2;
        q.nt = 6;
        q.phi0 = Field(q.grid, 0.0);
        q.F = [=](std::span<const double> X, double t) { return f0 + f1 * X[0] * std::cos(w * t); };
        q.lateral = [](std::span<const double>, double) { return 0.0; };
        const auto sp = tight();
        const auto traj = solve(q, sp);
        for (int k = 1; k < static_cast<int>(traj.size()); ++k) {
            CHECK(reduction_check(traj, q, k) <= 10 * sp.tol);
            for (double x : traj.fields[k].thin_value.values) CHECK(x >= -sp.tol);
        }
        double prev = 1e300;
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            const double d = trajectory_distance(penalized_march(q, sp, eps), traj);
            CHECK(d <= prev);
            prev = d;
        }
    }
    for (int trial = 0; trial < 3; ++trial) {
        ProblemParams pp;
        pp.grid.a = uniform(rng, -0.8, 0.8);
        pp.grid.nx = 17;
        pp.grid.ny = 9;
        pp.nt = 4;
        const auto sp = tight(1e-11);
        const auto q = make_parabolic_problem(pp, sp);
        const auto traj = solve(q, sp);
        for (const auto& f : traj.fields) CHECK(max_diff(f.v, q.phi0) <= 1e-9);
    }
}

TEST_CASE("functionals: identities on solved fields") {
    Rng rng(401);
    for (int trial = 0; trial < 4; ++trial) {
        ProblemParams pp;
        pp.name = "driven-F";
        pp.grid.a = uniform(rng, -0.6, 0.6);
        pp.grid.nx = 65;
        pp.grid.ny = 33;
        pp.f0 = uniform(rng, -1.0, 1.0);
        const auto pr = make_elliptic_problem(pp);
        const auto sol = solve_pgs(pr, tight());
        REQUIRE(sol.converged);
        const auto p = elliptic_quantities(sol.v, &pr.f, {0.0, 0.0}, geometric_radii(0.15, 0.6, 6));
        const auto id = identity_checks(p);
        CHECK(id.energy_identity <= 0.05);
        auto q = p;
        weiss(q);
        for (std::size_t i = 0; i < q.size(); ++i) CHECK(q.W_k0[i] == doctest::Approx(q.W_identity[i]).epsilon(1e-12));
    }
}

TEST_CASE("functionals: prototype quantities for random a and amplitude") {
    Rng rng(402);
    for (int trial = 0; trial < 4; ++trial) {
        const double a = uniform(rng, -0.8, 0.8), c = uniform(rng, 0.3, 3.0);
        GridSpec s;
        s.a = a;
        s.nx = 129;
        s.ny = 65;
        PrototypeParams pp;
        pp.a = a;
        pp.c = c;
        const auto v = sample_prototype(build_grid(s), pp);
        auto p = elliptic_quantities(v, nullptr, {0.0, 0.0}, geometric_radii(0.1, 0.8, 5));
        const auto id = identity_checks(p);
        CHECK(id.h_prime_identity <= 0.02);
        CHECK(id.energy_identity <= 0.02);
        weiss(p);
        FrequencyParams fp;
        fp.delta = default_delta(a);
        truncated_almgren(p, fp);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p.N[i] == doctest::Approx(kappa0(a)).epsilon(0.02));
            CHECK(std::abs(p.W_k0[i]) <= 1e-2 * p.H.back());
            CHECK(std::abs(p.W_0[i]) <= 1e-2 * p.H.back());
        }
        // rescaling laws
        const double r = uniform(rng, 0.4, 0.9);
        const auto u = almgren_rescale(v, {0.0, 0.0}, r);
        const auto pu = elliptic_quantities(u, nullptr, {0.0, 0.0}, {0.5, 1.0});
        const auto pv = elliptic_quantities(v, nullptr, {0.0, 0.0}, {0.5 * r});
        CHECK(pu.H[1] == doctest::Approx(1.0).epsilon(0.01));
        CHECK(pu.N[0] == doctest::Approx(pv.N[0]).epsilon(0.01));
    }
}

TEST_CASE("functionals: calibrated Almgren frequency is monotone on solves") {
    Rng rng(403);
    std::vector<RadialProfile> profiles;
    const double a = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        ProblemParams pp;
        pp.name = "driven-F";
        pp.grid.nx = 65;
        pp.grid.ny = 33;
        pp.f0 = uniform(rng, 0.2, 1.0);
        const auto pr = make_elliptic_problem(pp);
        const auto sol = solve_pgs(pr, tight());
        const auto P = partition(sol, 1e-10);
        REQUIRE_FALSE(P.fb_points.empty());
        const auto x = P.fb_points.front().location;
        const double rmax = 0.9 * max_ball_radius(*pr.grid, x);
        profiles.push_back(elliptic_quantities(sol.v, &pr.f, x, geometric_radii(min_trusted_radius(*pr.grid), rmax, 6)));
    }
    FrequencyParams fp;
    fp.delta = default_delta(a);
    const auto C = calibrate_almgren_constant(profiles, fp);
    REQUIRE(C.has_value());
    fp.C_mono = *C;
    for (auto& p : profiles) {
        truncated_almgren(p, fp);
        CHECK(is_nondecreasing(p.Phi_delta, 1e-3));
    }
}

TEST_CASE("free boundary: partition, scaling invariance and classification consistency") {
    Rng rng(501);
    for (int trial = 0; trial < 3; ++trial) {
        ProblemParams pp;
        pp.name = trial == 2 ? "prototype" : "driven-F";
        pp.grid.a = uniform(rng, -0.5, 0.5);
        pp.grid.nx = 129;
        pp.grid.ny = 65;
        pp.f0 = uniform(rng, 0.2, 1.0);
        const auto pr = make_elliptic_problem(pp);
        const auto sp = tight();
        const auto sol = solve_pgs(pr, sp);
        const auto P = partition(sol, sp.tol);
        for (std::size_t t = 0; t < P.contact.size(); ++t) CHECK(P.contact[t] + P.positive[t] == 1);

        const double lam = uniform(rng, 0.01, 100.0);
        auto scaled = sol;
        for (double& x : scaled.v.values) x *= lam;
        for (double& x : scaled.thin_value.values) x *= lam;
        for (double& x : scaled.reaction.values) x *= lam;
        const auto Q = partition(scaled, sp.tol);
        CHECK(Q.contact == P.contact);
        REQUIRE(Q.fb_points.size() == P.fb_points.size());
        for (std::size_t i = 0; i < P.fb_points.size(); ++i) {
            CHECK(Q.fb_points[i].location[0] == doctest::Approx(P.fb_points[i].location[0]).epsilon(1e-9));
        }
        GraphParams gp;
        gp.solver_tol = sp.tol;
        const auto G1 = reconstruct_graph({sol}, {0.0}, gp), G2 = reconstruct_graph({scaled}, {0.0}, gp);
        REQUIRE(G1.slices[0].g.size() == G2.slices[0].g.size());
        for (std::size_t l = 0; l < G1.slices[0].g.size(); ++l) {
            CHECK(G2.slices[0].g[l] == doctest::Approx(G1.slices[0].g[l]).epsilon(1e-9));
        }

        ClassifyParams cp;
        cp.frequency.delta = default_delta(pp.grid.a);
        const std::vector<double> radii{1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
        const double ka = kappa0(pp.grid.a);
        int classified = 0;
        for (const auto& fb : P.fb_points) {
            if (max_ball_radius(*pr.grid, fb.location) < 0.3) continue;
            const auto rep = classify(sol.v, &pr.f, fb.location, cp);
            const auto rep2 = classify(scaled.v, nullptr, fb.location, cp);
            Field fs = pr.f;
            for (double& x : fs.values) x *= lam;
            CHECK(classify(scaled.v, &fs, fb.location, cp).classification == rep.classification);
            CHECK(rep2.classification == rep.classification);
            if (rep.classification != Classification::Regular) continue;
            ++classified;
            const double slope = growth_fit({sol.v}, {0.0}, 0, fb.location, radii).slope;
            CHECK(slope >= ka - 0.1);
            CHECK(slope <= ka + 0.2);
            // neighbouring thin points are never nonregular
            for (int dir : {-1, 1}) {
                const auto nb = pr.grid->thin_neighbor(fb.contact_node, 0, dir);
                if (!nb) continue;
                const auto x = pr.grid->thin_point(*nb);
                if (max_ball_radius(*pr.grid, x) < 0.3) continue;
                CHECK(classify(sol.v, &pr.f, x, cp).classification != Classification::Nonregular);
            }
        }
        CHECK(classified > 0);
    }
}

TEST_CASE("reference: prototype invariants for random parameters") {
    Rng rng(601);
    for (int trial = 0; trial < 50; ++trial) {
        PrototypeParams p;
        p.a = uniform(rng, -0.95, 0.95);
        p.c = uniform(rng, 0.1, 5.0);
        const double th = uniform(rng, 0.0, 6.28);
        p.e = {std::cos(th), std::sin(th)};
        const double X[3] = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
        const double Xm[3] = {X[0], X[1], -X[2]};
        const double Xt[3] = {X[0], X[1], 0.0};
        const double lam = uniform(rng, 0.1, 4.0);
        const double Xl[3] = {lam * X[0], lam * X[1], lam * X[2]};
        CHECK(vhat0(p, X) == vhat0(p, Xm));
        CHECK(vhat0(p, Xt) >= 0.0);
        CHECK(vhat0(p, Xl) == doctest::Approx(std::pow(lam, kappa0(p.a)) * vhat0(p, X)).epsilon(1e-11));
    }
    CHECK(extension_constant(0.5) == 1.0);
}

TEST_CASE("reference: extension identity improves under joint refinement") {
    double prev = 1e300;
    for (int lev = 0; lev < 3; ++lev) {
        GridSpec s;
        s.R = 3.141592653589793;
        s.Y = 4.0 * (lev + 1);
        s.nx = 16 * (1 << lev) + 1;
        s.ny = 8 * (1 << lev) + 1;
        CosineMode m{1.0, 1.0};
        const auto d = dtn_identity_check(s, std::span<const CosineMode>(&m, 1));
        CHECK(d.relative_l2_error < prev);
        prev = d.relative_l2_error;
    }
}

}  // TEST_SUITE
