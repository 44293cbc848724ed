#include <doctest.h>

#include <cmath>

#include "signorini/parabolic.hpp"
#include "signorini/problems.hpp"

using namespace signorini;

namespace {

GridPtr small_grid(double a, int nx, int ny) {
    GridSpec s;
    s.a = a;
    s.nx = nx;
    s.ny = ny;
    return build_grid(s);
}

SolverParams tight() {
    SolverParams sp;
    sp.tol = 1e-11;
    return sp;
}

double max_diff(const Field& u, const Field& v) {
    double m = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) m = std::max(m, std::abs(u[k] - v[k]));
    return m;
}

// U = 1 + t is exact for F = 1 with lateral data 1 + t (also for backward Euler).
ParabolicProblem linear_in_time(double a) {
    ParabolicProblem q;
    q.grid = small_grid(a, 17, 9);
    q.T = 0.5;
    q.nt = 6;
    q.phi0 = Field(q.grid, 1.0);
    q.F = [](std::span<const double>, double) { return 1.0; };
    q.lateral = [](std::span<const double>, double t) { return 1.0 + t; };
    return q;
}

// Contact on the left half driven by F = x1.
ParabolicProblem driven(int nx, int nt) {
    ParabolicProblem q;
    q.grid = small_grid(0.0, nx, (nx - 1) / 2 + 1);
    q.T = 0.2;
    q.nt = nt;
    q.phi0 = Field(q.grid, 0.0);
    q.F = [](std::span<const double> X, double) { return X[0]; };
    q.lateral = [](std::span<const double>, double) { return 0.0; };
    return q;
}

}  // namespace

TEST_CASE("time levels") {
    ParabolicProblem q;
    q.t0 = 0.5;
    q.T = 1.5;
    q.nt = 5;
    CHECK(q.dt() == 0.25);
    CHECK(q.time(0) == 0.5);
    CHECK(q.time(4) == 1.5);
    q.grid = small_grid(0.0, 9, 5);
    q.phi0 = Field(q.grid, -1.0);  // below psi = 0
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("stationary prototype persists") {
    for (double a : {-0.5, 0.5}) {
        ProblemParams pp;
        pp.grid.a = a;
        pp.grid.nx = 33;
        pp.grid.ny = 17;
        pp.nt = 5;
        const auto sp = tight();
        const auto q = make_parabolic_problem(pp, sp);
        const auto traj = solve(q, sp);
        REQUIRE(traj.size() == 5);
        const auto exact = *exact_solution(pp, q.grid);
        for (std::size_t k = 0; k < traj.size(); ++k) {
            CHECK(max_diff(traj.fields[k].v, q.phi0) <= 1e-9);
            CHECK(max_diff(traj.fields[k].v, exact) <= 0.05 * exact.max_abs());
        }
        for (std::size_t k = 1; k < traj.size(); ++k) CHECK(reduction_check(traj, q, static_cast<int>(k)) <= 10 * sp.tol);
        Cylinder cyl;
        CHECK(time_derivative_bound(traj, cyl) <= 1e-7);
    }
}

TEST_CASE("constant data stays constant") {
    ParabolicProblem q;
    q.grid = small_grid(0.0, 17, 9);
    q.nt = 4;
    q.phi0 = Field(q.grid, 1.0);
    q.lateral = [](std::span<const double>, double) { return 1.0; };
    const auto traj = solve(q, tight());
    for (const auto& s : traj.fields) CHECK(max_diff(s.v, q.phi0) <= 1e-10);
}

TEST_CASE("linear-in-time solution has |ut| = 1") {
    for (double a : {-0.4, 0.0, 0.6}) {
        const auto q = linear_in_time(a);
        const auto traj = solve(q, tight());
        Cylinder cyl;
        cyl.radius = 1.0;
        cyl.y_max = 1.0;
        CHECK(time_derivative_bound(traj, cyl) == doctest::Approx(1.0).epsilon(1e-8));
        for (std::size_t k = 0; k < traj.size(); ++k) {
            CHECK(max_diff(traj.fields[k].v, Field(q.grid, 1.0 + traj.times[k])) <= 1e-9);
        }
    }
}

TEST_CASE("single level returns the initial field only") {
    auto q = linear_in_time(0.0);
    q.nt = 1;
    const auto a = solve(q, tight());
    const auto b = penalized_march(q, tight(), 1e-2);
    for (const auto* t : {&a, &b}) {
        REQUIRE(t->size() == 1);
        CHECK(max_diff(t->fields[0].v, q.phi0) == 0.0);
        CHECK(t->ut[0].values.empty());
    }
}

TEST_CASE("reduction holds on a contact run and fails on a corrupted slice") {
    const auto q = driven(17, 9);
    const auto sp = tight();
    auto traj = solve(q, sp);
    double contact = 0.0;
    for (int k = 1; k < static_cast<int>(traj.size()); ++k) {
        CHECK(reduction_check(traj, q, k) <= 10 * sp.tol);
        contact = std::max(contact, traj.fields[k].contact_fraction());
        for (double s : traj.fields[k].thin_value.values) CHECK(s >= -sp.tol);
        CHECK(traj.fields[k].comp_residual <= sp.tol);
    }
    CHECK(contact > 0.3);
    auto& v = traj.fields[4].v;
    v.values[q.grid->index(q.grid->thin_count() / 2, 3)] += 0.5;
    CHECK(reduction_check(traj, q, 4) >= 1e-3);
}

TEST_CASE("first-order convergence in time") {
    // Smooth F, no contact: successive halvings of dt reduce the change by ~2.
    auto run = [](int nt) {
        ParabolicProblem q;
        q.grid = small_grid(0.2, 17, 9);
        q.T = 0.3;
        q.nt = nt;
        q.phi0 = Field(q.grid, 1.0);
        q.F = [](std::span<const double> X, double t) { return 2.0 + std::cos(4.0 * t) * X[0]; };
        q.lateral = [](std::span<const double>, double) { return 1.0; };
        return solve(q, tight());
    };
    const auto A = run(7), B = run(13), C = run(25);
    const double d1 = max_diff(A.fields.back().v, B.fields.back().v);
    const double d2 = max_diff(B.fields.back().v, C.fields.back().v);
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("time-derivative bound is stable under refinement") {
    Cylinder cyl;
    cyl.radius = 0.5;
    cyl.y_max = 0.5;
    cyl.t_begin = 0.1;
    const double coarse = time_derivative_bound(solve(driven(17, 9), tight()), cyl);
    const double fine = time_derivative_bound(solve(driven(33, 9), tight()), cyl);
    CHECK(coarse > 0.0);
    CHECK(std::max(coarse, fine) / std::min(coarse, fine) <= 1.2);
}

TEST_CASE("penalized march approaches the variational march") {
    const auto q = driven(17, 5);
    const auto sp = tight();
    const auto vi = solve(q, sp);
    double prev = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const double d = trajectory_distance(penalized_march(q, sp, eps), vi);
        CAPTURE(eps);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev <= 5e-3);
}

TEST_CASE("stationary prototype: penalized march within O(eps)") {
    ProblemParams pp;
    pp.grid.nx = 33;
    pp.grid.ny = 17;
    pp.nt = 3;
    const auto sp = tight();
    const auto q = make_parabolic_problem(pp, sp);
    const auto vi = solve(q, sp);
    for (double eps : {1e-2, 1e-3}) CHECK(trajectory_distance(penalized_march(q, sp, eps), vi) <= 2.0 * eps);
}
