#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "signorini/free_boundary.hpp"
#include "signorini/problems.hpp"

using namespace signorini;

namespace {

GridPtr grid(int n, double a, int nx) {
    GridSpec s;
    s.n = n;
    s.a = a;
    s.nx = nx;
    s.ny = (nx - 1) / 2 + 1;
    return build_grid(s);
}

// A solution record built from sampled values (psi = 0).
SignoriniSolution from_samples(Field u) {
    SignoriniSolution s;
    const auto& g = *u.grid;
    s.thin_value = trace(g, u);
    s.reaction = weighted_normal_derivative(g, u);
    for (double& l : s.reaction.values) l = -l;
    s.v = std::move(u);
    s.converged = true;
    return s;
}

SignoriniSolution sampled_prototype(int n, double a, int nx, double c = 1.0, double theta = 0.0) {
    PrototypeParams p;
    p.a = a;
    p.c = c;
    p.e = {std::cos(theta), std::sin(theta)};
    return from_samples(sample_prototype(grid(n, a, nx), p));
}

const std::array<double, 2> O{0.0, 0.0};

}  // namespace

TEST_CASE("partition of the prototype") {
    for (double a : {-0.5, 0.0, 0.5}) {
        CAPTURE(a);
        const auto sol = sampled_prototype(1, a, 65);
        const auto P = partition(sol, 1e-10);
        const auto& g = *sol.v.grid;
        for (std::size_t t = 0; t < g.thin_count(); ++t) {
            CHECK(bool(P.contact[t]) == (g.x()[t] <= 0.0));
            CHECK(bool(P.positive[t]) != bool(P.contact[t]));
        }
        REQUIRE(P.fb_points.size() == 1);
        CHECK(std::abs(P.fb_points[0].location[0]) <= 1e-10);  // gap^{1/kappa0} is linear in x
        CHECK(P.fb_points[0].dir == 1);
        CHECK_FALSE(P.rim_only);
        const auto tol = relative_tolerances(sol, 1e-10);
        CHECK(tol.tol_c == doctest::Approx(10 * 1e-10 * sol.thin_value.max_abs()));
    }
    SUBCASE("solver output agrees") {
        ProblemParams pp;
        pp.grid.nx = 65;
        pp.grid.ny = 33;
        SolverParams sp;
        sp.tol = 1e-10;
        const auto sol = solve_pgs(make_elliptic_problem(pp), sp);
        const auto P = partition(sol, sp.tol);
        REQUIRE(P.fb_points.size() == 1);
        CHECK(std::abs(P.fb_points[0].location[0]) <= sol.v.grid->hx());
    }
}

TEST_CASE("partition edge cases") {
    SUBCASE("fully positive") {
        const auto P = partition(from_samples(Field(grid(1, 0.0, 17), 1.0)), 1e-10);
        CHECK(P.fb_points.empty());
        for (auto c : P.contact) CHECK(c == 0);
        CHECK_FALSE(P.rim_only);
    }
    SUBCASE("contact everywhere except the rim") {
        const auto g = grid(1, 0.0, 17);
        Field u(g);
        for (std::size_t t = 0; t < g->thin_count(); ++t) {
            for (int j = 0; j < g->ny(); ++j) {
                u.values[g->index(t, j)] = g->on_lateral_boundary(t) ? 0.5 : -g->y()[j];
            }
        }
        const auto P = partition(from_samples(u), 1e-10);
        CHECK(P.fb_points.size() == 2);
        CHECK(P.rim_only);
        // extended free boundary: contact with zero reaction; here the reaction is 1
        CHECK(P.extended_fb_points.empty());
    }
}

TEST_CASE("classification bands") {
    ClassifyParams cp;
    cp.frequency.delta = default_delta(0.0);
    CHECK(classify_value(4.0, 1, 0.0, cp) == Classification::Regular);
    CHECK(classify_value(4.2, 1, 0.0, cp) == Classification::Regular);
    CHECK(classify_value(4.3, 1, 0.0, cp) == Classification::Indeterminate);
    CHECK(classify_value(4.45, 1, 0.0, cp) == Classification::Nonregular);
    CHECK(classify_value(6.0, 1, 0.0, cp) == Classification::Nonregular);
    CHECK(classify_value(5.0, 2, 0.0, cp) == Classification::Regular);
    CHECK(std::string(to_string(Classification::Indeterminate)) == "indeterminate");
}

TEST_CASE("prototype origin is regular") {
    for (double a : {-0.5, 0.0, 0.5}) {
        CAPTURE(a);
        const auto sol = sampled_prototype(1, a, 129);
        ClassifyParams cp;
        cp.frequency.delta = default_delta(a);
        const auto rep = classify(sol.v, nullptr, O, cp);
        CHECK(rep.classification == Classification::Regular);
        CHECK(rep.kappa_hat == doctest::Approx(4.0).epsilon(0.02));
        // Monotone once the calibrated constant absorbs the discretization dip at r_min.
        const auto C = calibrate_almgren_constant({rep.profile}, cp.frequency);
        REQUIRE(C.has_value());
        CHECK(*C <= 1.0);
        // amplitude does not change the classification
        Field big = sol.v;
        for (double& x : big.values) x *= 1e4;
        CHECK(classify(big, nullptr, O, cp).kappa_hat == doctest::Approx(rep.kappa_hat).epsilon(1e-10));
    }
    const auto sol2 = sampled_prototype(2, 0.0, 33);
    ClassifyParams cp;
    const auto rep = classify(sol2.v, nullptr, O, cp);
    CHECK(rep.kappa_hat == doctest::Approx(5.0).epsilon(0.03));
}

TEST_CASE("quadratic problem is nonregular") {
    ProblemParams pp;
    pp.name = "quadratic";
    pp.grid.nx = 129;
    pp.grid.ny = 65;
    SolverParams sp;
    sp.tol = 1e-10;
    const auto sol = solve_pgs(make_elliptic_problem(pp), sp);
    REQUIRE(sol.converged);
    ClassifyParams cp;
    const auto rep = classify(sol.v, nullptr, O, cp);
    CHECK(rep.classification == Classification::Nonregular);
}

TEST_CASE("growth rates") {
    for (double a : {-0.5, 0.0, 0.5}) {
        CAPTURE(a);
        const auto v = sampled_prototype(1, a, 257).v;
        std::vector<Field> slices{v, v};
        std::vector<double> times{-0.1, 0.0};
        const std::vector<double> radii{1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
        const auto fit = growth_fit(slices, times, 1, O, radii);
        CHECK(fit.slope == doctest::Approx(kappa0(a)).epsilon(0.05 / kappa0(a)));
        CHECK_FALSE(fit.floored);
        const auto interior = growth_fit(slices, times, 1, {0.5, 0.0}, {1.0 / 64, 1.0 / 32, 1.0 / 16});
        CHECK(std::abs(interior.slope) <= 0.3);
    }
    const auto g = grid(1, 0.0, 33);
    const auto zero = growth_fit({Field(g, 0.0)}, {0.0}, 0, O, {0.1, 0.2});
    CHECK(zero.floored);
    CHECK_THROWS_AS(growth_fit({Field(g, 0.0)}, {0.0}, 1, O, {0.1}), std::invalid_argument);
}

TEST_CASE("graph of a stationary prototype trajectory") {
    const auto sol = sampled_prototype(2, 0.0, 33);
    const std::vector<SignoriniSolution> slices(4, sol);
    const std::vector<double> times{0.0, 0.1, 0.2, 0.3};
    GraphParams gp;
    gp.solver_tol = 1e-10;
    const auto G = reconstruct_graph(slices, times, gp);
    REQUIRE(G.slices.size() == 4);
    for (const auto& s : G.slices) {
        REQUIRE(s.g.size() == static_cast<std::size_t>(sol.v.grid->nx()));
        for (double x : s.g) CHECK(std::abs(x) <= 1e-10);
    }
    CHECK(G.lip_x <= 1e-8);
    CHECK(G.holder_t_target == doctest::Approx(2.0 / 3.0));
    std::ostringstream os;
    write_graph_csv(os, G);
    CHECK(os.str().rfind("t,xprime,g,lip_local\n", 0) == 0);

    SUBCASE("nondegeneracy constant") {
        const auto s1 = sampled_prototype(1, 0.0, 129);
        const auto G1 = reconstruct_graph({s1}, {0.0}, gp);
        const double c = nondegeneracy_check(s1.v, G1.slices[0], 0.5);
        CHECK(c == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-3));
        Field twice = s1.v;
        for (double& x : twice.values) x *= 2.0;
        CHECK(nondegeneracy_check(twice, G1.slices[0], 0.5) == doctest::Approx(2.0 * c).epsilon(1e-12));
        CHECK(nondegeneracy_check(Field(s1.v.grid, 0.0), G1.slices[0], 0.5) == 0.0);
    }
}

TEST_CASE("a line crossing twice is not a graph") {
    const auto g = grid(1, 0.0, 33);
    Field u(g);
    for (std::size_t t = 0; t < g->thin_count(); ++t) {
        const double x = g->x()[t];
        const double gap = std::max(0.0, std::abs(x + 0.25) - 0.25);
        for (int j = 0; j < g->ny(); ++j) u.values[g->index(t, j)] = gap + g->y()[j] * g->y()[j];
    }
    GraphParams gp;
    gp.solver_tol = 1e-10;
    CHECK_THROWS_AS(reconstruct_graph({from_samples(u)}, {0.0}, gp), NonGraphical);
    gp.window_lo = -0.2;  // only the crossing at x = 0 remains
    CHECK_NOTHROW(reconstruct_graph({from_samples(u)}, {0.0}, gp));
}

TEST_CASE("cone condition") {
    const auto sol = sampled_prototype(2, 0.0, 33);
    const auto P = partition(sol, 1e-10);
    const auto& g = *sol.v.grid;
    for (double eps : {0.1, 0.5, 0.9}) {
        CHECK(cone_check(g, P, O, {1.0, 0.0}, eps, 0.5).passed);
        CHECK_FALSE(cone_check(g, P, O, {-1.0, 0.0}, eps, 0.5).passed);
    }
    // Tilted free boundary checked against e1 passes exactly for eps > sin(theta).
    const double theta = 0.3;
    const auto tilted = sampled_prototype(2, 0.0, 33, 1.0, theta);
    const auto Pt = partition(tilted, 1e-10);
    CHECK_FALSE(cone_check(g, Pt, O, {1.0, 0.0}, 0.2, 0.5).passed);
    CHECK(cone_check(g, Pt, O, {1.0, 0.0}, 0.4, 0.5).passed);
    CHECK(cone_check(g, Pt, O, {std::cos(theta), std::sin(theta)}, 0.05, 0.5).passed);
}

TEST_CASE("blow-up fit recovers the prototype") {
    const double theta = 0.7;
    const auto sol = sampled_prototype(2, 0.3, 65, 1.4, theta);
    const auto fit = blowup_fit(sol.v, O, 0.5);
    CHECK(fit.c == doctest::Approx(1.4).epsilon(0.01));
    CHECK(std::abs(std::remainder(fit.theta - theta, 2 * std::numbers::pi)) <= 5.0 * std::numbers::pi / 180.0);
}
