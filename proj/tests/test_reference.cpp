#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "signorini/functionals.hpp"
#include "signorini/reference.hpp"

using namespace signorini;

namespace {

// Independent Lanczos Gamma (g = 7, nine coefficients) with reflection.
double lanczos_gamma(double x) {
    static const double c[] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                               771.32342877765313,   -176.61502916214059,   12.507343278686905,
                               -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
    x -= 1.0;
    double s = c[0];
    for (int i = 1; i < 9; ++i) s += c[i] / (x + i);
    const double t = x + 7.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * s;
}

double eval(const PrototypeParams& p, double x, double y) {
    const double X[2] = {x, y};
    return vhat0(p, X);
}

}  // namespace

TEST_CASE("prototype closed-form values") {
    PrototypeParams p;
    CHECK(eval(p, 1.0, 0.0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
    for (double a : {-0.5, 0.0, 0.5}) {
        p.a = a;
        for (double x : {-1.0, -0.3, -1e-6}) CHECK(eval(p, x, 0.0) == 0.0);
    }
}

TEST_CASE("prototype homogeneity, evenness and gradient") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0), L(0.1, 3.0);
    for (double a : {-0.5, 0.0, 0.5}) {
        PrototypeParams p;
        p.a = a;
        p.c = 1.3;
        const double k0 = kappa0(a);
        for (int i = 0; i < 20; ++i) {
            const double x = U(rng), y = U(rng), lam = L(rng);
            CHECK(eval(p, lam * x, lam * y) == doctest::Approx(std::pow(lam, k0) * eval(p, x, y)).epsilon(1e-12));
            CHECK(eval(p, x, -y) == eval(p, x, y));
            const double X[2] = {x, std::abs(y) + 0.05};
            const auto g = vhat0_gradient(p, X);
            const double h = 1e-6;
            CHECK(g[0] == doctest::Approx((eval(p, X[0] + h, X[1]) - eval(p, X[0] - h, X[1])) / (2 * h)).epsilon(1e-6));
            CHECK(g[1] == doctest::Approx((eval(p, X[0], X[1] + h) - eval(p, X[0], X[1] - h)) / (2 * h)).epsilon(1e-6));
            CHECK(vhat0_weighted_flux(p, X) == doctest::Approx(std::pow(X[1], a) * g[1]).epsilon(1e-12));
        }
    }
}

TEST_CASE("tilted member evaluates along <x, e>") {
    PrototypeParams p;
    p.e = {std::cos(0.3), std::sin(0.3)};
    PrototypeParams q;
    const double X[3] = {0.4, -0.2, 0.1};
    const double Y[2] = {0.4 * std::cos(0.3) - 0.2 * std::sin(0.3), 0.1};
    CHECK(vhat0(p, X) == doctest::Approx(vhat0(q, Y)).epsilon(1e-14));
    PrototypeParams bad;
    bad.e = {1.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = PrototypeParams{};
    bad.c = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("prototype Signorini audit") {
    for (double a : {-0.5, 0.0, 0.5}) {
        CAPTURE(a);
        GridSpec s;
        s.a = a;
        s.nx = 65;
        s.ny = 33;
        PrototypeParams p;
        p.a = a;
        const auto rep = vhat0_signorini_audit(p, build_grid(s));
        CHECK(rep.passed);
        CHECK(rep.min_thin_value >= 0.0);
        CHECK(rep.max_interior_residual <= rep.consistency_bound);
    }
}

TEST_CASE("audit flags the prototype plus 0.1 y") {
    for (double a : {0.0, 0.5}) {
        CAPTURE(a);
        GridSpec s;
        s.a = a;
        s.nx = 65;
        s.ny = 33;
        auto g = build_grid(s);
        PrototypeParams p;
        p.a = a;
        Field v = sample_prototype(g, p);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += 0.1 * g->y()[g->level_of(k)];
        CHECK_FALSE(signorini_audit(v).passed);
    }
}

TEST_CASE("extension constant") {
    CHECK(extension_constant(0.5) == 1.0);
    for (double s : {0.1, 0.25, 0.75, 0.9}) {
        const double oracle = std::pow(2.0, 2 * s - 1) * lanczos_gamma(s) / lanczos_gamma(1 - s);
        CHECK(extension_constant(s) == doctest::Approx(oracle).epsilon(1e-12));
    }
    // Tabulated value: Gamma(0.9) = 1.068628702119319..., Gamma(0.1) = 9.513507698668732...
    CHECK(extension_constant(0.9) == doctest::Approx(std::pow(2.0, 0.8) * 1.0686287021193193 / 9.5135076986687318)
                                         .epsilon(1e-12));
    CHECK_THROWS_AS(extension_constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(extension_constant(1.0), std::invalid_argument);
    // s = (1 - a) / 2
    GridSpec g;
    CHECK(build_grid(g)->s() == 0.5);
}

TEST_CASE("extension identity for single cosine modes") {
    GridSpec s;
    s.R = std::numbers::pi;
    s.Y = 8.0;
    s.nx = 65;
    s.ny = 33;
    for (double k : {1.0, 2.0}) {
        CosineMode m{k, 1.0};
        const auto d = dtn_identity_check(s, std::span<const CosineMode>(&m, 1));
        CHECK(d.converged);
        CHECK(d.relative_l2_error <= 0.05);
    }
    SUBCASE("rejects modes incompatible with the box") {
        CosineMode m{1.5, 1.0};
        CHECK_THROWS_AS(dtn_identity_check(s, std::span<const CosineMode>(&m, 1)), std::invalid_argument);
    }
}

TEST_CASE("zero frequency: the response is the finite-height truncation 1/Y") {
    // With U(., Y) = 0 a constant trace extends linearly in y, so -d_y U = 1/Y; the
    // artefact vanishes as Y grows.
    double prev = 1e300;
    for (double Y : {2.0, 4.0, 8.0}) {
        GridSpec s;
        s.R = std::numbers::pi;
        s.Y = Y;
        s.nx = 9;
        s.ny = 17;
        CosineMode m{0.0, 1.0};
        const auto d = dtn_identity_check(s, std::span<const CosineMode>(&m, 1));
        CHECK(d.relative_l2_error / std::sqrt(2.0 * std::numbers::pi) == doctest::Approx(1.0 / Y).epsilon(1e-6));
        CHECK(d.relative_l2_error < prev);
        prev = d.relative_l2_error;
    }
}

TEST_CASE("homogeneous fit recovers amplitude and direction") {
    for (double a : {-0.5, 0.0, 0.5}) {
        PrototypeParams p;
        p.a = a;
        p.c = 0.8;
        p.e = {std::cos(1.1), std::sin(1.1)};
        const auto fit = fit_homogeneous(2, a, [&](std::span<const double> X) { return vhat0(p, X); });
        CHECK(fit.c == doctest::Approx(0.8).epsilon(1e-6));
        CHECK(std::abs(std::remainder(fit.theta - 1.1, 2 * std::numbers::pi)) <= 1e-6);
        CHECK(fit.relative_distance <= 1e-6);
    }
    PrototypeParams p;
    p.e = {-1.0, 0.0};
    const auto fit = fit_homogeneous(1, 0.0, [&](std::span<const double> X) { return vhat0(p, X); });
    CHECK(std::abs(std::remainder(fit.theta - std::numbers::pi, 2 * std::numbers::pi)) <= 1e-9);
}
