#pragma once

#include <span>
#include <vector>

namespace signorini {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule with m points on [lo, hi].
Rule1D gauss_legendre(int m, double lo = -1.0, double hi = 1.0);

// Rule for  int_0^{pi/2} sin(phi)^p g(phi) dphi,  p > -1, with the endpoint
// behaviour phi^p absorbed by the substitution phi = (pi/2) tau^(1/(1+p)) and
// panels graded towards tau = 0.
Rule1D sine_power_rule(double p, int panels, int points_per_panel);

// Quadrature on the upper unit half-sphere {|w| = 1, w_y > 0} in R^(n+1) for
//   int g(w) w_y^p dsigma(w).
// Points are stored as n+1 coordinates (x1, [x2,] y).
struct HalfSphereRule {
    int n = 1;
    double p = 0.0;
    std::vector<double> points;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * static_cast<std::size_t>(n + 1), static_cast<std::size_t>(n + 1)};
    }
};

// `resolution` controls the polar panel count; azimuth uses 4*resolution points for n = 2.
HalfSphereRule half_sphere_rule(int n, double p, int resolution = 32, int points_per_panel = 4);

}  // namespace signorini
