#include "signorini/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace signorini {

Rule1D gauss_legendre(int m, double lo, double hi) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
    Rule1D rule;
    rule.nodes.resize(static_cast<std::size_t>(m));
    rule.weights.resize(static_cast<std::size_t>(m));
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= m; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = m * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= m; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = m * (z * p0 - p1) / (z * z - 1.0);
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = mid - half * z;
        rule.nodes[m - 1 - i] = mid + half * z;
        rule.weights[i] = half * w;
        rule.weights[m - 1 - i] = half * w;
    }
    return rule;
}

Rule1D sine_power_rule(double p, int panels, int points_per_panel) {
    if (!(p > -1.0)) throw std::invalid_argument("sine_power_rule: exponent must exceed -1");
    if (panels < 1) throw std::invalid_argument("sine_power_rule: need at least one panel");
    const double q = 1.0 / (1.0 + p);
    const double half_pi = 0.5 * std::numbers::pi;
    // Panel edges in tau: geometric near 0, then uniform.
    std::vector<double> edges{0.0};
    const int graded = 6;
    const double first = 1.0 / panels;
    for (int g = graded; g >= 1; --g) edges.push_back(first * std::pow(0.25, g));
    for (int k = 1; k <= panels; ++k) edges.push_back(static_cast<double>(k) / panels);
    const Rule1D base = gauss_legendre(points_per_panel);
    Rule1D rule;
    const double jac = std::pow(half_pi, 1.0 + p) * q;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double lo = edges[e], hi = edges[e + 1];
        for (int i = 0; i < points_per_panel; ++i) {
            const double tau = lo + 0.5 * (hi - lo) * (base.nodes[i] + 1.0);
            const double w = 0.5 * (hi - lo) * base.weights[i];
            const double phi = half_pi * std::pow(tau, q);
            // sin^p = phi^p (sin phi / phi)^p; the phi^p dphi part is jac dtau.
            const double ratio = phi > 0.0 ? std::sin(phi) / phi : 1.0;
            rule.nodes.push_back(phi);
            rule.weights.push_back(w * jac * std::pow(ratio, p));
        }
    }
    return rule;
}

HalfSphereRule half_sphere_rule(int n, double p, int resolution, int points_per_panel) {
    if (n != 1 && n != 2) throw std::invalid_argument("half_sphere_rule: n must be 1 or 2");
    HalfSphereRule rule;
    rule.n = n;
    rule.p = p;
    const Rule1D elev = sine_power_rule(p, resolution, points_per_panel);
    if (n == 1) {
        // phi in [0, pi]: split at pi/2 and mirror.
        for (int side = 0; side < 2; ++side) {
            for (std::size_t i = 0; i < elev.nodes.size(); ++i) {
                const double phi = side == 0 ? elev.nodes[i] : std::numbers::pi - elev.nodes[i];
                rule.points.push_back(std::cos(phi));
                rule.points.push_back(std::sin(phi));
                rule.weights.push_back(elev.weights[i]);
            }
        }
        return rule;
    }
    const int azimuth = 4 * resolution;
    const double dalpha = 2.0 * std::numbers::pi / azimuth;
    for (std::size_t i = 0; i < elev.nodes.size(); ++i) {
        const double phi = elev.nodes[i];
        const double cphi = std::cos(phi), sphi = std::sin(phi);
        for (int k = 0; k < azimuth; ++k) {
            const double alpha = (k + 0.5) * dalpha;
            rule.points.push_back(cphi * std::cos(alpha));
            rule.points.push_back(cphi * std::sin(alpha));
            rule.points.push_back(sphi);
            rule.weights.push_back(elev.weights[i] * cphi * dalpha);
        }
    }
    return rule;
}

}  // namespace signorini
