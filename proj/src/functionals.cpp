#include "signorini/functionals.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "signorini/quadrature.hpp"
#include "signorini/reference.hpp"

namespace signorini {

void FrequencyParams::validate(double a) const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("analysis.delta: must lie in (0,1)");
    if (!(delta > 0.5 * (1.0 - a))) {
        throw std::invalid_argument("analysis.delta: must exceed (1-a)/2 so that 1 + delta > kappa0");
    }
    if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("analysis.sigma: must lie in (0,1)");
    if (!(ell >= 4.0)) throw std::invalid_argument("analysis.ell: must be >= 4");
    if (!(C_mono >= 0.0) || !std::isfinite(C_mono)) throw std::invalid_argument("analysis.C_mono: must be finite and >= 0");
    if (!(C_par >= 0.0) || !std::isfinite(C_par)) throw std::invalid_argument("analysis.C_par: must be finite and >= 0");
}

double default_delta(double a) { return 0.25 * (1.0 - a) + 0.5; }

double max_ball_radius(const WeightedGrid& g, const std::array<double, 2>& c) {
    const double R = g.spec().R;
    double r = std::min(R - std::abs(c[0]), g.spec().Y);
    if (g.n() == 2) r = std::min(r, R - std::abs(c[1]));
    return r;
}

double min_trusted_radius(const WeightedGrid& g) { return 4.0 * g.hx(); }

double h_floor(const Field& v) {
    const double m = v.max_abs();
    return 1e-14 * m * m;
}

std::vector<double> geometric_radii(double r_min, double r_max, int count) {
    if (!(r_min > 0.0 && r_max >= r_min) || count < 1) throw std::invalid_argument("geometric_radii: bad range");
    std::vector<double> r(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        r[i] = r_min * std::pow(r_max / r_min, t);
    }
    return r;
}

namespace {

// Gradient data interpolated at a point.
struct Sample {
    double v = 0.0;
    double gx[2] = {0.0, 0.0};
    double flux = 0.0;  // y^a d_y v
    double f = 0.0;
};

class PointSampler {
public:
    PointSampler(const Field& v, const Field* f)
        : g_(*v.grid), grad_(nodal_gradient(g_, v.values)), iv_(g_, v.values), i1_(g_, grad_.dx1),
          iflux_(g_, grad_.flux_y) {
        if (g_.n() == 2) i2_.emplace(g_, grad_.dx2);
        if (f && !f->values.empty()) {
            if (f->values.size() != v.values.size()) throw std::invalid_argument("functionals: f shape mismatch");
            if_.emplace(g_, f->values);
        }
    }

    Sample at(std::span<const double> X) const {
        Sample s;
        s.v = iv_.value(X);
        s.gx[0] = i1_.value(X);
        if (i2_) s.gx[1] = i2_->value(X);
        s.flux = iflux_.value(X);
        if (if_) s.f = if_->value(X);
        return s;
    }

    const WeightedGrid& grid() const { return g_; }

private:
    const WeightedGrid& g_;
    NodalGradient grad_;
    FieldInterpolator iv_;
    FieldInterpolator i1_;
    std::optional<FieldInterpolator> i2_;
    FieldInterpolator iflux_;
    std::optional<FieldInterpolator> if_;
};

// Moments on the upper half-sphere of radius r, before the even doubling.
struct SphereMoments {
    double vv = 0.0;     // int v^2 y^a
    double vdn = 0.0;    // int v d_nu v y^a
    double grad2 = 0.0;  // int |grad v|^2 y^a
    double vf = 0.0;     // int v f y^a
    double diss = 0.0;   // int (d_nu v - k v / r)^2 y^a
};

struct RuleSet {
    HalfSphereRule pa, p0, pm;
};

RuleSet make_rules(int n, double a, int resolution) {
    return {half_sphere_rule(n, a, resolution), half_sphere_rule(n, 0.0, resolution), half_sphere_rule(n, -a, resolution)};
}

SphereMoments sphere_moments(const PointSampler& S, const RuleSet& rules, const std::array<double, 2>& c, double r,
                             double kappa) {
    const int n = S.grid().n();
    const double a = S.grid().a();
    SphereMoments m;
    std::vector<double> X(static_cast<std::size_t>(n + 1));
    auto place = [&](std::span<const double> w) {
        for (int d = 0; d < n; ++d) X[d] = c[d] + r * w[d];
        X[n] = r * w[n];
    };
    // Terms carrying y^a: r^{n+a} * rule(p = a).
    double s_vv = 0.0, s_vdx = 0.0, s_gx2 = 0.0, s_vf = 0.0, s_dx = 0.0;
    for (std::size_t i = 0; i < rules.pa.size(); ++i) {
        const auto w = rules.pa.point(i);
        place(w);
        const Sample s = S.at(X);
        double dnx = 0.0, gx2 = 0.0;
        for (int d = 0; d < n; ++d) {
            dnx += s.gx[d] * w[d];
            gx2 += s.gx[d] * s.gx[d];
        }
        const double wt = rules.pa.weights[i];
        s_vv += wt * s.v * s.v;
        s_vdx += wt * s.v * dnx;
        s_gx2 += wt * gx2;
        s_vf += wt * s.v * s.f;
        const double q = dnx - kappa * s.v / r;
        s_dx += wt * q * q;
    }
    // Terms with the weighted flux and no weight: r^n * rule(p = 0).
    double s_vfl = 0.0, s_cross = 0.0;
    for (std::size_t i = 0; i < rules.p0.size(); ++i) {
        const auto w = rules.p0.point(i);
        place(w);
        const Sample s = S.at(X);
        double dnx = 0.0;
        for (int d = 0; d < n; ++d) dnx += s.gx[d] * w[d];
        const double wt = rules.p0.weights[i];
        s_vfl += wt * s.v * s.flux * w[n];
        s_cross += wt * 2.0 * (dnx - kappa * s.v / r) * s.flux * w[n];
    }
    // (y^a d_y v)^2 y^{-a}: r^{n-a} * rule(p = -a).
    double s_fl2 = 0.0, s_fl2n = 0.0;
    for (std::size_t i = 0; i < rules.pm.size(); ++i) {
        const auto w = rules.pm.point(i);
        place(w);
        const Sample s = S.at(X);
        const double wt = rules.pm.weights[i];
        s_fl2 += wt * s.flux * s.flux;
        s_fl2n += wt * s.flux * s.flux * w[n] * w[n];
    }
    const double rn = std::pow(r, n);
    const double rna = std::pow(r, n + a);
    const double rnma = std::pow(r, n - a);
    m.vv = rna * s_vv;
    m.vdn = rna * s_vdx + rn * s_vfl;
    m.grad2 = rna * s_gx2 + rnma * s_fl2;
    m.vf = rna * s_vf;
    m.diss = rna * s_dx + rn * s_cross + rnma * s_fl2n;
    return m;
}

struct BallValues {
    double H = 0.0, G = 0.0, D = 0.0, I = 0.0, vf = 0.0, diss = 0.0;
};

BallValues ball_values(const PointSampler& S, const RuleSet& rules, const Rule1D& radial01,
                       const std::array<double, 2>& c, double r, double kappa) {
    BallValues b;
    const SphereMoments top = sphere_moments(S, rules, c, r, kappa);
    b.H = 2.0 * top.vv;
    b.I = 2.0 * top.vdn;
    b.diss = 2.0 * top.diss;
    // Volume integrals as radial integrals of sphere moments.
    for (std::size_t i = 0; i < radial01.nodes.size(); ++i) {
        const double rho = r * radial01.nodes[i];
        const double w = r * radial01.weights[i];
        const SphereMoments m = sphere_moments(S, rules, c, rho, kappa);
        b.G += 2.0 * w * m.vv;
        b.D += 2.0 * w * m.grad2;
        b.vf += 2.0 * w * m.vf;
    }
    return b;
}

// Radial rule on [0,1] graded towards 0 (three panels).
Rule1D radial_rule(int points) {
    Rule1D out;
    const double edges[] = {0.0, 0.125, 0.4, 1.0};
    const int per = std::max(2, points / 3);
    for (int p = 0; p < 3; ++p) {
        const Rule1D gl = gauss_legendre(per, edges[p], edges[p + 1]);
        out.nodes.insert(out.nodes.end(), gl.nodes.begin(), gl.nodes.end());
        out.weights.insert(out.weights.end(), gl.weights.begin(), gl.weights.end());
    }
    return out;
}

}  // namespace

RadialProfile elliptic_quantities(const Field& v, const Field* f, const std::array<double, 2>& center,
                                  const std::vector<double>& radii, const QuadratureOptions& opts) {
    if (!v.grid) throw std::invalid_argument("elliptic_quantities: field without grid");
    const WeightedGrid& g = *v.grid;
    const double rmax = max_ball_radius(g, center);
    for (double r : radii) {
        if (!(r > 0.0)) throw std::invalid_argument("elliptic_quantities: radii must be positive");
        if (r > rmax + 1e-12) {
            throw std::invalid_argument("elliptic_quantities: radius " + std::to_string(r) +
                                        " exceeds the domain (max " + std::to_string(rmax) + ")");
        }
    }
    const PointSampler S(v, f);
    const double kappa = kappa0(g.a());
    const RuleSet fine = make_rules(g.n(), g.a(), opts.resolution);
    const Rule1D radial = radial_rule(opts.radial_points);
    std::optional<RuleSet> coarse;
    std::optional<Rule1D> radial_coarse;
    if (opts.estimate_error) {
        coarse = make_rules(g.n(), g.a(), std::max(2, opts.resolution / 2));
        radial_coarse = radial_rule(std::max(6, opts.radial_points / 2));
    }

    RadialProfile p;
    p.n = g.n();
    p.a = g.a();
    p.center = center;
    p.time = v.time;
    p.radii = radii;
    const std::size_t m = radii.size();
    p.H.resize(m);
    p.G.resize(m);
    p.D.resize(m);
    p.I.resize(m);
    p.I_identity.resize(m);
    p.vf.resize(m);
    p.N.resize(m);
    p.dissipation.resize(m);
    p.quad_err.assign(m, 0.0);
    p.floored.assign(m, 0);
    const double floor = h_floor(v);

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double r = radii[i];
        const BallValues b = ball_values(S, fine, radial, center, r, kappa);
        p.H[i] = b.H;
        p.G[i] = b.G;
        p.D[i] = b.D;
        p.I[i] = b.I;
        p.vf[i] = b.vf;
        p.I_identity[i] = b.D + b.vf;
        p.dissipation[i] = 2.0 / std::pow(r, g.n() + 2) * b.diss;
        p.floored[i] = b.H <= floor ? 1 : 0;
        p.N[i] = p.floored[i] ? 0.0 : r * b.I / b.H;
        if (coarse) {
            const BallValues c = ball_values(S, *coarse, *radial_coarse, center, r, kappa);
            const double eh = std::abs(c.H - b.H) / std::max(std::abs(b.H), 1e-300);
            const double ei = std::abs(c.I - b.I) / std::max(std::abs(b.I), 1e-300);
            const double ed = std::abs(c.D - b.D) / std::max(std::abs(b.D), 1e-300);
            p.quad_err[i] = std::max({eh, ei, ed});
        }
    }
    return p;
}

void truncated_almgren(RadialProfile& p, const FrequencyParams& params) {
    p.Phi_delta.resize(p.size());
    p.truncated.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = p.radii[i];
        const double ex = std::exp(params.C_mono * std::pow(r, 1.0 - params.delta));
        const double power = p.n + p.a + 2.0 + 2.0 * params.delta;
        const bool active = !p.floored[i] && p.H[i] > std::pow(r, power);
        p.truncated[i] = active ? 0 : 1;
        p.Phi_delta[i] = active ? ex * (p.n + p.a + 2.0 * p.N[i]) : ex * power;
    }
}

std::vector<double> weiss_kappa(const RadialProfile& p, double kappa) {
    std::vector<double> w(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = p.radii[i];
        w[i] = p.I[i] / std::pow(r, p.n + p.a - 1.0 + 2.0 * kappa) - kappa * p.H[i] / std::pow(r, p.n + p.a + 2.0 * kappa);
    }
    return w;
}

void weiss(RadialProfile& p) {
    const double k0 = kappa0(p.a);
    p.W_k0 = weiss_kappa(p, k0);
    p.W_0.resize(p.size());
    p.W_identity.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = p.radii[i];
        p.W_0[i] = p.D[i] / std::pow(r, p.n + 2) - k0 * p.H[i] / std::pow(r, p.n + 3);
        p.W_identity[i] = p.H[i] / std::pow(r, p.n + 3) * (r * p.I[i] / p.H[i] - k0);
    }
}

bool is_nondecreasing(const std::vector<double>& values, double slack, int* violation) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[i - 1] - slack) {
            if (violation) *violation = static_cast<int>(i);
            return false;
        }
    }
    if (violation) *violation = -1;
    return true;
}

MonotonicityAudit monotonicity_audit(const std::vector<double>& radii, const std::vector<double>& values, double p,
                                     double slack, double C_max) {
    if (radii.size() != values.size() || radii.size() < 3) {
        throw std::invalid_argument("monotonicity_audit: need at least 3 matching samples");
    }
    MonotonicityAudit out;
    is_nondecreasing(values, slack, &out.violation_index);
    // Each step requires C (r_{i+1}^p - r_i^p) >= W_i - W_{i+1} - slack.
    double C = 0.0;
    for (std::size_t i = 1; i < radii.size(); ++i) {
        const double need = values[i - 1] - values[i] - slack;
        if (need <= 0.0) continue;
        const double dr = std::pow(radii[i], p) - std::pow(radii[i - 1], p);
        if (!(dr > 0.0)) {
            C = std::numeric_limits<double>::infinity();
            break;
        }
        C = std::max(C, need / dr);
    }
    out.C = C;
    out.passed = C <= C_max;
    out.corrected.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.corrected[i] = values[i] + (std::isfinite(C) ? C : 0.0) * std::pow(radii[i], p);
    }
    return out;
}

MonotonicityAudit weiss_monotonicity_audit(const RadialProfile& p, double slack, double C_max) {
    const std::vector<double>& W = p.W_k0.empty() ? weiss_kappa(p, kappa0(p.a)) : p.W_k0;
    const double expo = 0.5 * (1.0 + p.a);
    MonotonicityAudit out = monotonicity_audit(p.radii, W, expo, slack, C_max);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < p.size(); ++i) {
        const double r0 = p.radii[i - 1], r1 = p.radii[i];
        const double deriv = (out.corrected[i] - out.corrected[i - 1]) / (r1 - r0);
        const double diss = 0.5 * (p.dissipation[i] + p.dissipation[i - 1]);
        margin = std::min(margin, deriv - diss);
    }
    out.min_derivative_margin = margin;
    return out;
}

std::optional<double> calibrate_almgren_constant(std::vector<RadialProfile> profiles, FrequencyParams params,
                                                 double slack, double C_max) {
    auto ok = [&](double C) {
        params.C_mono = C;
        for (auto& p : profiles) {
            truncated_almgren(p, params);
            if (!is_nondecreasing(p.Phi_delta, slack)) return false;
        }
        return true;
    };
    if (ok(0.0)) return 0.0;
    if (!ok(C_max)) return std::nullopt;
    double lo = 0.0, hi = C_max;
    for (int it = 0; it < 60 && hi - lo > 1e-6 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

namespace {

Field rescale(const Field& v, const std::array<double, 2>& center, double r, double divisor) {
    const WeightedGrid& g = *v.grid;
    // Unit-scale target grid; the rescaled ball of radius 1 needs the source ball of radius r.
    if (r > max_ball_radius(g, center) + 1e-12) throw std::invalid_argument("rescale: ball leaves the domain");
    GridSpec spec = g.spec();
    spec.R = 1.0;
    spec.Y = 1.0;
    auto target = build_grid(spec);
    Field out(target);
    const FieldInterpolator interp(g, v.values);
    std::vector<double> X(static_cast<std::size_t>(g.n() + 1));
    for (std::size_t t = 0; t < target->thin_count(); ++t) {
        const auto xp = target->thin_point(t);
        for (int j = 0; j < target->ny(); ++j) {
            for (int d = 0; d < g.n(); ++d) X[d] = center[d] + r * xp[d];
            X[g.n()] = r * target->y()[j];
            out.values[target->index(t, j)] = interp.value(X) / divisor;
        }
    }
    out.time = v.time;
    return out;
}

}  // namespace

Field almgren_rescale(const Field& v, const std::array<double, 2>& center, double r, const QuadratureOptions& opts) {
    QuadratureOptions q = opts;
    q.estimate_error = false;
    const RadialProfile p = elliptic_quantities(v, nullptr, center, {r}, q);
    if (p.floored[0] || !(p.H[0] > 0.0)) throw std::invalid_argument("almgren_rescale: H(v,r) below the floor");
    const double d = std::sqrt(p.H[0] / std::pow(r, v.grid->n() + v.grid->a()));
    return rescale(v, center, r, d);
}

Field homogeneous_rescale(const Field& v, const std::array<double, 2>& center, double r) {
    return rescale(v, center, r, std::pow(r, kappa0(v.grid->a())));
}

IdentityCheck identity_checks(const RadialProfile& p) {
    IdentityCheck out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.floored[i]) continue;
        const double scale = std::max({std::abs(p.I[i]), std::abs(p.I_identity[i]), 1e-300});
        out.energy_identity = std::max(out.energy_identity, std::abs(p.I[i] - p.I_identity[i]) / scale);
    }
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (p.floored[i - 1] || p.floored[i] || p.floored[i + 1]) continue;
        // Centred difference in log r of log H, converted to H'.
        const double dlog = (std::log(p.H[i + 1]) - std::log(p.H[i - 1])) / (std::log(p.radii[i + 1]) - std::log(p.radii[i - 1]));
        const double hp_fd = dlog * p.H[i] / p.radii[i];
        const double hp_id = (p.n + p.a) / p.radii[i] * p.H[i] + 2.0 * p.I[i];
        out.h_prime_identity = std::max(out.h_prime_identity, std::abs(hp_fd - hp_id) / std::max(std::abs(hp_id), 1e-300));
    }
    return out;
}

double heat_kernel_constant(int n, double a) {
    return std::pow(4.0 * std::numbers::pi, -0.5 * n) / (std::pow(2.0, a) * std::tgamma(0.5 * (a + 1.0)));
}

double heat_kernel(int n, double a, std::span<const double> X, double t) {
    if (!(t < 0.0)) return 0.0;
    double r2 = 0.0;
    for (double x : X) r2 += x * x;
    return heat_kernel_constant(n, a) * std::pow(-t, -0.5 * (n + a + 1.0)) * std::exp(r2 / (4.0 * t));
}

namespace {

// Golub-Welsch for a symmetric Jacobi matrix with diagonal d and off-diagonal e;
// mu0 is the total mass of the weight.
Rule1D golub_welsch(const std::vector<double>& d, const std::vector<double>& e, double mu0) {
    const int m = static_cast<int>(d.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) J(i, i) = d[i];
    for (int i = 0; i + 1 < m; ++i) J(i, i + 1) = J(i + 1, i) = e[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule1D rule;
    for (int i = 0; i < m; ++i) {
        rule.nodes.push_back(es.eigenvalues()(i));
        const double v0 = es.eigenvectors()(0, i);
        rule.weights.push_back(mu0 * v0 * v0);
    }
    return rule;
}

// Nodes/weights for int g(z) e^{-z^2} dz / sqrt(pi) over R.
Rule1D hermite_probability(int m) {
    std::vector<double> d(m, 0.0), e(m > 0 ? m - 1 : 0);
    for (int i = 0; i + 1 < m; ++i) e[i] = std::sqrt(0.5 * (i + 1));
    return golub_welsch(d, e, 1.0);
}

// Nodes/weights for int g(eta) 2 eta^a e^{-eta^2} d eta / Gamma((a+1)/2) over (0, inf),
// from generalized Laguerre in u = eta^2 with alpha = (a-1)/2.
Rule1D half_hermite_probability(int m, double a) {
    const double alpha = 0.5 * (a - 1.0);
    std::vector<double> d(m), e(m > 0 ? m - 1 : 0);
    for (int i = 0; i < m; ++i) d[i] = 2.0 * i + alpha + 1.0;
    for (int i = 0; i + 1 < m; ++i) e[i] = std::sqrt((i + 1.0) * (i + 1.0 + alpha));
    Rule1D u = golub_welsch(d, e, 1.0);
    for (double& x : u.nodes) x = std::sqrt(std::max(x, 0.0));
    return u;
}

}  // namespace

std::vector<Field> zero_obstacle_slices(const Trajectory& traj, const ParabolicProblem& problem) {
    std::vector<Field> out;
    out.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        Field v = traj.fields[k].v;
        const ThinField psi = problem.sample_psi(traj.times[k]);
        const WeightedGrid& g = *v.grid;
        for (std::size_t t = 0; t < g.thin_count(); ++t) {
            for (int j = 0; j < g.ny(); ++j) v.values[g.index(t, j)] -= psi.values[t];
        }
        v.time = traj.times[k];
        out.push_back(std::move(v));
    }
    return out;
}

RadialProfile parabolic_H(const std::vector<Field>& slices, const std::vector<double>& times,
                          const std::array<double, 2>& center, double t0, const std::vector<double>& radii,
                          const ParabolicOptions& opts) {
    if (slices.empty() || slices.size() != times.size()) throw std::invalid_argument("parabolic_H: slices/times mismatch");
    const WeightedGrid& g = *slices.front().grid;
    const int n = g.n();
    const double a = g.a();
    const double rmax_t = radii.empty() ? 0.0 : *std::max_element(radii.begin(), radii.end());
    if (t0 - rmax_t * rmax_t < times.front() - 1e-12 || t0 > times.back() + 1e-12) {
        throw std::invalid_argument("parabolic_H: trajectory does not cover (t0 - r^2, t0]");
    }
    const Rule1D gh = hermite_probability(opts.hermite_points);
    const Rule1D hh = half_hermite_probability(opts.laguerre_points, a);
    // s in (0,1), tau = -r^2 s^2: the integrand vanishes like |tau|^{kappa} at tau = 0.
    const Rule1D gt = gauss_legendre(opts.time_points, 0.0, 1.0);

    std::vector<FieldInterpolator> interps;
    interps.reserve(slices.size());
    for (const auto& s : slices) interps.emplace_back(*s.grid, s.values);
    auto value_at = [&](std::span<const double> X, double t) {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - times.begin(), 1, static_cast<std::ptrdiff_t>(times.size()) - 1));
        if (times.size() == 1) return interps[0].value(X);
        const std::size_t lo = hi - 1;
        const double w = std::clamp((t - times[lo]) / (times[hi] - times[lo]), 0.0, 1.0);
        return (1.0 - w) * interps[lo].value(X) + w * interps[hi].value(X);
    };

    RadialProfile p;
    p.n = n;
    p.a = a;
    p.center = center;
    p.time = t0;
    p.radii = radii;
    p.H_par.assign(radii.size(), 0.0);
    p.H_par_tail.assign(radii.size(), 0.0);
    std::vector<double> X(static_cast<std::size_t>(n + 1));
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        double total = 0.0, tail = 0.0;
        for (std::size_t q = 0; q < gt.nodes.size(); ++q) {
            const double sq = gt.nodes[q];
            const double tau = -r * r * sq * sq;
            const double wt = gt.weights[q] * 2.0 * sq;  // d tau = r^2 2 s ds; the 1/r^2 prefactor cancels r^2
            const double scale = 2.0 * std::sqrt(-tau);
            double slice = 0.0, lost = 0.0;
            const std::size_t nx2 = n == 2 ? gh.nodes.size() : 1;
            for (std::size_t i1 = 0; i1 < gh.nodes.size(); ++i1) {
                for (std::size_t i2 = 0; i2 < nx2; ++i2) {
                    for (std::size_t iy = 0; iy < hh.nodes.size(); ++iy) {
                        X[0] = center[0] + scale * gh.nodes[i1];
                        if (n == 2) X[1] = center[1] + scale * gh.nodes[i2];
                        X[n] = scale * hh.nodes[iy];
                        double w = gh.weights[i1] * hh.weights[iy];
                        if (n == 2) w *= gh.weights[i2];
                        bool inside = std::abs(X[0]) <= g.spec().R && X[n] <= g.spec().Y;
                        if (n == 2) inside = inside && std::abs(X[1]) <= g.spec().R;
                        if (!inside) {
                            lost += w;
                            continue;
                        }
                        const double u = value_at(X, t0 + tau);
                        slice += w * u * u;
                    }
                }
            }
            total += wt * slice;
            tail += wt * lost;
        }
        p.H_par[i] = total;
        p.H_par_tail[i] = tail;
    }
    return p;
}

ParabolicFrequency parabolic_frequency(const std::vector<Field>& slices, const std::vector<double>& times,
                                       const std::array<double, 2>& center, double t0,
                                       const std::vector<double>& radii, const FrequencyParams& params,
                                       const ParabolicOptions& opts) {
    if (radii.size() < 3) throw std::invalid_argument("parabolic_frequency: need at least 3 radii");
    ParabolicFrequency out;
    out.profile = parabolic_H(slices, times, center, t0, radii, opts);
    RadialProfile& p = out.profile;
    const std::size_t m = radii.size();
    const double power = 2.0 * params.ell - 2.0 + 2.0 * params.sigma;
    std::vector<double> logm(m);
    p.truncated.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        const double trunc = std::pow(radii[i], power);
        p.truncated[i] = p.H_par[i] > trunc ? 0 : 1;
        logm[i] = std::log(std::max(p.H_par[i], trunc));
    }
    p.Phi_par.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == m ? m - 1 : i + 1;
        const double slope = (logm[hi] - logm[lo]) / (std::log(radii[hi]) - std::log(radii[lo]));
        const double ex = std::exp(params.C_par * std::pow(radii[i], 1.0 - params.sigma));
        p.Phi_par[i] = 0.5 * ex * slope + 4.0 * (ex - 1.0);
    }
    out.kappa_hat = p.Phi_par.front();
    for (std::size_t i = 1; i < m; ++i) {
        const double d = std::abs(p.Phi_par[i] - p.Phi_par[i - 1]);
        if (d > 0.1 * std::max(std::abs(p.Phi_par[i]), std::abs(p.Phi_par[i - 1]))) out.noisy = true;
    }
    out.monotone = is_nondecreasing(p.Phi_par, 1e-2);
    return out;
}

void write_profile_csv(std::ostream& os, const RadialProfile& p) {
    auto col = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : std::nan(""); };
    os << "r,H,G,D,I,N,Phi_delta,W_k0,W_0,quad_err\n";
    os.precision(12);
    for (std::size_t i = 0; i < p.size(); ++i) {
        os << p.radii[i] << ',' << col(p.H, i) << ',' << col(p.G, i) << ',' << col(p.D, i) << ',' << col(p.I, i) << ','
           << col(p.N, i) << ',' << col(p.Phi_delta, i) << ',' << col(p.W_k0, i) << ',' << col(p.W_0, i) << ','
           << col(p.quad_err, i) << '\n';
    }
}

}  // namespace signorini
