#include "signorini/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace signorini {

PartitionTolerances relative_tolerances(const SignoriniSolution& sol, double solver_tol, double factor) {
    PartitionTolerances t;
    t.tol_c = factor * solver_tol * sol.thin_value.max_abs();
    t.reaction_tol = factor * solver_tol * sol.reaction.max_abs();
    return t;
}

std::array<double, 2> locate_crossing(const WeightedGrid& g, std::span<const double> gap, std::size_t contact,
                                      int axis, int dir, double tol_c) {
    std::array<double, 2> xc = g.thin_point(contact);
    const auto p1 = g.thin_neighbor(contact, axis, dir);
    if (!p1) return xc;
    const std::array<double, 2> xp = g.thin_point(*p1);
    const double kinv = 1.0 / kappa0(g.a());
    const double w1 = std::pow(std::max(gap[*p1], 0.0), kinv);
    double pos = xp[axis];
    const auto p2 = g.thin_neighbor(*p1, axis, dir);
    bool done = false;
    if (p2 && gap[*p2] > gap[*p1]) {
        const double w2 = std::pow(gap[*p2], kinv);
        const double x2 = g.thin_point(*p2)[axis];
        pos = xp[axis] - w1 * (x2 - xp[axis]) / (w2 - w1);
        done = true;
    }
    if (!done) {
        // Fall back to linear interpolation of the gap through the contact level.
        const double gc = gap[contact];
        const double gp = gap[*p1];
        const double s = gp > gc ? std::clamp((tol_c - gc) / (gp - gc), 0.0, 1.0) : 0.5;
        pos = xc[axis] + s * (xp[axis] - xc[axis]);
    }
    const double lo = std::min(xc[axis], xp[axis]);
    const double hi = std::max(xc[axis], xp[axis]);
    xc[axis] = std::clamp(pos, lo, hi);
    return xc;
}

ThinPartition partition(const SignoriniSolution& sol, const PartitionTolerances& tol) {
    if (!sol.v.grid) throw std::invalid_argument("partition: solution has no grid");
    const WeightedGrid& g = *sol.v.grid;
    const std::size_t nt = g.thin_count();
    if (nt == 0 || sol.thin_value.values.size() != nt) throw std::invalid_argument("partition: empty thin set");
    ThinPartition P;
    P.tol_c = tol.tol_c;
    P.reaction_tol = tol.reaction_tol;
    P.contact.assign(nt, 0);
    P.positive.assign(nt, 0);
    const auto& gap = sol.thin_value.values;
    for (std::size_t t = 0; t < nt; ++t) {
        P.contact[t] = gap[t] <= tol.tol_c ? 1 : 0;
        P.positive[t] = 1 - P.contact[t];
    }

    std::size_t n_contact = 0;
    for (auto c : P.contact) n_contact += c;
    for (std::size_t t = 0; t < nt; ++t) {
        if (!P.contact[t]) continue;
        for (int axis = 0; axis < g.n(); ++axis) {
            for (int dir : {-1, 1}) {
                const auto nb = g.thin_neighbor(t, axis, dir);
                if (!nb || !P.positive[*nb]) continue;
                FreeBoundaryPoint fp;
                fp.contact_node = t;
                fp.axis = axis;
                fp.dir = dir;
                fp.location = locate_crossing(g, gap, t, axis, dir, tol.tol_c);
                P.fb_points.push_back(fp);
            }
        }
    }
    if (n_contact == nt) {
        // Fully contacted: the only boundary of the contact set is the lateral rim.
        for (std::size_t t = 0; t < nt; ++t) {
            if (!g.on_lateral_boundary(t)) continue;
            FreeBoundaryPoint fp;
            fp.contact_node = t;
            fp.location = g.thin_point(t);
            P.fb_points.push_back(fp);
        }
    }
    if (n_contact > 0 && !P.fb_points.empty()) {
        P.rim_only = std::all_of(P.fb_points.begin(), P.fb_points.end(), [&](const FreeBoundaryPoint& p) {
            if (g.on_lateral_boundary(p.contact_node)) return true;
            const auto nb = g.thin_neighbor(p.contact_node, p.axis, p.dir);
            return nb && g.on_lateral_boundary(*nb);
        });
    }

    std::vector<std::uint8_t> ext(nt, 0);
    for (std::size_t t = 0; t < nt; ++t) {
        ext[t] = (P.contact[t] && std::abs(sol.reaction.values[t]) <= tol.reaction_tol) ? 1 : 0;
    }
    const NodalGradient grad = nodal_gradient(g, sol.v.values);
    for (std::size_t t = 0; t < nt; ++t) {
        if (!ext[t]) continue;
        bool edge = false;
        for (int axis = 0; axis < g.n() && !edge; ++axis) {
            for (int dir : {-1, 1}) {
                const auto nb = g.thin_neighbor(t, axis, dir);
                if (nb && !ext[*nb]) edge = true;
            }
        }
        if (!edge) continue;
        P.extended_fb_points.push_back(t);
        const std::size_t k = g.index(t, 0);
        double gx = grad.dx1[k] * grad.dx1[k];
        if (g.n() == 2) gx += grad.dx2[k] * grad.dx2[k];
        P.max_grad_at_extended = std::max(P.max_grad_at_extended, std::sqrt(gx));
    }
    return P;
}

ThinPartition partition(const SignoriniSolution& sol, double solver_tol) {
    return partition(sol, relative_tolerances(sol, solver_tol));
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Regular: return "regular";
        case Classification::Nonregular: return "nonregular";
        case Classification::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

Classification classify_value(double kappa_hat, int n, double a, const ClassifyParams& params) {
    if (std::abs(kappa_hat - (n + 3.0)) <= params.class_tol) return Classification::Regular;
    if (kappa_hat >= n + a + 2.0 + 2.0 * params.frequency.delta - params.gap_slack) return Classification::Nonregular;
    return Classification::Indeterminate;
}

RegularPointReport classify(const Field& v, const Field* f, const std::array<double, 2>& point,
                            const ClassifyParams& params) {
    const WeightedGrid& g = *v.grid;
    params.frequency.validate(g.a());
    const double r_min = params.r_min > 0.0 ? params.r_min : min_trusted_radius(g);
    const double r_max = std::min(params.r_max, 0.999 * max_ball_radius(g, point));
    if (!(r_max > 1.5 * r_min)) {
        throw std::invalid_argument("classify: insufficient radii inside the domain around the point");
    }
    RegularPointReport rep;
    rep.point = point;
    rep.time = v.time;
    // The truncation floor is absolute; normalising keeps the classification scale-free.
    const double scale = v.max_abs();
    Field vn = v;
    Field fn;
    if (scale > 0.0) {
        for (double& x : vn.values) x /= scale;
        if (f) {
            fn = *f;
            for (double& x : fn.values) x /= scale;
            f = &fn;
        }
    }
    rep.profile = elliptic_quantities(vn, f, point, geometric_radii(r_min, r_max, params.radii_count),
                                      params.quadrature);
    truncated_almgren(rep.profile, params.frequency);
    weiss(rep.profile);
    rep.kappa_hat = rep.profile.Phi_delta.front();
    rep.classification = classify_value(rep.kappa_hat, g.n(), g.a(), params);
    rep.monotone = is_nondecreasing(rep.profile.Phi_delta, 1e-3);
    return rep;
}

namespace {

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = m * sxx - sx * sx;
    return den > 0.0 ? (m * sxy - sx * sy) / den : std::nan("");
}

}  // namespace

GrowthFit growth_fit(const std::vector<Field>& slices, const std::vector<double>& times, std::size_t k0,
                     const std::array<double, 2>& x0, const std::vector<double>& radii) {
    if (slices.empty() || k0 >= slices.size() || times.size() != slices.size()) {
        throw std::invalid_argument("growth_fit: slice index out of range");
    }
    const WeightedGrid& g = *slices[k0].grid;
    const int n = g.n();
    double vmax = 0.0;
    for (const auto& s : slices) vmax = std::max(vmax, s.max_abs());
    GrowthFit out;
    out.radii = radii;
    std::vector<double> lx, ly;
    for (double r : radii) {
        double sup = 0.0;
        for (std::size_t k = 0; k <= k0; ++k) {
            if (k != k0 && !(times[k] > times[k0] - r * r)) continue;
            const Field& v = slices[k];
            for (std::size_t t = 0; t < g.thin_count(); ++t) {
                const auto x = g.thin_point(t);
                double d = std::abs(x[0] - x0[0]);
                if (n == 2) d = std::max(d, std::abs(x[1] - x0[1]));
                if (d > r) continue;
                for (int j = 0; j < g.ny() && g.y()[j] <= r; ++j) sup = std::max(sup, std::abs(v.values[g.index(t, j)]));
            }
            // The box faces rarely fall on nodes; sample them by interpolation.
            FieldInterpolator I(g, v.values);
            constexpr int m = 16;
            double P[3];
            auto probe = [&](double u1, double u2, double yy) {
                P[0] = x0[0] + u1;
                if (n == 2) P[1] = x0[1] + u2;
                P[n] = yy;
                sup = std::max(sup, std::abs(I.value(std::span<const double>(P, static_cast<std::size_t>(n + 1)))));
            };
            for (int q = 0; q <= m; ++q) {
                const double u = (2.0 * q / m - 1.0) * r;
                const double yy = static_cast<double>(q) / m * r;
                if (n == 1) {
                    probe(u, 0.0, r);
                    probe(-r, 0.0, yy);
                    probe(r, 0.0, yy);
                    continue;
                }
                for (int q2 = 0; q2 <= m; ++q2) {
                    const double u2 = (2.0 * q2 / m - 1.0) * r;
                    const double yy2 = static_cast<double>(q2) / m * r;
                    probe(u, u2, r);
                    for (double s : {-r, r}) {
                        probe(s, u, yy2);
                        probe(u, s, yy2);
                    }
                }
            }
        }
        out.sups.push_back(sup);
        if (sup <= 1e-12 * vmax || sup == 0.0) {
            out.floored = true;
            continue;
        }
        lx.push_back(std::log(r));
        ly.push_back(std::log(sup));
    }
    out.slope = lx.size() >= 2 ? lsq_slope(lx, ly) : std::numeric_limits<double>::infinity();
    return out;
}

namespace {

struct LineWalk {
    std::vector<std::size_t> nodes;  // along the axis in walking order
    double xprime = 0.0;
    int line = 0;
};

std::vector<LineWalk> graph_lines(const WeightedGrid& g, int axis, int dir) {
    std::vector<LineWalk> lines;
    const int nx = g.nx();
    const int count = g.n() == 1 ? 1 : nx;
    for (int l = 0; l < count; ++l) {
        LineWalk w;
        w.line = l;
        w.xprime = g.n() == 1 ? 0.0 : g.x()[l];
        for (int q = 0; q < nx; ++q) {
            const int i = dir > 0 ? q : nx - 1 - q;
            if (g.n() == 1) w.nodes.push_back(g.thin_index(i));
            else w.nodes.push_back(axis == 0 ? g.thin_index(i, l) : g.thin_index(l, i));
        }
        lines.push_back(std::move(w));
    }
    return lines;
}

}  // namespace

GraphReconstruction reconstruct_graph(const std::vector<SignoriniSolution>& slices, const std::vector<double>& times,
                                      const GraphParams& params) {
    if (slices.empty() || slices.size() != times.size()) throw std::invalid_argument("reconstruct_graph: no slices");
    const WeightedGrid& g = *slices.front().v.grid;
    GraphReconstruction out;
    double en = std::hypot(params.e[0], params.e[1]);
    if (!(en > 0.0)) throw std::invalid_argument("reconstruct_graph: direction e must be nonzero");
    out.e = {params.e[0] / en, params.e[1] / en};
    if (g.n() == 1) out.e = {out.e[0] >= 0.0 ? 1.0 : -1.0, 0.0};
    const int axis = (g.n() == 2 && std::abs(out.e[1]) > std::abs(out.e[0])) ? 1 : 0;
    const int dir = out.e[axis] >= 0.0 ? 1 : -1;
    out.holder_t_target = 2.0 / (3.0 - g.a());
    const auto lines = graph_lines(g, axis, dir);

    // Per slice: map line -> g.
    std::vector<std::vector<double>> G(slices.size(), std::vector<double>(lines.size(), std::nan("")));
    for (std::size_t k = 0; k < slices.size(); ++k) {
        const auto& sol = slices[k];
        const ThinPartition P = partition(sol, params.solver_tol);
        const auto& gap = sol.thin_value.values;
        std::vector<std::size_t> offending;
        GraphSlice gs;
        gs.t = times[k];
        gs.axis = axis;
        gs.dir = dir;
        for (std::size_t l = 0; l < lines.size(); ++l) {
            const auto& nodes = lines[l].nodes;
            int crossings = 0;
            double pos = 0.0;
            // Every phase change counts: a graph crossing is a single contact -> positive
            // transition, anything more (including positive -> contact) is not a graph.
            for (std::size_t q = 0; q + 1 < nodes.size(); ++q) {
                const bool up = P.contact[nodes[q]] && P.positive[nodes[q + 1]];
                const bool down = P.positive[nodes[q]] && P.contact[nodes[q + 1]];
                if (!up && !down) continue;
                const auto loc = up ? locate_crossing(g, gap, nodes[q], axis, dir, P.tol_c)
                                    : locate_crossing(g, gap, nodes[q + 1], axis, -dir, P.tol_c);
                if (down) {
                    if (loc[axis] >= params.window_lo && loc[axis] <= params.window_hi) crossings += 2;
                    continue;
                }
                if (loc[axis] < params.window_lo || loc[axis] > params.window_hi) continue;
                ++crossings;
                pos = loc[axis];
            }
            if (crossings > 1) offending.push_back(l);
            if (crossings == 1) {
                G[k][l] = pos;
                gs.xprime.push_back(lines[l].xprime);
                gs.g.push_back(pos);
            }
        }
        if (!offending.empty()) {
            std::string msg = "reconstruct_graph: free boundary is not a graph along e at t = " +
                              std::to_string(times[k]) + "; offending lines:";
            for (auto l : offending) msg += " " + std::to_string(l);
            throw NonGraphical(offending, msg);
        }
        out.slices.push_back(std::move(gs));
    }

    for (std::size_t k = 0; k < slices.size(); ++k) {
        for (std::size_t l = 0; l + 1 < lines.size(); ++l) {
            if (std::isnan(G[k][l]) || std::isnan(G[k][l + 1])) continue;
            out.lip_x = std::max(out.lip_x, std::abs(G[k][l + 1] - G[k][l]) / g.hx());
        }
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < slices.size(); ++i) {
        for (std::size_t j = i + 1; j < slices.size(); ++j) {
            if (params.max_lag > 0 && j - i > static_cast<std::size_t>(params.max_lag)) continue;
            const double dt = std::abs(times[j] - times[i]);
            if (!(dt > 0.0)) continue;
            for (std::size_t l = 0; l < lines.size(); ++l) {
                if (std::isnan(G[i][l]) || std::isnan(G[j][l])) continue;
                const double dg = std::abs(G[j][l] - G[i][l]);
                if (dg <= 1e-12) continue;
                lx.push_back(std::log(dt));
                ly.push_back(std::log(dg));
            }
        }
    }
    out.time_pairs = static_cast<int>(lx.size());
    if (out.time_pairs >= 4) out.holder_t_exponent = lsq_slope(lx, ly);
    return out;
}

double nondegeneracy_check(const Field& v, const GraphSlice& graph, double r2) {
    const WeightedGrid& g = *v.grid;
    const double k0 = kappa0(g.a());
    double c = std::numeric_limits<double>::infinity();
    int samples = 0;
    for (std::size_t t = 0; t < g.thin_count(); ++t) {
        const auto x = g.thin_point(t);
        double gx = std::nan("");
        if (g.n() == 1) {
            if (!graph.g.empty()) gx = graph.g.front();
        } else {
            const double xp = x[1 - graph.axis];
            for (std::size_t l = 0; l < graph.xprime.size(); ++l) {
                if (std::abs(graph.xprime[l] - xp) < 1e-9 * g.hx()) gx = graph.g[l];
            }
        }
        if (std::isnan(gx)) continue;
        const double d = graph.dir * (x[graph.axis] - gx);
        if (!(d > 0.0) || d > r2) continue;
        c = std::min(c, std::max(v.values[g.index(t, 0)], 0.0) / std::pow(d, k0));
        ++samples;
    }
    return samples > 0 ? c : 0.0;
}

ConeCheck cone_check(const WeightedGrid& g, const ThinPartition& part, const std::array<double, 2>& x,
                     const std::array<double, 2>& e, double eps, double r, double exclude) {
    ConeCheck out;
    const double en = std::hypot(e[0], e[1]);
    for (std::size_t t = 0; t < g.thin_count(); ++t) {
        const auto z = g.thin_point(t);
        const double d0 = z[0] - x[0];
        const double d1 = g.n() == 2 ? z[1] - x[1] : 0.0;
        const double dn = std::hypot(d0, d1);
        if (dn > r || dn <= exclude || dn == 0.0) continue;
        const double proj = (d0 * e[0] + d1 * e[1]) / en;
        if (proj >= eps * dn) {
            ++out.checked;
            if (!part.positive[t]) ++out.violations;
        } else if (-proj >= eps * dn) {
            ++out.checked;
            if (!part.contact[t]) ++out.violations;
        }
    }
    out.passed = out.checked > 0 && out.violations == 0;
    return out;
}

HomogeneousFit blowup_fit(const Field& v, const std::array<double, 2>& x0, double r) {
    const WeightedGrid& g = *v.grid;
    const int n = g.n();
    const double scale = std::pow(r, kappa0(g.a()));
    FieldInterpolator I(g, v.values);
    auto sampler = [&](std::span<const double> X) {
        double P[3];
        P[0] = x0[0] + r * X[0];
        if (n == 2) P[1] = x0[1] + r * X[1];
        P[n] = r * X[static_cast<std::size_t>(n)];
        return I.value(std::span<const double>(P, static_cast<std::size_t>(n + 1))) / scale;
    };
    return fit_homogeneous(n, g.a(), sampler);
}

void write_graph_csv(std::ostream& os, const GraphReconstruction& gr) {
    os << "t,xprime,g,lip_local\n";
    os.precision(12);
    for (const auto& s : gr.slices) {
        for (std::size_t l = 0; l < s.g.size(); ++l) {
            double lip = 0.0;
            for (std::size_t m : {l - 1, l + 1}) {
                if (m >= s.g.size()) continue;
                const double dx = std::abs(s.xprime[m] - s.xprime[l]);
                if (dx > 0.0) lip = std::max(lip, std::abs(s.g[m] - s.g[l]) / dx);
            }
            os << s.t << ',' << s.xprime[l] << ',' << s.g[l] << ',' << lip << '\n';
        }
    }
}

}  // namespace signorini
