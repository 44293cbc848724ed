#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "signorini/elliptic.hpp"
#include "signorini/functionals.hpp"
#include "signorini/reference.hpp"

namespace signorini {

// A free-boundary crossing between a contact node and its positive neighbour
// along `axis` in direction `dir`; `location` is the sub-cell estimate.
struct FreeBoundaryPoint {
    std::size_t contact_node = 0;  // thin index
    int axis = 0;
    int dir = 1;
    std::array<double, 2> location{0.0, 0.0};
};

struct ThinPartition {
    std::vector<std::uint8_t> contact;   // U - psi <= tol_c
    std::vector<std::uint8_t> positive;  // complement
    std::vector<FreeBoundaryPoint> fb_points;
    std::vector<std::size_t> extended_fb_points;  // boundary of {U = psi, |d_y^a U| <= reaction_tol}
    double tol_c = 0.0;
    double reaction_tol = 0.0;
    bool rim_only = false;  // contact present but every crossing sits on the lateral rim
    // Diagnostic for (3.9)-type conditions: max |grad_x U| at extended free-boundary nodes.
    double max_grad_at_extended = 0.0;
};

struct PartitionTolerances {
    double tol_c = 0.0;
    double reaction_tol = 0.0;
};

// tol_c = factor * solver_tol * ||U - psi||_inf on the thin set, and likewise for the reaction.
PartitionTolerances relative_tolerances(const SignoriniSolution& sol, double solver_tol, double factor = 10.0);

ThinPartition partition(const SignoriniSolution& sol, const PartitionTolerances& tol);
ThinPartition partition(const SignoriniSolution& sol, double solver_tol);

// Sub-cell crossing: (U - psi)^{1/kappa0} is extrapolated linearly from the two
// nearest positive nodes (exact for the prototype's profile c d^{kappa0}).
std::array<double, 2> locate_crossing(const WeightedGrid& g, std::span<const double> gap, std::size_t contact,
                                      int axis, int dir, double tol_c);

enum class Classification { Regular, Nonregular, Indeterminate };
const char* to_string(Classification c);

struct ClassifyParams {
    FrequencyParams frequency;
    double class_tol = 0.25;
    double gap_slack = 0.05;
    int radii_count = 8;
    double r_min = 0.0;  // 0 means min_trusted_radius
    double r_max = 0.5;
    QuadratureOptions quadrature{16, 18, false};
};

struct RegularPointReport {
    std::array<double, 2> point{0.0, 0.0};
    std::optional<double> time;
    double kappa_hat = 0.0;  // elliptic Phi_delta at the smallest trusted radius
    std::optional<double> kappa_par;
    Classification classification = Classification::Indeterminate;
    double growth_slope = std::nan("");
    double nondeg_constant = std::nan("");
    bool monotone = false;
    RadialProfile profile;
};

// Elliptic route on a zero-obstacle slice v with right-hand side f.
RegularPointReport classify(const Field& v, const Field* f, const std::array<double, 2>& point,
                            const ClassifyParams& params);
Classification classify_value(double kappa_hat, int n, double a, const ClassifyParams& params);

// Log-log least-squares slope of r -> sup_{Q_r} |v| with
// Q_r = {|x - x0|_inf < r, y < r, t in (t0 - r^2, t0]} over the given slices.
struct GrowthFit {
    double slope = std::nan("");
    bool floored = false;  // sup below 1e-12 ||v|| at some radius
    std::vector<double> radii, sups;
};
GrowthFit growth_fit(const std::vector<Field>& slices, const std::vector<double>& times, std::size_t k0,
                     const std::array<double, 2>& x0, const std::vector<double>& radii);

// One time slice of a reconstructed graph: along `axis` in direction `dir`,
// crossing positions g for each transverse line coordinate.
struct GraphSlice {
    double t = 0.0;
    int axis = 0;
    int dir = 1;
    std::vector<double> xprime;  // transverse coordinate (0 for n = 1)
    std::vector<double> g;
};

struct GraphReconstruction {
    std::array<double, 2> e{1.0, 0.0};
    std::vector<GraphSlice> slices;
    double lip_x = 0.0;
    double holder_t_exponent = std::nan("");
    double holder_t_target = 0.0;
    int time_pairs = 0;
};

struct GraphParams {
    std::array<double, 2> e{1.0, 0.0};
    // Optional window along the graph axis: only crossings inside [lo, hi] count.
    double window_lo = -1e300;
    double window_hi = 1e300;
    double solver_tol = 1e-8;
    int max_lag = 0;  // 0 means all pairs
};

// Thrown when some line crosses more than once inside the window.
struct NonGraphical : std::runtime_error {
    std::vector<std::size_t> lines;
    NonGraphical(std::vector<std::size_t> l, const std::string& w) : std::runtime_error(w), lines(std::move(l)) {}
};

GraphReconstruction reconstruct_graph(const std::vector<SignoriniSolution>& slices, const std::vector<double>& times,
                                      const GraphParams& params);

// Largest c with v(x,0) >= c d^{kappa0} for thin nodes on the positive side with
// 0 < d <= r2, d the distance to the graph along its axis.
double nondegeneracy_check(const Field& v, const GraphSlice& graph, double r2);

struct ConeCheck {
    bool passed = false;
    int checked = 0;
    int violations = 0;
};
// x + (C_eps(e) ∩ B_r) in the positive set and x - (C_eps(e) ∩ B_r) in the contact set,
// tested on thin nodes with exclusion radius around x.
ConeCheck cone_check(const WeightedGrid& g, const ThinPartition& part, const std::array<double, 2>& x,
                     const std::array<double, 2>& e, double eps, double r, double exclude = 0.0);

// Fit of the homogeneous rescaling v(x0 + rX)/r^{kappa0} against the prototype family.
HomogeneousFit blowup_fit(const Field& v, const std::array<double, 2>& x0, double r);

void write_graph_csv(std::ostream& os, const GraphReconstruction& g);

}  // namespace signorini
