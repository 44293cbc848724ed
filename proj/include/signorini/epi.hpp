#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "signorini/elliptic.hpp"

namespace signorini {

// Angular perturbation of the prototype on the unit half-circle (n = 1):
//   p(phi) = d (1 - cos phi) / 2 + sum_k c_k sin(k phi),  phi in [0, pi],
// extended evenly in y and homogeneously, w = |X|^{kappa0} (g0(phi) + t p(phi)).
// w(x,0) >= 0 on the thin set iff d >= 0 (p vanishes at phi = 0 where g0 > 0).
struct EpiPerturbation {
    double d = 1.0;
    std::vector<double> c;
};

struct EpiParams {
    double a = 0.0;
    int count = 20;
    double theta = 0.1;      // relative W^{1,2}(B_1) distance of w from the prototype
    double theta_max = 0.25;  // hypothesis bound; larger samples are flagged and excluded
    int modes = 4;
    std::uint64_t seed = 1;
    int nx = 129;
    int ny = 65;
    SolverParams solver{1e-11};
    double zero_guard = 1e-12;  // W0(w) below this (relative to ||grad w||^2) is skipped

    void validate() const;
};

struct EpiSample {
    int index = 0;
    EpiPerturbation perturbation;
    double distance = 0.0;  // relative W^{1,2}(B_1) distance
    double W0_w = 0.0;
    double W0_competitor = 0.0;
    double ratio = 0.0;
    bool rejected = false;           // w < 0 somewhere on the thin set
    bool skipped = false;            // W0(w) ~ 0
    bool out_of_hypothesis = false;  // distance > theta_max
    bool converged = false;
    int iters = 0;
};

struct EpiReport {
    double a = 0.0;
    std::vector<EpiSample> samples;
    double max_ratio = 0.0;   // over used samples
    double kappa_hat = 0.0;   // 1 - max_ratio
    int used = 0;
};

// Analytic Weiss energy W0 of the homogeneous extension of g0 + t p on B_1 and the
// relative W^{1,2} size of t p.
struct HomogeneousEnergy {
    double W0 = 0.0;
    double distance = 0.0;
};
HomogeneousEnergy homogeneous_energy(double a, const EpiPerturbation& p, double t);

// One sample scaled to relative distance theta (theta = 0 gives w = prototype).
EpiSample epi_sample(const EpiParams& params, const EpiPerturbation& p, double theta, GridPtr grid = nullptr);

// Seeded samples, d ~ U(0.2, 1), c_k ~ N(0, 1) / k, drawn until `count` have W0(w) > 0
// (at most 4 count draws).
EpiReport epi_check(const EpiParams& params);

void write_epi_csv(std::ostream& os, const EpiReport& r);

}  // namespace signorini
