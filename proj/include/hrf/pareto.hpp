#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hrf/fisher.hpp"
#include "hrf/rate.hpp"
#include "hrf/scenario.hpp"
#include "hrf/solver.hpp"

namespace hrf {

struct CovariancePair {
    Eigen::MatrixXcd r0;               // BS downlink covariance, N x N
    std::vector<Eigen::MatrixXcd> rk;  // per-user uplink covariance
};

struct Rank1Extraction {
    Eigen::VectorXcd f;     // sqrt(tr R) times the principal eigenvector
    double gap = 0.0;       // 1 - lambda_max / tr(R); 0 for an exact rank-1 R
    bool defined = false;   // false when R is (numerically) zero
};

struct ParetoPoint {
    double mu_bits = 0.0;    // rate floor the point was solved at
    double gamma = 0.0;      // CRB ceiling (gamma-swept points only)
    double crb = 0.0;        // achieved AoA CRB, rad^2
    double rate_bits = 0.0;  // achieved uplink MI, bits per subcarrier use
    double rate_kbps = 0.0;
    CovariancePair covariances;
    SolveReport report;
};

// Sensing-optimal endpoint program: minimize the AoA CRB lower bound of one
// target subject to per-node power caps and, when mu_bits > 0, an uplink
// rate floor in bits per subcarrier use. Quantization enters through the
// Lloyd-Max distortion of `bits` and through the dynamic-range gate on
// reflected paths. Reports infeasible when mu_bits exceeds the max rate.
ParetoPoint solve_p0(const Scenario& sc, int bits, double mu_bits, int target_index = 0);

// Rate-optimal endpoint program: maximize the uplink rate subject to power
// caps and, when gamma > 0, a CRB ceiling in rad^2. gamma == 0 deactivates
// the ceiling; gamma < 0 is a domain error.
ParetoPoint solve_p1(const Scenario& sc, int bits, double gamma, int target_index = 0);

// Principal rank-1 factor of a PSD covariance and its relative spectral gap.
Rank1Extraction extract_rank1(const Eigen::MatrixXcd& r);

// CRB/rate Pareto boundary: endpoint solves at both ends plus interior
// rate-floor solves on a linear (or logarithmic) mu grid, sorted by rate.
std::vector<ParetoPoint> boundary_sweep(const Scenario& sc, int bits, int n_points,
                                        bool log_grid = false, int target_index = 0);

// Alternative sweep driven by a geometric grid of CRB ceilings.
std::vector<ParetoPoint> boundary_sweep_gamma(const Scenario& sc, int bits, int n_points,
                                              int target_index = 0);

}  // namespace hrf
