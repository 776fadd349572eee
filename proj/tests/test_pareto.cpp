#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "hrf/common.hpp"
#include "hrf/fisher.hpp"
#include "hrf/pareto.hpp"
#include "hrf/quantizer.hpp"
#include "hrf/rate.hpp"
#include "hrf/scenario.hpp"

using namespace hrf;

namespace {

// Two BS antennas, one two-antenna user observing the lone target: the
// sensing objective is linear in (R0, R_user), so its optimum is rank-1 in
// each block separately, and the uplink is low-SNR enough that the rate
// optimum is rank-1 too. Exhaustive search over rank-1 candidates is exact.
Scenario toy_scenario() {
    Scenario s;
    s.carrier_hz = 24e9;
    s.num_bs_antennas = 2;
    s.antenna_spacing_ratio = 0.5;
    s.noise_variance = 1e-3;
    s.bs_max_power = 1.0;
    TargetSpec t;
    t.aoa_rad = 0.4;
    t.range_m = 60.0;
    t.rcs_m2 = 1.0;
    t.gain_override = cd(8e-3, 3e-3);
    s.targets.push_back(t);
    UserSpec u;
    u.num_antennas = 2;
    u.aoa_rad = -0.2;
    u.aod_rad = 0.0;
    u.range_m = 70.0;
    u.max_power = 1.0;
    u.direct_gain_override = cd(5e-3, -2e-3);
    u.observed_targets = {0};
    u.per_target_aod_rad = {0.1};
    u.per_target_path_m = {140.0};
    u.reflected_gain_override = {cd(2e-3, 1e-3)};
    s.users.push_back(u);
    s.ofdm.subcarrier_spacing_hz = 15e3;
    s.ofdm.num_symbols = 1;
    s.ofdm.samples_per_symbol = 4;
    s.ofdm.dl_subcarriers = {0};
    s.ofdm.ul_subcarriers = {{1}};
    s.ofdm.dl_symbol_variance = 1.0;
    s.ofdm.ul_symbol_variances = {1.0};
    s.finalize();
    return s;
}

BoundWeights weights_for(const Scenario& sc, int bits) {
    return fim_bound_weights(sc, design_lloyd_max(bits).eta,
                             dr_observability_mask(sc, bits));
}

double crb_of_pair(const BoundWeights& w, const Eigen::MatrixXcd& r0,
                   const std::vector<Eigen::MatrixXcd>& rk) {
    double f = contract_bound(w, r0, rk)(0, 0);
    return f > 0.0 ? 1.0 / f : std::numeric_limits<double>::infinity();
}

double rate_of_pair(const Scenario& sc, int bits,
                    const std::vector<Eigen::MatrixXcd>& rk) {
    SignalCovariance cov = signal_covariance(Eigen::MatrixXcd(), rk, sc, 0);
    double eta = design_lloyd_max(bits).eta;
    return bits == 1 ? mi_one_bit(cov.matrix, sc.noise_variance,
                                  sc.ofdm.subcarrier_spacing_hz)
                           .mi_bits_per_symbol
                     : mi_lower_bound(cov.matrix, eta, sc.noise_variance,
                                      sc.ofdm.subcarrier_spacing_hz)
                           .mi_bits_per_symbol;
}

Eigen::MatrixXcd random_psd_capped(std::mt19937_64& rng, int n, double cap) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cd(gauss(rng), gauss(rng));
    Eigen::MatrixXcd r = a * a.adjoint();
    return (cap * unif(rng) / r.trace().real()) * r;
}

void check_pair_invariants(const Scenario& sc, const CovariancePair& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e0(cov.r0, Eigen::EigenvaluesOnly);
    CHECK(e0.eigenvalues().minCoeff() >= -1e-9);
    CHECK(cov.r0.trace().real() <= sc.bs_max_power + 1e-8);
    REQUIRE(cov.rk.size() == static_cast<std::size_t>(sc.num_users()));
    for (int k = 0; k < sc.num_users(); ++k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ek(cov.rk[k],
                                                           Eigen::EigenvaluesOnly);
        CHECK(ek.eigenvalues().minCoeff() >= -1e-9);
        CHECK(cov.rk[k].trace().real() <= sc.users[k].max_power + 1e-8);
    }
}

Eigen::VectorXcd unit_dir(double t, double phi) {
    Eigen::VectorXcd u(2);
    u(0) = std::cos(t);
    u(1) = std::polar(std::sin(t), phi);
    return u;
}

}  // namespace

TEST_CASE("endpoint solves dominate random feasible covariance pairs") {
    Scenario sc = toy_scenario();
    int bits = 4;
    BoundWeights w = weights_for(sc, bits);

    ParetoPoint p0 = solve_p0(sc, bits, 0.0);
    REQUIRE(p0.report.status == SolveStatus::optimal);
    CHECK(p0.mu_bits == 0.0);
    CHECK(p0.crb > 0.0);
    CHECK(std::isfinite(p0.crb));
    check_pair_invariants(sc, p0.covariances);
    // Sensing power is never left on the table: the BS cap saturates.
    CHECK(std::abs(p0.covariances.r0.trace().real() - sc.bs_max_power) < 1e-6);

    ParetoPoint p1 = solve_p1(sc, bits, 0.0);
    REQUIRE(p1.report.status == SolveStatus::optimal);
    CHECK(p1.rate_bits > 0.0);
    check_pair_invariants(sc, p1.covariances);

    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        Eigen::MatrixXcd r0 = random_psd_capped(rng, 2, sc.bs_max_power);
        std::vector<Eigen::MatrixXcd> rk = {
            random_psd_capped(rng, 2, sc.users[0].max_power)};
        CHECK(crb_of_pair(w, r0, rk) >= p0.crb * (1.0 - 1e-4));
        CHECK(rate_of_pair(sc, bits, rk) <= p1.rate_bits * (1.0 + 1e-4));
    }
}

// Exhaustive-with-refinement maximization of fn over rank-1 directions.
template <typename Fn>
double grid_max_rank1(Fn&& fn) {
    double best = -std::numeric_limits<double>::infinity();
    double best_t = 0.0, best_phi = 0.0;
    for (int it = 0; it <= 180; ++it)
        for (int ip = 0; ip < 360; ++ip) {
            double t = kPi / 2.0 * it / 180.0, phi = -kPi + 2.0 * kPi * ip / 360.0;
            double f = fn(unit_dir(t, phi));
            if (f > best) best = f, best_t = t, best_phi = phi;
        }
    for (int it = -20; it <= 20; ++it)
        for (int ip = -20; ip <= 20; ++ip) {
            double f = fn(unit_dir(best_t + it * 1e-3, best_phi + ip * 2e-3));
            best = std::max(best, f);
        }
    return best;
}

TEST_CASE("N=2 toy endpoints match exhaustive rank-1 grid search") {
    Scenario sc = toy_scenario();
    double pb = sc.bs_max_power, pu = sc.users[0].max_power;

    // Sensing endpoint: the target FIM is linear in (R0, R_user), so each
    // block maximizes independently over full-power rank-1 candidates.
    int bits = 4;
    BoundWeights w = weights_for(sc, bits);
    Eigen::MatrixXcd half_user = 0.5 * pu * Eigen::MatrixXcd::Identity(2, 2);
    double echo_part = grid_max_rank1([&](const Eigen::VectorXcd& u) {
        return contract_bound(w, pb * (u * u.adjoint()), {half_user})(0, 0);
    });
    Eigen::MatrixXcd half_bs = 0.5 * pb * Eigen::MatrixXcd::Identity(2, 2);
    double user_part = grid_max_rank1([&](const Eigen::VectorXcd& v) {
        return contract_bound(w, half_bs, {pu * (v * v.adjoint())})(0, 0);
    });
    double half_cross = contract_bound(w, half_bs, {half_user})(0, 0);
    double best_f = echo_part + user_part - half_cross;  // linearity in the blocks
    double grid_crb = 1.0 / best_f;
    ParetoPoint p0 = solve_p0(sc, bits, 0.0);
    CHECK(std::abs(p0.crb - grid_crb) <= 1e-3 * grid_crb);

    // Rate endpoint: at this SNR the log-det optimum is rank-1 at full user
    // power. Check both the log-det and one-bit objectives.
    for (int b : {4, 1}) {
        double grid_rate = grid_max_rank1([&](const Eigen::VectorXcd& v) {
            return rate_of_pair(sc, b, {pu * (v * v.adjoint())});
        });
        ParetoPoint p1 = solve_p1(sc, b, 0.0);
        CHECK(std::abs(p1.rate_bits - grid_rate) <= 1e-3 * grid_rate);
    }
}

TEST_CASE("rate floors and CRB ceilings trade off monotonically") {
    Scenario sc = toy_scenario();
    int bits = 4;

    ParetoPoint p0 = solve_p0(sc, bits, 0.0);
    ParetoPoint p1 = solve_p1(sc, bits, 0.0);
    double lmax = p1.rate_bits;
    REQUIRE(lmax > 0.0);
    REQUIRE(p1.crb > p0.crb);

    double prev_crb = 0.0;
    for (double frac : {0.0, 0.25, 0.5, 0.75, 0.95}) {
        ParetoPoint p = solve_p0(sc, bits, frac * lmax);
        REQUIRE(p.report.status == SolveStatus::optimal);
        check_pair_invariants(sc, p.covariances);
        CHECK(p.rate_bits >= frac * lmax - 1e-6 * std::max(1.0, frac * lmax));
        CHECK(p.crb >= prev_crb * (1.0 - 1e-9));
        prev_crb = p.crb;
    }

    double prev_rate = 0.0;
    for (double mult : {1.02, 1.5, 3.0, 10.0}) {
        ParetoPoint p = solve_p1(sc, bits, mult * p0.crb);
        REQUIRE(p.report.status == SolveStatus::optimal);
        check_pair_invariants(sc, p.covariances);
        CHECK(p.crb <= mult * p0.crb * (1.0 + 1e-6));
        CHECK(p.rate_bits >= prev_rate * (1.0 - 1e-9));
        prev_rate = p.rate_bits;
    }
    // A ceiling far above the rate-optimal CRB is inactive.
    ParetoPoint relaxed = solve_p1(sc, bits, 1e6 * p1.crb);
    CHECK(std::abs(relaxed.rate_bits - lmax) <= 1e-6 * lmax);

    // A ceiling equal to the best attainable CRB still admits the sensing
    // optimum; the returned rate can be no worse than that point's rate.
    ParetoPoint pinned = solve_p1(sc, bits, p0.crb);
    CHECK(pinned.report.status == SolveStatus::optimal);
    CHECK(pinned.crb <= p0.crb * (1.0 + 1e-6));
    CHECK(pinned.rate_bits >= p0.rate_bits - 1e-6 * std::max(1.0, p0.rate_bits));

    // Unattainable floor/ceiling requests surface as infeasible with a hint.
    ParetoPoint too_fast = solve_p0(sc, bits, 1.5 * lmax);
    CHECK(too_fast.report.status == SolveStatus::infeasible);
    CHECK(too_fast.report.message.find("maximum achievable rate") != std::string::npos);
    ParetoPoint too_sharp = solve_p1(sc, bits, 0.5 * p0.crb);
    CHECK(too_sharp.report.status == SolveStatus::infeasible);
    CHECK(!too_sharp.report.message.empty());

    CHECK_THROWS_AS(solve_p1(sc, bits, -1.0), std::domain_error);
    CHECK_THROWS_AS(solve_p0(sc, 0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_p0(sc, 17, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_p0(sc, 4, 0.0, 3), std::out_of_range);
}

TEST_CASE("rank-1 extraction recovers factors and reports the gap") {
    std::mt19937_64 rng(37);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd f(3);
    for (int i = 0; i < 3; ++i) f(i) = cd(gauss(rng), gauss(rng));

    Rank1Extraction ex = extract_rank1(f * f.adjoint());
    REQUIRE(ex.defined);
    CHECK(ex.gap <= 1e-12);
    CHECK((ex.f * ex.f.adjoint() - f * f.adjoint()).norm() <=
          1e-10 * f.squaredNorm());
    CHECK(std::abs(ex.f.squaredNorm() - f.squaredNorm()) <= 1e-10 * f.squaredNorm());

    Rank1Extraction id2 = extract_rank1(Eigen::MatrixXcd::Identity(2, 2));
    REQUIRE(id2.defined);
    CHECK(id2.gap == doctest::Approx(0.5).epsilon(1e-12));

    // Known spectrum: eigenvalues 3 and 1 give gap 1 - 3/4.
    Eigen::MatrixXcd q(2, 2);
    q << cd(std::sqrt(0.5), 0), cd(-std::sqrt(0.5), 0),
        cd(0, std::sqrt(0.5)), cd(0, std::sqrt(0.5));
    Eigen::MatrixXcd spec = q * Eigen::Vector2cd(3.0, 1.0).asDiagonal() * q.adjoint();
    Rank1Extraction two = extract_rank1(spec);
    CHECK(two.gap == doctest::Approx(0.25).epsilon(1e-10));

    CHECK_FALSE(extract_rank1(Eigen::MatrixXcd::Zero(3, 3)).defined);
    CHECK_FALSE(extract_rank1(Eigen::MatrixXcd()).defined);
    CHECK_THROWS_AS(extract_rank1(Eigen::MatrixXcd::Zero(2, 3)),
                    std::invalid_argument);
}

TEST_CASE("boundary sweep orders points between consistent endpoints") {
    Scenario sc = toy_scenario();
    int bits = 4;
    CHECK_THROWS_AS(boundary_sweep(sc, bits, 1), std::invalid_argument);

    ParetoPoint a = solve_p0(sc, bits, 0.0);
    ParetoPoint b = solve_p1(sc, bits, 0.0);
    // Genuine trade-off: the endpoints are strictly ordered in both axes, so
    // the rate sort cannot scramble them.
    REQUIRE(b.rate_bits > a.rate_bits * (1.0 + 1e-6));
    REQUIRE(b.crb > a.crb * (1.0 + 1e-6));
    std::vector<ParetoPoint> two = boundary_sweep(sc, bits, 2);
    REQUIRE(two.size() == 2);
    CHECK(two.front().crb == a.crb);
    CHECK(two.back().rate_bits == b.rate_bits);

    std::vector<ParetoPoint> pts = boundary_sweep(sc, bits, 6);
    REQUIRE(pts.size() == 6);
    CHECK(std::abs(pts.front().crb - a.crb) <= 1e-12 * a.crb);
    CHECK(std::abs(pts.back().rate_bits - b.rate_bits) <= 1e-12 * b.rate_bits);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        REQUIRE(pts[i].report.status == SolveStatus::optimal);
        check_pair_invariants(sc, pts[i].covariances);
        CHECK(pts[i].rate_bits >=
              pts[i].mu_bits - 1e-6 * std::max(1.0, pts[i].mu_bits));
        if (i > 0) {
            CHECK(pts[i].rate_bits >= pts[i - 1].rate_bits * (1.0 - 1e-9));
            CHECK(pts[i].crb >= pts[i - 1].crb * (1.0 - 1e-9));
        }
    }

    // Re-running the sweep reproduces it exactly.
    std::vector<ParetoPoint> again = boundary_sweep(sc, bits, 6);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(again[i].crb == pts[i].crb);
        CHECK(again[i].rate_bits == pts[i].rate_bits);
    }

    // Ceiling-driven sweep covers the same range.
    std::vector<ParetoPoint> gpts = boundary_sweep_gamma(sc, bits, 4);
    REQUIRE(gpts.size() == 4);
    for (std::size_t i = 1; i < gpts.size(); ++i)
        CHECK(gpts[i].rate_bits >= gpts[i - 1].rate_bits * (1.0 - 1e-9));
    CHECK(std::abs(gpts.front().crb - a.crb) <= 1e-12 * a.crb);
    CHECK(std::abs(gpts.back().rate_bits - b.rate_bits) <= 1e-12 * b.rate_bits);
}

TEST_CASE("coarse quantization flattens the default-scenario boundary") {
    Scenario sc = default_scenario();
    std::vector<ParetoPoint> pts = boundary_sweep(sc, 1, 4);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : pts) {
        REQUIRE(p.report.status == SolveStatus::optimal);
        lo = std::min(lo, p.crb);
        hi = std::max(hi, p.crb);
    }
    CHECK(hi / lo - 1.0 < 0.01);
}
