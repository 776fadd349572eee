#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "hrf/common.hpp"
#include "hrf/solver.hpp"

using namespace hrf;

namespace {

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cd(gauss(rng), gauss(rng));
    return 0.5 * (a + a.adjoint());
}

// Water level w with sum_i max(0, w - 1/g_i) = budget, found by bisection.
// Returns the attained log2-det value and fills the per-channel allocation.
double waterfill_value(const std::vector<double>& gains, double budget,
                       std::vector<double>* alloc = nullptr) {
    double lo = 0.0, hi = budget + 10.0;
    for (double g : gains) hi = std::max(hi, budget + 1.0 / g);
    for (int it = 0; it < 200; ++it) {
        double w = 0.5 * (lo + hi), used = 0.0;
        for (double g : gains) used += std::max(0.0, w - 1.0 / g);
        (used < budget ? lo : hi) = w;
    }
    double w = 0.5 * (lo + hi), val = 0.0;
    if (alloc) alloc->clear();
    for (double g : gains) {
        val += std::log2(std::max(1.0, w * g));
        if (alloc) alloc->push_back(std::max(0.0, w - 1.0 / g));
    }
    return val;
}

}  // namespace

TEST_CASE("hermitian basis is orthonormal and complete") {
    for (int n : {1, 2, 4}) {
        auto basis = hermitian_basis(n);
        REQUIRE(static_cast<int>(basis.size()) == n * n);
        for (std::size_t a = 0; a < basis.size(); ++a) {
            CHECK((basis[a] - basis[a].adjoint()).norm() == 0.0);
            for (std::size_t b = a; b < basis.size(); ++b) {
                double ip = (basis[a] * basis[b]).trace().real();
                CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-14);
            }
        }
        // Expansion coefficients reproduce an arbitrary Hermitian matrix.
        std::mt19937_64 rng(17 + n);
        Eigen::MatrixXcd x = random_hermitian(rng, n);
        Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(n, n);
        for (const auto& b : basis) rebuilt += (b * x).trace().real() * b;
        CHECK((rebuilt - x).norm() < 1e-12 * x.norm());
    }
    CHECK_THROWS_AS(hermitian_basis(0), std::invalid_argument);
}

TEST_CASE("scalar trace LP matches the closed form") {
    ConvexProblem p;
    p.block_dims = {1};
    p.trace_caps = {3.0};
    LinearExpr obj;
    obj.block_coeff = {Eigen::MatrixXcd::Constant(1, 1, 2.0)};
    obj.offset = 1.5;
    p.linear_objective = obj;

    SolveResult r = solve_convex(p);
    CHECK(r.report.status == SolveStatus::optimal);
    CHECK(std::abs(r.report.objective - 7.5) < 1e-6);
    CHECK(std::abs(r.blocks[0](0, 0).real() - 3.0) < 1e-6);
    CHECK(r.report.constraint_violation < 1e-6);
    CHECK(r.report.certificate_gap < 1e-5 * 7.5);
}

TEST_CASE("trace-capped linear objective attains the largest eigenvalue") {
    std::mt19937_64 rng(29);
    int n = 4;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXcd cmat = random_hermitian(rng, n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cmat, Eigen::EigenvaluesOnly);
        double lmax = es.eigenvalues().maxCoeff();
        REQUIRE(lmax > 0.05);  // deterministic draws; documents the assumption

        ConvexProblem p;
        p.block_dims = {n};
        p.trace_caps = {1.0};
        LinearExpr obj;
        obj.block_coeff = {cmat};
        p.linear_objective = obj;

        SolveResult r = solve_convex(p);
        CHECK(r.report.status == SolveStatus::optimal);
        CHECK(std::abs(r.report.objective - lmax) < 1e-4 * std::max(1.0, lmax));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> rx(r.blocks[0],
                                                           Eigen::EigenvaluesOnly);
        CHECK(rx.eigenvalues().minCoeff() > -1e-9);
        CHECK(r.blocks[0].trace().real() < 1.0 + 1e-8);
    }
}

TEST_CASE("log-det maximization reproduces waterfilling") {
    std::vector<double> gains = {4.0, 2.0, 1.0, 0.25};
    double budget = 1.0;
    int n = static_cast<int>(gains.size());

    ConvexProblem p;
    p.block_dims = {n};
    p.trace_caps = {budget};
    LogDetExpr obj;
    obj.dim = n;
    obj.base = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = std::sqrt(gains[i]);
    obj.terms.push_back({0, {d}});
    p.logdet_objective = obj;

    SolveResult r = solve_convex(p);
    std::vector<double> alloc;
    double want = waterfill_value(gains, budget, &alloc);
    CHECK(r.report.status == SolveStatus::optimal);
    CHECK(std::abs(r.report.objective - want) < 1e-6 * std::max(1.0, want));

    // The optimal covariance is the diagonal waterfilling allocation.
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(r.blocks[0](i, i).real() - alloc[i]) < 1e-4);
}

TEST_CASE("log-det floor constraint binds at the optimum") {
    // Minimize x subject to log2(1 + x) >= 2, i.e. x >= 3.
    ConvexProblem p;
    p.block_dims = {1};
    p.trace_caps = {10.0};
    LinearExpr obj;
    obj.block_coeff = {Eigen::MatrixXcd::Constant(1, 1, -1.0)};
    p.linear_objective = obj;
    LogDetExpr con;
    con.dim = 1;
    con.base = Eigen::MatrixXcd::Identity(1, 1);
    con.terms.push_back({0, {Eigen::MatrixXcd::Identity(1, 1)}});
    p.logdet_ge.push_back({con, 2.0});

    SolveResult r = solve_convex(p);
    CHECK(r.report.status == SolveStatus::optimal);
    CHECK(std::abs(r.blocks[0](0, 0).real() - 3.0) < 1e-5);
    CHECK(std::abs(r.report.objective + 3.0) < 1e-5);
}

TEST_CASE("affine PSD constraint solves the epigraph toy") {
    // Minimize x + t subject to [[x, 1], [1, t]] PSD, i.e. t >= 1/x.
    // Optimum x = t = 1 with value 2.
    ConvexProblem p;
    p.num_free = 2;
    LinearExpr obj;
    obj.free_coeff = Eigen::Vector2d(-1.0, -1.0);
    p.linear_objective = obj;
    AffinePsd psd;
    psd.s0 = (Eigen::MatrixXd(2, 2) << 0.0, 1.0, 1.0, 0.0).finished();
    psd.coeffs.emplace_back(0, (Eigen::MatrixXd(2, 2) << 1, 0, 0, 0).finished());
    psd.coeffs.emplace_back(1, (Eigen::MatrixXd(2, 2) << 0, 0, 0, 1).finished());
    p.affine_psd.push_back(psd);
    p.start_free = Eigen::Vector2d(3.0, 3.0);

    SolveResult r = solve_convex(p);
    CHECK(r.report.status == SolveStatus::optimal);
    CHECK(std::abs(r.report.objective + 2.0) < 1e-5);
    CHECK(std::abs(r.free_vars(0) - 1.0) < 1e-4);
    CHECK(std::abs(r.free_vars(1) - 1.0) < 1e-4);
}

TEST_CASE("constant objective returns the analytic center") {
    ConvexProblem p;
    p.block_dims = {1};
    p.trace_caps = {2.0};
    p.linear_objective = LinearExpr{};  // no variable dependence

    SolveResult r = solve_convex(p);
    CHECK(r.report.status == SolveStatus::optimal);
    // max log x + log(2 - x) sits at x = 1.
    CHECK(std::abs(r.blocks[0](0, 0).real() - 1.0) < 1e-6);
}

TEST_CASE("empty constraint sets are reported infeasible") {
    ConvexProblem p;
    p.block_dims = {1};
    p.trace_caps = {1.0};
    LinearExpr obj;
    obj.block_coeff = {Eigen::MatrixXcd::Identity(1, 1)};
    p.linear_objective = obj;
    LinearExpr bad;  // -x - 1 >= 0 excludes the PSD cone entirely
    bad.block_coeff = {Eigen::MatrixXcd::Constant(1, 1, -1.0)};
    bad.offset = -1.0;
    p.linear_ge.push_back(bad);

    SolveResult r = solve_convex(p);
    CHECK(r.report.status == SolveStatus::infeasible);
    CHECK(!r.report.message.empty());
}

TEST_CASE("malformed problems are rejected") {
    ConvexProblem none;
    CHECK_THROWS_AS(solve_convex(none), std::invalid_argument);

    ConvexProblem no_obj;
    no_obj.block_dims = {1};
    no_obj.trace_caps = {1.0};
    CHECK_THROWS_AS(solve_convex(no_obj), std::invalid_argument);

    ConvexProblem both = no_obj;
    both.linear_objective = LinearExpr{};
    both.logdet_objective = LogDetExpr{};
    CHECK_THROWS_AS(solve_convex(both), std::invalid_argument);

    ConvexProblem bad_cap = no_obj;
    bad_cap.trace_caps = {0.0};
    bad_cap.linear_objective = LinearExpr{};
    CHECK_THROWS_AS(solve_convex(bad_cap), std::invalid_argument);

    ConvexProblem cap_count = no_obj;
    cap_count.trace_caps = {1.0, 2.0};
    cap_count.linear_objective = LinearExpr{};
    CHECK_THROWS_AS(solve_convex(cap_count), std::invalid_argument);

    ConvexProblem bad_shape = no_obj;
    LinearExpr wide;
    wide.block_coeff = {Eigen::MatrixXcd::Identity(2, 2)};
    bad_shape.linear_objective = wide;
    CHECK_THROWS_AS(solve_convex(bad_shape), std::invalid_argument);

    ConvexProblem bad_factor = no_obj;
    LogDetExpr ld;
    ld.dim = 2;
    ld.base = Eigen::MatrixXcd::Identity(2, 2);
    ld.terms.push_back({0, {Eigen::MatrixXcd::Identity(3, 3)}});
    bad_factor.logdet_objective = ld;
    CHECK_THROWS_AS(solve_convex(bad_factor), std::invalid_argument);

    ConvexProblem bad_coord = no_obj;
    bad_coord.linear_objective = LinearExpr{};
    AffinePsd ap;
    ap.s0 = Eigen::MatrixXd::Identity(2, 2);
    ap.coeffs.emplace_back(99, Eigen::MatrixXd::Identity(2, 2));
    bad_coord.affine_psd.push_back(ap);
    CHECK_THROWS_AS(solve_convex(bad_coord), std::invalid_argument);

    ConvexProblem bad_start = no_obj;
    bad_start.linear_objective = LinearExpr{};
    bad_start.start_blocks = {Eigen::MatrixXcd::Identity(1, 1),
                              Eigen::MatrixXcd::Identity(1, 1)};
    CHECK_THROWS_AS(solve_convex(bad_start), std::invalid_argument);
}

TEST_CASE("solves are deterministic") {
    std::mt19937_64 rng(31);
    Eigen::MatrixXcd cmat = random_hermitian(rng, 3);
    ConvexProblem p;
    p.block_dims = {3};
    p.trace_caps = {2.0};
    LinearExpr obj;
    obj.block_coeff = {cmat};
    p.linear_objective = obj;

    SolveResult a = solve_convex(p);
    SolveResult b = solve_convex(p);
    CHECK(a.report.objective == b.report.objective);
    CHECK(a.report.iterations == b.report.iterations);
    CHECK((a.blocks[0] - b.blocks[0]).norm() == 0.0);
}
