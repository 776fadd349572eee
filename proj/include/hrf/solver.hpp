#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hrf/common.hpp"

namespace hrf {

// Barrier interior-point solver for small determinant-constrained programs
// over Hermitian PSD matrix blocks plus optional free real scalars.
//
// Decision variable layout: each block of dimension n contributes n*n real
// coordinates through hermitian_basis(n); blocks are laid out in order,
// followed by the free scalars. All expression types below reference that
// global coordinate vector.

// Orthonormal basis of n x n Hermitian matrices under <A,B> = Re tr(A B).
// Ordering: row-major over the upper triangle; the diagonal slot (k,k) is
// E_kk, an off-diagonal slot (k,l) contributes (E_kl + E_lk)/sqrt(2) then
// (i E_kl - i E_lk)/sqrt(2).
std::vector<Eigen::MatrixXcd> hermitian_basis(int n);

enum class SolveStatus { optimal, infeasible, max_iter, numerical_error };

const char* solve_status_name(SolveStatus s);

struct SolveReport {
    double objective = 0.0;           // attained maximum
    double constraint_violation = 0.0;  // worst violation at the returned point
    int iterations = 0;               // total Newton steps
    double certificate_gap = 0.0;     // barrier suboptimality bound at exit
    SolveStatus status = SolveStatus::numerical_error;
    std::string message;
};

// Affine real-valued expression: sum_b Re tr(C_b X_b) + f . s + offset.
// An empty (0x0) block coefficient means no dependence on that block.
struct LinearExpr {
    std::vector<Eigen::MatrixXcd> block_coeff;
    Eigen::VectorXd free_coeff;  // may be empty
    double offset = 0.0;
};

// scale * log2 det(base + sum_terms sum_f F X_b F^H) + offset.
struct LogDetExpr {
    struct Term {
        int block = 0;
        std::vector<Eigen::MatrixXcd> factors;  // each F adds F X_b F^H
    };
    int dim = 0;
    Eigen::MatrixXcd base;  // value of the argument at X = 0
    std::vector<Term> terms;
    double scale = 1.0;
    double offset = 0.0;
};

// S0 + sum_a x[coord_a] * S_a must stay positive definite (real symmetric).
struct AffinePsd {
    Eigen::MatrixXd s0;
    std::vector<std::pair<int, Eigen::MatrixXd>> coeffs;  // (global coord, S_a)
};

struct ConvexProblem {
    std::vector<int> block_dims;
    std::vector<double> trace_caps;  // per block, tr(X_b) <= cap (cap > 0)
    int num_free = 0;

    // Exactly one of the two objectives; both are maximized.
    std::optional<LinearExpr> linear_objective;
    std::optional<LogDetExpr> logdet_objective;

    std::vector<LinearExpr> linear_ge;  // each expression >= 0
    struct LogDetGe {
        LogDetExpr expr;
        double floor = 0.0;
    };
    std::vector<LogDetGe> logdet_ge;  // expr value >= floor
    std::vector<AffinePsd> affine_psd;

    // Optional strictly feasible start; without one the solver centers each
    // block at (cap / 2n) I and sets free scalars to 1.
    std::vector<Eigen::MatrixXcd> start_blocks;
    Eigen::VectorXd start_free;
};

struct SolveResult {
    std::vector<Eigen::MatrixXcd> blocks;
    Eigen::VectorXd free_vars;
    SolveReport report;
};

// Deterministic path-following solve; never throws on infeasibility (status
// carries it), throws std::invalid_argument on malformed problem data.
SolveResult solve_convex(const ConvexProblem& prob);

}  // namespace hrf
