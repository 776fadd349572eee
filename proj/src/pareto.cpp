#include "hrf/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "hrf/quantizer.hpp"
#include "hrf/signal_model.hpp"

namespace hrf {
namespace {

constexpr double kEndpointSlack = 1e-9;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Eigen::MatrixXcd herm(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

// Everything solve_p0/solve_p1 share for one (scenario, bits, target) triple.
struct Precomp {
    const Scenario* sc = nullptr;
    int bits = 0, target = 0, np = 0, K = 0, N = 0;
    double eta = 0.0, sigma2 = 0.0, delta_f = 0.0;
    BoundWeights w;  // DR-gated sensing weights
    std::vector<int> user_dims;
    std::vector<double> user_caps;
    Eigen::MatrixXcd g0;               // echo weight of the (target, target) pair
    std::vector<Eigen::MatrixXcd> gk;  // per-user weight of that pair
    double lam0 = 0.0;
    Eigen::MatrixXcd r0_star;  // sensing-optimal BS covariance (exact for P = 1)
    double f0_star = 0.0;      // echo FIM contribution of r0_star
    bool one_bit = false;
    std::vector<std::vector<Eigen::MatrixXcd>> rate_factors;  // per user, per subcarrier
    std::vector<Eigen::MatrixXcd> rate_coeff;                 // 1-bit linear coefficients
};

Precomp precompute(const Scenario& sc, int bits, int target) {
    if (bits < 1 || bits > 16) throw std::invalid_argument("pareto: bits must lie in 1..16");
    if (target < 0 || target >= sc.num_targets())
        throw std::out_of_range("pareto: target index out of range");

    Precomp pc;
    pc.sc = &sc;
    pc.bits = bits;
    pc.target = target;
    pc.np = sc.num_targets();
    pc.K = sc.num_users();
    pc.N = sc.num_bs_antennas;
    pc.eta = design_lloyd_max(bits).eta;
    pc.sigma2 = sc.noise_variance;
    pc.delta_f = sc.ofdm.subcarrier_spacing_hz;
    pc.w = fim_bound_weights(sc, pc.eta, dr_observability_mask(sc, bits));
    pc.g0 = herm(pc.w.w0[target][target]);
    for (int k = 0; k < pc.K; ++k) {
        pc.gk.push_back(herm(pc.w.wk[k][target][target]));
        pc.user_dims.push_back(sc.users[k].num_antennas);
        pc.user_caps.push_back(sc.users[k].max_power);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pc.g0);
    pc.lam0 = std::max(0.0, es.eigenvalues()(pc.N - 1));
    if (pc.lam0 > 0.0) {
        Eigen::VectorXcd u0 = es.eigenvectors().col(pc.N - 1);
        pc.r0_star = sc.bs_max_power * (u0 * u0.adjoint());
    } else {
        pc.r0_star = (sc.bs_max_power / (2.0 * pc.N)) *
                     Eigen::MatrixXcd::Identity(pc.N, pc.N);
    }
    pc.f0_star = (pc.r0_star * pc.g0).trace().real();

    pc.one_bit = bits == 1;
    double c = (1.0 - pc.eta) / pc.sigma2;
    for (int k = 0; k < pc.K; ++k) {
        double var = sc.ofdm.ul_symbol_variances[k];
        std::vector<Eigen::MatrixXcd> factors;
        Eigen::MatrixXcd coeff =
            Eigen::MatrixXcd::Zero(pc.user_dims[k], pc.user_dims[k]);
        for (int m : sc.ofdm.ul_subcarriers[k]) {
            Eigen::MatrixXcd h = channel_direct(k, 0, m, 0, sc).entries;
            for (const auto& rl : sc.links().users[k].reflected)
                h += channel_reflected(k, rl.target_index, 0, m, 0, sc).entries;
            factors.push_back(std::sqrt(c * var) * h);
            coeff += (2.0 / (kPi * pc.sigma2 * std::log(2.0))) * var * (h.adjoint() * h);
        }
        pc.rate_factors.push_back(std::move(factors));
        pc.rate_coeff.push_back(herm(coeff));
    }
    return pc;
}

// Rate floor / objective expressions; block_offset shifts user block indices
// so the same data serves both user-only and joint layouts.
LogDetExpr make_rate_ld(const Precomp& pc, int block_offset) {
    LogDetExpr e;
    e.dim = pc.N;
    e.base = Eigen::MatrixXcd::Identity(pc.N, pc.N);
    for (int k = 0; k < pc.K; ++k) {
        LogDetExpr::Term t;
        t.block = k + block_offset;
        t.factors = pc.rate_factors[k];
        e.terms.push_back(std::move(t));
    }
    return e;
}

LinearExpr make_rate_lin(const Precomp& pc, int block_offset, int n_blocks, double floor) {
    LinearExpr e;
    e.block_coeff.resize(n_blocks);
    for (int k = 0; k < pc.K; ++k) e.block_coeff[k + block_offset] = pc.rate_coeff[k];
    e.offset = -floor;
    return e;
}

RateValue rate_of(const Precomp& pc, const std::vector<Eigen::MatrixXcd>& rk) {
    Eigen::MatrixXcd no_echo;
    SignalCovariance cov = signal_covariance(no_echo, rk, *pc.sc, 0);
    return pc.one_bit ? mi_one_bit(cov.matrix, pc.sigma2, pc.delta_f)
                      : mi_lower_bound(cov.matrix, pc.eta, pc.sigma2, pc.delta_f);
}

ParetoPoint make_point(const Precomp& pc, CovariancePair cov, SolveReport rep) {
    ParetoPoint p;
    p.covariances = std::move(cov);
    p.report = std::move(rep);
    RateValue rv = rate_of(pc, p.covariances.rk);
    p.rate_bits = rv.mi_bits_per_symbol;
    p.rate_kbps = rv.rate_kbps;
    FimResult fr;
    fr.matrix = contract_bound(pc.w, p.covariances.r0, p.covariances.rk);
    fr.kind = FimKind::low_snr_bound;
    for (int i = 0; i < pc.np; ++i)
        fr.param_labels.push_back(param_label({ParamRef::Kind::target_aoa, i, 0}));
    try {
        p.crb = crb(fr, pc.target).value;
    } catch (const std::runtime_error& e) {
        p.crb = std::numeric_limits<double>::infinity();
        p.report.message += std::string("; CRB undefined: ") + e.what();
    }
    return p;
}

std::vector<Eigen::MatrixXcd> center_blocks(const Precomp& pc) {
    std::vector<Eigen::MatrixXcd> out;
    for (int k = 0; k < pc.K; ++k)
        out.push_back((pc.user_caps[k] / (2.0 * pc.user_dims[k])) *
                      Eigen::MatrixXcd::Identity(pc.user_dims[k], pc.user_dims[k]));
    return out;
}

SolveResult solve_rate_max(const Precomp& pc) {
    ConvexProblem prob;
    prob.block_dims = pc.user_dims;
    prob.trace_caps = pc.user_caps;
    if (pc.one_bit)
        prob.linear_objective = make_rate_lin(pc, 0, pc.K, 0.0);
    else
        prob.logdet_objective = make_rate_ld(pc, 0);
    return solve_convex(prob);
}

// Strictly feasible user blocks with rate > mu: the analytic center when it
// already clears the floor, otherwise a blend toward the rate maximizer
// (rate is concave, so the blend rate interpolates at least linearly).
std::vector<Eigen::MatrixXcd> rate_feasible_start(const Precomp& pc, double mu, double lmax,
                                                  const std::vector<Eigen::MatrixXcd>& rmax) {
    std::vector<Eigen::MatrixXcd> centers = center_blocks(pc);
    double lc = rate_of(pc, centers).mi_bits_per_symbol;
    if (lc > mu + 1e-9 * std::max(1.0, mu)) return centers;
    double s_full = (lmax - mu) / std::max(lmax - lc, 1e-300);
    double s = std::clamp(0.5 * s_full, 1e-12, 0.5);
    std::vector<Eigen::MatrixXcd> out;
    for (int k = 0; k < pc.K; ++k) out.push_back((1.0 - s) * rmax[k] + s * centers[k]);
    return out;
}

// Joint (R0, users, t) program for multi-target scenarios: minimize t with
// the Schur complement certificate [[F(R), e_t], [e_t^T, t]] PSD, where F is
// the gated FIM lower bound, linear in every block.
AffinePsd schur_constraint(const Precomp& pc, bool with_free_t, double corner) {
    int np = pc.np;
    AffinePsd ap;
    ap.s0 = Eigen::MatrixXd::Zero(np + 1, np + 1);
    ap.s0(pc.target, np) = 1.0;
    ap.s0(np, pc.target) = 1.0;
    ap.s0(np, np) = corner;  // gamma for the fixed-ceiling form, 0 with free t

    int coord = 0;
    auto add_block = [&](int dim, auto weight) {
        std::vector<Eigen::MatrixXcd> basis = hermitian_basis(dim);
        for (int a = 0; a < dim * dim; ++a) {
            Eigen::MatrixXd fa = Eigen::MatrixXd::Zero(np + 1, np + 1);
            for (int i = 0; i < np; ++i)
                for (int j = i; j < np; ++j) {
                    double v = 0.5 * (basis[a].transpose().cwiseProduct(weight(i, j)).sum() +
                                      basis[a].transpose().cwiseProduct(weight(j, i)).sum())
                                   .real();
                    fa(i, j) = v;
                    fa(j, i) = v;
                }
            if (fa.norm() > 0.0) ap.coeffs.emplace_back(coord + a, fa);
        }
        coord += dim * dim;
    };
    add_block(pc.N, [&](int i, int j) -> const Eigen::MatrixXcd& { return pc.w.w0[i][j]; });
    for (int k = 0; k < pc.K; ++k)
        add_block(pc.user_dims[k],
                  [&](int i, int j) -> const Eigen::MatrixXcd& { return pc.w.wk[k][i][j]; });
    if (with_free_t) {
        Eigen::MatrixXd st = Eigen::MatrixXd::Zero(np + 1, np + 1);
        st(np, np) = 1.0;
        ap.coeffs.emplace_back(coord, st);  // coord == total block coords == t
    }
    return ap;
}

// CRB of the target at given blocks under the gated bound; infinity when the
// bound FIM is singular.
double crb_at(const Precomp& pc, const Eigen::MatrixXcd& r0,
              const std::vector<Eigen::MatrixXcd>& rk) {
    Eigen::MatrixXd f = contract_bound(pc.w, r0, rk);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
    double lmin = es.eigenvalues().minCoeff();
    double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin >= 1e12)
        return std::numeric_limits<double>::infinity();
    double v = 0.0;
    for (int j = 0; j < pc.np; ++j) {
        double e = es.eigenvectors()(pc.target, j);
        v += e * e / es.eigenvalues()[j];
    }
    return v;
}

ParetoPoint schur_p0(const Precomp& pc, double mu, double lmax,
                     const std::vector<Eigen::MatrixXcd>* rmax) {
    ConvexProblem prob;
    prob.block_dims.push_back(pc.N);
    prob.trace_caps.push_back(pc.sc->bs_max_power);
    for (int k = 0; k < pc.K; ++k) {
        prob.block_dims.push_back(pc.user_dims[k]);
        prob.trace_caps.push_back(pc.user_caps[k]);
    }
    prob.num_free = 1;
    LinearExpr obj;
    obj.free_coeff = Eigen::VectorXd::Constant(1, -1.0);
    prob.linear_objective = obj;
    prob.affine_psd.push_back(schur_constraint(pc, true, 0.0));
    if (mu > 0.0) {
        if (pc.one_bit)
            prob.linear_ge.push_back(make_rate_lin(pc, 1, pc.K + 1, mu));
        else
            prob.logdet_ge.push_back({make_rate_ld(pc, 1), mu});
    }

    Eigen::MatrixXcd r0_start = 0.5 * pc.r0_star +
                                (0.25 * pc.sc->bs_max_power / pc.N) *
                                    Eigen::MatrixXcd::Identity(pc.N, pc.N);
    std::vector<Eigen::MatrixXcd> users_start =
        mu > 0.0 && rmax ? rate_feasible_start(pc, mu, lmax, *rmax) : center_blocks(pc);
    double t0 = crb_at(pc, r0_start, users_start);
    if (!std::isfinite(t0)) {
        // fall back to the analytic center of the box before giving up
        r0_start = (pc.sc->bs_max_power / (2.0 * pc.N)) *
                   Eigen::MatrixXcd::Identity(pc.N, pc.N);
        t0 = crb_at(pc, r0_start, users_start);
    }
    ParetoPoint p;
    if (!std::isfinite(t0)) {
        p = make_point(pc, {r0_start, users_start}, {});
        p.report.status = SolveStatus::infeasible;
        p.report.message = "FIM lower bound is singular at every candidate start";
        p.mu_bits = mu;
        return p;
    }
    prob.start_blocks.push_back(r0_start);
    for (auto& u : users_start) prob.start_blocks.push_back(u);
    prob.start_free = Eigen::VectorXd::Constant(1, 2.0 * t0);

    SolveResult sr = solve_convex(prob);
    CovariancePair cov;
    cov.r0 = sr.blocks[0];
    cov.rk.assign(sr.blocks.begin() + 1, sr.blocks.end());
    p = make_point(pc, std::move(cov), sr.report);
    p.mu_bits = mu;
    return p;
}

ParetoPoint schur_p1(const Precomp& pc, double gamma) {
    ConvexProblem prob;
    prob.block_dims.push_back(pc.N);
    prob.trace_caps.push_back(pc.sc->bs_max_power);
    for (int k = 0; k < pc.K; ++k) {
        prob.block_dims.push_back(pc.user_dims[k]);
        prob.trace_caps.push_back(pc.user_caps[k]);
    }
    if (pc.one_bit)
        prob.linear_objective = make_rate_lin(pc, 1, pc.K + 1, 0.0);
    else
        prob.logdet_objective = make_rate_ld(pc, 1);
    prob.affine_psd.push_back(schur_constraint(pc, false, gamma));

    // Candidate starts from rate-leaning to sensing-heavy; the ceiling picks
    // the first one whose certificate matrix is strictly feasible.
    std::vector<Eigen::MatrixXcd> centers = center_blocks(pc);
    std::vector<std::pair<Eigen::MatrixXcd, std::vector<Eigen::MatrixXcd>>> cands;
    Eigen::MatrixXcd center0 = (pc.sc->bs_max_power / (2.0 * pc.N)) *
                               Eigen::MatrixXcd::Identity(pc.N, pc.N);
    cands.emplace_back(center0, centers);
    for (double s : {0.5, 0.1, 1e-3, 1e-6}) {
        Eigen::MatrixXcd r0s = (1.0 - s) * pc.r0_star + s * center0;
        std::vector<Eigen::MatrixXcd> us;
        for (int k = 0; k < pc.K; ++k) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pc.gk[k]);
            Eigen::MatrixXcd sharp;
            if (es.eigenvalues()(pc.user_dims[k] - 1) > 0.0) {
                Eigen::VectorXcd u = es.eigenvectors().col(pc.user_dims[k] - 1);
                sharp = pc.user_caps[k] * (u * u.adjoint());
            } else {
                sharp = 2.0 * centers[k];
            }
            us.push_back((1.0 - s) * sharp + s * centers[k]);
        }
        cands.emplace_back(r0s, std::move(us));
    }
    bool found = false;
    for (auto& [r0s, us] : cands) {
        double t = crb_at(pc, r0s, us);
        if (std::isfinite(t) && t < gamma * (1.0 - 1e-12)) {
            prob.start_blocks.push_back(r0s);
            for (auto& u : us) prob.start_blocks.push_back(u);
            found = true;
            break;
        }
    }
    ParetoPoint p;
    if (!found) {
        p = make_point(pc, {pc.r0_star, centers}, {});
        p.report.status = SolveStatus::infeasible;
        p.report.message = "CRB ceiling " + fmt(gamma) + " rad^2 appears unattainable";
        p.gamma = gamma;
        return p;
    }
    SolveResult sr = solve_convex(prob);
    CovariancePair cov;
    cov.r0 = sr.blocks[0];
    cov.rk.assign(sr.blocks.begin() + 1, sr.blocks.end());
    p = make_point(pc, std::move(cov), sr.report);
    p.gamma = gamma;
    return p;
}

}  // namespace

ParetoPoint solve_p0(const Scenario& sc, int bits, double mu_bits, int target_index) {
    Precomp pc = precompute(sc, bits, target_index);

    double lmax = 0.0;
    SolveResult rm;
    if (mu_bits > 0.0) {
        rm = solve_rate_max(pc);
        lmax = rm.report.objective;
        if (mu_bits > lmax * (1.0 + kEndpointSlack) + 1e-12) {
            ParetoPoint p = make_point(pc, {pc.r0_star, rm.blocks}, rm.report);
            p.mu_bits = mu_bits;
            p.report.status = SolveStatus::infeasible;
            p.report.message = "rate floor " + fmt(mu_bits) +
                               " bits exceeds the maximum achievable rate " + fmt(lmax) +
                               " bits";
            return p;
        }
        if (mu_bits >= lmax * (1.0 - kEndpointSlack)) {
            // the feasible set collapses onto the rate maximizer
            ParetoPoint p = make_point(pc, {pc.r0_star, rm.blocks}, rm.report);
            p.mu_bits = mu_bits;
            return p;
        }
    }

    if (pc.np > 1)
        return schur_p0(pc, mu_bits, lmax, mu_bits > 0.0 ? &rm.blocks : nullptr);

    // Single target: the target FIM is scalar and linear in the covariances,
    // so the echo part is maximized analytically by r0_star and only the user
    // blocks need the solver.
    ConvexProblem prob;
    prob.block_dims = pc.user_dims;
    prob.trace_caps = pc.user_caps;
    LinearExpr obj;
    obj.block_coeff = pc.gk;
    prob.linear_objective = obj;
    if (mu_bits > 0.0) {
        if (pc.one_bit)
            prob.linear_ge.push_back(make_rate_lin(pc, 0, pc.K, mu_bits));
        else
            prob.logdet_ge.push_back({make_rate_ld(pc, 0), mu_bits});
        prob.start_blocks = rate_feasible_start(pc, mu_bits, lmax, rm.blocks);
    }
    SolveResult sr = solve_convex(prob);
    ParetoPoint p = make_point(pc, {pc.r0_star, sr.blocks}, sr.report);
    p.mu_bits = mu_bits;
    return p;
}

ParetoPoint solve_p1(const Scenario& sc, int bits, double gamma, int target_index) {
    if (gamma < 0.0) throw std::domain_error("solve_p1: gamma must be >= 0");
    Precomp pc = precompute(sc, bits, target_index);

    if (gamma == 0.0) {
        // deactivated ceiling: pure rate maximization, sensing-optimal r0
        SolveResult sr = solve_rate_max(pc);
        ParetoPoint p = make_point(pc, {pc.r0_star, sr.blocks}, sr.report);
        p.gamma = 0.0;
        p.mu_bits = p.rate_bits;
        return p;
    }
    if (pc.np > 1) return schur_p1(pc, gamma);

    double rhs = 1.0 / gamma - pc.f0_star;
    ConvexProblem prob;
    prob.block_dims = pc.user_dims;
    prob.trace_caps = pc.user_caps;
    if (pc.one_bit)
        prob.linear_objective = make_rate_lin(pc, 0, pc.K, 0.0);
    else
        prob.logdet_objective = make_rate_ld(pc, 0);

    if (rhs > 0.0) {
        std::vector<double> lam_users(pc.K);
        std::vector<Eigen::VectorXcd> u_users(pc.K);
        double fmax_users = 0.0;
        for (int k = 0; k < pc.K; ++k) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pc.gk[k]);
            lam_users[k] = std::max(0.0, es.eigenvalues()(pc.user_dims[k] - 1));
            u_users[k] = es.eigenvectors().col(pc.user_dims[k] - 1);
            fmax_users += pc.user_caps[k] * lam_users[k];
        }
        double fsharp = fmax_users * (1.0 - kEndpointSlack);
        if (rhs >= fsharp) {
            ParetoPoint p = make_point(pc, {pc.r0_star, center_blocks(pc)}, {});
            p.gamma = gamma;
            p.report.status = SolveStatus::infeasible;
            p.report.message = "CRB ceiling " + fmt(gamma) +
                               " rad^2 lies below the attainable minimum " +
                               fmt(1.0 / (pc.f0_star + fmax_users)) + " rad^2";
            return p;
        }
        LinearExpr floor_expr;
        floor_expr.block_coeff = pc.gk;
        floor_expr.offset = -rhs;
        prob.linear_ge.push_back(floor_expr);

        std::vector<Eigen::MatrixXcd> centers = center_blocks(pc);
        double fc = 0.0;
        for (int k = 0; k < pc.K; ++k) fc += (centers[k] * pc.gk[k]).trace().real();
        if (fc > rhs * (1.0 + 1e-12) + 1e-300) {
            prob.start_blocks = centers;
        } else {
            double s_full = (fsharp - rhs) / std::max(fsharp - fc, 1e-300);
            double s = std::clamp(0.5 * s_full, 1e-12, 0.5);
            for (int k = 0; k < pc.K; ++k) {
                Eigen::MatrixXcd sharp =
                    lam_users[k] > 0.0
                        ? Eigen::MatrixXcd(pc.user_caps[k] * (1.0 - kEndpointSlack) *
                                           (u_users[k] * u_users[k].adjoint()))
                        : 2.0 * centers[k];
                prob.start_blocks.push_back((1.0 - s) * sharp + s * centers[k]);
            }
        }
    }
    SolveResult sr = solve_convex(prob);
    ParetoPoint p = make_point(pc, {pc.r0_star, sr.blocks}, sr.report);
    p.gamma = gamma;
    return p;
}

Rank1Extraction extract_rank1(const Eigen::MatrixXcd& r) {
    Rank1Extraction out;
    if (r.size() == 0) return out;
    if (r.rows() != r.cols())
        throw std::invalid_argument("extract_rank1: matrix must be square");
    double tr = r.trace().real();
    if (!(tr > 0.0) || r.norm() == 0.0) return out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm(r));
    int n = static_cast<int>(r.rows());
    double l1 = std::max(0.0, es.eigenvalues()(n - 1));
    out.f = std::sqrt(tr) * es.eigenvectors().col(n - 1);
    out.gap = std::clamp(1.0 - l1 / tr, 0.0, 1.0);
    out.defined = true;
    return out;
}

std::vector<ParetoPoint> boundary_sweep(const Scenario& sc, int bits, int n_points,
                                        bool log_grid, int target_index) {
    if (n_points < 2) throw std::invalid_argument("boundary_sweep: need at least 2 points");
    ParetoPoint a = solve_p0(sc, bits, 0.0, target_index);
    ParetoPoint b = solve_p1(sc, bits, 0.0, target_index);
    a.mu_bits = a.rate_bits;
    b.mu_bits = b.rate_bits;

    std::vector<ParetoPoint> pts;
    pts.reserve(n_points);
    pts.push_back(a);
    double ra = a.rate_bits, rb = b.rate_bits;
    double hi_cap = rb * (1.0 - kEndpointSlack);
    for (int i = 1; i + 1 < n_points; ++i) {
        double f = static_cast<double>(i) / (n_points - 1);
        double mu;
        if (log_grid && ra > 0.0 && rb > ra)
            mu = ra * std::pow(rb / ra, f);
        else
            mu = ra + f * (rb - ra);
        mu = std::clamp(mu, 0.0, std::max(hi_cap, 0.0));
        pts.push_back(solve_p0(sc, bits, mu, target_index));
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end(),
              [](const ParetoPoint& x, const ParetoPoint& y) {
                  return x.rate_bits < y.rate_bits;
              });
    return pts;
}

std::vector<ParetoPoint> boundary_sweep_gamma(const Scenario& sc, int bits, int n_points,
                                              int target_index) {
    if (n_points < 2)
        throw std::invalid_argument("boundary_sweep_gamma: need at least 2 points");
    ParetoPoint a = solve_p0(sc, bits, 0.0, target_index);
    ParetoPoint b = solve_p1(sc, bits, 0.0, target_index);
    a.mu_bits = a.rate_bits;
    b.mu_bits = b.rate_bits;
    a.gamma = a.crb;
    b.gamma = b.crb;

    std::vector<ParetoPoint> pts;
    pts.reserve(n_points);
    pts.push_back(a);
    double ca = a.crb, cb = b.crb;
    bool geometric = std::isfinite(ca) && std::isfinite(cb) && ca > 0.0 &&
                     cb > ca * (1.0 + 1e-12);
    for (int i = 1; i + 1 < n_points; ++i) {
        if (!geometric) {
            pts.push_back(b);
            continue;
        }
        double f = static_cast<double>(i) / (n_points - 1);
        double gamma = ca * std::pow(cb / ca, f);
        gamma = std::max(gamma, ca * (1.0 + kEndpointSlack));
        pts.push_back(solve_p1(sc, bits, gamma, target_index));
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end(),
              [](const ParetoPoint& x, const ParetoPoint& y) {
                  return x.rate_bits < y.rate_bits;
              });
    return pts;
}

}  // namespace hrf
