#include "hrf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace hrf {

const char* solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::numerical_error: return "numerical_error";
    }
    return "unknown";
}

std::vector<Eigen::MatrixXcd> hermitian_basis(int n) {
    if (n < 1) throw std::invalid_argument("hermitian_basis: n must be >= 1");
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    const double r = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            if (l == k) {
                Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
                b(k, k) = 1.0;
                out.push_back(std::move(b));
            } else {
                Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
                s(k, l) = r;
                s(l, k) = r;
                out.push_back(std::move(s));
                Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
                t(k, l) = cd(0.0, r);
                t(l, k) = cd(0.0, -r);
                out.push_back(std::move(t));
            }
        }
    return out;
}

namespace {

constexpr double kLn2 = 0.6931471805599453;

double trace_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return a.transpose().cwiseProduct(b).sum().real();
}

double trace_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.transpose().cwiseProduct(b).sum();
}

struct LogDetData {
    int dim = 0;
    Eigen::MatrixXcd base;
    std::vector<std::pair<int, Eigen::MatrixXcd>> coeffs;
    double scale = 1.0;
    double offset = 0.0;
};

struct Context {
    const ConvexProblem* prob = nullptr;
    std::vector<int> offsets;  // coordinate offset per block
    int block_coords = 0;
    int total = 0;
    std::vector<std::vector<Eigen::MatrixXcd>> basis;
    std::vector<Eigen::VectorXd> trace_dirs;  // d_a = tr(B_a) per block

    bool obj_is_logdet = false;
    Eigen::VectorXd obj_lin;
    double obj_lin_offset = 0.0;
    LogDetData obj_ld;
    double s_obj = 0.0;  // objective normalization; 0 means centering only

    std::vector<Eigen::VectorXd> lin_vecs;
    std::vector<double> lin_offs;
    std::vector<LogDetData> ld_ge;
    std::vector<double> ld_floors;
    std::vector<AffinePsd> psd;  // symmetrized copies
    double nu = 0.0;             // total barrier parameter
};

Eigen::VectorXd dense_linear(const Context& c, const LinearExpr& e) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(c.total);
    int nb = static_cast<int>(c.prob->block_dims.size());
    for (int b = 0; b < nb && b < static_cast<int>(e.block_coeff.size()); ++b) {
        const Eigen::MatrixXcd& coeff = e.block_coeff[b];
        if (coeff.size() == 0) continue;
        int n = c.prob->block_dims[b];
        if (coeff.rows() != n || coeff.cols() != n)
            throw std::invalid_argument("solve_convex: linear coefficient dimension mismatch");
        for (int a = 0; a < n * n; ++a)
            v[c.offsets[b] + a] = trace_product(coeff, c.basis[b][a]);
    }
    if (e.free_coeff.size() != 0) {
        if (e.free_coeff.size() != c.prob->num_free)
            throw std::invalid_argument("solve_convex: free coefficient size mismatch");
        v.segment(c.block_coords, c.prob->num_free) = e.free_coeff;
    }
    return v;
}

LogDetData expand_logdet(const Context& c, const LogDetExpr& e) {
    if (e.dim < 1 || e.base.rows() != e.dim || e.base.cols() != e.dim)
        throw std::invalid_argument("solve_convex: log-det base dimension mismatch");
    if (!(e.scale > 0.0))
        throw std::invalid_argument("solve_convex: log-det scale must be positive");
    std::map<int, Eigen::MatrixXcd> acc;
    for (const auto& term : e.terms) {
        if (term.block < 0 || term.block >= static_cast<int>(c.prob->block_dims.size()))
            throw std::invalid_argument("solve_convex: log-det term references unknown block");
        int n = c.prob->block_dims[term.block];
        for (const auto& f : term.factors) {
            if (f.rows() != e.dim || f.cols() != n)
                throw std::invalid_argument("solve_convex: log-det factor shape mismatch");
            for (int a = 0; a < n * n; ++a) {
                Eigen::MatrixXcd add = f * c.basis[term.block][a] * f.adjoint();
                auto it = acc.find(c.offsets[term.block] + a);
                if (it == acc.end())
                    acc.emplace(c.offsets[term.block] + a, std::move(add));
                else
                    it->second += add;
            }
        }
    }
    LogDetData d;
    d.dim = e.dim;
    d.base = e.base;
    d.scale = e.scale;
    d.offset = e.offset;
    for (auto& [idx, m] : acc)
        if (m.norm() > 0.0) d.coeffs.emplace_back(idx, std::move(m));
    return d;
}

// Value, gradient, and Hessian of scale*log2 det(S(x)) + offset.
// Returns false when S(x) is not positive definite.
bool eval_logdet(const LogDetData& ld, const Eigen::VectorXd& x, bool derivs, double& value,
                 Eigen::VectorXd* grad, Eigen::MatrixXd* hess, int total) {
    Eigen::MatrixXcd s = ld.base;
    for (const auto& [a, m] : ld.coeffs) s += x[a] * m;
    Eigen::LLT<Eigen::MatrixXcd> llt(s);
    if (llt.info() != Eigen::Success) return false;
    double logdet = 0.0;
    for (int i = 0; i < ld.dim; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i).real());
    value = ld.scale * logdet / kLn2 + ld.offset;
    if (!derivs) return true;

    Eigen::MatrixXcd sinv = llt.solve(Eigen::MatrixXcd::Identity(ld.dim, ld.dim));
    int m = static_cast<int>(ld.coeffs.size());
    std::vector<Eigen::MatrixXcd> y(m);
    for (int i = 0; i < m; ++i) y[i] = sinv * ld.coeffs[i].second;
    grad->setZero(total);
    hess->setZero(total, total);
    double f = ld.scale / kLn2;
    for (int i = 0; i < m; ++i) (*grad)[ld.coeffs[i].first] = f * y[i].trace().real();
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            double h = -f * trace_product(y[i], y[j]);
            (*hess)(ld.coeffs[i].first, ld.coeffs[j].first) = h;
            (*hess)(ld.coeffs[j].first, ld.coeffs[i].first) = h;
        }
    return true;
}

struct Eval {
    double f0 = 0.0;
    double phi = 0.0;
    Eigen::VectorXd g0, gphi;
    Eigen::MatrixXd h0, hphi;
};

// Strict feasibility check plus barrier/objective evaluation.
bool evaluate(const Context& c, const Eigen::VectorXd& x, bool derivs, Eval& e) {
    int T = c.total;
    e.f0 = 0.0;
    e.phi = 0.0;
    if (derivs) {
        e.gphi.setZero(T);
        e.hphi.setZero(T, T);
        e.g0.setZero(T);
        e.h0.setZero(T, T);
    }

    int nb = static_cast<int>(c.prob->block_dims.size());
    for (int b = 0; b < nb; ++b) {
        int n = c.prob->block_dims[b];
        int off = c.offsets[b];
        Eigen::MatrixXcd xb = Eigen::MatrixXcd::Zero(n, n);
        for (int a = 0; a < n * n; ++a) xb += x[off + a] * c.basis[b][a];
        Eigen::LLT<Eigen::MatrixXcd> llt(xb);
        if (llt.info() != Eigen::Success) return false;
        double logdet = 0.0;
        for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i).real());
        e.phi -= logdet;
        double slack = c.prob->trace_caps[b] - xb.trace().real();
        if (!(slack > 0.0)) return false;
        e.phi -= std::log(slack);
        if (!derivs) continue;

        Eigen::MatrixXcd xinv = llt.solve(Eigen::MatrixXcd::Identity(n, n));
        std::vector<Eigen::MatrixXcd> y(n * n);
        for (int a = 0; a < n * n; ++a) {
            y[a] = xinv * c.basis[b][a];
            e.gphi[off + a] -= y[a].trace().real();
        }
        for (int a = 0; a < n * n; ++a)
            for (int d = a; d < n * n; ++d) {
                double h = trace_product(y[a], y[d]);
                e.hphi(off + a, off + d) += h;
                if (d != a) e.hphi(off + d, off + a) += h;
            }
        const Eigen::VectorXd& dirs = c.trace_dirs[b];
        e.gphi.segment(off, n * n) += dirs / slack;
        e.hphi.block(off, off, n * n, n * n) += dirs * dirs.transpose() / (slack * slack);
    }

    for (std::size_t i = 0; i < c.lin_vecs.size(); ++i) {
        double s = c.lin_vecs[i].dot(x) + c.lin_offs[i];
        if (!(s > 0.0)) return false;
        e.phi -= std::log(s);
        if (derivs) {
            e.gphi -= c.lin_vecs[i] / s;
            e.hphi += c.lin_vecs[i] * c.lin_vecs[i].transpose() / (s * s);
        }
    }

    Eigen::VectorXd gv;
    Eigen::MatrixXd hv;
    for (std::size_t i = 0; i < c.ld_ge.size(); ++i) {
        double v = 0.0;
        if (!eval_logdet(c.ld_ge[i], x, derivs, v, &gv, &hv, T)) return false;
        double slack = v - c.ld_floors[i];
        if (!(slack > 0.0)) return false;
        e.phi -= std::log(slack);
        if (derivs) {
            e.gphi -= gv / slack;
            e.hphi += -hv / slack + gv * gv.transpose() / (slack * slack);
        }
    }

    for (const auto& ap : c.psd) {
        Eigen::MatrixXd s = ap.s0;
        for (const auto& [a, m] : ap.coeffs) s += x[a] * m;
        Eigen::LLT<Eigen::MatrixXd> llt(s);
        if (llt.info() != Eigen::Success) return false;
        int n = static_cast<int>(s.rows());
        double logdet = 0.0;
        for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i));
        e.phi -= logdet;
        if (!derivs) continue;
        Eigen::MatrixXd sinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
        int m = static_cast<int>(ap.coeffs.size());
        std::vector<Eigen::MatrixXd> y(m);
        for (int i = 0; i < m; ++i) {
            y[i] = sinv * ap.coeffs[i].second;
            e.gphi[ap.coeffs[i].first] -= y[i].trace();
        }
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                double h = trace_product(y[i], y[j]);
                e.hphi(ap.coeffs[i].first, ap.coeffs[j].first) += h;
                if (j != i) e.hphi(ap.coeffs[j].first, ap.coeffs[i].first) += h;
            }
    }

    if (c.obj_is_logdet) {
        if (!eval_logdet(c.obj_ld, x, derivs, e.f0, &e.g0, &e.h0, T)) return false;
    } else {
        e.f0 = c.obj_lin.dot(x) + c.obj_lin_offset;
        if (derivs) e.g0 = c.obj_lin;
    }
    return true;
}

double merit_of(const Context& c, double t, const Eval& e) {
    return (c.s_obj > 0.0 ? -t * e.f0 / c.s_obj : 0.0) + e.phi;
}

struct NewtonOutcome {
    bool converged = false;
    bool stalled = false;
    bool numerical = false;
};

// Damped Newton minimization of -t*f0/s_obj + phi starting from a strictly
// feasible x; x is updated in place.
NewtonOutcome newton_rounds(const Context& c, Eigen::VectorXd& x, double t, int& total_steps,
                            int step_cap) {
    NewtonOutcome out;
    for (int it = 0; it < 100; ++it) {
        if (total_steps >= step_cap) return out;
        Eval e;
        if (!evaluate(c, x, true, e)) {
            out.numerical = true;
            return out;
        }
        double ts = c.s_obj > 0.0 ? t / c.s_obj : 0.0;
        Eigen::VectorXd g = -ts * e.g0 + e.gphi;
        // At a (numerically) stationary point the solved direction carries
        // only rounding noise and the strict descent test below misfires.
        if (g.norm() <= 1e-10 * (1.0 + std::abs(merit_of(c, t, e)))) {
            out.converged = true;
            return out;
        }
        Eigen::MatrixXd h = -ts * e.h0 + e.hphi;

        Eigen::VectorXd d;
        double ridge = 0.0;
        bool solved = false;
        for (int attempt = 0; attempt < 6; ++attempt) {
            Eigen::MatrixXd hr = h;
            if (ridge > 0.0) hr.diagonal().array() += ridge;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(hr);
            if (ldlt.info() == Eigen::Success) {
                d = ldlt.solve(-g);
                if (d.allFinite() && d.dot(g) < 0.0) {
                    solved = true;
                    break;
                }
            }
            ridge = ridge == 0.0 ? 1e-10 * (1.0 + h.diagonal().cwiseAbs().maxCoeff())
                                 : ridge * 100.0;
        }
        if (!solved) {
            out.numerical = true;
            return out;
        }

        double gd = g.dot(d);
        double lambda2 = -gd;
        double merit = merit_of(c, t, e);
        if (0.5 * lambda2 < 1e-11 * (1.0 + std::abs(merit))) {
            out.converged = true;
            return out;
        }

        double step = 1.0;
        bool moved = false;
        Eval trial;
        while (step > 1e-14) {
            Eigen::VectorXd xn = x + step * d;
            if (evaluate(c, xn, false, trial) &&
                merit_of(c, t, trial) <= merit + 0.25 * step * gd) {
                x = std::move(xn);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        ++total_steps;
        if (!moved) {
            out.stalled = true;
            return out;
        }
    }
    out.converged = true;  // decrement small enough for path-following purposes
    return out;
}

double point_violation(const Context& c, const Eigen::VectorXd& x) {
    double worst = 0.0;
    int nb = static_cast<int>(c.prob->block_dims.size());
    for (int b = 0; b < nb; ++b) {
        int n = c.prob->block_dims[b];
        Eigen::MatrixXcd xb = Eigen::MatrixXcd::Zero(n, n);
        for (int a = 0; a < n * n; ++a) xb += x[c.offsets[b] + a] * c.basis[b][a];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(xb, Eigen::EigenvaluesOnly);
        worst = std::max(worst, -es.eigenvalues().minCoeff());
        worst = std::max(worst, xb.trace().real() - c.prob->trace_caps[b]);
    }
    for (std::size_t i = 0; i < c.lin_vecs.size(); ++i)
        worst = std::max(worst, -(c.lin_vecs[i].dot(x) + c.lin_offs[i]));
    for (std::size_t i = 0; i < c.ld_ge.size(); ++i) {
        double v = 0.0;
        if (eval_logdet(c.ld_ge[i], x, false, v, nullptr, nullptr, c.total))
            worst = std::max(worst, c.ld_floors[i] - v);
        else
            worst = std::max(worst, 1.0);
    }
    for (const auto& ap : c.psd) {
        Eigen::MatrixXd s = ap.s0;
        for (const auto& [a, m] : ap.coeffs) s += x[a] * m;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
        worst = std::max(worst, -es.eigenvalues().minCoeff());
    }
    return worst;
}

Context build_context(const ConvexProblem& p) {
    if (p.block_dims.empty() && p.num_free == 0)
        throw std::invalid_argument("solve_convex: problem has no variables");
    if (p.trace_caps.size() != p.block_dims.size())
        throw std::invalid_argument("solve_convex: one trace cap per block is required");
    if (p.num_free < 0) throw std::invalid_argument("solve_convex: negative free count");
    if (p.linear_objective.has_value() == p.logdet_objective.has_value())
        throw std::invalid_argument("solve_convex: exactly one objective is required");

    Context c;
    c.prob = &p;
    for (std::size_t b = 0; b < p.block_dims.size(); ++b) {
        int n = p.block_dims[b];
        if (n < 1) throw std::invalid_argument("solve_convex: block dimension must be >= 1");
        if (!(p.trace_caps[b] > 0.0))
            throw std::invalid_argument("solve_convex: trace caps must be positive");
        c.offsets.push_back(c.block_coords);
        c.block_coords += n * n;
        c.basis.push_back(hermitian_basis(n));
        Eigen::VectorXd dirs(n * n);
        for (int a = 0; a < n * n; ++a) dirs[a] = c.basis.back()[a].trace().real();
        c.trace_dirs.push_back(std::move(dirs));
        c.nu += n + 1;  // block barrier plus its trace cap
    }
    c.total = c.block_coords + p.num_free;

    if (p.linear_objective) {
        c.obj_lin = dense_linear(c, *p.linear_objective);
        c.obj_lin_offset = p.linear_objective->offset;
        c.s_obj = c.obj_lin.size() > 0 ? c.obj_lin.cwiseAbs().maxCoeff() : 0.0;
    } else {
        c.obj_is_logdet = true;
        c.obj_ld = expand_logdet(c, *p.logdet_objective);
        c.s_obj = c.obj_ld.coeffs.empty() ? 0.0 : p.logdet_objective->scale;
    }

    for (const auto& le : p.linear_ge) {
        c.lin_vecs.push_back(dense_linear(c, le));
        c.lin_offs.push_back(le.offset);
        c.nu += 1.0;
    }
    for (const auto& lg : p.logdet_ge) {
        if (!std::isfinite(lg.floor))
            throw std::invalid_argument("solve_convex: log-det floor must be finite");
        c.ld_ge.push_back(expand_logdet(c, lg.expr));
        c.ld_floors.push_back(lg.floor);
        c.nu += 1.0;
    }
    for (const auto& ap : p.affine_psd) {
        if (ap.s0.rows() != ap.s0.cols() || ap.s0.rows() < 1)
            throw std::invalid_argument("solve_convex: affine PSD base must be square");
        AffinePsd sym;
        sym.s0 = 0.5 * (ap.s0 + ap.s0.transpose());
        for (const auto& [a, m] : ap.coeffs) {
            if (a < 0 || a >= c.total)
                throw std::invalid_argument("solve_convex: affine PSD coordinate out of range");
            if (m.rows() != ap.s0.rows() || m.cols() != ap.s0.cols())
                throw std::invalid_argument("solve_convex: affine PSD coefficient shape mismatch");
            sym.coeffs.emplace_back(a, 0.5 * (m + m.transpose()));
        }
        c.nu += static_cast<double>(ap.s0.rows());
        c.psd.push_back(std::move(sym));
    }
    return c;
}

Eigen::VectorXd starting_point(const Context& c) {
    const ConvexProblem& p = *c.prob;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(c.total);
    if (!p.start_blocks.empty()) {
        if (p.start_blocks.size() != p.block_dims.size())
            throw std::invalid_argument("solve_convex: start must cover every block");
        for (std::size_t b = 0; b < p.block_dims.size(); ++b) {
            int n = p.block_dims[b];
            if (p.start_blocks[b].rows() != n || p.start_blocks[b].cols() != n)
                throw std::invalid_argument("solve_convex: start block dimension mismatch");
            for (int a = 0; a < n * n; ++a)
                x[c.offsets[b] + a] = trace_product(p.start_blocks[b], c.basis[b][a]);
        }
    } else {
        for (std::size_t b = 0; b < p.block_dims.size(); ++b) {
            int n = p.block_dims[b];
            double eps = p.trace_caps[b] / (2.0 * n);
            // trace_dirs is 1 exactly on diagonal basis coordinates
            x.segment(c.offsets[b], n * n) = eps * c.trace_dirs[b];
        }
    }
    if (p.num_free > 0) {
        if (p.start_free.size() == p.num_free)
            x.segment(c.block_coords, p.num_free) = p.start_free;
        else
            x.segment(c.block_coords, p.num_free).setOnes();
    }
    return x;
}

}  // namespace

SolveResult solve_convex(const ConvexProblem& prob) {
    Context c = build_context(prob);
    Eigen::VectorXd x = starting_point(c);

    SolveResult res;
    auto extract = [&]() {
        res.blocks.clear();
        for (std::size_t b = 0; b < prob.block_dims.size(); ++b) {
            int n = prob.block_dims[b];
            Eigen::MatrixXcd xb = Eigen::MatrixXcd::Zero(n, n);
            for (int a = 0; a < n * n; ++a) xb += x[c.offsets[b] + a] * c.basis[b][a];
            res.blocks.push_back(std::move(xb));
        }
        res.free_vars = x.segment(c.block_coords, prob.num_free);
    };

    Eval probe;
    if (!evaluate(c, x, false, probe)) {
        extract();
        res.report.status = SolveStatus::infeasible;
        res.report.message = prob.start_blocks.empty()
                                 ? "no strictly feasible start found; the constraint set may be "
                                   "empty or a start must be provided"
                                 : "provided start is not strictly feasible";
        res.report.constraint_violation = point_violation(c, x);
        return res;
    }

    int total_steps = 0;
    const int step_cap = 500;
    double gap = std::numeric_limits<double>::infinity();
    SolveStatus status = SolveStatus::optimal;
    std::string message = "converged";

    if (c.s_obj == 0.0) {
        NewtonOutcome nr = newton_rounds(c, x, 0.0, total_steps, step_cap);
        gap = 0.0;
        if (nr.numerical) {
            status = SolveStatus::numerical_error;
            message = "Newton step failed during centering";
        } else {
            message = "objective has no variable dependence; returned the analytic center";
        }
    } else {
        double t = 1.0;
        for (int round = 0; round < 30; ++round) {
            NewtonOutcome nr = newton_rounds(c, x, t, total_steps, step_cap);
            if (nr.numerical) {
                status = SolveStatus::numerical_error;
                message = "Newton step failed";
                break;
            }
            Eval ef;
            evaluate(c, x, false, ef);
            gap = c.nu / t * c.s_obj;
            double tol = 1e-8 * std::max(1.0, std::abs(ef.f0));
            if (gap <= tol) {
                status = SolveStatus::optimal;
                break;
            }
            if (nr.stalled) {
                status = gap <= 1e4 * tol ? SolveStatus::optimal : SolveStatus::max_iter;
                message = "line search stalled";
                break;
            }
            if (total_steps >= step_cap) {
                status = SolveStatus::max_iter;
                message = "Newton step budget exhausted";
                break;
            }
            if (round == 29) {
                status = SolveStatus::max_iter;
                message = "path-following rounds exhausted";
            }
            t *= 10.0;
        }
    }

    extract();
    Eval fin;
    evaluate(c, x, false, fin);
    res.report.objective = fin.f0;
    res.report.certificate_gap = gap;
    res.report.iterations = total_steps;
    res.report.constraint_violation = point_violation(c, x);
    res.report.status = status;
    res.report.message = message;
    return res;
}

}  // namespace hrf
