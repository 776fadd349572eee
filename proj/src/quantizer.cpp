#include "hrf/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hrf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Quantile of the standard normal by bisection; used only to seed the
// Newton solve, so 60 halvings of [-10, 10] are more than enough.
double normal_quantile(double p) {
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// P(a < X < b) without tail cancellation: difference of survival functions
// on the positive side, of CDFs otherwise.
double interval_prob(double a, double b) {
    if (a == -kInf) return (b == kInf) ? 1.0 : normal_cdf(b);
    if (b == kInf) return normal_sf(a);
    return a >= 0.0 ? normal_sf(a) - normal_sf(b) : normal_cdf(b) - normal_cdf(a);
}

// Conditional mean of a standard Gaussian on (a, b):
// E[X | a < X < b] = (phi(a) - phi(b)) / (Phi(b) - Phi(a)).
double conditional_mean(double a, double b) {
    double num = normal_pdf(a) - normal_pdf(b);
    return num / interval_prob(a, b);
}

// Residual of the Lloyd condition and its tridiagonal Jacobian w.r.t. the
// levels, with thresholds tied to level midpoints (Max condition).
void lloyd_residual_and_jacobian(const std::vector<double>& l, std::vector<double>& r,
                                 std::vector<double>& sub, std::vector<double>& diag,
                                 std::vector<double>& sup) {
    int n = static_cast<int>(l.size());
    for (int i = 0; i < n; ++i) {
        double t_lo = (i == 0) ? -kInf : 0.5 * (l[i - 1] + l[i]);
        double t_hi = (i == n - 1) ? kInf : 0.5 * (l[i] + l[i + 1]);
        double p = interval_prob(t_lo, t_hi);
        double m = (normal_pdf(t_lo) - normal_pdf(t_hi)) / p;
        r[i] = l[i] - m;
        // dm/dt_lo = phi(t_lo)(m - t_lo)/p, dm/dt_hi = phi(t_hi)(t_hi - m)/p;
        // each threshold moves by half a level step.
        double dm_lo = (i == 0) ? 0.0 : normal_pdf(t_lo) * (m - t_lo) / p;
        double dm_hi = (i == n - 1) ? 0.0 : normal_pdf(t_hi) * (t_hi - m) / p;
        sub[i] = -0.5 * dm_lo;
        diag[i] = 1.0 - 0.5 * (dm_lo + dm_hi);
        sup[i] = -0.5 * dm_hi;
    }
}

void thomas_solve(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                  std::vector<double>& rhs) {
    int n = static_cast<int>(rhs.size());
    for (int i = 1; i < n; ++i) {
        double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

}  // namespace

Quantizer design_lloyd_max(int bits) {
    if (bits < 1 || bits > 16)
        throw std::domain_error("design_lloyd_max: bits must lie in 1..16");
    int n = 1 << bits;

    std::vector<double> l(n);
    for (int i = 0; i < n; ++i) l[i] = normal_quantile((i + 0.5) / n);

    std::vector<double> r(n), sub(n), diag(n), sup(n);
    double res = kInf;
    const int max_iter = 200;
    for (int it = 0; it < max_iter; ++it) {
        lloyd_residual_and_jacobian(l, r, sub, diag, sup);
        res = 0.0;
        for (double v : r) res = std::max(res, std::abs(v));
        if (res < 1e-13) break;
        std::vector<double> step = r;
        thomas_solve(sub, diag, sup, step);
        double damp = 1.0;
        std::vector<double> trial(n);
        for (int half = 0; half < 30; ++half) {
            for (int i = 0; i < n; ++i) trial[i] = l[i] - damp * step[i];
            if (strictly_increasing(trial)) break;
            damp *= 0.5;
        }
        l = trial;
    }
    if (!(res < 1e-10))
        throw std::runtime_error("design_lloyd_max: Newton stalled, Lloyd residual " +
                                 std::to_string(res));

    // The Gaussian source is symmetric; remove the residual asymmetry so the
    // codebook (and everything derived from it) is exactly odd.
    for (int i = 0; i < n / 2; ++i) {
        double v = 0.5 * (l[n - 1 - i] - l[i]);
        l[i] = -v;
        l[n - 1 - i] = v;
    }

    Quantizer q;
    q.bits = bits;
    q.levels = l;
    q.thresholds.resize(n + 1);
    q.thresholds.front() = -kInf;
    q.thresholds.back() = kInf;
    for (int i = 1; i < n; ++i) q.thresholds[i] = 0.5 * (l[i - 1] + l[i]);

    // eta = 1 - sum_b level_b (phi(t_b) - phi(t_{b+1})) = E[(X - Q(X))^2].
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += l[i] * (normal_pdf(q.thresholds[i]) - normal_pdf(q.thresholds[i + 1]));
    q.eta = 1.0 - acc;
    return q;
}

double lloyd_residual(const Quantizer& q) {
    double res = 0.0;
    for (std::size_t i = 0; i < q.levels.size(); ++i)
        res = std::max(res, std::abs(q.levels[i] -
                                     conditional_mean(q.thresholds[i], q.thresholds[i + 1])));
    return res;
}

int bin_index(double y, const Quantizer& q, double scale) {
    double z = y / scale;
    auto first = q.thresholds.begin() + 1;
    auto last = q.thresholds.end() - 1;
    return static_cast<int>(std::upper_bound(first, last, z) - first);
}

double quantize_component(double y, const Quantizer& q, double scale) {
    return scale * q.levels[bin_index(y, q, scale)];
}

QuantizedFrame quantize(const Eigen::VectorXcd& r, const Quantizer& q,
                        const Eigen::VectorXd& scale) {
    if (scale.size() != r.size())
        throw std::invalid_argument("quantize: one scale per antenna is required");
    if ((scale.array() <= 0.0).any())
        throw std::domain_error("quantize: scales must be > 0");
    QuantizedFrame out;
    out.scale = scale;
    out.r_q.resize(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i)
        out.r_q[i] = cd(quantize_component(r[i].real(), q, scale[i]),
                        quantize_component(r[i].imag(), q, scale[i]));
    return out;
}

double bussgang_gain(const Quantizer& q) { return 1.0 - q.eta; }

double adc_dynamic_range(int bits) {
    if (bits < 1) throw std::domain_error("adc_dynamic_range: bits must be >= 1");
    return 6.02 * bits + 1.76;
}

MinBitsResult min_bits_for_dr(double dr_sig_db, double margin_db) {
    if (margin_db < 0.0) throw std::domain_error("min_bits_for_dr: margin must be >= 0");
    for (int b = 1; b <= 16; ++b)
        if (adc_dynamic_range(b) >= dr_sig_db + margin_db) return {b, false};
    return {16, true};
}

Eigen::MatrixXcd arcsine_covariance(const Eigen::MatrixXcd& r_in) {
    Eigen::Index n = r_in.rows();
    if (r_in.cols() != n) throw std::invalid_argument("arcsine_covariance: square input");
    double scale = r_in.norm();
    if ((r_in - r_in.adjoint()).norm() > 1e-9 * std::max(1.0, scale))
        throw std::invalid_argument("arcsine_covariance: input must be Hermitian");

    Eigen::VectorXd inv_sqrt_diag(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = r_in(i, i).real();
        if (!(d > 0.0))
            throw std::domain_error("arcsine_covariance: degenerate (non-positive) diagonal");
        inv_sqrt_diag[i] = 1.0 / std::sqrt(d);
    }

    auto clamped_asin = [](double v) {
        if (v > 1.0 + 1e-9 || v < -1.0 - 1e-9)
            throw std::domain_error("arcsine_covariance: normalized correlation exceeds 1");
        return std::asin(std::clamp(v, -1.0, 1.0));
    };

    Eigen::MatrixXcd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                // rho_ii = 1 analytically; the rounded product would push
                // asin onto its infinite-slope point and lose ~1e-8.
                out(i, i) = 1.0;
                continue;
            }
            cd rho = r_in(i, j) * inv_sqrt_diag[i] * inv_sqrt_diag[j];
            out(i, j) = (2.0 / kPi) * cd(clamped_asin(rho.real()), clamped_asin(rho.imag()));
        }
    return out;
}

}  // namespace hrf
