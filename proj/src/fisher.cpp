#include "hrf/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hrf {

namespace {

constexpr double kProbFloor = 1e-300;

ReflectedLink& reflected_link(Scenario& sc, int user, int target) {
    for (auto& rl : sc.mutable_links().users.at(user).reflected)
        if (rl.target_index == target) return rl;
    throw std::out_of_range("fisher: target not observed by user");
}

const ReflectedLink& reflected_link(const Scenario& sc, int user, int target) {
    for (const auto& rl : sc.links().users.at(user).reflected)
        if (rl.target_index == target) return rl;
    throw std::out_of_range("fisher: target not observed by user");
}

// Probability mass of a standard normal on (beta, alpha); evaluated from the
// nearer tail so adjacent-bin differences keep relative accuracy.
double interval_prob(double alpha, double beta) {
    return beta > 0.0 ? normal_sf(beta) - normal_sf(alpha)
                      : normal_cdf(alpha) - normal_cdf(beta);
}

void check_psd_input(const Eigen::MatrixXcd& r, const char* what) {
    double scale = std::max(1.0, r.norm());
    if (r.rows() != r.cols() || (r - r.adjoint()).norm() > 1e-9 * scale)
        throw std::domain_error(std::string(what) + ": input must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
        throw std::domain_error(std::string(what) + ": input must be PSD");
}

// Uniform in (0, 1] from a 64-bit hash, then a Box-Muller normal draw.
double unit_from_hash(std::uint64_t h) {
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
}

double normal_draw(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t h1 = splitmix64(seed ^ splitmix64(2 * index + 1));
    std::uint64_t h2 = splitmix64(seed ^ splitmix64(2 * index + 2));
    double u1 = unit_from_hash(h1);
    double u2 = unit_from_hash(h2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace

std::string param_label(const ParamRef& p) {
    auto tag = [&]() -> std::string {
        switch (p.kind) {
            case ParamRef::Kind::target_aoa: return "target_aoa";
            case ParamRef::Kind::target_doppler: return "target_doppler";
            case ParamRef::Kind::target_delay: return "target_delay";
            case ParamRef::Kind::target_gain_re: return "target_gain_re";
            case ParamRef::Kind::target_gain_im: return "target_gain_im";
            case ParamRef::Kind::user_rx_aoa: return "user_rx_aoa";
            case ParamRef::Kind::user_aod: return "user_aod";
            case ParamRef::Kind::user_delay: return "user_delay";
            case ParamRef::Kind::user_gain_re: return "user_gain_re";
            case ParamRef::Kind::user_gain_im: return "user_gain_im";
            case ParamRef::Kind::refl_delay: return "refl_delay";
            case ParamRef::Kind::refl_aod: return "refl_aod";
            case ParamRef::Kind::refl_gain_re: return "refl_gain_re";
            case ParamRef::Kind::refl_gain_im: return "refl_gain_im";
        }
        return "unknown";
    }();
    std::string label = tag + "[" + std::to_string(p.primary);
    switch (p.kind) {
        case ParamRef::Kind::refl_delay:
        case ParamRef::Kind::refl_aod:
        case ParamRef::Kind::refl_gain_re:
        case ParamRef::Kind::refl_gain_im:
            label += "," + std::to_string(p.secondary);
            break;
        default:
            break;
    }
    return label + "]";
}

double param_value(const ParamRef& p, const Scenario& sc) {
    switch (p.kind) {
        case ParamRef::Kind::target_aoa: return sc.targets.at(p.primary).aoa_rad;
        case ParamRef::Kind::target_doppler: return sc.targets.at(p.primary).doppler_hz;
        case ParamRef::Kind::target_delay: return sc.links().targets.at(p.primary).echo_delay_s;
        case ParamRef::Kind::target_gain_re: return sc.links().targets.at(p.primary).gain.real();
        case ParamRef::Kind::target_gain_im: return sc.links().targets.at(p.primary).gain.imag();
        case ParamRef::Kind::user_rx_aoa: return sc.users.at(p.primary).aoa_rad;
        case ParamRef::Kind::user_aod: return sc.users.at(p.primary).aod_rad;
        case ParamRef::Kind::user_delay: return sc.links().users.at(p.primary).direct_delay_s;
        case ParamRef::Kind::user_gain_re: return sc.links().users.at(p.primary).direct_gain.real();
        case ParamRef::Kind::user_gain_im: return sc.links().users.at(p.primary).direct_gain.imag();
        case ParamRef::Kind::refl_delay: return reflected_link(sc, p.primary, p.secondary).delay_s;
        case ParamRef::Kind::refl_aod: return reflected_link(sc, p.primary, p.secondary).aod_rad;
        case ParamRef::Kind::refl_gain_re: return reflected_link(sc, p.primary, p.secondary).gain.real();
        case ParamRef::Kind::refl_gain_im: return reflected_link(sc, p.primary, p.secondary).gain.imag();
    }
    throw std::invalid_argument("param_value: unknown parameter kind");
}

Scenario perturbed_scenario(const Scenario& sc, const ParamRef& p, double delta) {
    Scenario out = sc;
    switch (p.kind) {
        case ParamRef::Kind::target_aoa: out.targets.at(p.primary).aoa_rad += delta; break;
        case ParamRef::Kind::target_doppler: out.targets.at(p.primary).doppler_hz += delta; break;
        case ParamRef::Kind::target_delay:
            out.mutable_links().targets.at(p.primary).echo_delay_s += delta;
            break;
        case ParamRef::Kind::target_gain_re:
            out.mutable_links().targets.at(p.primary).gain += cd(delta, 0.0);
            break;
        case ParamRef::Kind::target_gain_im:
            out.mutable_links().targets.at(p.primary).gain += cd(0.0, delta);
            break;
        case ParamRef::Kind::user_rx_aoa: out.users.at(p.primary).aoa_rad += delta; break;
        case ParamRef::Kind::user_aod: out.users.at(p.primary).aod_rad += delta; break;
        case ParamRef::Kind::user_delay:
            out.mutable_links().users.at(p.primary).direct_delay_s += delta;
            break;
        case ParamRef::Kind::user_gain_re:
            out.mutable_links().users.at(p.primary).direct_gain += cd(delta, 0.0);
            break;
        case ParamRef::Kind::user_gain_im:
            out.mutable_links().users.at(p.primary).direct_gain += cd(0.0, delta);
            break;
        case ParamRef::Kind::refl_delay:
            reflected_link(out, p.primary, p.secondary).delay_s += delta;
            break;
        case ParamRef::Kind::refl_aod:
            reflected_link(out, p.primary, p.secondary).aod_rad += delta;
            break;
        case ParamRef::Kind::refl_gain_re:
            reflected_link(out, p.primary, p.secondary).gain += cd(delta, 0.0);
            break;
        case ParamRef::Kind::refl_gain_im:
            reflected_link(out, p.primary, p.secondary).gain += cd(0.0, delta);
            break;
    }
    return out;
}

double lambda_term(double x_component, double sigma, const Quantizer& q, int bin_index,
                   double scale) {
    if (!(sigma > 0.0)) throw std::domain_error("lambda_term: sigma must be > 0");
    int n_bins = 1 << q.bits;
    if (bin_index < 1 || bin_index > n_bins)
        throw std::out_of_range("lambda_term: bin index outside 1..2^b");
    double sp = sigma / std::sqrt(2.0);
    double alpha = (q.thresholds[bin_index] * scale - x_component) / sp;
    double beta = (q.thresholds[bin_index - 1] * scale - x_component) / sp;
    double p = interval_prob(alpha, beta);
    if (p < kProbFloor) return 0.0;
    double num = normal_pdf(alpha) - normal_pdf(beta);
    return num * num / p;
}

double lambda_sum(double x_component, double sigma, const Quantizer& q, double scale) {
    double sp = sigma / std::sqrt(2.0);
    // Bins further than 40 per-component deviations from x carry no mass.
    int first = bin_index(x_component - 40.0 * sp, q, scale);
    int last = bin_index(x_component + 40.0 * sp, q, scale);
    double sum = 0.0;
    for (int b = first; b <= last; ++b)
        sum += lambda_term(x_component, sigma, q, b + 1, scale);
    return sum;
}

Eigen::VectorXd agc_scale(const Scenario& sc, const Precoders& p,
                          const SymbolSource& symbols) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(sc.num_bs_antennas);
    int count = 0;
    for (int l = 0; l < sc.ofdm.num_symbols; ++l)
        for (int v = 0; v < sc.ofdm.samples_per_symbol; ++v) {
            acc += noiseless_sample(l, v, p, sc, symbols, false).x.cwiseAbs2();
            ++count;
        }
    return ((acc / count).array() / 2.0 + sc.noise_variance / 2.0).sqrt();
}

namespace {

// Derivative provider: analytic for target AoA, relative-step central
// differences through perturbed scenario copies otherwise.
struct DerivativeSet {
    const Scenario& base;
    const Precoders& prec;
    const SymbolSource& symbols;
    struct Entry {
        bool analytic = false;
        int target = 0;
        Scenario plus, minus;
        double two_h = 0.0;
    };
    std::vector<Entry> entries;

    DerivativeSet(const Scenario& sc, const Precoders& p, const SymbolSource& sym,
                  const std::vector<ParamRef>& params)
        : base(sc), prec(p), symbols(sym) {
        for (const auto& pr : params) {
            Entry e;
            if (pr.kind == ParamRef::Kind::target_aoa) {
                e.analytic = true;
                e.target = pr.primary;
            } else {
                double h = 1e-7 * std::max(1.0, std::abs(param_value(pr, sc)));
                e.plus = perturbed_scenario(sc, pr, h);
                e.minus = perturbed_scenario(sc, pr, -h);
                e.two_h = 2.0 * h;
            }
            entries.push_back(std::move(e));
        }
    }

    Eigen::VectorXcd eval(std::size_t i, int l, int v) const {
        const Entry& e = entries[i];
        if (e.analytic) return sample_derivative_aoa(l, v, e.target, prec, base, symbols);
        Eigen::VectorXcd xp = noiseless_sample(l, v, prec, e.plus, symbols, false).x;
        Eigen::VectorXcd xm = noiseless_sample(l, v, prec, e.minus, symbols, false).x;
        return (xp - xm) / e.two_h;
    }
};

void check_finite(const Eigen::MatrixXd& m, const std::vector<std::string>& labels) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j)))
                throw std::runtime_error("fisher: non-finite FIM entry for " + labels[i]);
}

std::vector<std::string> labels_of(const std::vector<ParamRef>& params) {
    std::vector<std::string> out;
    for (const auto& p : params) out.push_back(param_label(p));
    return out;
}

}  // namespace

FimResult fim_exact(const Scenario& sc, const Precoders& p, const Quantizer& q,
                    const std::vector<ParamRef>& params, const SymbolSource& symbols) {
    if (params.empty()) throw std::invalid_argument("fim_exact: no parameters given");
    int np = static_cast<int>(params.size());
    double sigma = std::sqrt(sc.noise_variance);
    Eigen::VectorXd scale = agc_scale(sc, p, symbols);
    DerivativeSet deriv(sc, p, symbols, params);

    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(np, np);
    std::vector<Eigen::VectorXcd> dx(np);
    for (int l = 0; l < sc.ofdm.num_symbols; ++l)
        for (int v = 0; v < sc.ofdm.samples_per_symbol; ++v) {
            Eigen::VectorXcd x = noiseless_sample(l, v, p, sc, symbols, false).x;
            for (int i = 0; i < np; ++i) dx[i] = deriv.eval(i, l, v);
            for (int n = 0; n < sc.num_bs_antennas; ++n) {
                double lam_re = lambda_sum(x[n].real(), sigma, q, scale[n]);
                double lam_im = lambda_sum(x[n].imag(), sigma, q, scale[n]);
                for (int i = 0; i < np; ++i)
                    for (int j = i; j < np; ++j)
                        f(i, j) += (2.0 / sc.noise_variance) *
                                   (dx[i][n].real() * dx[j][n].real() * lam_re +
                                    dx[i][n].imag() * dx[j][n].imag() * lam_im);
            }
        }
    f = Eigen::MatrixXd(f.selfadjointView<Eigen::Upper>());

    FimResult out;
    out.matrix = f;
    out.kind = FimKind::exact;
    out.param_labels = labels_of(params);
    check_finite(out.matrix, out.param_labels);
    return out;
}

FimResult empirical_fim(const Scenario& sc, const Precoders& p, const Quantizer& q,
                        const ParamRef& param, long n_draws, std::uint64_t seed,
                        const SymbolSource& symbols) {
    if (n_draws < 100000)
        throw std::invalid_argument("empirical_fim: at least 1e5 draws are required");
    double sigma = std::sqrt(sc.noise_variance);
    double sp = sigma / std::sqrt(2.0);
    Eigen::VectorXd scale = agc_scale(sc, p, symbols);

    double h = 1e-6 * std::max(1.0, std::abs(param_value(param, sc)));
    Scenario plus = perturbed_scenario(sc, param, h);
    Scenario minus = perturbed_scenario(sc, param, -h);

    int L = sc.ofdm.num_symbols, M = sc.ofdm.samples_per_symbol, N = sc.num_bs_antennas;
    std::vector<Eigen::VectorXcd> x0(L * M), xp(L * M), xm(L * M);
    for (int l = 0; l < L; ++l)
        for (int v = 0; v < M; ++v) {
            x0[l * M + v] = noiseless_sample(l, v, p, sc, symbols, false).x;
            xp[l * M + v] = noiseless_sample(l, v, p, plus, symbols, false).x;
            xm[l * M + v] = noiseless_sample(l, v, p, minus, symbols, false).x;
        }

    // Per observed component: log-likelihood slope by central difference of
    // the bin probability at the shifted operating points.
    auto log_prob = [&](double center, double y_bin_lo, double y_bin_hi) {
        double alpha = (y_bin_hi - center) / sp;
        double beta = (y_bin_lo - center) / sp;
        return std::log(std::max(interval_prob(alpha, beta), kProbFloor));
    };

    long degenerate = 0;
    double sum_s2 = 0.0, sum_s4 = 0.0;
    std::uint64_t components = static_cast<std::uint64_t>(L) * M * N * 2;
    for (long d = 0; d < n_draws; ++d) {
        double score = 0.0;
        std::uint64_t base_idx = static_cast<std::uint64_t>(d) * components;
        for (int lv = 0; lv < L * M; ++lv)
            for (int n = 0; n < N; ++n)
                for (int comp = 0; comp < 2; ++comp) {
                    std::uint64_t idx = base_idx + (static_cast<std::uint64_t>(lv) * N + n) * 2 + comp;
                    double x = comp == 0 ? x0[lv][n].real() : x0[lv][n].imag();
                    double y = x + sp * normal_draw(seed, idx);
                    int b = bin_index(y, q, scale[n]);
                    double t_lo = q.thresholds[b] * scale[n];
                    double t_hi = q.thresholds[b + 1] * scale[n];
                    double cp = comp == 0 ? xp[lv][n].real() : xp[lv][n].imag();
                    double cm = comp == 0 ? xm[lv][n].real() : xm[lv][n].imag();
                    double lp = log_prob(cp, t_lo, t_hi);
                    double lm = log_prob(cm, t_lo, t_hi);
                    if (lp <= std::log(kProbFloor) + 1.0 || lm <= std::log(kProbFloor) + 1.0)
                        ++degenerate;
                    score += (lp - lm) / (2.0 * h);
                }
        double s2 = score * score;
        sum_s2 += s2;
        sum_s4 += s2 * s2;
    }
    if (degenerate > static_cast<long>(n_draws / 1000 + 1))
        throw std::runtime_error("empirical_fim: degenerate bins encountered; increase n_draws");

    double mean = sum_s2 / n_draws;
    double var = std::max(0.0, sum_s4 / n_draws - mean * mean);
    FimResult out;
    out.matrix = Eigen::MatrixXd::Constant(1, 1, mean);
    out.standard_error = Eigen::MatrixXd::Constant(1, 1, std::sqrt(var / n_draws));
    out.kind = FimKind::empirical;
    out.param_labels = {param_label(param)};
    check_finite(out.matrix, out.param_labels);
    return out;
}

FimResult unquantized_gaussian_fim(const Scenario& sc, const Precoders& p,
                                   const std::vector<ParamRef>& params,
                                   const SymbolSource& symbols) {
    if (params.empty()) throw std::invalid_argument("gaussian_fim: no parameters given");
    int np = static_cast<int>(params.size());
    DerivativeSet deriv(sc, p, symbols, params);
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(np, np);
    std::vector<Eigen::VectorXcd> dx(np);
    for (int l = 0; l < sc.ofdm.num_symbols; ++l)
        for (int v = 0; v < sc.ofdm.samples_per_symbol; ++v) {
            for (int i = 0; i < np; ++i) dx[i] = deriv.eval(i, l, v);
            for (int i = 0; i < np; ++i)
                for (int j = i; j < np; ++j)
                    f(i, j) += (2.0 / sc.noise_variance) * dx[i].dot(dx[j]).real();
        }
    f = Eigen::MatrixXd(f.selfadjointView<Eigen::Upper>());

    FimResult out;
    out.matrix = f;
    out.kind = FimKind::gaussian;
    out.param_labels = labels_of(params);
    check_finite(out.matrix, out.param_labels);
    return out;
}

ObservabilityMask all_open_mask(const Scenario& sc) {
    ObservabilityMask m;
    for (const auto& ul : sc.links().users)
        m.open.emplace_back(ul.reflected.size(), true);
    return m;
}

ObservabilityMask dr_observability_mask(const Scenario& sc, int bits) {
    double dr_adc = adc_dynamic_range(bits);
    ObservabilityMask m;
    for (const auto& ul : sc.links().users) {
        std::vector<bool> open;
        for (const auto& rl : ul.reflected)
            open.push_back(dr_adc >= rl.dr_sig_db + sc.dr_margin_db);
        m.open.push_back(std::move(open));
    }
    return m;
}

BoundWeights fim_bound_weights(const Scenario& sc, double eta,
                               const ObservabilityMask& mask) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::domain_error("fim_bound_weights: eta must lie in [0, 1]");
    int np = sc.num_targets();
    int N = sc.num_bs_antennas;
    int L = sc.ofdm.num_symbols;
    double M = sc.ofdm.samples_per_symbol;
    double pref = 2.0 * (1.0 - eta) / sc.noise_variance;
    double T = 1.0 / sc.ofdm.subcarrier_spacing_hz;

    std::vector<Eigen::VectorXcd> a(np), da(np);
    std::vector<Eigen::MatrixXcd> wmat(np);  // da a^T + a da^T per target
    for (int i = 0; i < np; ++i) {
        a[i] = steering_vector(sc.targets[i].aoa_rad, N, sc.antenna_spacing_ratio).entries;
        da[i] = steering_derivative(sc.targets[i].aoa_rad, N, sc.antenna_spacing_ratio);
        wmat[i] = da[i] * a[i].transpose() + a[i] * da[i].transpose();
    }

    BoundWeights w;
    w.w0.assign(np, std::vector<Eigen::MatrixXcd>(np));
    w.wk.assign(sc.num_users(),
                std::vector<std::vector<Eigen::MatrixXcd>>(
                    np, std::vector<Eigen::MatrixXcd>(np)));

    // Echo block: per (i, j) the steering part is fixed, so only the scalar
    // sum over symbols and downlink subcarriers varies. The sample sum is an
    // exact factor M because same-subcarrier phase products cancel in v.
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) {
            cd s(0.0, 0.0);
            for (int l = 0; l < L; ++l) {
                cd gi = sc.links().targets[i].gain *
                        std::polar(1.0, 2.0 * kPi * sc.targets[i].doppler_hz * l * T);
                cd gj = sc.links().targets[j].gain *
                        std::polar(1.0, 2.0 * kPi * sc.targets[j].doppler_hz * l * T);
                for (int m : sc.ofdm.dl_subcarriers) {
                    cd ci = subcarrier_phase(m, sc.links().targets[i].echo_delay_s, 0,
                                             sc.ofdm, sc.carrier_hz);
                    cd cj = subcarrier_phase(m, sc.links().targets[j].echo_delay_s, 0,
                                             sc.ofdm, sc.carrier_hz);
                    s += std::conj(gi * ci) * (gj * cj);
                }
            }
            w.w0[i][j] = (pref * sc.ofdm.dl_symbol_variance * M) * s *
                         (wmat[i].adjoint() * wmat[j]);
        }

    for (int k = 0; k < sc.num_users(); ++k) {
        int nu = sc.users[k].num_antennas;
        for (int i = 0; i < np; ++i)
            for (int j = 0; j < np; ++j)
                w.wk[k][i][j] = Eigen::MatrixXcd::Zero(nu, nu);
        const auto& ul = sc.links().users[k];
        for (std::size_t pi = 0; pi < ul.reflected.size(); ++pi) {
            if (!mask.open.at(k).at(pi)) continue;
            for (std::size_t pj = 0; pj < ul.reflected.size(); ++pj) {
                if (!mask.open.at(k).at(pj)) continue;
                const auto& ri = ul.reflected[pi];
                const auto& rj = ul.reflected[pj];
                int i = ri.target_index, j = rj.target_index;
                cd s(0.0, 0.0);
                for (int l = 0; l < L; ++l) {
                    cd gi = ri.gain * std::polar(1.0, 2.0 * kPi * sc.targets[i].doppler_hz * l * T);
                    cd gj = rj.gain * std::polar(1.0, 2.0 * kPi * sc.targets[j].doppler_hz * l * T);
                    for (int m : sc.ofdm.ul_subcarriers[k]) {
                        cd ci = subcarrier_phase(m, ri.delay_s, 0, sc.ofdm, sc.carrier_hz);
                        cd cj = subcarrier_phase(m, rj.delay_s, 0, sc.ofdm, sc.carrier_hz);
                        s += std::conj(gi * ci) * (gj * cj);
                    }
                }
                Eigen::VectorXcd aui =
                    steering_vector(ri.aod_rad, nu, sc.antenna_spacing_ratio).entries;
                Eigen::VectorXcd auj =
                    steering_vector(rj.aod_rad, nu, sc.antenna_spacing_ratio).entries;
                cd inner = da[i].adjoint() * da[j];
                w.wk[k][i][j] += (pref * sc.ofdm.ul_symbol_variances[k] * M) * s * inner *
                                 (aui.conjugate() * auj.transpose());
            }
        }
    }
    return w;
}

Eigen::MatrixXd contract_bound(const BoundWeights& w, const Eigen::MatrixXcd& r0,
                               const std::vector<Eigen::MatrixXcd>& rk) {
    int np = static_cast<int>(w.w0.size());
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(np, np);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) {
            double v = (r0 * w.w0[i][j]).trace().real();
            for (std::size_t k = 0; k < rk.size(); ++k)
                v += (rk[k] * w.wk[k][i][j]).trace().real();
            f(i, j) = v;
        }
    return 0.5 * (f + f.transpose());
}

FimResult fim_lower_bound_aoa(const Eigen::MatrixXcd& r0,
                              const std::vector<Eigen::MatrixXcd>& rk,
                              const Scenario& sc, double eta) {
    return fim_lower_bound_aoa(r0, rk, sc, eta, all_open_mask(sc));
}

FimResult fim_lower_bound_aoa(const Eigen::MatrixXcd& r0,
                              const std::vector<Eigen::MatrixXcd>& rk,
                              const Scenario& sc, double eta,
                              const ObservabilityMask& mask) {
    if (r0.rows() != sc.num_bs_antennas || r0.cols() != sc.num_bs_antennas)
        throw std::invalid_argument("fim_lower_bound_aoa: r0 must be N x N");
    if (rk.size() != sc.users.size())
        throw std::invalid_argument("fim_lower_bound_aoa: one covariance per user");
    check_psd_input(r0, "fim_lower_bound_aoa r0");
    for (std::size_t k = 0; k < rk.size(); ++k) {
        if (rk[k].rows() != sc.users[k].num_antennas)
            throw std::invalid_argument("fim_lower_bound_aoa: rk dimension mismatch");
        check_psd_input(rk[k], "fim_lower_bound_aoa rk");
    }

    FimResult out;
    out.matrix = contract_bound(fim_bound_weights(sc, eta, mask), r0, rk);
    out.kind = FimKind::low_snr_bound;
    for (int i = 0; i < sc.num_targets(); ++i)
        out.param_labels.push_back(param_label({ParamRef::Kind::target_aoa, i, 0}));
    check_finite(out.matrix, out.param_labels);
    return out;
}

CrbValue crb(const FimResult& fim, int index) {
    int n = static_cast<int>(fim.matrix.rows());
    if (index < 0 || index >= n) throw std::out_of_range("crb: parameter index");
    CrbValue out;
    out.index = index;
    out.fim_kind = fim.kind;
    if (n == 1) {
        double f = fim.matrix(0, 0);
        if (!(f > 0.0))
            throw std::runtime_error("crb: singular FIM, parameter " +
                                     fim.param_labels.at(0) + " unidentifiable");
        out.value = 1.0 / f;
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fim.matrix);
    double lmin = es.eigenvalues().minCoeff();
    double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin >= 1e12)
        throw std::runtime_error("crb: singular or ill-conditioned FIM");
    double v = 0.0;
    for (int j = 0; j < n; ++j) {
        double e = es.eigenvectors()(index, j);
        v += e * e / es.eigenvalues()[j];
    }
    out.value = v;
    return out;
}

}  // namespace hrf
