#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hrf/quantizer.hpp"
#include "hrf/scenario.hpp"
#include "hrf/signal_model.hpp"

namespace hrf {

enum class FimKind { exact, low_snr_bound, empirical, gaussian };

struct FimResult {
    Eigen::MatrixXd matrix;  // real symmetric PSD
    FimKind kind = FimKind::exact;
    std::vector<std::string> param_labels;
    // Empirical estimates only: per-entry standard error; 0x0 otherwise.
    Eigen::MatrixXd standard_error;
};

struct CrbValue {
    double value = 0.0;  // rad^2 for angle parameters
    int index = 0;
    FimKind fim_kind = FimKind::exact;
};

// One scalar model parameter. `primary` is the target or user index; for the
// reflected-path parameters `secondary` is the target index within that
// user's observed set.
struct ParamRef {
    enum class Kind {
        target_aoa,       // analytic derivative
        target_doppler,
        target_delay,     // echo delay as it enters the subcarrier phase
        target_gain_re,
        target_gain_im,
        user_rx_aoa,
        user_aod,
        user_delay,
        user_gain_re,
        user_gain_im,
        refl_delay,
        refl_aod,
        refl_gain_re,
        refl_gain_im,
    };
    Kind kind = Kind::target_aoa;
    int primary = 0;
    int secondary = 0;
};

std::string param_label(const ParamRef& p);

// Current value of the parameter inside the scenario.
double param_value(const ParamRef& p, const Scenario& sc);

// Copy of the scenario with the parameter shifted by delta. Only the
// targeted quantity moves: derived links are adjusted in place rather than
// re-derived from geometry, since delays, gains, and angles are independent
// coordinates of the estimation model.
Scenario perturbed_scenario(const Scenario& sc, const ParamRef& p, double delta);

// Per-bin Fisher term [phi(alpha) - phi(beta)]^2 / (Phi(alpha) - Phi(beta))
// with alpha = (t_hi scale - x)/(sigma/sqrt(2)) and beta the same at t_lo.
// bin_index is 1-based over the 2^b bins; underflowing bins contribute 0.
double lambda_term(double x_component, double sigma, const Quantizer& q,
                   int bin_index, double scale = 1.0);

// Sum of lambda_term over all bins; equals 1 in the unquantized limit.
double lambda_sum(double x_component, double sigma, const Quantizer& q, double scale);

// Per-antenna AGC normalization: std of each antenna's real part under the
// noiseless model plus noise, sqrt(mean |x_n|^2 / 2 + sigma^2 / 2).
Eigen::VectorXd agc_scale(const Scenario& sc, const Precoders& p,
                          const SymbolSource& symbols);

// Exact FIM of the quantized observation for the given parameters, summed
// over symbols, antennas, samples, bins, and both signal components.
FimResult fim_exact(const Scenario& sc, const Precoders& p, const Quantizer& q,
                    const std::vector<ParamRef>& params, const SymbolSource& symbols);

// Monte-Carlo estimate of E[(d log p / d psi)^2] for one scalar parameter,
// with the quantizer and AGC scale frozen at the operating point.
FimResult empirical_fim(const Scenario& sc, const Precoders& p, const Quantizer& q,
                        const ParamRef& param, long n_draws, std::uint64_t seed,
                        const SymbolSource& symbols);

// Unquantized Gaussian FIM (2/sigma^2) sum |dx/dpsi|^2, the b -> inf limit.
FimResult unquantized_gaussian_fim(const Scenario& sc, const Precoders& p,
                                   const std::vector<ParamRef>& params,
                                   const SymbolSource& symbols);

// Per-(user, reflected path) contribution gate. Default-open; the Pareto
// layer closes paths whose signal dynamic range exceeds the ADC's.
struct ObservabilityMask {
    std::vector<std::vector<bool>> open;  // [user][reflected-path position]
};

ObservabilityMask all_open_mask(const Scenario& sc);

// Opens path (k, j) iff adc_dynamic_range(bits) >= dr_sig(k, j) + margin.
ObservabilityMask dr_observability_mask(const Scenario& sc, int bits);

// Coefficients of the low-SNR FIM bound as a linear map of the covariances:
// F_ij = Re tr(r0 w0[i][j]) + sum_k Re tr(rk wk[k][i][j]), with the
// 2(1-eta)/sigma^2 prefactor and symbol variances folded in. Parameters are
// the target AoAs in target order.
struct BoundWeights {
    std::vector<std::vector<Eigen::MatrixXcd>> w0;
    std::vector<std::vector<std::vector<Eigen::MatrixXcd>>> wk;
};

BoundWeights fim_bound_weights(const Scenario& sc, double eta,
                               const ObservabilityMask& mask);

Eigen::MatrixXd contract_bound(const BoundWeights& w, const Eigen::MatrixXcd& r0,
                               const std::vector<Eigen::MatrixXcd>& rk);

// Low-SNR lower bound on the AoA FIM for transmit covariances (r0, rk).
FimResult fim_lower_bound_aoa(const Eigen::MatrixXcd& r0,
                              const std::vector<Eigen::MatrixXcd>& rk,
                              const Scenario& sc, double eta);
FimResult fim_lower_bound_aoa(const Eigen::MatrixXcd& r0,
                              const std::vector<Eigen::MatrixXcd>& rk,
                              const Scenario& sc, double eta,
                              const ObservabilityMask& mask);

// i-th diagonal entry of the FIM inverse.
CrbValue crb(const FimResult& fim, int index);

}  // namespace hrf
