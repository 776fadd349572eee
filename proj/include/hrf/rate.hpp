#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hrf/scenario.hpp"

namespace hrf {

struct SignalCovariance {
    Eigen::MatrixXcd matrix;  // Hermitian PSD, N x N
    int symbol_index = 0;
};

enum class RateKind { lower_bound, one_bit_approx };

struct RateValue {
    double mi_bits_per_symbol = 0.0;
    double rate_kbps = 0.0;
    RateKind kind = RateKind::lower_bound;
    // For the 1-bit approximation: true while tr(R)/(N sigma^2) <= 0.1, the
    // low-SNR regime the trace expression is valid in.
    bool low_snr_ok = true;
};

// Received-signal covariance under independent unit-lag-free symbols:
// sum of the echo term driven by r0 and each user's combined direct plus
// reflected uplink channel driven by rk. The per-symbol v-average equals the
// v = 0 value because the sample phase is common to all terms of one
// subcarrier. Pass a zero r0 (or 0x0 matrix) to drop the echo term.
SignalCovariance signal_covariance(const Eigen::MatrixXcd& r0,
                                   const std::vector<Eigen::MatrixXcd>& rk,
                                   const Scenario& sc, int l);

// log2 det(I + (1-eta)/sigma2 R) in bits per vector symbol; kbps uses one
// vector symbol per OFDM symbol duration 1/delta_f.
RateValue mi_lower_bound(const Eigen::MatrixXcd& r_xx, double eta, double sigma2,
                         double delta_f_hz);

// Low-SNR 1-bit approximation (2/(pi sigma2)) tr(R), reported in bits.
RateValue mi_one_bit(const Eigen::MatrixXcd& r_xx, double sigma2, double delta_f_hz);

}  // namespace hrf
