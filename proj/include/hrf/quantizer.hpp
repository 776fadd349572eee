#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hrf/common.hpp"

namespace hrf {

// Optimal b-bit scalar quantizer for a unit-variance Gaussian input.
// thresholds has 2^b+1 entries with t_0 = -inf and t_{2^b} = +inf; levels
// has 2^b entries. eta is the normalized distortion E[(X - Q(X))^2].
struct Quantizer {
    int bits = 0;
    std::vector<double> thresholds;
    std::vector<double> levels;
    double eta = 0.0;
};

// Complex vector after per-component scalar quantization. Real and imaginary
// parts of entry n take values in scale[n] * levels only.
struct QuantizedFrame {
    Eigen::VectorXcd r_q;
    Eigen::VectorXd scale;
};

struct MinBitsResult {
    int bits = 0;
    bool saturated = false;
};

// Lloyd-Max fixed point for a standard Gaussian source, solved by Newton
// iteration on the level stationarity conditions. Residuals of both the
// Lloyd (levels = bin conditional means) and Max (thresholds = level
// midpoints) conditions are below 1e-10 on success; otherwise throws.
Quantizer design_lloyd_max(int bits);

// Largest deviation from the Lloyd condition: max_i |level_i - E[X | bin_i]|.
double lloyd_residual(const Quantizer& q);

// Quantize real and imaginary parts independently; scale is the per-antenna
// AGC normalization (input is divided by scale, output multiplied back).
QuantizedFrame quantize(const Eigen::VectorXcd& r, const Quantizer& q,
                        const Eigen::VectorXd& scale);

// Scalar helper used by the frame version and by likelihood evaluations.
double quantize_component(double y, const Quantizer& q, double scale);

// Index in {0 .. 2^b-1} of the bin containing y/scale.
int bin_index(double y, const Quantizer& q, double scale);

// Bussgang linear gain of the quantizer under a white Gaussian input:
// E[Q(X)X]/E[X^2] = 1 - eta for a Lloyd-Max codebook.
double bussgang_gain(const Quantizer& q);

// ADC dynamic range in dB under the full-scale sinusoid SQNR model.
double adc_dynamic_range(int bits);

// Smallest b in 1..16 with adc_dynamic_range(b) >= dr_sig_db + margin_db;
// saturated is set when even b = 16 falls short.
MinBitsResult min_bits_for_dr(double dr_sig_db, double margin_db);

// Normalized covariance of 1-bit (sign) quantizer outputs for a jointly
// Gaussian input with covariance r_in (arcsine law), entrywise
// (2/pi)[asin(Re rho) + j asin(Im rho)] with rho the unit-diagonal
// normalization of r_in.
Eigen::MatrixXcd arcsine_covariance(const Eigen::MatrixXcd& r_in);

}  // namespace hrf
