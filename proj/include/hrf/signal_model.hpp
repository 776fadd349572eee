#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hrf/common.hpp"
#include "hrf/scenario.hpp"

namespace hrf {

struct SteeringVector {
    Eigen::VectorXcd entries;
    double angle_rad = 0.0;
    double spacing_ratio = 0.5;
};

enum class ChannelKind { echo, direct, reflected };

struct ChannelMatrix {
    Eigen::MatrixXcd entries;  // N x N_tx, rank 1 by construction
    ChannelKind kind = ChannelKind::echo;
    int symbol_index = 0;
    int subcarrier = 0;
    int sample = 0;
};

// Transmit precoders: BS downlink vector (length N) plus one uplink vector
// per user (length N_k^u).
struct Precoders {
    Eigen::VectorXcd bs;
    std::vector<Eigen::VectorXcd> users;
};

// Deterministic per-(symbol, subcarrier, transmitter) constellation draws.
// qpsk yields hash-seeded unit-modulus QPSK; all_ones is the oracle mode.
// Transmitter index 0 is the BS, 1..K are the users. The sqrt(variance)
// power scaling is applied by the signal assembly, not here.
struct SymbolSource {
    enum class Mode { qpsk, all_ones };
    std::uint64_t seed = 0;
    Mode mode = Mode::qpsk;
    cd symbol(int l, int m, int tx) const;
};

struct NoiselessSample {
    Eigen::VectorXcd x;  // length N
    int symbol_index = 0;
    int sample = 0;
    std::vector<Eigen::VectorXcd> daoa;  // dx/dtheta_i^tar per target
};

// Uniform linear array response, entry n = exp(j 2 pi spacing (n-1) sin θ).
SteeringVector steering_vector(double angle_rad, int n_antennas, double spacing_ratio);

// Entrywise derivative of the array response with respect to the angle.
Eigen::VectorXcd steering_derivative(double angle_rad, int n_antennas,
                                     double spacing_ratio);

// Per-subcarrier phase c_m(tau, v) = exp(-j 2 pi ((m df + fc) tau - m v / M)).
cd subcarrier_phase(int m, double tau_s, int v, const OfdmPlan& plan,
                    double carrier_hz);

ChannelMatrix channel_echo(int target, int l, int m, int v, const Scenario& sc);
ChannelMatrix channel_direct(int user, int l, int m, int v, const Scenario& sc);
ChannelMatrix channel_reflected(int user, int target, int l, int m, int v,
                                const Scenario& sc);

// Noiseless received vector for OFDM symbol l at sample v, summed over the
// downlink echo and every user's direct plus reflected uplink paths. The
// AoA derivative cache is filled unless with_derivatives is false.
NoiselessSample noiseless_sample(int l, int v, const Precoders& p, const Scenario& sc,
                                 const SymbolSource& symbols,
                                 bool with_derivatives = true);

// Analytic dx/dtheta for one target's angle of arrival.
Eigen::VectorXcd sample_derivative_aoa(int l, int v, int target, const Precoders& p,
                                       const Scenario& sc, const SymbolSource& symbols);

}  // namespace hrf
