#pragma once

#include <optional>
#include <vector>

#include "hrf/common.hpp"

namespace hrf {

// OFDM frame layout shared by the BS downlink and all uplink users.
// Subcarrier sets are index sets into an FFT of size samples_per_symbol.
struct OfdmPlan {
    double subcarrier_spacing_hz = 15e3;
    int num_symbols = 14;        // symbols per CPI (L)
    int samples_per_symbol = 64; // time samples per symbol (M)
    std::vector<int> dl_subcarriers;              // C_0
    std::vector<std::vector<int>> ul_subcarriers; // C_k per user
    double dl_symbol_variance = 1.0;              // sigma_0^2
    std::vector<double> ul_symbol_variances;      // sigma_k^2 per user
};

// One radar target. aoa_rad is the angle seen from the BS array; the echo
// gain defaults to the monostatic radar equation unless overridden.
struct TargetSpec {
    double aoa_rad = 0.0;
    double range_m = 100.0;
    double doppler_hz = 0.0;
    double rcs_m2 = 1.0;
    std::optional<cd> gain_override; // bare complex gain g_i
};

// One uplink user. aoa_rad is the BS-side arrival angle of the direct path,
// aod_rad the user-side departure angle toward the BS (0 = user boresight
// points at the BS). Per-target AoDs/path lengths are derived from geometry
// when not given explicitly.
struct UserSpec {
    int num_antennas = 4;
    double aoa_rad = 0.0;
    double aod_rad = 0.0;
    double range_m = 100.0;
    double max_power = 1.0;
    std::vector<int> observed_targets;                    // Phi_k
    std::vector<std::optional<double>> per_target_aod_rad;
    std::vector<std::optional<double>> per_target_path_m;
    std::optional<cd> direct_gain_override;
    std::vector<std::optional<cd>> reflected_gain_override;
};

// Derived per-path quantities, filled in by Scenario::finalize(). Bare gains:
// the carrier phase rotation exp(-j*2*pi*fc*tau) lives in the per-subcarrier
// phase term, not here.
struct TargetLink {
    cd gain;             // g_i
    double echo_delay_s; // 2*tau_i
};
struct ReflectedLink {
    int target_index;
    cd gain;          // g_{k,j}
    double delay_s;   // phi_{k,j} = (d(user,target)+d(target,BS))/c
    double aod_rad;   // user-array departure angle toward the target (folded)
    double path_m;
    double dr_sig_db; // direct-to-reflected dynamic range for this pair
};
struct UserLink {
    cd direct_gain;        // g_{k,0}
    double direct_delay_s; // tau_k
    std::vector<ReflectedLink> reflected;
};
struct ScenarioLinks {
    std::vector<TargetLink> targets;
    std::vector<UserLink> users;
};

class Scenario {
  public:
    double carrier_hz = 24e9;
    int num_bs_antennas = 8;
    double antenna_spacing_ratio = 0.5; // d / lambda
    std::vector<TargetSpec> targets;
    std::vector<UserSpec> users;
    OfdmPlan ofdm;
    double noise_variance = 1.0; // sigma^2 per complex receive sample
    double bs_max_power = 1.0;   // P_max^BS
    double dr_margin_db = 0.0;   // margin for ADC dynamic-range coverage

    // Validates all invariants and computes derived link quantities.
    // Throws std::invalid_argument on violation.
    void finalize();

    bool finalized() const { return finalized_; }
    const ScenarioLinks& links() const;
    ScenarioLinks& mutable_links(); // for parameter perturbation

    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    int num_users() const { return static_cast<int>(users.size()); }
    int num_targets() const { return static_cast<int>(targets.size()); }

    // Expected received power (all BS antennas, isotropic full-power user
    // transmit) through the direct path of user k and through the reflected
    // path (k, j); their ratio feeds dynamic_range_sig.
    double direct_path_power(int k) const;
    double reflected_path_power(int k, int j) const;

  private:
    bool finalized_ = false;
    ScenarioLinks links_;
};

// Free-space direct-path gain: |g| = lambda/(4*pi*d), phase -2*pi*fc*tau.
cd path_gain_direct(double range_m, double carrier_hz);

// Monostatic radar-equation echo gain:
// |g| = lambda*sqrt(rcs/(4*pi)) / (4*pi*range)^2, phase -2*pi*fc*(2*tau).
cd path_gain_radar(double range_m, double rcs_m2, double carrier_hz);

// Bistatic variant with separate legs (user->target, target->BS); phase from
// the total path delay.
cd path_gain_radar_bistatic(double leg1_m, double leg2_m, double rcs_m2, double carrier_hz);

// Signal dynamic range 10*log10(p_direct/p_reflected) in dB.
double dynamic_range_sig(double p_direct, double p_reflected);

// Built-in reference scenario: 8-antenna BS at 24 GHz, one 4-antenna user at
// 100 m, one target at 100 m, 36 downlink + 24 uplink subcarriers, L = 14.
Scenario default_scenario();

}  // namespace hrf
