#include "hrf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace hrf {

namespace {

struct Vec2 {
    double x, y;
};

// BS sits at the origin with array boresight along +y; a polar placement
// (range, aoa) maps to (range*sin(aoa), range*cos(aoa)).
Vec2 position(double range_m, double aoa_rad) {
    return {range_m * std::sin(aoa_rad), range_m * std::cos(aoa_rad)};
}

double dist(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Signed angle of `dir` measured from `boresight`, folded onto the ULA's
// unambiguous domain [-pi/2, pi/2] via asin(sin(.)): a linear array cannot
// tell front from back, and the steering vector depends on sin(angle) only.
double folded_angle(const Vec2& boresight, const Vec2& dir) {
    double cross = boresight.x * dir.y - boresight.y * dir.x;
    double dot = boresight.x * dir.x + boresight.y * dir.y;
    double raw = std::atan2(cross, dot);
    double s = std::sin(raw);
    s = std::clamp(s, -1.0, 1.0);
    return std::asin(s);
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument("scenario: " + msg);
}

}  // namespace

cd path_gain_direct(double range_m, double carrier_hz) {
    require(range_m > 0.0, "direct path range must be > 0");
    require(carrier_hz > 0.0, "carrier frequency must be > 0");
    double lambda = kSpeedOfLight / carrier_hz;
    double mag = lambda / (4.0 * kPi * range_m);
    double tau = range_m / kSpeedOfLight;
    double phase = -2.0 * kPi * carrier_hz * tau;
    return std::polar(mag, phase);
}

cd path_gain_radar(double range_m, double rcs_m2, double carrier_hz) {
    return path_gain_radar_bistatic(range_m, range_m, rcs_m2, carrier_hz);
}

cd path_gain_radar_bistatic(double leg1_m, double leg2_m, double rcs_m2, double carrier_hz) {
    require(leg1_m > 0.0 && leg2_m > 0.0, "radar path legs must be > 0");
    require(rcs_m2 > 0.0, "radar cross-section must be > 0");
    require(carrier_hz > 0.0, "carrier frequency must be > 0");
    double lambda = kSpeedOfLight / carrier_hz;
    double mag = lambda * std::sqrt(rcs_m2 / (4.0 * kPi)) /
                 ((4.0 * kPi * leg1_m) * (4.0 * kPi * leg2_m));
    double tau = (leg1_m + leg2_m) / kSpeedOfLight;
    double phase = -2.0 * kPi * carrier_hz * tau;
    return std::polar(mag, phase);
}

double dynamic_range_sig(double p_direct, double p_reflected) {
    if (!(p_direct > 0.0) || !(p_reflected > 0.0))
        throw std::domain_error("dynamic_range_sig: powers must be > 0");
    return 10.0 * std::log10(p_direct / p_reflected);
}

void Scenario::finalize() {
    require(carrier_hz > 0.0, "carrier_hz must be > 0");
    require(num_bs_antennas >= 2, "num_bs_antennas must be >= 2");
    require(antenna_spacing_ratio > 0.0 && antenna_spacing_ratio <= 1.0,
            "antenna_spacing_ratio must lie in (0, 1]");
    require(noise_variance > 0.0, "noise_variance must be > 0");
    require(bs_max_power > 0.0, "bs_max_power must be > 0");
    require(!targets.empty(), "at least one target is required");
    require(ofdm.subcarrier_spacing_hz > 0.0, "subcarrier spacing must be > 0");
    require(ofdm.num_symbols >= 1, "num_symbols must be >= 1");
    require(ofdm.samples_per_symbol >= 1, "samples_per_symbol must be >= 1");
    require(ofdm.dl_symbol_variance > 0.0, "dl_symbol_variance must be > 0");
    require(!ofdm.dl_subcarriers.empty(), "downlink subcarrier set must be non-empty");
    require(ofdm.ul_subcarriers.size() == users.size(),
            "one uplink subcarrier set per user is required");
    require(ofdm.ul_symbol_variances.size() == users.size(),
            "one uplink symbol variance per user is required");

    std::set<int> seen;
    auto check_set = [&](const std::vector<int>& sc, const std::string& name) {
        require(!sc.empty(), name + " subcarrier set must be non-empty");
        for (int m : sc) {
            require(m >= 0 && m < ofdm.samples_per_symbol,
                    name + " subcarrier index out of [0, samples_per_symbol)");
            require(seen.insert(m).second, "subcarrier sets must be disjoint");
        }
    };
    check_set(ofdm.dl_subcarriers, "downlink");
    for (std::size_t k = 0; k < users.size(); ++k) {
        check_set(ofdm.ul_subcarriers[k], "user " + std::to_string(k));
        require(ofdm.ul_symbol_variances[k] > 0.0, "ul symbol variance must be > 0");
    }

    for (const auto& t : targets) {
        require(std::abs(t.aoa_rad) < kPi / 2.0, "target aoa must satisfy |aoa| < pi/2");
        require(t.range_m > 0.0, "target range must be > 0");
        require(t.rcs_m2 > 0.0, "target rcs must be > 0");
    }

    std::set<int> observed;
    for (const auto& u : users) {
        require(u.num_antennas >= 1, "user antenna count must be >= 1");
        require(std::abs(u.aoa_rad) < kPi / 2.0, "user aoa must satisfy |aoa| < pi/2");
        require(std::abs(u.aod_rad) < kPi / 2.0, "user aod must satisfy |aod| < pi/2");
        require(u.range_m > 0.0, "user range must be > 0");
        require(u.max_power > 0.0, "user max_power must be > 0");
        auto sized = [&](std::size_t n, const std::string& what) {
            require(n == 0 || n == u.observed_targets.size(),
                    what + " must align with observed_targets");
        };
        sized(u.per_target_aod_rad.size(), "per_target_aod_rad");
        sized(u.per_target_path_m.size(), "per_target_path_m");
        sized(u.reflected_gain_override.size(), "reflected_gain_override");
        for (int j : u.observed_targets) {
            require(j >= 0 && j < num_targets(), "observed target index out of range");
            require(observed.insert(j).second,
                    "a target may appear in at most one user's observed set");
        }
    }

    links_.targets.clear();
    links_.users.clear();

    for (const auto& t : targets) {
        TargetLink tl;
        double tau = t.range_m / kSpeedOfLight;
        if (t.gain_override) {
            tl.gain = *t.gain_override;
        } else {
            tl.gain = std::abs(path_gain_radar(t.range_m, t.rcs_m2, carrier_hz));
        }
        tl.echo_delay_s = 2.0 * tau;
        links_.targets.push_back(tl);
    }

    for (std::size_t k = 0; k < users.size(); ++k) {
        const auto& u = users[k];
        UserLink ul;
        ul.direct_delay_s = u.range_m / kSpeedOfLight;
        if (u.direct_gain_override) {
            ul.direct_gain = *u.direct_gain_override;
        } else {
            ul.direct_gain = std::abs(path_gain_direct(u.range_m, carrier_hz));
        }

        Vec2 pu = position(u.range_m, u.aoa_rad);
        // The user's boresight direction differs from the user->BS direction
        // by aod_rad; per-target departure angles are measured in the same
        // frame so that aod_rad stays the BS departure angle by construction.
        Vec2 to_bs{-pu.x, -pu.y};
        double nb = std::hypot(to_bs.x, to_bs.y);
        to_bs.x /= nb;
        to_bs.y /= nb;

        for (std::size_t idx = 0; idx < u.observed_targets.size(); ++idx) {
            int j = u.observed_targets[idx];
            const auto& t = targets[j];
            Vec2 pt = position(t.range_m, t.aoa_rad);
            double d_ut = dist(pu, pt);
            require(d_ut > 0.0, "user and target may not coincide");
            double d_tb = t.range_m;

            ReflectedLink rl;
            rl.target_index = j;
            rl.path_m = (idx < u.per_target_path_m.size() && u.per_target_path_m[idx])
                            ? *u.per_target_path_m[idx]
                            : d_ut + d_tb;
            require(rl.path_m > 0.0, "reflected path length must be > 0");
            rl.delay_s = rl.path_m / kSpeedOfLight;

            if (idx < u.per_target_aod_rad.size() && u.per_target_aod_rad[idx]) {
                rl.aod_rad = *u.per_target_aod_rad[idx];
                require(std::abs(rl.aod_rad) < kPi / 2.0,
                        "per-target aod must satisfy |aod| < pi/2");
            } else {
                Vec2 to_t{(pt.x - pu.x) / d_ut, (pt.y - pu.y) / d_ut};
                // Rotate into the user-array frame: boresight is to_bs rotated
                // by -aod_rad (so that the BS sits at departure angle aod_rad).
                double ca = std::cos(-u.aod_rad), sa = std::sin(-u.aod_rad);
                Vec2 bore{ca * to_bs.x - sa * to_bs.y, sa * to_bs.x + ca * to_bs.y};
                rl.aod_rad = folded_angle(bore, to_t);
            }

            if (idx < u.reflected_gain_override.size() && u.reflected_gain_override[idx]) {
                rl.gain = *u.reflected_gain_override[idx];
            } else {
                rl.gain = std::abs(
                    path_gain_radar_bistatic(d_ut, d_tb, t.rcs_m2, carrier_hz));
            }

            rl.dr_sig_db = dynamic_range_sig(std::norm(ul.direct_gain),
                                             std::norm(rl.gain));
            ul.reflected.push_back(rl);
        }
        links_.users.push_back(ul);
    }

    finalized_ = true;
}

const ScenarioLinks& Scenario::links() const {
    if (!finalized_) throw std::logic_error("scenario: finalize() has not been called");
    return links_;
}

ScenarioLinks& Scenario::mutable_links() {
    if (!finalized_) throw std::logic_error("scenario: finalize() has not been called");
    return links_;
}

double Scenario::direct_path_power(int k) const {
    const auto& ul = links().users.at(k);
    double common = ofdm.ul_symbol_variances.at(k) *
                    static_cast<double>(ofdm.ul_subcarriers.at(k).size()) *
                    num_bs_antennas * users.at(k).max_power;
    return common * std::norm(ul.direct_gain);
}

double Scenario::reflected_path_power(int k, int j) const {
    const auto& ul = links().users.at(k);
    for (const auto& rl : ul.reflected) {
        if (rl.target_index == j) {
            double common = ofdm.ul_symbol_variances.at(k) *
                            static_cast<double>(ofdm.ul_subcarriers.at(k).size()) *
                            num_bs_antennas * users.at(k).max_power;
            return common * std::norm(rl.gain);
        }
    }
    throw std::invalid_argument("reflected_path_power: target not observed by user");
}

Scenario default_scenario() {
    Scenario s;
    s.carrier_hz = 24e9;
    s.num_bs_antennas = 8;
    s.antenna_spacing_ratio = 0.5;
    s.noise_variance = 2.3714e-9; // ~0 dB per-antenna direct-path SNR at 100 m
    s.bs_max_power = 1.0;
    s.dr_margin_db = 0.0;

    TargetSpec t;
    t.aoa_rad = 25.0 * kPi / 180.0;
    t.range_m = 100.0;
    t.doppler_hz = 0.0;
    t.rcs_m2 = 1000.0; // places the direct-to-reflected DR at ~21.8 dB
    s.targets.push_back(t);

    UserSpec u;
    u.num_antennas = 4;
    u.aoa_rad = 20.0 * kPi / 180.0;
    u.aod_rad = 0.0;
    u.range_m = 100.0;
    u.max_power = 1.0;
    u.observed_targets = {0};
    s.users.push_back(u);

    s.ofdm.subcarrier_spacing_hz = 15e3;
    s.ofdm.num_symbols = 14;
    s.ofdm.samples_per_symbol = 64;
    s.ofdm.dl_subcarriers.resize(36);
    for (int m = 0; m < 36; ++m) s.ofdm.dl_subcarriers[m] = m;
    s.ofdm.ul_subcarriers.resize(1);
    s.ofdm.ul_subcarriers[0].resize(24);
    for (int m = 0; m < 24; ++m) s.ofdm.ul_subcarriers[0][m] = 36 + m;
    s.ofdm.dl_symbol_variance = 1.0;
    s.ofdm.ul_symbol_variances = {1.0};

    s.finalize();
    return s;
}

}  // namespace hrf
