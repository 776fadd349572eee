#include "hrf/signal_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hrf {

namespace {

const ReflectedLink& find_reflected(const Scenario& sc, int user, int target) {
    for (const auto& rl : sc.links().users.at(user).reflected)
        if (rl.target_index == target) return rl;
    throw std::out_of_range("signal_model: target " + std::to_string(target) +
                            " is not observed by user " + std::to_string(user));
}

void check_angle(double angle_rad) {
    if (!(std::abs(angle_rad) <= kPi / 2.0))
        throw std::domain_error("steering: |angle| must be <= pi/2");
}

// Doppler advances once per OFDM symbol of duration T = 1/df.
cd doppler_phase(double doppler_hz, int l, const OfdmPlan& plan) {
    return std::polar(1.0, 2.0 * kPi * doppler_hz * l / plan.subcarrier_spacing_hz);
}

}  // namespace

cd SymbolSource::symbol(int l, int m, int tx) const {
    if (mode == Mode::all_ones) return cd(1.0, 0.0);
    std::uint64_t h = seed;
    h = splitmix64(h ^ (0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(l)));
    h = splitmix64(h ^ static_cast<std::uint64_t>(m));
    h = splitmix64(h ^ static_cast<std::uint64_t>(tx));
    double phase = kPi / 4.0 + (kPi / 2.0) * static_cast<double>(h & 3u);
    return std::polar(1.0, phase);
}

SteeringVector steering_vector(double angle_rad, int n_antennas, double spacing_ratio) {
    check_angle(angle_rad);
    SteeringVector sv;
    sv.angle_rad = angle_rad;
    sv.spacing_ratio = spacing_ratio;
    sv.entries.resize(n_antennas);
    double s = std::sin(angle_rad);
    for (int n = 0; n < n_antennas; ++n)
        sv.entries[n] = std::polar(1.0, 2.0 * kPi * spacing_ratio * n * s);
    return sv;
}

Eigen::VectorXcd steering_derivative(double angle_rad, int n_antennas,
                                     double spacing_ratio) {
    check_angle(angle_rad);
    Eigen::VectorXcd d(n_antennas);
    double s = std::sin(angle_rad);
    double c = std::cos(angle_rad);
    for (int n = 0; n < n_antennas; ++n) {
        cd a = std::polar(1.0, 2.0 * kPi * spacing_ratio * n * s);
        d[n] = cd(0.0, 2.0 * kPi * spacing_ratio * n * c) * a;
    }
    return d;
}

cd subcarrier_phase(int m, double tau_s, int v, const OfdmPlan& plan, double carrier_hz) {
    if (v < 0 || v >= plan.samples_per_symbol)
        throw std::out_of_range("subcarrier_phase: sample index outside 0..M-1");
    double phase = -2.0 * kPi *
                   ((m * plan.subcarrier_spacing_hz + carrier_hz) * tau_s -
                    static_cast<double>(m) * v / plan.samples_per_symbol);
    return std::polar(1.0, phase);
}

ChannelMatrix channel_echo(int target, int l, int m, int v, const Scenario& sc) {
    const auto& t = sc.targets.at(target);
    const auto& link = sc.links().targets.at(target);
    cd gamma = link.gain * doppler_phase(t.doppler_hz, l, sc.ofdm);
    cd c = subcarrier_phase(m, link.echo_delay_s, v, sc.ofdm, sc.carrier_hz);
    auto a = steering_vector(t.aoa_rad, sc.num_bs_antennas, sc.antenna_spacing_ratio);
    ChannelMatrix h;
    h.kind = ChannelKind::echo;
    h.symbol_index = l;
    h.subcarrier = m;
    h.sample = v;
    h.entries = (gamma * c) * (a.entries * a.entries.transpose());
    return h;
}

ChannelMatrix channel_direct(int user, int l, int m, int v, const Scenario& sc) {
    const auto& u = sc.users.at(user);
    const auto& link = sc.links().users.at(user);
    cd c = subcarrier_phase(m, link.direct_delay_s, v, sc.ofdm, sc.carrier_hz);
    auto a_r = steering_vector(u.aoa_rad, sc.num_bs_antennas, sc.antenna_spacing_ratio);
    auto a_u = steering_vector(u.aod_rad, u.num_antennas, sc.antenna_spacing_ratio);
    ChannelMatrix h;
    h.kind = ChannelKind::direct;
    h.symbol_index = l;
    h.subcarrier = m;
    h.sample = v;
    h.entries = (link.direct_gain * c) * (a_r.entries * a_u.entries.transpose());
    return h;
}

ChannelMatrix channel_reflected(int user, int target, int l, int m, int v,
                                const Scenario& sc) {
    const auto& t = sc.targets.at(target);
    const auto& u = sc.users.at(user);
    const auto& rl = find_reflected(sc, user, target);
    cd gamma = rl.gain * doppler_phase(t.doppler_hz, l, sc.ofdm);
    cd c = subcarrier_phase(m, rl.delay_s, v, sc.ofdm, sc.carrier_hz);
    auto a_r = steering_vector(t.aoa_rad, sc.num_bs_antennas, sc.antenna_spacing_ratio);
    auto a_u = steering_vector(rl.aod_rad, u.num_antennas, sc.antenna_spacing_ratio);
    ChannelMatrix h;
    h.kind = ChannelKind::reflected;
    h.symbol_index = l;
    h.subcarrier = m;
    h.sample = v;
    h.entries = (gamma * c) * (a_r.entries * a_u.entries.transpose());
    return h;
}

namespace {

void check_precoders(const Precoders& p, const Scenario& sc) {
    if (p.bs.size() != sc.num_bs_antennas)
        throw std::invalid_argument("precoders: BS vector must have length N");
    if (p.users.size() != sc.users.size())
        throw std::invalid_argument("precoders: one uplink vector per user is required");
    for (std::size_t k = 0; k < sc.users.size(); ++k)
        if (p.users[k].size() != sc.users[k].num_antennas)
            throw std::invalid_argument("precoders: user vector length mismatch");
}

}  // namespace

NoiselessSample noiseless_sample(int l, int v, const Precoders& p, const Scenario& sc,
                                 const SymbolSource& symbols, bool with_derivatives) {
    check_precoders(p, sc);
    NoiselessSample out;
    out.symbol_index = l;
    out.sample = v;
    out.x = Eigen::VectorXcd::Zero(sc.num_bs_antennas);

    double sd0 = std::sqrt(sc.ofdm.dl_symbol_variance);
    for (int m : sc.ofdm.dl_subcarriers) {
        cd b = sd0 * symbols.symbol(l, m, 0);
        for (int i = 0; i < sc.num_targets(); ++i)
            out.x += b * (channel_echo(i, l, m, v, sc).entries * p.bs);
    }
    for (int k = 0; k < sc.num_users(); ++k) {
        double sdk = std::sqrt(sc.ofdm.ul_symbol_variances[k]);
        for (int m : sc.ofdm.ul_subcarriers[k]) {
            cd b = sdk * symbols.symbol(l, m, k + 1);
            Eigen::MatrixXcd h = channel_direct(k, l, m, v, sc).entries;
            for (int j : sc.users[k].observed_targets)
                h += channel_reflected(k, j, l, m, v, sc).entries;
            out.x += b * (h * p.users[k]);
        }
    }

    if (with_derivatives) {
        out.daoa.resize(sc.num_targets());
        for (int i = 0; i < sc.num_targets(); ++i)
            out.daoa[i] = sample_derivative_aoa(l, v, i, p, sc, symbols);
    }
    return out;
}

Eigen::VectorXcd sample_derivative_aoa(int l, int v, int target, const Precoders& p,
                                       const Scenario& sc, const SymbolSource& symbols) {
    check_precoders(p, sc);
    if (target < 0 || target >= sc.num_targets())
        throw std::out_of_range("sample_derivative_aoa: unknown target");

    const auto& t = sc.targets[target];
    const auto& tl = sc.links().targets[target];
    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(sc.num_bs_antennas);

    auto a = steering_vector(t.aoa_rad, sc.num_bs_antennas, sc.antenna_spacing_ratio).entries;
    auto da = steering_derivative(t.aoa_rad, sc.num_bs_antennas, sc.antenna_spacing_ratio);

    // Echo term: gamma c_m (da a^T + a da^T) f over the downlink subcarriers.
    double sd0 = std::sqrt(sc.ofdm.dl_symbol_variance);
    cd doppler = doppler_phase(t.doppler_hz, l, sc.ofdm);
    for (int m : sc.ofdm.dl_subcarriers) {
        cd b = sd0 * symbols.symbol(l, m, 0);
        cd g = tl.gain * doppler * subcarrier_phase(m, tl.echo_delay_s, v, sc.ofdm, sc.carrier_hz);
        d += (b * g) * (da * (a.transpose() * p.bs) + a * (da.transpose() * p.bs));
    }

    // Reflected term: only users observing this target contribute, through
    // the arrival-side derivative steering vector.
    for (int k = 0; k < sc.num_users(); ++k) {
        const auto& u = sc.users[k];
        bool observed = false;
        for (int j : u.observed_targets) observed |= (j == target);
        if (!observed) continue;
        const auto& rl = find_reflected(sc, k, target);
        auto a_u = steering_vector(rl.aod_rad, u.num_antennas, sc.antenna_spacing_ratio).entries;
        double sdk = std::sqrt(sc.ofdm.ul_symbol_variances[k]);
        for (int m : sc.ofdm.ul_subcarriers[k]) {
            cd b = sdk * symbols.symbol(l, m, k + 1);
            cd g = rl.gain * doppler * subcarrier_phase(m, rl.delay_s, v, sc.ofdm, sc.carrier_hz);
            d += (b * g) * (da * (a_u.transpose() * p.users[k]));
        }
    }
    return d;
}

}  // namespace hrf
