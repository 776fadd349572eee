#include "hrf/rate.hpp"

#include <cmath>
#include <stdexcept>

#include "hrf/signal_model.hpp"

namespace hrf {

namespace {

void check_psd(const Eigen::MatrixXcd& r, const char* what) {
    if (r.rows() != r.cols()) throw std::invalid_argument(std::string(what) + ": square input");
    double scale = std::max(1.0, r.norm());
    if ((r - r.adjoint()).norm() > 1e-9 * scale)
        throw std::invalid_argument(std::string(what) + ": input must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
        throw std::invalid_argument(std::string(what) + ": input must be PSD");
}

}  // namespace

SignalCovariance signal_covariance(const Eigen::MatrixXcd& r0,
                                   const std::vector<Eigen::MatrixXcd>& rk,
                                   const Scenario& sc, int l) {
    if (rk.size() != sc.users.size())
        throw std::invalid_argument("signal_covariance: one covariance per user");
    bool with_echo = r0.size() > 0 && r0.norm() > 0.0;
    if (with_echo) {
        if (r0.rows() != sc.num_bs_antennas || r0.cols() != sc.num_bs_antennas)
            throw std::invalid_argument("signal_covariance: r0 must be N x N");
        check_psd(r0, "signal_covariance r0");
    }

    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(sc.num_bs_antennas, sc.num_bs_antennas);

    if (with_echo) {
        for (int m : sc.ofdm.dl_subcarriers) {
            Eigen::MatrixXcd h =
                Eigen::MatrixXcd::Zero(sc.num_bs_antennas, sc.num_bs_antennas);
            for (int i = 0; i < sc.num_targets(); ++i)
                h += channel_echo(i, l, m, 0, sc).entries;
            r += sc.ofdm.dl_symbol_variance * h * r0 * h.adjoint();
        }
    }

    for (int k = 0; k < sc.num_users(); ++k) {
        if (rk[k].rows() != sc.users[k].num_antennas ||
            rk[k].cols() != sc.users[k].num_antennas)
            throw std::invalid_argument("signal_covariance: rk dimension mismatch");
        if (rk[k].norm() == 0.0) continue;
        check_psd(rk[k], "signal_covariance rk");
        for (int m : sc.ofdm.ul_subcarriers[k]) {
            Eigen::MatrixXcd h = channel_direct(k, l, m, 0, sc).entries;
            for (int j : sc.users[k].observed_targets)
                h += channel_reflected(k, j, l, m, 0, sc).entries;
            r += sc.ofdm.ul_symbol_variances[k] * h * rk[k] * h.adjoint();
        }
    }

    SignalCovariance out;
    out.symbol_index = l;
    out.matrix = 0.5 * (r + r.adjoint());
    return out;
}

RateValue mi_lower_bound(const Eigen::MatrixXcd& r_xx, double eta, double sigma2,
                         double delta_f_hz) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::domain_error("mi_lower_bound: eta must lie in [0, 1]");
    if (!(sigma2 > 0.0)) throw std::domain_error("mi_lower_bound: sigma2 must be > 0");
    check_psd(r_xx, "mi_lower_bound");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r_xx, Eigen::EigenvaluesOnly);
    double mi = 0.0;
    double c = (1.0 - eta) / sigma2;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        mi += std::log2(1.0 + c * std::max(0.0, es.eigenvalues()[i]));

    RateValue out;
    out.mi_bits_per_symbol = mi;
    out.rate_kbps = mi * delta_f_hz / 1000.0;
    out.kind = RateKind::lower_bound;
    return out;
}

RateValue mi_one_bit(const Eigen::MatrixXcd& r_xx, double sigma2, double delta_f_hz) {
    if (!(sigma2 > 0.0)) throw std::domain_error("mi_one_bit: sigma2 must be > 0");
    check_psd(r_xx, "mi_one_bit");
    double tr = r_xx.trace().real();
    RateValue out;
    out.kind = RateKind::one_bit_approx;
    out.mi_bits_per_symbol = (2.0 / (kPi * sigma2)) * tr / std::log(2.0);
    out.rate_kbps = out.mi_bits_per_symbol * delta_f_hz / 1000.0;
    out.low_snr_ok = tr / (static_cast<double>(r_xx.rows()) * sigma2) <= 0.1;
    return out;
}

}  // namespace hrf
