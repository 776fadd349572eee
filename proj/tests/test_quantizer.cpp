#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "hrf/common.hpp"
#include "hrf/quantizer.hpp"

using namespace hrf;

namespace {

// E[(X - Q(X))^2] for standard normal X by composite Simpson over [-8, 8],
// evaluated through quantize_component so the oracle is independent of the
// codebook's own eta accumulation.
double distortion_by_quadrature(const Quantizer& q) {
    const int n = 40000;  // even
    const double a = -8.0, b = 8.0, h = (b - a) / n;
    auto f = [&](double x) {
        double e = x - quantize_component(x, q, 1.0);
        return e * e * normal_pdf(x);
    };
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("one-bit quantizer has the closed-form codebook") {
    Quantizer q = design_lloyd_max(1);
    double level = std::sqrt(2.0 / kPi);
    CHECK(q.bits == 1);
    REQUIRE(q.levels.size() == 2);
    REQUIRE(q.thresholds.size() == 3);
    CHECK(q.levels[0] == doctest::Approx(-level).epsilon(1e-10));
    CHECK(q.levels[1] == doctest::Approx(level).epsilon(1e-10));
    CHECK(q.thresholds[0] == -std::numeric_limits<double>::infinity());
    CHECK(q.thresholds[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q.thresholds[2] == std::numeric_limits<double>::infinity());
    CHECK(q.eta == doctest::Approx(1.0 - 2.0 / kPi).epsilon(1e-10));
}

TEST_CASE("Lloyd and Max conditions hold to 1e-10 for b = 1..12") {
    for (int b = 1; b <= 12; ++b) {
        CAPTURE(b);
        Quantizer q = design_lloyd_max(b);
        int n = 1 << b;
        REQUIRE(static_cast<int>(q.levels.size()) == n);
        REQUIRE(static_cast<int>(q.thresholds.size()) == n + 1);
        CHECK(lloyd_residual(q) < 1e-10);
        for (int i = 1; i < n; ++i) {
            CHECK(q.thresholds[i] ==
                  doctest::Approx(0.5 * (q.levels[i - 1] + q.levels[i])).epsilon(1e-10));
            CHECK(q.thresholds[i] > q.thresholds[i - 1]);
        }
    }
}

TEST_CASE("codebook eta equals the quadrature distortion oracle, b = 1..8") {
    for (int b = 1; b <= 8; ++b) {
        CAPTURE(b);
        Quantizer q = design_lloyd_max(b);
        double oracle = distortion_by_quadrature(q);
        CHECK(std::abs(q.eta - oracle) < 1e-6);
        CHECK(q.eta == doctest::Approx(oracle).epsilon(1e-5));
    }
}

TEST_CASE("eta strictly decreases with resolution through b = 16") {
    double prev = design_lloyd_max(1).eta;
    CHECK(prev > 0.0);
    CHECK(prev < 1.0);
    for (int b = 2; b <= 16; ++b) {
        CAPTURE(b);
        Quantizer q = design_lloyd_max(b);
        CHECK(lloyd_residual(q) < 1e-10);
        CHECK(q.eta < prev);
        CHECK(q.eta > 0.0);
        prev = q.eta;
    }
}

TEST_CASE("high-resolution eta follows the quantization-noise asymptote") {
    // For large b the Lloyd-Max distortion of a Gaussian source approaches
    // (pi sqrt(3) / 2) 2^(-2b) (Panter-Dite).
    Quantizer q = design_lloyd_max(14);
    double asymptote = kPi * std::sqrt(3.0) / 2.0 * std::pow(2.0, -28.0);
    CHECK(q.eta == doctest::Approx(asymptote).epsilon(0.02));
}

TEST_CASE("quantize is idempotent and fixes its own levels") {
    Quantizer q = design_lloyd_max(3);
    Eigen::VectorXd scale(2);
    scale << 0.7, 1.3;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd r(2);
    for (int trial = 0; trial < 200; ++trial) {
        for (int i = 0; i < 2; ++i) r[i] = cd(gauss(rng), gauss(rng));
        QuantizedFrame f1 = quantize(r, q, scale);
        QuantizedFrame f2 = quantize(f1.r_q, q, scale);
        CHECK((f2.r_q - f1.r_q).norm() == 0.0);
        // Each component sits exactly on scale * level.
        for (int i = 0; i < 2; ++i) {
            double re = f1.r_q[i].real() / scale[i];
            double best = 1e300;
            for (double l : q.levels) best = std::min(best, std::abs(re - l));
            CHECK(best < 1e-12);
        }
    }
}

TEST_CASE("one-bit quantization reproduces the input sign pattern") {
    Quantizer q = design_lloyd_max(1);
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(3);
    Eigen::VectorXcd r(3);
    r << cd(0.3, -0.2), cd(-1.5, 0.01), cd(2.0, -3.0);
    QuantizedFrame f = quantize(r, q, scale);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::signbit(f.r_q[i].real()) == std::signbit(r[i].real()));
        CHECK(std::signbit(f.r_q[i].imag()) == std::signbit(r[i].imag()));
    }
}

TEST_CASE("sixteen-bit quantization is near-lossless on Gaussian draws") {
    Quantizer q = design_lloyd_max(16);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double x = gauss(rng);
        worst = std::max(worst, std::abs(x - quantize_component(x, q, 1.0)));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("bussgang gain equals 1 - eta and matches the regression oracle") {
    Quantizer q1 = design_lloyd_max(1);
    CHECK(bussgang_gain(q1) == doctest::Approx(2.0 / kPi).epsilon(1e-10));

    Quantizer q3 = design_lloyd_max(3);
    CHECK(bussgang_gain(q3) == doctest::Approx(1.0 - q3.eta).epsilon(1e-12));

    // E[Q(X) X] / E[X^2] over 1e6 standard-normal draws.
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 1000000; ++i) {
        double x = gauss(rng);
        num += quantize_component(x, q3, 1.0) * x;
        den += x * x;
    }
    CHECK(num / den == doctest::Approx(bussgang_gain(q3)).epsilon(1e-3));

    CHECK(bussgang_gain(design_lloyd_max(16)) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("adc dynamic range follows 6.02 b + 1.76 and is increasing") {
    CHECK(adc_dynamic_range(1) == doctest::Approx(7.78).epsilon(1e-12));
    CHECK(adc_dynamic_range(4) == doctest::Approx(25.84).epsilon(1e-12));
    for (int b = 2; b <= 16; ++b) CHECK(adc_dynamic_range(b) > adc_dynamic_range(b - 1));
}

TEST_CASE("min_bits_for_dr staircase") {
    CHECK(min_bits_for_dr(0.0, 0.0).bits == 1);
    MinBitsResult r = min_bits_for_dr(20.0, 0.0);
    CHECK(r.bits == 4);
    CHECK_FALSE(r.saturated);
    // Choosing b = 3 would not cover 20 dB.
    CHECK(adc_dynamic_range(3) < 20.0);

    int prev = 1;
    for (double dr = 0.0; dr <= 90.0; dr += 0.5) {
        MinBitsResult m = min_bits_for_dr(dr, 0.0);
        CHECK(m.bits >= prev);                       // monotone in dr_sig
        CHECK(adc_dynamic_range(m.bits) >= dr);      // covering choice
        if (m.bits > 1) CHECK(adc_dynamic_range(m.bits - 1) < dr);  // minimality
        prev = m.bits;
    }

    MinBitsResult sat = min_bits_for_dr(120.0, 0.0);
    CHECK(sat.saturated);
    CHECK(sat.bits == 16);
    CHECK(min_bits_for_dr(90.0, 10.0).saturated);  // margin pushes past b=16
    CHECK_THROWS_AS(min_bits_for_dr(10.0, -1.0), std::domain_error);
}

TEST_CASE("arcsine law on identity and real correlations") {
    Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(3, 3);
    CHECK((arcsine_covariance(eye) - eye).norm() < 1e-14);

    for (double rho : {-0.9, -0.4, 0.0, 0.3, 0.75}) {
        CAPTURE(rho);
        Eigen::MatrixXcd r(2, 2);
        r << 2.0, 2.0 * rho, 2.0 * rho, 2.0;  // non-unit diagonal exercises D^-1/2
        Eigen::MatrixXcd out = arcsine_covariance(r);
        CHECK(out(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out(0, 1).real() ==
              doctest::Approx(2.0 / kPi * std::asin(rho)).epsilon(1e-12));
        CHECK(out(0, 1).imag() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("arcsine law matches Monte-Carlo sign correlation") {
    const double rho = 0.6;
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss;
    double acc = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        double u = gauss(rng), v = gauss(rng);
        double x = u;
        double y = rho * u + std::sqrt(1.0 - rho * rho) * v;
        acc += (x > 0 ? 1.0 : -1.0) * (y > 0 ? 1.0 : -1.0);
    }
    Eigen::MatrixXcd r(2, 2);
    r << 1.0, rho, rho, 1.0;
    double predicted = arcsine_covariance(r)(0, 1).real();
    CHECK(std::abs(acc / n - predicted) < 1e-3);
}

TEST_CASE("arcsine law rejects degenerate inputs") {
    Eigen::MatrixXcd zero_diag(2, 2);
    zero_diag << 0.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(arcsine_covariance(zero_diag), std::domain_error);

    Eigen::MatrixXcd not_herm(2, 2);
    not_herm << 1.0, cd(0.2, 0.1), cd(0.9, 0.4), 1.0;
    CHECK_THROWS_AS(arcsine_covariance(not_herm), std::invalid_argument);
}

TEST_CASE("design_lloyd_max rejects out-of-range resolutions") {
    CHECK_THROWS(design_lloyd_max(0));
    CHECK_THROWS(design_lloyd_max(17));
}
