#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hrf/config.hpp"
#include "hrf/experiments.hpp"
#include "hrf/fisher.hpp"
#include "hrf/pareto.hpp"
#include "hrf/quantizer.hpp"
#include "hrf/rate.hpp"
#include "hrf/scenario.hpp"
#include "hrf/signal_model.hpp"

namespace py = pybind11;
using namespace hrf;

PYBIND11_MODULE(_hrf, m) {
    m.doc() = "Quantized-ADC ISAC CRB/rate boundary toolkit";
    m.attr("__version__") = kToolVersion;

    // quantizer
    py::class_<Quantizer>(m, "Quantizer")
        .def_readonly("bits", &Quantizer::bits)
        .def_readonly("thresholds", &Quantizer::thresholds)
        .def_readonly("levels", &Quantizer::levels)
        .def_readonly("eta", &Quantizer::eta);
    m.def("design_lloyd_max", &design_lloyd_max, py::arg("bits"),
          "Lloyd-Max quantizer for a unit-variance Gaussian source");
    m.def("lloyd_residual", &lloyd_residual, py::arg("quantizer"));
    m.def("bussgang_gain", &bussgang_gain, py::arg("quantizer"));
    m.def("adc_dynamic_range", &adc_dynamic_range, py::arg("bits"));
    py::class_<MinBitsResult>(m, "MinBitsResult")
        .def_readonly("bits", &MinBitsResult::bits)
        .def_readonly("saturated", &MinBitsResult::saturated);
    m.def("min_bits_for_dr", &min_bits_for_dr, py::arg("dr_sig_db"), py::arg("margin_db"));
    m.def("arcsine_covariance", &arcsine_covariance, py::arg("r_in"));

    // scenario
    py::class_<TargetSpec>(m, "TargetSpec")
        .def(py::init<>())
        .def_readwrite("aoa_rad", &TargetSpec::aoa_rad)
        .def_readwrite("range_m", &TargetSpec::range_m)
        .def_readwrite("doppler_hz", &TargetSpec::doppler_hz)
        .def_readwrite("rcs_m2", &TargetSpec::rcs_m2)
        .def_readwrite("gain_override", &TargetSpec::gain_override);
    py::class_<UserSpec>(m, "UserSpec")
        .def(py::init<>())
        .def_readwrite("num_antennas", &UserSpec::num_antennas)
        .def_readwrite("aoa_rad", &UserSpec::aoa_rad)
        .def_readwrite("aod_rad", &UserSpec::aod_rad)
        .def_readwrite("range_m", &UserSpec::range_m)
        .def_readwrite("max_power", &UserSpec::max_power)
        .def_readwrite("observed_targets", &UserSpec::observed_targets);
    py::class_<ReflectedLink>(m, "ReflectedLink")
        .def_readonly("target_index", &ReflectedLink::target_index)
        .def_readonly("gain", &ReflectedLink::gain)
        .def_readonly("delay_s", &ReflectedLink::delay_s)
        .def_readonly("aod_rad", &ReflectedLink::aod_rad)
        .def_readonly("path_m", &ReflectedLink::path_m)
        .def_readonly("dr_sig_db", &ReflectedLink::dr_sig_db);
    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("carrier_hz", &Scenario::carrier_hz)
        .def_readwrite("num_bs_antennas", &Scenario::num_bs_antennas)
        .def_readwrite("antenna_spacing_ratio", &Scenario::antenna_spacing_ratio)
        .def_readwrite("targets", &Scenario::targets)
        .def_readwrite("users", &Scenario::users)
        .def_readwrite("noise_variance", &Scenario::noise_variance)
        .def_readwrite("bs_max_power", &Scenario::bs_max_power)
        .def_readwrite("dr_margin_db", &Scenario::dr_margin_db)
        .def("finalize", &Scenario::finalize)
        .def_property_readonly("finalized", &Scenario::finalized)
        .def_property_readonly("wavelength_m", &Scenario::wavelength_m)
        .def_property_readonly("num_users", &Scenario::num_users)
        .def_property_readonly("num_targets", &Scenario::num_targets)
        .def("direct_path_power", &Scenario::direct_path_power, py::arg("user"))
        .def("reflected_path_power", &Scenario::reflected_path_power,
             py::arg("user"), py::arg("path"))
        .def("reflected_links", [](const Scenario& sc, int user) {
            return sc.links().users.at(static_cast<std::size_t>(user)).reflected;
        }, py::arg("user"));
    m.def("default_scenario", &default_scenario);
    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("dynamic_range_sig", &dynamic_range_sig, py::arg("p_direct"), py::arg("p_reflected"));

    // signal model
    py::class_<Precoders>(m, "Precoders")
        .def(py::init<>())
        .def_readwrite("bs", &Precoders::bs)
        .def_readwrite("users", &Precoders::users);
    py::enum_<SymbolSource::Mode>(m, "SymbolMode")
        .value("qpsk", SymbolSource::Mode::qpsk)
        .value("all_ones", SymbolSource::Mode::all_ones);
    py::class_<SymbolSource>(m, "SymbolSource")
        .def(py::init([](std::uint64_t seed, SymbolSource::Mode mode) {
                 return SymbolSource{seed, mode};
             }),
             py::arg("seed") = 0, py::arg("mode") = SymbolSource::Mode::qpsk)
        .def("symbol", &SymbolSource::symbol, py::arg("l"), py::arg("m"), py::arg("tx"));
    m.def("steering_vector",
          [](double angle, int n, double spacing) {
              return steering_vector(angle, n, spacing).entries;
          },
          py::arg("angle_rad"), py::arg("n_antennas"), py::arg("spacing_ratio") = 0.5);
    m.def("steering_derivative", &steering_derivative, py::arg("angle_rad"),
          py::arg("n_antennas"), py::arg("spacing_ratio") = 0.5);

    // fisher
    py::enum_<ParamRef::Kind>(m, "ParamKind")
        .value("target_aoa", ParamRef::Kind::target_aoa)
        .value("target_doppler", ParamRef::Kind::target_doppler)
        .value("target_delay", ParamRef::Kind::target_delay)
        .value("target_gain_re", ParamRef::Kind::target_gain_re)
        .value("target_gain_im", ParamRef::Kind::target_gain_im)
        .value("user_rx_aoa", ParamRef::Kind::user_rx_aoa)
        .value("user_aod", ParamRef::Kind::user_aod)
        .value("user_delay", ParamRef::Kind::user_delay)
        .value("user_gain_re", ParamRef::Kind::user_gain_re)
        .value("user_gain_im", ParamRef::Kind::user_gain_im)
        .value("refl_delay", ParamRef::Kind::refl_delay)
        .value("refl_aod", ParamRef::Kind::refl_aod)
        .value("refl_gain_re", ParamRef::Kind::refl_gain_re)
        .value("refl_gain_im", ParamRef::Kind::refl_gain_im);
    py::class_<ParamRef>(m, "ParamRef")
        .def(py::init([](ParamRef::Kind kind, int primary, int secondary) {
                 return ParamRef{kind, primary, secondary};
             }),
             py::arg("kind"), py::arg("primary") = 0, py::arg("secondary") = 0)
        .def_readwrite("kind", &ParamRef::kind)
        .def_readwrite("primary", &ParamRef::primary)
        .def_readwrite("secondary", &ParamRef::secondary);
    py::class_<FimResult>(m, "FimResult")
        .def_readonly("matrix", &FimResult::matrix)
        .def_readonly("param_labels", &FimResult::param_labels)
        .def_readonly("standard_error", &FimResult::standard_error);
    py::class_<CrbValue>(m, "CrbValue")
        .def_readonly("value", &CrbValue::value)
        .def_readonly("index", &CrbValue::index);
    m.def("fim_exact", &fim_exact, py::arg("scenario"), py::arg("precoders"),
          py::arg("quantizer"), py::arg("params"), py::arg("symbols"));
    m.def("empirical_fim", &empirical_fim, py::arg("scenario"), py::arg("precoders"),
          py::arg("quantizer"), py::arg("param"), py::arg("n_draws"), py::arg("seed"),
          py::arg("symbols"));
    m.def("unquantized_gaussian_fim", &unquantized_gaussian_fim, py::arg("scenario"),
          py::arg("precoders"), py::arg("params"), py::arg("symbols"));
    m.def("fim_lower_bound_aoa",
          [](const Eigen::MatrixXcd& r0, const std::vector<Eigen::MatrixXcd>& rk,
             const Scenario& sc, double eta) { return fim_lower_bound_aoa(r0, rk, sc, eta); },
          py::arg("r0"), py::arg("rk"), py::arg("scenario"), py::arg("eta"));
    m.def("crb", &crb, py::arg("fim"), py::arg("index") = 0);
    m.def("lambda_sum", &lambda_sum, py::arg("x_component"), py::arg("sigma"),
          py::arg("quantizer"), py::arg("scale") = 1.0);

    // rate
    py::class_<SignalCovariance>(m, "SignalCovariance")
        .def_readonly("matrix", &SignalCovariance::matrix)
        .def_readonly("symbol_index", &SignalCovariance::symbol_index);
    py::class_<RateValue>(m, "RateValue")
        .def_readonly("mi_bits_per_symbol", &RateValue::mi_bits_per_symbol)
        .def_readonly("rate_kbps", &RateValue::rate_kbps)
        .def_readonly("low_snr_ok", &RateValue::low_snr_ok);
    m.def("signal_covariance", &signal_covariance, py::arg("r0"), py::arg("rk"),
          py::arg("scenario"), py::arg("l") = 0);
    m.def("mi_lower_bound", &mi_lower_bound, py::arg("r_xx"), py::arg("eta"),
          py::arg("sigma2"), py::arg("delta_f_hz"));
    m.def("mi_one_bit", &mi_one_bit, py::arg("r_xx"), py::arg("sigma2"),
          py::arg("delta_f_hz"));

    // pareto
    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("objective", &SolveReport::objective)
        .def_readonly("constraint_violation", &SolveReport::constraint_violation)
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("certificate_gap", &SolveReport::certificate_gap)
        .def_readonly("message", &SolveReport::message)
        .def_property_readonly("status", [](const SolveReport& r) {
            return std::string(solve_status_name(r.status));
        });
    py::class_<CovariancePair>(m, "CovariancePair")
        .def_readonly("r0", &CovariancePair::r0)
        .def_readonly("rk", &CovariancePair::rk);
    py::class_<ParetoPoint>(m, "ParetoPoint")
        .def_readonly("mu_bits", &ParetoPoint::mu_bits)
        .def_readonly("gamma", &ParetoPoint::gamma)
        .def_readonly("crb", &ParetoPoint::crb)
        .def_readonly("rate_bits", &ParetoPoint::rate_bits)
        .def_readonly("rate_kbps", &ParetoPoint::rate_kbps)
        .def_readonly("covariances", &ParetoPoint::covariances)
        .def_readonly("report", &ParetoPoint::report);
    py::class_<Rank1Extraction>(m, "Rank1Extraction")
        .def_readonly("f", &Rank1Extraction::f)
        .def_readonly("gap", &Rank1Extraction::gap)
        .def_readonly("defined", &Rank1Extraction::defined);
    m.def("solve_p0", &solve_p0, py::arg("scenario"), py::arg("bits"), py::arg("mu_bits"),
          py::arg("target_index") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("solve_p1", &solve_p1, py::arg("scenario"), py::arg("bits"), py::arg("gamma"),
          py::arg("target_index") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("extract_rank1", &extract_rank1, py::arg("r"));
    m.def("boundary_sweep", &boundary_sweep, py::arg("scenario"), py::arg("bits"),
          py::arg("n_points"), py::arg("log_grid") = false, py::arg("target_index") = 0,
          py::call_guard<py::gil_scoped_release>());

    // experiments
    m.def("run_experiment",
          [](const std::string& config_path, const std::string& out_dir,
             std::optional<std::uint64_t> seed) {
              ExperimentConfig cfg = load_experiment(config_path);
              if (seed) cfg.seed = *seed;
              RunOutcome out = run_experiment(cfg, out_dir, config_hash(config_path));
              return py::make_tuple(out.files, out.validation_failed);
          },
          py::arg("config_path"), py::arg("out_dir"), py::arg("seed") = py::none(),
          "Run an experiment config; returns (written file list, validation_failed)");
}
