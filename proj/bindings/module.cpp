// Python bindings for the solver, the simulator and the experiment sweeps.
// Fields named lambda in C++ surface as lambda_ because of the Python
// keyword.

#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aoii/dr_dph.hpp"
#include "aoii/experiments.hpp"
#include "aoii/io.hpp"
#include "aoii/simulator.hpp"
#include "aoii/smdp_solver.hpp"

namespace py = pybind11;

using namespace aoii;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Estimation-dependent threshold policies for the age of incorrect "
      "information: closed-form cycle parameters, average-cost solvers and a "
      "slot-accurate simulator.";
  m.attr("__version__") = "0.1.0";

  static py::exception<Error> error_type(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message =
          std::string(error_code_name(e.code())) + ": " + e.what();
      PyErr_SetString(error_type.ptr(), message.c_str());
    }
  });

  py::class_<Polynomial>(m, "Polynomial")
      .def(py::init<std::vector<double>>(), py::arg("coeffs"))
      .def_readonly("coeffs", &Polynomial::coeffs)
      .def_property_readonly("degree", &Polynomial::degree)
      .def("__call__", &Polynomial::operator(), py::arg("t"))
      .def("__repr__", [](const Polynomial& p) {
        std::ostringstream os;
        os << "Polynomial([";
        for (size_t k = 0; k < p.coeffs.size(); ++k)
          os << (k ? ", " : "") << p.coeffs[k];
        os << "])";
        return os.str();
      });

  py::class_<SourceModel>(m, "SourceModel")
      .def(py::init<Matrix, std::vector<Polynomial>>(), py::arg("q"),
           py::arg("penalties"))
      .def(py::init([](Matrix q, const std::vector<std::vector<double>>& c) {
             std::vector<Polynomial> penalties;
             penalties.reserve(c.size());
             for (const std::vector<double>& coeffs : c)
               penalties.emplace_back(coeffs);
             return SourceModel(std::move(q), std::move(penalties));
           }),
           py::arg("q"), py::arg("penalties"))
      .def_property_readonly(
          "q", [](const SourceModel& s) -> Matrix { return s.q().entries(); })
      .def_property_readonly("num_states", &SourceModel::num_states)
      .def_property_readonly(
          "penalties",
          [](const SourceModel& s) { return s.penalties(); })
      .def("penalty",
           [](const SourceModel& s, int j) {
             if (j < 0 || j >= s.num_states()) throw py::index_error();
             return s.penalty(j);
           },
           py::arg("j"));

  py::class_<ChannelModel>(m, "ChannelModel")
      .def(py::init<RowVector, Matrix>(), py::arg("gamma"), py::arg("g"))
      .def_property_readonly(
          "gamma", [](const ChannelModel& c) -> RowVector { return c.gamma(); })
      .def_property_readonly(
          "g", [](const ChannelModel& c) -> Matrix { return c.g(); })
      .def_property_readonly(
          "h", [](const ChannelModel& c) -> ColVector { return c.h(); })
      .def_property_readonly("phases", &ChannelModel::phases);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("source", &Scenario::source)
      .def_readwrite("channel", &Scenario::channel)
      .def_readwrite("lambda_grid", &Scenario::lambda_grid)
      .def_readwrite("tau_max", &Scenario::tau_max)
      .def_readwrite("horizon", &Scenario::horizon)
      .def_readwrite("replications", &Scenario::replications)
      .def_readwrite("seed", &Scenario::seed);

  m.def("scenario_one", &scenario_one);
  m.def("scenario_two", &scenario_two);
  m.def("scenario_by_name", &scenario_by_name, py::arg("name"));

  py::enum_<MomentSeries>(m, "MomentSeries")
      .value("unified", MomentSeries::kUnified)
      .value("split_high_order_m", MomentSeries::kSplitHighOrderM)
      .value("split_high_order_tau", MomentSeries::kSplitHighOrderTau);

  py::class_<DualRegimeChain>(m, "DualRegimeChain")
      .def(py::init<RowVector, int, Matrix, Matrix, Matrix, Matrix, Matrix>(),
           py::arg("ipv1"), py::arg("threshold"), py::arg("btm"),
           py::arg("tpts1"), py::arg("tpts2"), py::arg("apts1"),
           py::arg("apts2"))
      .def_readonly("ipv1", &DualRegimeChain::ipv1)
      .def_readonly("threshold", &DualRegimeChain::threshold)
      .def_readonly("btm", &DualRegimeChain::btm)
      .def_property_readonly(
          "tpts1",
          [](const DualRegimeChain& c) -> Matrix { return c.tpts1.entries(); })
      .def_property_readonly(
          "tpts2",
          [](const DualRegimeChain& c) -> Matrix { return c.tpts2.entries(); })
      .def_readonly("apts1", &DualRegimeChain::apts1)
      .def_readonly("apts2", &DualRegimeChain::apts2)
      .def_property_readonly("regime1_order", &DualRegimeChain::regime1_order)
      .def_property_readonly("regime2_order", &DualRegimeChain::regime2_order)
      .def_property_readonly("absorbing_count",
                             &DualRegimeChain::absorbing_count);

  py::class_<DrDphDistribution>(m, "DrDphDistribution")
      .def(py::init<const DualRegimeChain&>(), py::arg("chain"))
      .def_readonly("ipv1", &DrDphDistribution::ipv1)
      .def_readonly("threshold", &DrDphDistribution::threshold)
      .def_readonly("ipv2", &DrDphDistribution::ipv2);

  m.def("regime2_ipv", &regime2_ipv, py::arg("chain"));
  m.def("drdph_pmf", &drdph_pmf, py::arg("dist"), py::arg("t"));
  m.def("absorption_vectors", &absorption_vectors, py::arg("chain"));
  m.def("factorial_moment", &factorial_moment, py::arg("dist"), py::arg("m"),
        py::arg("series") = MomentSeries::kUnified);
  m.def("ordinary_moment", &ordinary_moment, py::arg("dist"), py::arg("m"));
  m.def("expected_penalty_sum", &expected_penalty_sum, py::arg("dist"),
        py::arg("f"));

  py::class_<CycleChain>(m, "CycleChain")
      .def_readonly("ev", &CycleChain::ev)
      .def_readonly("threshold", &CycleChain::threshold)
      .def_readonly("chain", &CycleChain::chain)
      .def_readonly("dist", &CycleChain::dist);

  m.def("build_cycle_chain", &build_cycle_chain, py::arg("source"),
        py::arg("channel"), py::arg("j"), py::arg("tau"));
  m.def("age_cost", &age_cost, py::arg("cycle"), py::arg("f"));
  m.def("duration", &duration, py::arg("cycle"), py::arg("source"));
  m.def("transmission_cost", &transmission_cost, py::arg("cycle"));
  m.def("transition_row", &transition_row, py::arg("cycle"));

  py::class_<SmdpParameters>(m, "SmdpParameters")
      .def_readonly("num_states", &SmdpParameters::num_states)
      .def_readonly("tau_max", &SmdpParameters::tau_max)
      .def_readonly("age", &SmdpParameters::age)
      .def_readonly("tx", &SmdpParameters::tx)
      .def_readonly("dur", &SmdpParameters::dur)
      .def_readonly("rho", &SmdpParameters::rho)
      .def("age_cost", &SmdpParameters::age_cost, py::arg("j"), py::arg("tau"))
      .def("tx_cost", &SmdpParameters::tx_cost, py::arg("j"), py::arg("tau"))
      .def("duration", &SmdpParameters::duration, py::arg("j"), py::arg("tau"))
      .def("transition_row", &SmdpParameters::transition_row, py::arg("j"),
           py::arg("tau"));

  m.def("smdp_parameters", &smdp_parameters, py::arg("source"),
        py::arg("channel"), py::arg("tau_max"));
  m.def("smdp_parameters_csv", [](const SmdpParameters& params) {
    std::ostringstream os;
    write_smdp_parameters_csv(os, params);
    return os.str();
  });

  py::class_<Policy>(m, "Policy")
      .def(py::init([](std::vector<int> thresholds) {
             Policy p;
             p.thresholds = std::move(thresholds);
             return p;
           }),
           py::arg("thresholds"))
      .def_readwrite("thresholds", &Policy::thresholds)
      .def(py::self == py::self)
      .def("__repr__", [](const Policy& p) {
        std::ostringstream os;
        os << "Policy([";
        for (size_t j = 0; j < p.thresholds.size(); ++j)
          os << (j ? ", " : "") << p.thresholds[j];
        os << "])";
        return os.str();
      });

  py::class_<SolverResult>(m, "SolverResult")
      .def_readonly("policy", &SolverResult::policy)
      .def_readonly("gain", &SolverResult::gain)
      .def_readonly("bias", &SolverResult::bias)
      .def_readonly("iterations", &SolverResult::iterations)
      .def_readonly("gain_trace", &SolverResult::gain_trace)
      .def_readonly("warnings", &SolverResult::warnings);

  m.def("policy_evaluate", &policy_evaluate, py::arg("params"),
        py::arg("lambda_"), py::arg("policy"));
  m.def("policy_improve", &policy_improve, py::arg("params"),
        py::arg("lambda_"), py::arg("gain"), py::arg("bias"));
  m.def(
      "policy_iteration",
      [](const SmdpParameters& params, double lambda_,
         const std::optional<Policy>& initial) {
        return policy_iteration(params, lambda_,
                                initial ? &*initial : nullptr);
      },
      py::arg("params"), py::arg("lambda_"),
      py::arg("initial") = std::nullopt);
  m.def("uniform_threshold_search", &uniform_threshold_search,
        py::arg("params"), py::arg("lambda_"));
  m.def("exhaustive_search", &exhaustive_search, py::arg("params"),
        py::arg("lambda_"));
  m.def("validate_policy", &validate_policy, py::arg("params"),
        py::arg("policy"));

  py::class_<SimPolicy>(m, "SimPolicy")
      .def_static("multi", &SimPolicy::multi, py::arg("taus"))
      .def_static("uniform", &SimPolicy::uniform, py::arg("tau"))
      .def_static("random_sampling", &SimPolicy::random_sampling,
                  py::arg("xi"))
      .def_readonly("thresholds", &SimPolicy::thresholds)
      .def_readonly("xi", &SimPolicy::xi)
      .def_property_readonly("label", &SimPolicy::label)
      .def("__repr__",
           [](const SimPolicy& p) { return "SimPolicy(" + p.label() + ")"; });

  py::class_<SimOptions>(m, "SimOptions")
      .def(py::init([](long long horizon, int replications, std::uint64_t seed,
                       double lambda, double warmup_fraction,
                       bool charge_in_sync_penalty, bool exclusive_trigger,
                       long long trace_limit) {
             SimOptions o;
             o.horizon = horizon;
             o.replications = replications;
             o.seed = seed;
             o.lambda = lambda;
             o.warmup_fraction = warmup_fraction;
             o.charge_in_sync_penalty = charge_in_sync_penalty;
             o.exclusive_trigger = exclusive_trigger;
             o.trace_limit = trace_limit;
             return o;
           }),
           py::arg("horizon") = SimOptions{}.horizon,
           py::arg("replications") = SimOptions{}.replications,
           py::arg("seed") = SimOptions{}.seed,
           py::arg("lambda_") = SimOptions{}.lambda,
           py::arg("warmup_fraction") = SimOptions{}.warmup_fraction,
           py::arg("charge_in_sync_penalty") =
               SimOptions{}.charge_in_sync_penalty,
           py::arg("exclusive_trigger") = SimOptions{}.exclusive_trigger,
           py::arg("trace_limit") = SimOptions{}.trace_limit)
      .def_readwrite("horizon", &SimOptions::horizon)
      .def_readwrite("replications", &SimOptions::replications)
      .def_readwrite("seed", &SimOptions::seed)
      .def_readwrite("lambda_", &SimOptions::lambda)
      .def_readwrite("warmup_fraction", &SimOptions::warmup_fraction)
      .def_readwrite("charge_in_sync_penalty",
                     &SimOptions::charge_in_sync_penalty)
      .def_readwrite("exclusive_trigger", &SimOptions::exclusive_trigger)
      .def_readwrite("trace_limit", &SimOptions::trace_limit);

  py::class_<CycleStats>(m, "CycleStats")
      .def_readonly("ev", &CycleStats::ev)
      .def_readonly("cycles", &CycleStats::cycles)
      .def_readonly("mean_duration", &CycleStats::mean_duration)
      .def_readonly("mean_tx_slots", &CycleStats::mean_tx_slots)
      .def_readonly("mean_penalty", &CycleStats::mean_penalty)
      .def_readonly("next_ev_freq", &CycleStats::next_ev_freq);

  py::class_<SimulationReport>(m, "SimulationReport")
      .def_readonly("avg_cost", &SimulationReport::avg_cost)
      .def_readonly("ci_half_width", &SimulationReport::ci_half_width)
      .def_readonly("avg_penalty", &SimulationReport::avg_penalty)
      .def_readonly("avg_tx_fraction", &SimulationReport::avg_tx_fraction)
      .def_readonly("slots_counted", &SimulationReport::slots_counted)
      .def_readonly("horizon", &SimulationReport::horizon)
      .def_readonly("replications", &SimulationReport::replications)
      .def_readonly("seed", &SimulationReport::seed)
      .def_readonly("lambda_", &SimulationReport::lambda)
      .def_readonly("rep_costs", &SimulationReport::rep_costs)
      .def_readonly("cycle_stats", &SimulationReport::cycle_stats)
      .def_readonly("warnings", &SimulationReport::warnings);

  m.def(
      "simulate",
      [](const SourceModel& source, const ChannelModel& channel,
         const SimPolicy& policy, const SimOptions& options,
         const std::optional<std::string>& trace_path) {
        if (!trace_path) return simulate(source, channel, policy, options);
        std::ofstream trace(*trace_path);
        if (!trace)
          fail(ErrorCode::kIoError,
               "cannot open trace file '" + *trace_path + "'");
        return simulate(source, channel, policy, options, &trace);
      },
      py::arg("source"), py::arg("channel"), py::arg("policy"),
      py::arg("options") = SimOptions{}, py::arg("trace_path") = std::nullopt);

  py::class_<CycleParameterEstimate>(m, "CycleParameterEstimate")
      .def_readonly("age_cost", &CycleParameterEstimate::age_cost)
      .def_readonly("tx_cost", &CycleParameterEstimate::tx_cost)
      .def_readonly("duration", &CycleParameterEstimate::duration)
      .def_readonly("rho", &CycleParameterEstimate::rho)
      .def_readonly("age_cost_se", &CycleParameterEstimate::age_cost_se)
      .def_readonly("tx_cost_se", &CycleParameterEstimate::tx_cost_se)
      .def_readonly("duration_se", &CycleParameterEstimate::duration_se)
      .def_readonly("rho_se", &CycleParameterEstimate::rho_se)
      .def_readonly("cycles", &CycleParameterEstimate::cycles);

  m.def("estimate_cycle_parameters", &estimate_cycle_parameters,
        py::arg("source"), py::arg("channel"), py::arg("j"), py::arg("tau"),
        py::arg("cycles"), py::arg("seed"));
  m.def("rs_line_search", &rs_line_search, py::arg("source"),
        py::arg("channel"), py::arg("xi_grid"), py::arg("options"));

  py::class_<SweepPolicySet>(m, "SweepPolicySet")
      .def(py::init<>())
      .def_readwrite("smdp", &SweepPolicySet::smdp)
      .def_readwrite("st", &SweepPolicySet::st)
      .def_readwrite("rs", &SweepPolicySet::rs);

  py::class_<SmdpSweepCell>(m, "SmdpSweepCell")
      .def_readonly("policy", &SmdpSweepCell::policy)
      .def_readonly("gain", &SmdpSweepCell::gain)
      .def_readonly("sim_cost", &SmdpSweepCell::sim_cost)
      .def_readonly("sim_ci", &SmdpSweepCell::sim_ci);

  py::class_<StSweepCell>(m, "StSweepCell")
      .def_readonly("tau", &StSweepCell::tau)
      .def_readonly("gain", &StSweepCell::gain)
      .def_readonly("sim_cost", &StSweepCell::sim_cost)
      .def_readonly("sim_ci", &StSweepCell::sim_ci);

  py::class_<RsSweepCell>(m, "RsSweepCell")
      .def_readonly("xi", &RsSweepCell::xi)
      .def_readonly("sim_cost", &RsSweepCell::sim_cost)
      .def_readonly("sim_ci", &RsSweepCell::sim_ci);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("lambda_", &SweepRow::lambda)
      .def_readonly("smdp", &SweepRow::smdp)
      .def_readonly("st", &SweepRow::st)
      .def_readonly("rs", &SweepRow::rs)
      .def_readonly("error", &SweepRow::error);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("rows", &SweepResult::rows)
      .def_readonly("xi_grid", &SweepResult::xi_grid);

  m.def("default_xi_grid", &default_xi_grid);
  m.def("run_sweep", &run_sweep, py::arg("scenario"),
        py::arg("policies") = SweepPolicySet{},
        py::arg("xi_grid") = default_xi_grid());
  m.def("sweep_costs_csv",
        [](const Scenario& scenario, const SweepResult& result) {
          std::ostringstream os;
          write_sweep_costs_csv(os, scenario, result);
          return os.str();
        },
        py::arg("scenario"), py::arg("result"));
  m.def("sweep_thresholds_csv",
        [](const Scenario& scenario, const SweepResult& result) {
          std::ostringstream os;
          write_sweep_thresholds_csv(os, scenario, result);
          return os.str();
        },
        py::arg("scenario"), py::arg("result"));

  m.def("solver_result_json",
        [](const SolverResult& result) {
          return solver_result_to_json(result).dump(2);
        },
        py::arg("result"));
  m.def("simulation_report_json",
        [](const SimulationReport& report) {
          return simulation_report_to_json(report).dump(2);
        },
        py::arg("report"));
}
