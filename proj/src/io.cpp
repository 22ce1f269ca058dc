#include "aoii/io.hpp"

#include <fstream>

namespace aoii {

Json solver_result_to_json(const SolverResult& result) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["policy"] = result.policy.thresholds;
  j["gain"] = result.gain;
  std::vector<double> bias(result.bias.data(),
                           result.bias.data() + result.bias.size());
  j["bias"] = bias;
  j["iterations"] = result.iterations;
  j["gain_trace"] = result.gain_trace;
  j["warnings"] = result.warnings;
  return j;
}

Json simulation_report_to_json(const SimulationReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["avg_cost"] = report.avg_cost;
  j["ci95_half_width"] = report.ci_half_width;
  j["avg_penalty"] = report.avg_penalty;
  j["avg_tx_fraction"] = report.avg_tx_fraction;
  j["slots_counted"] = report.slots_counted;
  j["horizon"] = report.horizon;
  j["replications"] = report.replications;
  j["seed"] = report.seed;
  j["lambda"] = report.lambda;
  j["rep_costs"] = report.rep_costs;
  Json stats = Json::array();
  for (const CycleStats& cs : report.cycle_stats) {
    Json s;
    s["ev"] = cs.ev + 1;
    s["cycles"] = cs.cycles;
    s["mean_duration"] = cs.mean_duration;
    s["mean_tx_slots"] = cs.mean_tx_slots;
    s["mean_penalty"] = cs.mean_penalty;
    s["next_ev_freq"] = cs.next_ev_freq;
    stats.push_back(std::move(s));
  }
  j["cycle_stats"] = std::move(stats);
  j["warnings"] = report.warnings;
  return j;
}

Json cycle_estimate_to_json(const CycleParameterEstimate& est) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["age_cost"] = est.age_cost;
  j["age_cost_se"] = est.age_cost_se;
  j["tx_cost"] = est.tx_cost;
  j["tx_cost_se"] = est.tx_cost_se;
  j["duration"] = est.duration;
  j["duration_se"] = est.duration_se;
  j["rho"] = est.rho;
  j["rho_se"] = est.rho_se;
  j["cycles"] = est.cycles;
  return j;
}

Json error_to_json(const Error& e) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
  return j;
}

namespace {

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    fail(ErrorCode::kConfigError,
         std::string(what) + " must be a nonempty array of rows");
  }
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      fail(ErrorCode::kConfigError,
           std::string(what) + " rows must all have the same length");
    }
    for (size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        fail(ErrorCode::kConfigError,
             std::string(what) + " entries must be numbers");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return m;
}

RowVector rowvec_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    fail(ErrorCode::kConfigError,
         std::string(what) + " must be a nonempty array");
  }
  RowVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      fail(ErrorCode::kConfigError,
           std::string(what) + " entries must be numbers");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

}  // namespace

SourceModel source_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("q") || !j.contains("penalties")) {
    fail(ErrorCode::kConfigError,
         "source description needs \"q\" and \"penalties\"");
  }
  Matrix q = matrix_from_json(j["q"], "source q");
  std::vector<Polynomial> penalties;
  if (!j["penalties"].is_array()) {
    fail(ErrorCode::kConfigError,
         "source penalties must be an array of coefficient arrays "
         "(lowest degree first)");
  }
  for (const Json& poly : j["penalties"]) {
    if (!poly.is_array() || poly.empty()) {
      fail(ErrorCode::kConfigError,
           "each penalty must be a nonempty coefficient array");
    }
    std::vector<double> coeffs;
    for (const Json& c : poly) {
      if (!c.is_number()) {
        fail(ErrorCode::kConfigError, "penalty coefficients must be numbers");
      }
      coeffs.push_back(c.get<double>());
    }
    penalties.emplace_back(std::move(coeffs));
  }
  return SourceModel(std::move(q), std::move(penalties));
}

ChannelModel channel_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("gamma") || !j.contains("g")) {
    fail(ErrorCode::kConfigError,
         "channel description needs \"gamma\" and \"g\"");
  }
  return ChannelModel(rowvec_from_json(j["gamma"], "channel gamma"),
                      matrix_from_json(j["g"], "channel g"));
}

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) {
    fail(ErrorCode::kConfigError, "config root must be a JSON object");
  }
  std::optional<Scenario> scenario;
  if (j.contains("scenario")) {
    if (!j["scenario"].is_string()) {
      fail(ErrorCode::kConfigError, "\"scenario\" must be a string");
    }
    scenario = scenario_by_name(j["scenario"].get<std::string>());
  } else if (j.contains("source") && j.contains("channel")) {
    Scenario inline_scenario{"custom", source_from_json(j["source"]),
                             channel_from_json(j["channel"]),
                             {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}};
    scenario = std::move(inline_scenario);
  } else {
    fail(ErrorCode::kConfigError,
         "config needs either \"scenario\" or both \"source\" and "
         "\"channel\"");
  }
  if (j.contains("lambda_grid")) {
    if (!j["lambda_grid"].is_array() || j["lambda_grid"].empty()) {
      fail(ErrorCode::kConfigError, "\"lambda_grid\" must be a nonempty array");
    }
    std::vector<double> grid;
    for (const Json& v : j["lambda_grid"]) {
      if (!v.is_number()) {
        fail(ErrorCode::kConfigError, "\"lambda_grid\" entries must be numbers");
      }
      grid.push_back(v.get<double>());
    }
    scenario->lambda_grid = std::move(grid);
  }
  if (j.contains("tau_max")) {
    if (!j["tau_max"].is_number_integer() || j["tau_max"].get<int>() < 1) {
      fail(ErrorCode::kConfigError, "\"tau_max\" must be a positive integer");
    }
    scenario->tau_max = j["tau_max"].get<int>();
  }
  if (j.contains("horizon")) {
    if (!j["horizon"].is_number_integer() || j["horizon"].get<long long>() < 1) {
      fail(ErrorCode::kConfigError, "\"horizon\" must be a positive integer");
    }
    scenario->horizon = j["horizon"].get<long long>();
  }
  if (j.contains("replications")) {
    if (!j["replications"].is_number_integer() ||
        j["replications"].get<int>() < 1) {
      fail(ErrorCode::kConfigError,
           "\"replications\" must be a positive integer");
    }
    scenario->replications = j["replications"].get<int>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) {
      fail(ErrorCode::kConfigError, "\"seed\" must be an integer");
    }
    scenario->seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("name") && j["name"].is_string()) {
    scenario->name = j["name"].get<std::string>();
  }
  return *scenario;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  }
  out << contents;
  if (!out) {
    fail(ErrorCode::kIoError, "failed writing '" + path + "'");
  }
}

}  // namespace aoii
