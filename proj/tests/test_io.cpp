#include <doctest.h>

#include <string>

#include "aoii/io.hpp"

using namespace aoii;

TEST_CASE("solver result serialization") {
  SolverResult r;
  r.policy.thresholds = {1, 3, 2};
  r.gain = 1.25;
  r.bias = ColVector(3);
  r.bias << 0.5, -0.25, 0.0;
  r.iterations = 4;
  r.gain_trace = {2.0, 1.5, 1.25};
  Json j = solver_result_to_json(r);
  CHECK(j["schema_version"] == 1);
  CHECK(j["policy"] == Json::array({1, 3, 2}));
  CHECK(j["gain"] == 1.25);
  CHECK(j["bias"][1] == -0.25);
  CHECK(j["iterations"] == 4);
  CHECK(j["gain_trace"].size() == 3);
  CHECK(j["warnings"].empty());
}

TEST_CASE("error serialization") {
  try {
    fail(ErrorCode::kRowSumViolation, "row 2 sums to 1.2");
  } catch (const Error& e) {
    Json j = error_to_json(e);
    CHECK(j["error"]["code"] == "RowSumViolation");
    CHECK(j["error"]["message"] == "row 2 sums to 1.2");
  }
}

TEST_CASE("inline source and channel parsing") {
  Json j = Json::parse(R"({
    "q": [[0.7, 0.3], [0.4, 0.6]],
    "penalties": [[0.0, 1.0], [0.5, 0.5]]
  })");
  SourceModel source = source_from_json(j);
  CHECK(source.num_states() == 2);
  CHECK(source.q()(1, 0) == 0.4);
  CHECK(source.penalty(1)(2.0) == doctest::Approx(1.5).epsilon(1e-14));

  Json c = Json::parse(R"({"gamma": [1.0], "g": [[0.2]]})");
  ChannelModel channel = channel_from_json(c);
  CHECK(channel.phases() == 1);
  CHECK(channel.h()(0) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("config parse failures carry the config error code") {
  for (const char* text : {
           R"({})",
           R"({"scenario": 7})",
           R"({"q": [[1.0]]})",
           R"({"scenario": "scenario2", "tau_max": 0})",
           R"({"scenario": "scenario2", "lambda_grid": []})",
           R"({"scenario": "scenario2", "replications": "three"})",
       }) {
    CAPTURE(text);
    Json j = Json::parse(text);
    CHECK_THROWS_AS(scenario_from_json(j), Error);
    try {
      scenario_from_json(j);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfigError);
    }
  }
}

TEST_CASE("scenario overrides") {
  Json j = Json::parse(R"({
    "scenario": "scenario2",
    "lambda_grid": [0.25, 0.75],
    "tau_max": 12,
    "horizon": 5000,
    "replications": 3,
    "seed": 42,
    "name": "tweaked"
  })");
  Scenario s = scenario_from_json(j);
  CHECK(s.name == "tweaked");
  CHECK(s.lambda_grid == std::vector<double>{0.25, 0.75});
  CHECK(s.tau_max == 12);
  CHECK(s.horizon == 5000);
  CHECK(s.replications == 3);
  CHECK(s.seed == 42);
  CHECK(s.source.num_states() == 3);
}

TEST_CASE("inline scenario keeps the custom name and defaults") {
  Json j = Json::parse(R"({
    "source": {"q": [[0.5, 0.5], [0.5, 0.5]],
               "penalties": [[0.0, 1.0], [0.0, 1.0]]},
    "channel": {"gamma": [1.0], "g": [[0.5]]}
  })");
  Scenario s = scenario_from_json(j);
  CHECK(s.name == "custom");
  CHECK(s.source.num_states() == 2);
  CHECK(s.tau_max == 50);
  CHECK(!s.lambda_grid.empty());
}

TEST_CASE("model validation failures surface through parsing") {
  Json j = Json::parse(R"({
    "source": {"q": [[0.5, 0.6], [0.5, 0.5]],
               "penalties": [[0.0, 1.0], [0.0, 1.0]]},
    "channel": {"gamma": [1.0], "g": [[0.5]]}
  })");
  CHECK_THROWS_AS(scenario_from_json(j), Error);
  try {
    scenario_from_json(j);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRowSumViolation);
  }
}
