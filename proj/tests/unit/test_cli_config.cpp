#include <gtest/gtest.h>

#include "dreg/errors.hpp"
#include "dreg_cli/commands.hpp"
#include "dreg_cli/config.hpp"

using namespace dreg;
using nlohmann::json;

TEST(CliConfig, DefaultsAndParsing) {
  const cli::RunConfig d = cli::config_from_json(json::object());
  EXPECT_EQ(d.bootstrap_b, 5000u);
  EXPECT_EQ(d.alpha, 0.05);
  EXPECT_EQ(d.method, Method::OrthogonalScore);
  EXPECT_EQ(d.thresholds.q_lo, 0.05);
  EXPECT_EQ(d.thresholds.q_hi, 0.95);
  EXPECT_EQ(d.inference.logistic.c, 1.1);

  const json doc = json::parse(R"({
    "data": {"path": "a.csv", "response": "y", "d_columns": ["d"]},
    "grid": {"u_values": [0.2, 0.8], "j": [1]},
    "thresholds": {"y_lo": -1, "y_hi": 1},
    "penalty": {"logistic": {"c": 1.2, "max_loops": 2}, "lasso": {"gamma": 0.01}},
    "inference": {"alt_variance": "literal", "sigma_at_pilot": false},
    "bootstrap": {"b": 100, "alpha": 0.1},
    "method": "ds", "seed": 5, "threads": 3,
    "mc": {"design": "D2", "variant": "ii", "n": 40, "p": 9, "u_set": [0.0], "reps": 3,
           "methods": ["proposed-os"]}
  })");
  const cli::RunConfig c = cli::config_from_json(doc);
  EXPECT_EQ(c.data_path, "a.csv");
  EXPECT_EQ(c.roles.d_columns, std::vector<std::string>{"d"});
  EXPECT_EQ(c.grid.u_values, (std::vector<double>{0.2, 0.8}));
  EXPECT_EQ(*c.thresholds.y_hi, 1.0);
  EXPECT_EQ(c.inference.logistic.c, 1.2);
  EXPECT_EQ(c.inference.logistic.max_loops, 2);
  EXPECT_EQ(*c.inference.lasso.gamma, 0.01);
  EXPECT_EQ(c.inference.alt_variance, AltVarianceRule::Literal);
  EXPECT_FALSE(c.inference.sigma_at_pilot);
  EXPECT_EQ(c.bootstrap_b, 100u);
  EXPECT_EQ(c.method, Method::DoubleSelection);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.threads, 3u);
  EXPECT_EQ(c.mc.design.design, DesignId::D2);
  EXPECT_EQ(c.mc.design.variant, BetaVariant::II);
  EXPECT_EQ(c.mc.reps, 3u);
  EXPECT_EQ(c.mc.methods, std::vector<McMethod>{McMethod::ProposedOS});
}

TEST(CliConfig, EchoRoundTripsAndOmitsRuntimeKnobs) {
  const json doc = json::parse(R"({
    "data": {"path": "a.csv", "response": "y", "d_columns": ["d"]},
    "grid": {"u_count": 3, "u_min": 0.1, "u_max": 0.9},
    "bootstrap": {"b": 100}, "seed": 9, "threads": 4, "output": {"dir": "x"}
  })");
  const cli::RunConfig c = cli::config_from_json(doc);
  const nlohmann::ordered_json echo = cli::config_to_json(c);
  EXPECT_FALSE(echo.contains("threads"));
  EXPECT_FALSE(echo.contains("output"));
  const cli::RunConfig back = cli::config_from_json(json::parse(echo.dump()));
  EXPECT_EQ(cli::config_to_json(back).dump(), echo.dump());
}

TEST(CliConfig, RejectsUnknownKeysAndBadTypes) {
  auto kind_of = [](const char* text) {
    try {
      cli::config_from_json(json::parse(text));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind_of(R"({"bogus": 1})"), ErrorKind::InvalidConfiguration);
  EXPECT_EQ(kind_of(R"({"grid": {"u_cnt": 3}})"), ErrorKind::InvalidConfiguration);
  EXPECT_EQ(kind_of(R"({"seed": "abc"})"), ErrorKind::InvalidConfiguration);
  EXPECT_EQ(kind_of(R"({"method": "lasso"})"), ErrorKind::InvalidConfiguration);
  EXPECT_THROW(cli::load_config("/nonexistent/config.json"), Error);
}

TEST(CliConfig, ExitCodes) {
  EXPECT_EQ(cli::exit_code(ErrorKind::InvalidArgument), 2);
  EXPECT_EQ(cli::exit_code(ErrorKind::InvalidConfiguration), 2);
  EXPECT_EQ(cli::exit_code(ErrorKind::DegenerateColumn), 3);
  EXPECT_EQ(cli::exit_code(ErrorKind::DegenerateIdentification), 3);
  EXPECT_EQ(cli::exit_code(ErrorKind::NumericalFailure), 3);
  EXPECT_EQ(cli::exit_code(ErrorKind::Io), 4);
}
