#include "doctest.h"

#include "commands.hpp"
#include "config.hpp"
#include "unipert/errors.hpp"

#include <sstream>

using namespace unipert;
using namespace unipert::app;

TEST_CASE("shipped config parses and validates") {
  const auto c = load_config(std::string(UNIPERT_CONFIG_DIR) + "/default.ini");
  CHECK(c.perturbation.w == std::optional<std::string>("0.05*sin(m12 + m13)"));
  CHECK(c.output.path == std::optional<std::string>("-"));
  CHECK(c.integrator.method == Method::kLieRK4);
  CHECK(c.experiment.samples == 64);
  const auto r = validate(c);
  CHECK(r.ok());
  REQUIRE(r.notes.size() == 1);
  CHECK(r.notes[0].find("smallness condition holds") != std::string::npos);
  CHECK(validate(ExperimentConfig::defaults()).ok());
}

TEST_CASE("config values and errors") {
  const auto c = parse_config(
      "; comment\n[perturbation]\nu = 1 1 0.5\nbeta = \"0\"\nlambda = \"1\"\n"
      "[experiment]\nt = 2.5\nseed = 9\n[output]\npath = out.csv\nformat = json\n");
  CHECK(c.perturbation.u == std::array<double, 3>{1.0, 1.0, 0.5});
  CHECK_FALSE(c.perturbation.w.has_value());
  CHECK(c.experiment.t == 2.5);
  CHECK(c.experiment.seed == 9);
  CHECK(c.output.format == "json");
  CHECK(validate(c).ok());

  try {
    parse_config("[experiment]\nsigma = 1\nt = ten\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[perturbation]\nu = 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[integrator]\nmethod = euler\n"), ParseError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ParseError);
}

TEST_CASE("validation lists every violated invariant") {
  auto c = ExperimentConfig::defaults();
  c.perturbation.u = {0.0, 0.0, 1.0};
  c.perturbation.beta = "0";
  c.output.path.reset();
  c.experiment.sigma = -1.0;
  c.experiment.field = "Q";
  const auto r = validate(c);
  CHECK_FALSE(r.ok());
  auto mentions = [&](const std::string& s) {
    for (const auto& v : r.violations)
      if (v.find(s) != std::string::npos) return true;
    return false;
  };
  CHECK(mentions("exactly one of w"));
  CHECK(mentions("time change"));
  CHECK(mentions("output.path"));
  CHECK(mentions("experiment.sigma"));
  CHECK(mentions("experiment.field"));
}

TEST_CASE("tables render deterministically") {
  auto c = ExperimentConfig::defaults();
  c.experiment.t = 1.0;
  c.experiment.samples = 3;
  c.experiment.base_points = 2;
  const Table a = run_command("pushforward", c);
  const Table b = run_command("pushforward", c);
  std::ostringstream sa, sb;
  write_csv(sa, a, c);
  write_csv(sb, b, c);
  CHECK(sa.str() == sb.str());
  CHECK(a.rows.size() == 6);
  CHECK(a.summary["max_rel_closed_form_gap"].get<double>() <= 1e-6);

  std::ostringstream js;
  write_json(js, run_command("kakutani", c), c);
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(doc["rows"][0][1].get<double>() == 2.0);
  CHECK(doc["config"]["experiment.field"] == "Z");

  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(-0.0) == "0");
  CHECK_THROWS_AS(run_command("nope", c), DomainError);
}

TEST_CASE("execute maps failures to exit codes") {
  std::ostringstream err;
  auto c = ExperimentConfig::defaults();
  c.perturbation.u = {0.0, 0.0, 1.0};
  CHECK(execute("shear", c, err) == kExitInvalid);

  auto shear = ExperimentConfig::defaults();
  shear.experiment.t = 0.5;
  shear.output.path = "/dev/null";
  CHECK(execute("shear", shear, err) == kExitInvalid);

  auto blowup = ExperimentConfig::defaults();
  blowup.perturbation.w.reset();
  blowup.perturbation.beta = "0";
  blowup.perturbation.lambda = "1 - 0.05*m13";
  blowup.experiment.t = 40.0;
  blowup.experiment.base_points = 1;
  blowup.output.path = "/dev/null";
  CHECK(execute("timechange-diff", blowup, err) == kExitNumerical);
  CHECK(err.str().find("numerical failure") != std::string::npos);
}
