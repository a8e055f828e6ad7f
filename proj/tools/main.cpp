#include "commands.hpp"

#include "unipert/errors.hpp"
#include "unipert/parallel.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> field;
  std::optional<std::uint64_t> seed;
  std::optional<double> t;
  std::optional<double> sigma;
  std::optional<double> tmax;
  std::optional<double> a;
  std::optional<int> samples;
  std::optional<int> base_points;
  std::optional<std::size_t> threads;
};

void apply(const Overrides& o, unipert::app::ExperimentConfig& c) {
  if (o.out) c.output.path = *o.out;
  if (o.format) c.output.format = *o.format;
  if (o.field) c.experiment.field = *o.field;
  if (o.seed) c.experiment.seed = *o.seed;
  if (o.t) c.experiment.t = *o.t;
  if (o.sigma) c.experiment.sigma = *o.sigma;
  if (o.tmax) c.experiment.tmax = *o.tmax;
  if (o.a) c.experiment.a = *o.a;
  if (o.samples) c.experiment.samples = *o.samples;
  if (o.base_points) c.experiment.base_points = *o.base_points;
}

}  // namespace

int main(int argc, char** argv) {
  namespace app = unipert::app;

  CLI::App cli{"Perturbed unipotent flows on SL(3,R): numerical experiments"};
  cli.require_subcommand(1);
  cli.fallthrough();

  Overrides o;
  cli.add_option("--config", o.config_path, "INI experiment file (defaults when omitted)");
  cli.add_option("--out", o.out, "Output path, '-' for stdout");
  cli.add_option("--format", o.format, "csv or json");
  cli.add_option("--seed", o.seed, "Seed for random base points");
  cli.add_option("--t", o.t, "Time");
  cli.add_option("--sigma", o.sigma, "Shear segment length");
  cli.add_option("--tmax", o.tmax, "Largest dyadic time");
  cli.add_option("--field", o.field, "Frame element name (E31 .. E13, H1, H2, Z) or U / W");
  cli.add_option("--a", o.a, "Scale of the field");
  cli.add_option("--samples", o.samples, "Grid size");
  cli.add_option("--base-points", o.base_points, "Number of random base points");
  cli.add_option("--threads", o.threads, "Worker threads");

  const std::map<std::string, std::string> help = {
      {"bracket-table", "8x8 table of frame brackets"},
      {"adjoint", "Matrix of exp(t ad(a V)) in the frame"},
      {"pushforward", "Frame coefficients of a pushed field along perturbed orbits"},
      {"parabolicity", "Growth of the differential over dyadic times"},
      {"shear", "Shear curves, tangent residuals, l_t bounds"},
      {"conjugacy", "Conjugacy residuals for a transfer function"},
      {"kakutani", "Kakutani anchor value of a nilpotent field"},
      {"timechange-diff", "Differential of the 1/lambda time change of Z"},
      {"trajectory", "Sampled perturbed orbits"},
      {"validate", "Check a configuration"},
  };
  for (const auto& name : app::command_names()) cli.add_subcommand(name, help.at(name));

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? app::kExitOk : app::kExitInvalid;
  }

  if (o.threads) unipert::set_thread_count(*o.threads);

  app::ExperimentConfig config;
  try {
    config = o.config_path.empty() ? app::ExperimentConfig::defaults() : app::load_config(o.config_path);
  } catch (const unipert::Error& e) {
    std::cerr << "config: " << e.what() << '\n';
    return app::kExitInvalid;
  }
  apply(o, config);

  const std::string command = cli.get_subcommands().front()->get_name();
  return app::execute(command, config, std::cerr);
}
