#include "commands.hpp"

#include "unipert/conjugacy.hpp"
#include "unipert/errors.hpp"
#include "unipert/parallel.hpp"
#include "unipert/pushforward.hpp"
#include "unipert/shear.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

namespace unipert::app {

using nlohmann::json;

namespace {

std::string frame_name(int i) { return std::string(frame::kNames[static_cast<std::size_t>(i)]); }

std::vector<std::string> prefixed_frame(const std::string& prefix) {
  std::vector<std::string> out;
  for (int i = 0; i < kDim; ++i) out.push_back(prefix + frame_name(i));
  return out;
}

void append(std::vector<std::string>& to, const std::vector<std::string>& more) {
  to.insert(to.end(), more.begin(), more.end());
}

const std::vector<std::string> kMatrixColumns = {"m11", "m12", "m13", "m21", "m22",
                                                 "m23", "m31", "m32", "m33"};

void push_matrix(std::vector<json>& row, const GroupElement& g) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) row.emplace_back(g(i, j));
}

// Frame elements by name, plus U and W of the configured triple.
AlgebraElement resolve_field(const std::string& name, const PerturbationData* p) {
  if (name == "U" || name == "W") {
    if (p == nullptr) throw DomainError("field " + name + " needs a perturbation");
    return name == "U" ? p->u() : p->w_dir();
  }
  const int i = frame::index_of(name);
  if (i < 0) throw DomainError("unknown frame element '" + name + "'");
  return AlgebraElement::basis(i);
}

std::vector<double> symmetric_grid(double t, int samples) {
  std::vector<double> out(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) out[static_cast<std::size_t>(k)] = -t + 2.0 * t * k / (samples - 1);
  return out;
}

json slopes_json(const std::array<double, kDim>& s) {
  json out = json::object();
  for (int i = 0; i < kDim; ++i) out[frame_name(i)] = s[static_cast<std::size_t>(i)];
  return out;
}

Table bracket_table(const ExperimentConfig&) {
  Table t;
  t.columns = {"bracket"};
  append(t.columns, prefixed_frame(""));
  for (int i = 0; i < kDim; ++i) {
    std::vector<json> row{frame_name(i)};
    for (int j = 0; j < kDim; ++j) {
      const AlgebraElement b = bracket(AlgebraElement::basis(i), AlgebraElement::basis(j));
      row.emplace_back(b.is_zero() ? "0" : b.to_string());
    }
    t.rows.push_back(std::move(row));
  }
  t.summary["convention"] = "cell (row, column) holds [row, column]";
  return t;
}

Table adjoint(const ExperimentConfig& c) {
  const AlgebraElement v = c.experiment.a * resolve_field(c.experiment.field, nullptr);
  const Mat8 m = adjoint_matrix(v, c.experiment.t);
  Table t;
  t.columns = {"row"};
  append(t.columns, prefixed_frame(""));
  for (int i = 0; i < kDim; ++i) {
    std::vector<json> row{frame_name(i)};
    for (int j = 0; j < kDim; ++j) row.emplace_back(m(i, j));
    t.rows.push_back(std::move(row));
  }
  t.summary["field"] = v.to_string();
  t.summary["t"] = c.experiment.t;
  t.summary["convention"] = "column j is the image of frame element j under exp(t ad V)";
  return t;
}

Table pushforward(const ExperimentConfig& c) {
  const PerturbationData p = build_perturbation(c);
  const FlowSpec spec = FlowSpec::perturbed_unchecked(p, c.integrator);
  const AlgebraElement x0 = resolve_field(c.experiment.field, &p);
  const auto points = config_base_points(c);
  const auto grid = uniform_grid(c.experiment.t, c.experiment.samples - 1);

  std::vector<FrameCoefficients> results(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    results[i] = integrate_pushforward(spec, x0, grid, points[i]);
  });

  const bool is_w = x0 == p.w_dir();
  const bool is_z = x0 == p.z();
  Table t;
  t.columns = {"point", "t"};
  append(t.columns, prefixed_frame("a_"));
  t.columns.push_back("closed_form_a_Z");
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      std::vector<json> row{static_cast<int>(i), grid[k]};
      for (int j = 0; j < kDim; ++j) row.emplace_back(results[i].coeffs[k][j]);
      if (is_w || is_z) {
        const double cf = is_w ? closed_form_W(p, grid[k], points[i]) : closed_form_Z(p, grid[k], points[i]);
        const double a = results[i].coeffs[k][frame::Z];
        worst = std::max(worst, std::abs(a - cf) / std::max(1.0, std::abs(cf)));
        row.emplace_back(cf);
      } else {
        row.emplace_back("");
      }
      t.rows.push_back(std::move(row));
    }
  }
  t.summary["field"] = x0.to_string();
  if (is_w || is_z) t.summary["max_rel_closed_form_gap"] = worst;
  return t;
}

Table parabolicity_cmd(const ExperimentConfig& c) {
  const PerturbationData p = build_perturbation(c);
  const FlowSpec spec = FlowSpec::perturbed_unchecked(p, c.integrator);
  const auto report = parabolicity(spec, dyadic_times(c.experiment.tmax), config_base_points(c));
  Table t;
  t.columns = {"t", "sup_norm"};
  append(t.columns, prefixed_frame("row_"));
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    std::vector<json> row{report.times[k], report.sup_norms[k]};
    for (int i = 0; i < kDim; ++i) row.emplace_back(report.row_sup[static_cast<std::size_t>(i)][k]);
    t.rows.push_back(std::move(row));
  }
  t.summary["slope"] = report.slope;
  t.summary["row_slopes"] = slopes_json(report.row_slopes);
  return t;
}

Table shear(const ExperimentConfig& c) {
  const PerturbationData p = build_perturbation(c);
  const auto points = config_base_points(c);
  std::vector<ShearDiagnostics> diags;
  for (const auto& g : points) {
    diags.push_back(shear_diagnostics(p, c.experiment.t, c.experiment.sigma, g, {},
                                      c.experiment.samples, c.integrator));
  }
  Table t;
  t.columns = {"point", "t", "s"};
  append(t.columns, kMatrixColumns);
  t.columns.push_back("tangent_residual");
  t.columns.push_back("limit_distance");
  json per_point = json::array();
  for (std::size_t i = 0; i < diags.size(); ++i) {
    const auto& d = diags[i];
    for (std::size_t k = 0; k < d.curve.s.size(); ++k) {
      std::vector<json> row{static_cast<int>(i), c.experiment.t, d.curve.s[k]};
      push_matrix(row, d.curve.samples[k]);
      row.emplace_back(d.tangent_residuals[k]);
      row.emplace_back(d.limit_distance[k]);
      t.rows.push_back(std::move(row));
    }
    per_point.push_back({
        {"point", static_cast<int>(i)},
        {"ell_t", d.ell_t},
        {"z_ell", d.bounds.z_ell},
        {"w_ell", d.bounds.w_ell},
        {"z_bound", d.bounds.z_bound},
        {"w_bound", d.bounds.w_bound},
        {"max_tangent_residual",
         *std::max_element(d.tangent_residuals.begin(), d.tangent_residuals.end())},
        {"max_limit_distance", *std::max_element(d.limit_distance.begin(), d.limit_distance.end())},
        {"curve_speed", max_curve_speed(d.curve)},
        {"lipschitz_bound", lipschitz_bound(p, d.bounds.norms)},
    });
  }
  t.summary["points"] = per_point;
  t.summary["note"] = "limit distances are diagnostic; l_hat = l_t(p) per base point";
  return t;
}

Table conjugacy(const ExperimentConfig& c) {
  if (!c.perturbation.w) throw DomainError("conjugacy needs perturbation.w");
  const PerturbationData p = build_perturbation(c);
  const ScalarField w = *p.w;
  const auto points = config_base_points(c);
  const auto times = symmetric_grid(c.experiment.t, c.experiment.samples);

  std::vector<std::vector<double>> res(points.size(), std::vector<double>(times.size()));
  std::vector<double> identity(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      res[i][k] = conjugacy_residual(w, p, times[k], points[i], c.integrator);
    }
    identity[i] = pushforward_identity_check(w, p, points[i]);
  });

  Table t;
  t.columns = {"point", "t", "conjugacy_residual"};
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      t.rows.push_back({static_cast<int>(i), times[k], res[i][k]});
      worst = std::max(worst, res[i][k]);
    }
  }
  t.summary["max_conjugacy_residual"] = worst;
  t.summary["max_pushforward_identity_residual"] = *std::max_element(identity.begin(), identity.end());
  return t;
}

Table kakutani(const ExperimentConfig& c) {
  const AlgebraElement v = c.experiment.a * resolve_field(c.experiment.field, nullptr);
  const KakutaniResult r = kakutani_invariant(v);
  std::string blocks;
  for (int b : r.blocks) blocks += (blocks.empty() ? "" : " ") + std::to_string(b);
  Table t;
  t.columns = {"field", "value", "blocks", "verified", "flag"};
  t.rows.push_back({v.to_string(), r.value, blocks, r.verified ? "yes" : "no", r.flag});
  t.summary["gr_definition"] = KakutaniSpec::shipped().name;
  t.summary["offset"] = KakutaniSpec::shipped().offset;
  return t;
}

Table timechange_diff(const ExperimentConfig& c) {
  const PerturbationData p = build_perturbation(c);
  const ScalarField f = ScalarField::constant(1.0) / p.lambda;
  const GroupElement g = config_base_points(c).front();
  const auto grid = uniform_grid(c.experiment.t, c.experiment.samples - 1);
  const auto d = timechange_differential(f, p.z(), grid, g, c.integrator);

  Table t;
  t.columns = {"t", "Lambda", "Lambda_minus_t"};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t.columns.push_back("d_" + frame_name(i) + "_" + frame_name(j));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<json> row{grid[k], d.big_lambda[k], d.big_lambda[k] - grid[k]};
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) row.emplace_back(d.matrices[k](i, j));
    t.rows.push_back(std::move(row));
  }
  t.summary["structure_residual"] = d.structure_residual;
  if (p.w && c.experiment.t >= 0.0) {
    t.summary["telescoping_residual"] =
        telescoping_residual(*p.w, c.experiment.t, g, c.experiment.samples - 1, c.integrator);
  }
  return t;
}

Table trajectory_cmd(const ExperimentConfig& c) {
  const PerturbationData p = build_perturbation(c);
  const FlowSpec spec = FlowSpec::perturbed_unchecked(p, c.integrator);
  const auto points = config_base_points(c);
  const int steps = step_count(c.experiment.t, c.integrator.step);
  const int stride = std::max(1, steps / std::max(1, c.experiment.samples - 1));
  std::vector<Trajectory> paths(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    paths[i] = trajectory(spec, c.experiment.t, points[i], stride);
  });
  Table t;
  t.columns = {"point", "t"};
  append(t.columns, kMatrixColumns);
  t.columns.push_back("det_drift");
  double worst = 0.0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t k = 0; k < paths[i].times.size(); ++k) {
      std::vector<json> row{static_cast<int>(i), paths[i].times[k]};
      push_matrix(row, paths[i].points[k]);
      row.emplace_back(paths[i].points[k].det_drift());
      worst = std::max(worst, paths[i].points[k].det_drift());
      t.rows.push_back(std::move(row));
    }
  }
  t.summary["max_det_drift"] = worst;
  return t;
}

Table validate_cmd(const ExperimentConfig& c) {
  const ValidationReport r = validate(c);
  Table t;
  t.columns = {"status", "message"};
  for (const auto& v : r.violations) t.rows.push_back({"violation", v});
  for (const auto& n : r.notes) t.rows.push_back({"ok", n});
  t.summary["passed"] = r.ok();
  return t;
}

using Runner = std::function<Table(const ExperimentConfig&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"bracket-table", bracket_table},   {"adjoint", adjoint},
      {"pushforward", pushforward},       {"parabolicity", parabolicity_cmd},
      {"shear", shear},                   {"conjugacy", conjugacy},
      {"kakutani", kakutani},             {"timechange-diff", timechange_diff},
      {"trajectory", trajectory_cmd},     {"validate", validate_cmd},
  };
  return table;
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void flatten(const json& v, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
  } else {
    out.emplace_back(prefix, csv_cell(v));
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, run] : runners()) n.push_back(name);
    return n;
  }();
  return names;
}

Table run_command(const std::string& command, const ExperimentConfig& config) {
  const auto it = runners().find(command);
  if (it == runners().end()) throw DomainError("unknown command '" + command + "'");
  Table t = it->second(config);
  t.command = command;
  return t;
}

void write_csv(std::ostream& out, const Table& table, const ExperimentConfig& config) {
  out << "# command = " << table.command << '\n';
  for (const auto& [key, value] : resolved_entries(config)) out << "# " << key << " = " << value << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
  std::vector<std::pair<std::string, std::string>> summary;
  flatten(table.summary, "", summary);
  for (const auto& [key, value] : summary) out << "# summary." << key << " = " << value << '\n';
}

void write_json(std::ostream& out, const Table& table, const ExperimentConfig& config) {
  json doc;
  doc["command"] = table.command;
  json cfg = json::object();
  for (const auto& [key, value] : resolved_entries(config)) cfg[key] = value;
  doc["config"] = cfg;
  doc["columns"] = table.columns;
  doc["rows"] = table.rows;
  doc["summary"] = table.summary;
  out << doc.dump(2) << '\n';
}

int execute(const std::string& command, const ExperimentConfig& config, std::ostream& err) {
  const ValidationReport report = validate(config);
  if (!report.ok() && command != "validate") {
    err << "invalid configuration (" << config.source << "):\n";
    for (const auto& v : report.violations) err << "  " << v << '\n';
    return kExitInvalid;
  }

  Table table;
  try {
    table = run_command(command, config);
  } catch (const NumericalError& e) {
    err << "numerical failure in " << command << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << command << ": " << e.what() << '\n';
    return kExitInvalid;
  }

  const std::string path = config.output.path.value_or("-");
  std::ofstream file;
  if (path != "-") {
    file.open(path);
    if (!file) {
      err << "cannot write " << path << '\n';
      return kExitInvalid;
    }
  }
  std::ostream& out = path == "-" ? std::cout : file;
  if (config.output.format == "json") {
    write_json(out, table, config);
  } else {
    write_csv(out, table, config);
  }
  out.flush();

  if (command == "validate" && !report.ok()) {
    for (const auto& v : report.violations) err << "  " << v << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

}  // namespace unipert::app
