#include "config.hpp"

#include "unipert/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace unipert::app {

namespace pt = boost::property_tree;

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.perturbation.w = "0.05*sin(m12 + m13)";
  c.output.path = "-";
  return c;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"perturbation", {"u", "w", "beta", "lambda"}},
      {"integrator", {"method", "step", "tolerance"}},
      {"experiment",
       {"t", "tmax", "sigma", "samples", "seed", "base_points", "half_width", "condition_samples",
        "field", "a"}},
      {"output", {"path", "format"}},
  };
  return keys;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

// ptree drops line numbers, so find the key's line in the raw text
int line_of(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  std::string current;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '[') {
      const auto close = line.find(']', first);
      current = line.substr(first + 1, close == std::string::npos ? std::string::npos : close - first - 1);
      continue;
    }
    if (current != section) continue;
    const auto eq = line.find('=', first);
    if (eq == std::string::npos) continue;
    std::string k = line.substr(first, eq - first);
    k.erase(k.find_last_not_of(" \t") + 1);
    if (k == key) return n;
  }
  return 0;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, const std::string& text) : tree_(tree), text_(text) {}

  std::optional<std::string> str(const std::string& section, const std::string& key) const {
    const auto s = tree_.get_child_optional(section);
    if (!s) return std::nullopt;
    const auto v = s->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return unquote(*v);
  }

  template <typename T>
  void number(const std::string& section, const std::string& key, T& out) const {
    const auto v = str(section, key);
    if (!v) return;
    std::istringstream in(*v);
    T parsed{};
    in >> parsed;
    if (in.fail() || !(in >> std::ws).eof()) {
      throw ParseError(section + "." + key + ": cannot read '" + *v + "' as a number",
                       line_of(text_, section, key), 1);
    }
    out = parsed;
  }

  int line(const std::string& section, const std::string& key) const {
    return line_of(text_, section, key);
  }

 private:
  const pt::ptree& tree_;
  const std::string& text_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(source + ": " + e.message(), static_cast<int>(e.line()), 1);
  }

  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      throw ParseError(source + ": key '" + section + "' outside any section", 0, 1);
    }
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      throw ParseError(source + ": unknown section [" + section + "]", 0, 1);
    }
    for (const auto& kv : body) {
      if (!it->second.count(kv.first)) {
        throw ParseError(source + ": unknown key " + section + "." + kv.first,
                         line_of(text, section, kv.first), 1);
      }
    }
  }

  ExperimentConfig c = ExperimentConfig::defaults();
  c.source = source;
  c.perturbation.w.reset();
  c.output.path.reset();
  const Reader r(tree, text);

  if (const auto u = r.str("perturbation", "u")) {
    std::istringstream us(*u);
    std::array<double, 3> coeffs{};
    for (double& x : coeffs) us >> x;
    if (us.fail() || !(us >> std::ws).eof()) {
      throw ParseError(source + ": perturbation.u needs three numbers 'c12 c23 c13'",
                       r.line("perturbation", "u"), 1);
    }
    c.perturbation.u = coeffs;
  }
  c.perturbation.w = r.str("perturbation", "w");
  c.perturbation.beta = r.str("perturbation", "beta");
  c.perturbation.lambda = r.str("perturbation", "lambda");

  if (const auto m = r.str("integrator", "method")) {
    try {
      c.integrator.method = parse_method(*m);
    } catch (const DomainError& e) {
      throw ParseError(source + ": integrator.method: " + e.what(), r.line("integrator", "method"), 1);
    }
  }
  r.number("integrator", "step", c.integrator.step);
  r.number("integrator", "tolerance", c.integrator.tolerance);

  auto& e = c.experiment;
  r.number("experiment", "t", e.t);
  r.number("experiment", "tmax", e.tmax);
  r.number("experiment", "sigma", e.sigma);
  r.number("experiment", "samples", e.samples);
  r.number("experiment", "seed", e.seed);
  r.number("experiment", "base_points", e.base_points);
  r.number("experiment", "half_width", e.half_width);
  r.number("experiment", "condition_samples", e.condition_samples);
  r.number("experiment", "a", e.a);
  if (const auto f = r.str("experiment", "field")) e.field = *f;

  c.output.path = r.str("output", "path");
  if (const auto f = r.str("output", "format")) c.output.format = *f;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path, 0, 0);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

PerturbationData build_perturbation(const ExperimentConfig& config) {
  const auto& p = config.perturbation;
  const AlgebraElement u = unipotent(p.u[0], p.u[1], p.u[2]);
  if (p.w) {
    SampleDomain domain;
    domain.count = config.experiment.condition_samples;
    domain.seed = config.experiment.seed;
    domain.half_width = config.experiment.half_width;
    return from_transfer(ScalarField::parse(*p.w), heisenberg_partner(u), sample_points(domain));
  }
  if (!p.beta || !p.lambda) throw DomainError("perturbation needs w, or both beta and lambda");
  return make_perturbation(u, ScalarField::parse(*p.beta), ScalarField::parse(*p.lambda));
}

std::vector<GroupElement> config_base_points(const ExperimentConfig& config) {
  SampleDomain domain;
  domain.count = config.experiment.base_points;
  domain.seed = config.experiment.seed;
  domain.half_width = config.experiment.half_width;
  return sample_points(domain);
}

ValidationReport validate(const ExperimentConfig& config) {
  ValidationReport r;
  const auto& p = config.perturbation;
  const bool has_w = p.w.has_value();
  const bool has_pair = p.beta.has_value() && p.lambda.has_value();
  const bool exclusive = has_w ? (!p.beta && !p.lambda) : has_pair;
  if (!exclusive) {
    r.violations.push_back(
        "perturbation: give exactly one of w, or the pair beta and lambda");
  }
  if (p.u[0] * p.u[0] + p.u[1] * p.u[1] == 0.0) {
    r.violations.push_back(
        "perturbation.u: c12 = c23 = 0 puts U in the center, so U + beta Z would be a time "
        "change of Z; that case is excluded");
  }
  try {
    config.integrator.validate();
  } catch (const Error& e) {
    r.violations.push_back(std::string("integrator: ") + e.what());
  }

  const auto& e = config.experiment;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) r.violations.push_back("experiment." + what);
  };
  require(std::isfinite(e.t), "t must be finite");
  require(e.tmax >= 1.0 && std::isfinite(e.tmax), "tmax must be >= 1");
  require(e.sigma > 0.0 && std::isfinite(e.sigma), "sigma must be > 0");
  require(e.samples >= 2, "samples must be >= 2");
  require(e.base_points >= 1, "base_points must be >= 1");
  require(e.half_width > 0.0, "half_width must be > 0");
  require(e.condition_samples >= 1, "condition_samples must be >= 1");
  require(e.a != 0.0 && std::isfinite(e.a), "a must be nonzero");
  if (frame::index_of(e.field) < 0 && e.field != "U" && e.field != "W") {
    r.violations.push_back("experiment.field: unknown frame element '" + e.field + "'");
  }

  if (!config.output.path || config.output.path->empty()) {
    r.violations.push_back("output.path is missing");
  }
  if (config.output.format != "csv" && config.output.format != "json") {
    r.violations.push_back("output.format must be csv or json, got '" + config.output.format + "'");
  }

  if (r.violations.empty()) {
    try {
      const PerturbationData pd = build_perturbation(config);
      SampleDomain domain;
      domain.count = e.condition_samples;
      domain.seed = e.seed;
      domain.half_width = e.half_width;
      const ConditionReport cr = condition_check(pd, sample_points(domain));
      const std::string numbers = "sup |W beta| = " + format_number(cr.max_abs_w_beta) +
                                  ", |c| = " + format_number(cr.abs_c) +
                                  ", min lambda = " + format_number(cr.min_lambda);
      if (cr.passed) {
        r.notes.push_back("smallness condition holds on " + std::to_string(domain.count) +
                          " samples: " + numbers);
      } else {
        r.violations.push_back("smallness condition sup |W beta| < |c| with lambda > 0 fails: " +
                               numbers);
      }
    } catch (const Error& err) {
      r.violations.push_back(std::string("perturbation: ") + err.what());
    }
  }
  return r;
}

std::vector<std::pair<std::string, std::string>> resolved_entries(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto& p = c.perturbation;
  out.emplace_back("config.source", c.source);
  out.emplace_back("perturbation.u", format_number(p.u[0]) + " " + format_number(p.u[1]) + " " +
                                         format_number(p.u[2]));
  out.emplace_back("perturbation.w", p.w.value_or(""));
  out.emplace_back("perturbation.beta", p.beta.value_or(""));
  out.emplace_back("perturbation.lambda", p.lambda.value_or(""));
  out.emplace_back("integrator.method", std::string(method_name(c.integrator.method)));
  out.emplace_back("integrator.step", format_number(c.integrator.step));
  out.emplace_back("integrator.tolerance", format_number(c.integrator.tolerance));
  const auto& e = c.experiment;
  out.emplace_back("experiment.t", format_number(e.t));
  out.emplace_back("experiment.tmax", format_number(e.tmax));
  out.emplace_back("experiment.sigma", format_number(e.sigma));
  out.emplace_back("experiment.samples", std::to_string(e.samples));
  out.emplace_back("experiment.seed", std::to_string(e.seed));
  out.emplace_back("experiment.base_points", std::to_string(e.base_points));
  out.emplace_back("experiment.half_width", format_number(e.half_width));
  out.emplace_back("experiment.condition_samples", std::to_string(e.condition_samples));
  out.emplace_back("experiment.field", e.field);
  out.emplace_back("experiment.a", format_number(e.a));
  out.emplace_back("output.path", c.output.path.value_or(""));
  out.emplace_back("output.format", c.output.format);
  return out;
}

}  // namespace unipert::app
