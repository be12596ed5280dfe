#include "oscavg/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "oscavg/csv.hpp"
#include "oscavg/models.hpp"

namespace oscavg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, const char* expected) {
  throw ConfigError("key '" + key + "': expected " + expected + ", got '" + std::string(value) +
                    "'");
}

double parse_double(const std::string& key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

std::uint64_t parse_u64(const std::string& key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) bad_value(key, v, "a nonnegative integer");
  return out;
}

int parse_int(const std::string& key, std::string_view v) {
  v = trim(v);
  int out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

bool parse_bool(const std::string& key, std::string_view v) {
  v = trim(v);
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, v, "true or false");
}

std::vector<double> parse_list(const std::string& key, std::string_view v) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t comma = v.find(',', pos);
    const std::string_view cell =
        v.substr(pos, comma == std::string_view::npos ? comma : comma - pos);
    out.push_back(parse_double(key, cell));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) bad_value(key, v, "a comma-separated list of numbers");
  return out;
}

const char* method_name(Method m) {
  return m == Method::fixed_rk4 ? "fixed_rk4" : "adaptive_embedded_45";
}

Method parse_method(const std::string& key, std::string_view v) {
  v = trim(v);
  if (v == "fixed_rk4") return Method::fixed_rk4;
  if (v == "adaptive_embedded_45") return Method::adaptive_embedded_45;
  bad_value(key, v, "fixed_rk4 or adaptive_embedded_45");
}

const char* rule_name(QuadratureRule r) {
  return r == QuadratureRule::composite_simpson ? "composite_simpson" : "gauss_legendre";
}

QuadratureRule parse_rule(const std::string& key, std::string_view v) {
  v = trim(v);
  if (v == "composite_simpson") return QuadratureRule::composite_simpson;
  if (v == "gauss_legendre") return QuadratureRule::gauss_legendre;
  bad_value(key, v, "composite_simpson or gauss_legendre");
}

std::string join_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_full(values[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    ++lineno;
    if (nl == std::string_view::npos) {
      pos = text.size() + 1;
    } else {
      pos = nl + 1;
    }

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                        std::string(line) + "'");
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty value for key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    if (key == "model") {
      cfg.model = std::string(value);
    } else if (key == "initial.t") {
      cfg.initial_t = parse_double(key, value);
    } else if (key == "initial.H") {
      cfg.initial_H = parse_double(key, value);
    } else if (key == "initial.x") {
      cfg.initial_x = parse_list(key, value);
    } else if (key == "simulate.t_end") {
      cfg.simulate_t_end = parse_double(key, value);
    } else if (key == "window.gamma") {
      cfg.gamma = parse_double(key, value);
    } else if (key == "window.L") {
      cfg.L = parse_double(key, value);
    } else if (key == "window.samples") {
      cfg.window_samples = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "compare.H_star") {
      cfg.compare_H_star = parse_double(key, value);
    } else if (key == "compare.t_star") {
      cfg.compare_t_star = parse_double(key, value);
    } else if (key == "scaling.experiment") {
      cfg.scaling_experiment = std::string(value);
    } else if (key == "scaling.H_star_list") {
      cfg.H_star_list = parse_list(key, value);
    } else if (key == "scaling.epsilon_list") {
      cfg.epsilon_list = parse_list(key, value);
    } else if (key == "integrator.method") {
      cfg.integrator.method = parse_method(key, value);
    } else if (key == "integrator.step") {
      cfg.integrator.step = parse_double(key, value);
    } else if (key == "integrator.abs_tol") {
      cfg.integrator.abs_tol = parse_double(key, value);
    } else if (key == "integrator.rel_tol") {
      cfg.integrator.rel_tol = parse_double(key, value);
    } else if (key == "integrator.max_steps") {
      cfg.integrator.max_steps = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "integrator.enforce_positive_H") {
      cfg.integrator.enforce_positive_H = parse_bool(key, value);
    } else if (key == "quadrature.rule") {
      cfg.quadrature.rule = parse_rule(key, value);
    } else if (key == "quadrature.nodes") {
      cfg.quadrature.nodes = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "quadrature.check_tol") {
      cfg.quadrature.check_tol = parse_double(key, value);
    } else if (key == "bounds.sup_f1") {
      cfg.sup_f1 = parse_double(key, value);
    } else if (key == "bounds.sup_f2") {
      cfg.sup_f2 = parse_double(key, value);
    } else if (key == "bounds.c_L") {
      cfg.c_L = parse_double(key, value);
    } else if (key == "bounds.noise_floor") {
      cfg.noise_floor = parse_double(key, value);
    } else if (key == "lipschitz.samples") {
      cfg.lipschitz_samples = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "lipschitz.seed") {
      cfg.seed = parse_u64(key, value);
    } else if (key == "run.threads") {
      cfg.threads = parse_int(key, value);
    } else if (key == "run.exec") {
      if (value != "serial" && value != "parallel") bad_value(key, value, "serial or parallel");
      cfg.exec = std::string(value);
    } else if (key == "output.dir") {
      cfg.output_dir = std::string(value);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  auto kv = [&out](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  kv("model", model);
  kv("initial.t", format_full(initial_t));
  if (initial_H) kv("initial.H", format_full(*initial_H));
  if (initial_x) kv("initial.x", join_list(*initial_x));
  kv("simulate.t_end", format_full(simulate_t_end));
  kv("window.gamma", format_full(gamma));
  kv("window.L", format_full(L));
  kv("window.samples", std::to_string(window_samples));
  if (compare_H_star) kv("compare.H_star", format_full(*compare_H_star));
  if (compare_t_star) kv("compare.t_star", format_full(*compare_t_star));
  kv("scaling.experiment", scaling_experiment);
  kv("scaling.H_star_list", join_list(H_star_list));
  kv("scaling.epsilon_list", join_list(epsilon_list));
  kv("integrator.method", method_name(integrator.method));
  kv("integrator.step", format_full(integrator.step));
  kv("integrator.abs_tol", format_full(integrator.abs_tol));
  kv("integrator.rel_tol", format_full(integrator.rel_tol));
  kv("integrator.max_steps", std::to_string(integrator.max_steps));
  kv("integrator.enforce_positive_H", integrator.enforce_positive_H ? "true" : "false");
  kv("quadrature.rule", rule_name(quadrature.rule));
  kv("quadrature.nodes", std::to_string(quadrature.nodes));
  kv("quadrature.check_tol", format_full(quadrature.check_tol));
  if (sup_f1) kv("bounds.sup_f1", format_full(*sup_f1));
  if (sup_f2) kv("bounds.sup_f2", format_full(*sup_f2));
  if (c_L) kv("bounds.c_L", format_full(*c_L));
  kv("bounds.noise_floor", format_full(noise_floor));
  kv("lipschitz.samples", std::to_string(lipschitz_samples));
  kv("lipschitz.seed", std::to_string(seed));
  kv("run.threads", std::to_string(threads));
  kv("run.exec", exec);
  kv("output.dir", output_dir);
  return out;
}

void ExperimentConfig::validate() const {
  const OscillatoryModel m = model_by_name(model);  // throws for unknown names

  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("window.gamma must lie strictly inside (0, 1)");
  }
  if (!(L > 0.0)) throw ConfigError("window.L must be positive");
  if (window_samples < 2) throw ConfigError("window.samples must be at least 2");
  if (!(simulate_t_end > initial_t)) {
    throw ConfigError("simulate.t_end must exceed initial.t");
  }
  if (scaling_experiment != "hstar_sweep" && scaling_experiment != "epsilon_sweep") {
    throw ConfigError("scaling.experiment must be hstar_sweep or epsilon_sweep");
  }
  if (compare_H_star && compare_t_star) {
    throw ConfigError("compare.H_star and compare.t_star are mutually exclusive");
  }
  if (compare_H_star && !(*compare_H_star > 0.0)) {
    throw ConfigError("compare.H_star must be positive");
  }
  if (initial_H && !(*initial_H > 0.0)) throw ConfigError("initial.H must be positive");
  if (initial_x && initial_x->size() != m.dimension) {
    throw ConfigError("initial.x must have " + std::to_string(m.dimension) +
                      " components for model '" + model + "'");
  }
  integrator.validate();
  quadrature.validate();
  if (sup_f1 && !(*sup_f1 > 0.0)) throw ConfigError("bounds.sup_f1 must be positive");
  if (sup_f2 && !(*sup_f2 >= 0.0)) throw ConfigError("bounds.sup_f2 must be nonnegative");
  if (c_L && !(*c_L > 0.0)) throw ConfigError("bounds.c_L must be positive");
  if (!(noise_floor >= 0.0)) throw ConfigError("bounds.noise_floor must be nonnegative");
  if (lipschitz_samples == 0) throw ConfigError("lipschitz.samples must be positive");
  if (threads < 0) throw ConfigError("run.threads must be nonnegative");
  if (exec != "serial" && exec != "parallel") {
    throw ConfigError("run.exec must be serial or parallel");
  }
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

OscillatoryModel ExperimentConfig::make_model() const { return model_by_name(model); }

SystemState ExperimentConfig::make_initial(const OscillatoryModel& m) const {
  SystemState s;
  s.t = initial_t;
  s.H = initial_H ? *initial_H : m.default_initial.H;
  s.x = initial_x ? *initial_x : m.default_initial.x;
  if (s.x.size() != m.dimension) {
    throw ConfigError("initial.x must have " + std::to_string(m.dimension) +
                      " components for model '" + m.name + "'");
  }
  return s;
}

RunConfig ExperimentConfig::make_run_config(const OscillatoryModel& m) const {
  RunConfig rc;
  rc.initial = make_initial(m);
  rc.integrator = integrator;
  rc.quadrature = quadrature;
  rc.window_samples = window_samples;
  rc.exec = exec == "serial" ? Exec::serial : Exec::parallel;
  return rc;
}

}  // namespace oscavg
