#include "qbm_cli/commands.hpp"
#include "qbm_cli/config.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

namespace qbm::cli {

using nlohmann::json;

double parse_real(std::string_view text, std::string_view what) {
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  while (first != last && *first == ' ') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ConfigError(std::string(what) + ": not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(what) + ": not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_seed(std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("seed: not an unsigned 64-bit integer: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec, double unit) {
  std::vector<double> values;
  if (spec.find(':') != std::string_view::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw ConfigError("grid: expected lo:hi:n, got '" + std::string(spec) + "'");
    const double lo = parse_real(parts[0], "grid lo");
    const double hi = parse_real(parts[1], "grid hi");
    const long long n = parse_integer(parts[2], "grid n");
    if (n < 1) throw ConfigError("grid: n must be at least 1");
    if (hi < lo) throw ConfigError("grid: hi must not be below lo");
    for (long long k = 0; k < n; ++k) {
      const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
      // The last point is exactly hi so grids such as 0:2:121 end on 2pi.
      values.push_back(unit * (k == n - 1 ? hi : lo + (hi - lo) * t));
    }
  } else {
    for (const auto part : split(spec, ',')) values.push_back(unit * parse_real(part, "grid value"));
  }
  if (values.empty()) throw ConfigError("grid: no values");
  return values;
}

InitSpec parse_init(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts[0] == "constant" && parts.size() == 2) return InitSpec::constant(parse_real(parts[1], "init constant"));
  if (parts[0] == "uniform" && parts.size() == 3) {
    return InitSpec::uniform(parse_real(parts[1], "init lo"), parse_real(parts[2], "init hi"));
  }
  throw ConfigError("init: expected constant:c or uniform:lo:hi, got '" + std::string(spec) + "'");
}

QbmModel make_model(std::string_view name) {
  if (name == "visible2q") return visible_model_2q();
  if (name == "hidden3q") return hidden_model_3q();
  throw ConfigError("model: expected visible2q or hidden3q, got '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  try {
    bfgs.validate();
    ms.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (model) make_model(*model);
  if (r && !(*r >= 0.0 && *r <= 1.0)) throw ConfigError("r must lie in [0, 1]");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (!(step > 0.0)) throw ConfigError("step must be positive");
  if (samples < 1) throw ConfigError("samples must be at least 1");
  if (mode != "r1" && mode != "phi3pi4") throw ConfigError("mode: expected r1 or phi3pi4");
  if (grid_r || grid_phi) {
    SweepGrid g{grid_r.value_or(std::vector<double>{0.0}), grid_phi.value_or(std::vector<double>{0.0})};
    try {
      g.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model", "r",       "phi",   "grid-r", "grid-phi",  "starts",   "init",     "seed",     "out",  "cloud-out",
      "format", "threads", "trials", "step",  "mode",     "samples", "max-iter", "grad-tol", "param-cap"};
  return keys;
}

std::string normalize_key(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

std::string text_of(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw ConfigError(key + ": expected a number or a string");
}

std::vector<double> grid_of(const json& v, const std::string& key, double unit) {
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& x : v) out.push_back(unit * parse_real(text_of(x, key), key));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
  }
  return parse_grid(text_of(v, key), unit);
}

int int_of(const json& v, const std::string& key) {
  const long long n = parse_integer(text_of(v, key), key);
  if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": out of range");
  }
  return static_cast<int>(n);
}

}  // namespace

RunConfig config_from_json(const std::string& command, const json& flat, std::optional<std::string> env_seed) {
  if (!flat.is_object()) throw ConfigError("config: expected a flat JSON object");
  std::map<std::string, json> values;
  for (const auto& [k, v] : flat.items()) {
    const std::string key = normalize_key(k);
    if (!known_keys().contains(key)) throw ConfigError("config: unknown key '" + k + "'");
    values[key] = v;
  }
  const auto has = [&](const char* key) { return values.contains(key); };
  const auto text = [&](const char* key) { return text_of(values.at(key), key); };

  RunConfig cfg;
  cfg.command = command;
  constexpr double pi = std::numbers::pi;
  if (has("model")) cfg.model = text("model");
  if (has("r")) cfg.r = parse_real(text("r"), "r");
  if (has("phi")) cfg.phi = pi * parse_real(text("phi"), "phi");
  if (has("grid-r")) cfg.grid_r = grid_of(values.at("grid-r"), "grid-r", 1.0);
  if (has("grid-phi")) cfg.grid_phi = grid_of(values.at("grid-phi"), "grid-phi", pi);
  if (has("starts")) cfg.ms.n_starts = int_of(values.at("starts"), "starts");
  if (has("init")) cfg.ms.init = parse_init(text("init"));
  if (has("seed")) {
    cfg.ms.seed = parse_seed(text("seed"));
  } else if (env_seed && !env_seed->empty()) {
    cfg.ms.seed = parse_seed(*env_seed);
  }
  if (has("out")) cfg.out = text("out");
  if (has("cloud-out")) cfg.cloud_out = text("cloud-out");
  if (has("format")) {
    const std::string f = text("format");
    if (f == "csv") {
      cfg.format = Format::csv;
    } else if (f == "json") {
      cfg.format = Format::json;
    } else {
      throw ConfigError("format: expected csv or json, got '" + f + "'");
    }
  }
  if (has("threads")) cfg.ms.threads = int_of(values.at("threads"), "threads");
  if (has("trials")) cfg.trials = int_of(values.at("trials"), "trials");
  if (has("step")) cfg.step = parse_real(text("step"), "step");
  if (has("mode")) cfg.mode = text("mode");
  if (has("samples")) {
    const int n = int_of(values.at("samples"), "samples");
    if (n < 1) throw ConfigError("samples must be at least 1");
    cfg.samples = static_cast<std::size_t>(n);
  }
  if (has("max-iter")) cfg.bfgs.max_iter = int_of(values.at("max-iter"), "max-iter");
  if (has("grad-tol")) cfg.bfgs.grad_tol = parse_real(text("grad-tol"), "grad-tol");
  if (has("param-cap")) cfg.bfgs.param_cap = parse_real(text("param-cap"), "param-cap");
  cfg.ms.execution = Execution::parallel;
  cfg.validate();
  return cfg;
}

namespace {

struct Command {
  const char* name;
  const char* help;
  std::vector<const char*> keys;
  int (*fn)(const RunConfig&, std::ostream&, std::ostream&);
};

const std::vector<Command>& commands() {
  static const std::vector<Command> table{
      {"train", "Minimize the relative entropy for one target", {"r", "phi"}, cmd_train},
      {"sweep", "Minimal relative entropy over an (r, phi) grid", {"grid-r", "grid-phi"}, cmd_sweep},
      {"baseline", "Closed-form minima on the r = 1 rim or along phi = 3pi/4", {"mode", "grid-r", "grid-phi"},
       cmd_baseline},
      {"geometry", "Ground-state certificates and a numerical-range cloud",
       {"grid-r", "grid-phi", "samples", "cloud-out"}, cmd_geometry},
      {"symcheck", "Relative-entropy invariance under the 16 symmetry operations", {"trials"}, cmd_symcheck},
      {"gradcheck", "Analytic against central-difference gradients", {"trials", "step"}, cmd_gradcheck},
  };
  return table;
}

const std::map<std::string, const char*>& flag_help() {
  static const std::map<std::string, const char*> help{
      {"model", "visible2q or hidden3q"},
      {"r", "target radius in [0, 1]"},
      {"phi", "target angle in units of pi"},
      {"grid-r", "radii: lo:hi:n or a comma list"},
      {"grid-phi", "angles in units of pi: lo:hi:n or a comma list"},
      {"starts", "number of optimizer starts"},
      {"init", "constant:c or uniform:lo:hi"},
      {"seed", "64-bit seed (falls back to QBM_SEED)"},
      {"out", "output file (stdout when omitted)"},
      {"cloud-out", "numerical-range cloud output file"},
      {"format", "csv or json"},
      {"threads", "worker threads (0 = all)"},
      {"trials", "random trials"},
      {"step", "central-difference step"},
      {"mode", "r1 or phi3pi4"},
      {"samples", "cloud size"},
      {"max-iter", "BFGS iteration limit"},
      {"grad-tol", "gradient-norm tolerance in nats"},
      {"param-cap", "bound on |a_i|"},
  };
  return help;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& diag) {
  CLI::App app{"Quantum Boltzmann machine training and landscape tools", "qbm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::map<std::string, std::string> raw;
  std::string config_path;
  std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> options;
  const std::vector<const char*> common{"model", "starts", "init",    "seed",     "out",     "format",
                                        "threads", "max-iter", "grad-tol", "param-cap"};
  for (const auto& c : commands()) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "flat JSON file of flag values; flags take precedence");
    std::vector<const char*> keys = c.keys;
    keys.insert(keys.end(), common.begin(), common.end());
    for (const char* key : keys) {
      auto* opt = sub->add_option(std::string("--") + key, raw[key], flag_help().at(key));
      options[c.name].emplace_back(key, opt);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, diag);
      return kOk;
    }
    app.exit(e, diag, diag);
    return kConfigError;
  }

  const Command* chosen = nullptr;
  for (const auto& c : commands()) {
    if (app.got_subcommand(c.name)) chosen = &c;
  }

  RunConfig cfg;
  try {
    json flat = json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config file " + config_path);
      try {
        flat = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config file: ") + e.what());
      }
      if (!flat.is_object()) throw ConfigError("config file must hold a flat JSON object");
    }
    for (const auto& [key, opt] : options.at(chosen->name)) {
      if (opt->count() > 0) flat[key] = raw[key];
    }
    const char* env = std::getenv("QBM_SEED");
    cfg = config_from_json(chosen->name, flat, env ? std::optional<std::string>(env) : std::nullopt);
  } catch (const std::exception& e) {
    diag << "qbm " << chosen->name << ": " << e.what() << "\n";
    return kConfigError;
  }

  try {
    return chosen->fn(cfg, out, diag);
  } catch (const std::exception& e) {
    diag << "qbm " << chosen->name << ": " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace qbm::cli
