#include "bmv/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace bmv {

ProtocolConfig RunConfig::protocol() const {
  try {
    ProtocolConfig p{mass_kg,
                     BranchGeometry(d_m, s_m),
                     TrapParams(b_prime_t_per_m, 0.0, chi, rho_nd_kg_m3),
                     t_grav_s,
                     n_dd,
                     t2_path_s,
                     shots,
                     seed,
                     convention};
    p.validate();
    return p;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

namespace {

const char* kKnownKeys[] = {
    "mass_kg",          "d_m",          "s_m",           "t_grav_s",
    "n_dd",             "t2_path_s",    "shots",         "seed",
    "phase_convention", "b_prime_t_per_m", "chi",        "rho_nd_kg_m3",
    "readout_fidelity", "gwt_samples",  "target_phase_sum_rad",
    "sweep.param",      "sweep.min",    "sweep.max",     "sweep.steps",
    "output.path",      "output.format", "output.records",
};

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string suggest_key(const std::string& key) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::string pick;
  for (const char* k : kKnownKeys) {
    const std::size_t d = edit_distance(key, k);
    if (d < best) {
      best = d;
      pick = k;
    }
  }
  if (best <= std::max<std::size_t>(3, key.size() / 2)) return pick;
  return {};
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Value {
  enum class Kind { string, number, boolean } kind;
  std::string str;
  double num = 0.0;
  bool flag = false;
  bool integral = false;
  long long int_val = 0;
};

class Parser {
 public:
  Parser(std::string_view text, std::string filename)
      : text_(text), filename_(std::move(filename)) {}

  RunConfig parse() {
    RunConfig config;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      const std::size_t nl = text_.find('\n', pos);
      const std::string_view raw =
          text_.substr(pos, nl == std::string_view::npos ? text_.size() - pos : nl - pos);
      handle_line(config, raw);
      ++line_;
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    finalize(config);
    return config;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(filename_ + ":" + std::to_string(line_) + ": " + msg);
  }

  void handle_line(RunConfig& config, std::string_view raw) {
    std::string line = strip_comment(raw);
    line = trim(line);
    if (line.empty()) return;
    if (line.front() == '[') {
      open_section(config, line);
      return;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value_text = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (value_text.empty()) fail("missing value for key '" + key + "'");
    if (!section_.empty() && key.find('.') == std::string::npos) key = section_ + "." + key;
    assign(config, key, parse_value(value_text));
  }

  std::string strip_comment(std::string_view raw) const {
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') quoted = !quoted;
      if (raw[i] == '#' && !quoted) return std::string(raw.substr(0, i));
    }
    return std::string(raw);
  }

  void open_section(RunConfig& config, const std::string& line) {
    const bool array = line.size() >= 2 && line[1] == '[';
    std::string name = line;
    name.erase(std::remove_if(name.begin(), name.end(),
                              [](char c) { return c == '[' || c == ']' || c == ' '; }),
               name.end());
    if (name == "sweep") {
      if (array || config.sweep.empty())
        config.sweep.emplace_back();
      else
        fail("repeated [sweep] section; use [[sweep]] for multiple axes");
      section_ = "sweep";
    } else if (name == "output") {
      section_ = "output";
    } else {
      fail("unknown section '" + name + "'");
    }
  }

  Value parse_value(const std::string& text) const {
    Value v{};
    if (text.front() == '"') {
      if (text.size() < 2 || text.back() != '"') fail("unterminated string");
      v.kind = Value::Kind::string;
      v.str = text.substr(1, text.size() - 2);
      return v;
    }
    if (text == "true" || text == "false") {
      v.kind = Value::Kind::boolean;
      v.flag = text == "true";
      return v;
    }
    if (text == "inf" || text == "+inf") {
      v.kind = Value::Kind::number;
      v.num = std::numeric_limits<double>::infinity();
      return v;
    }
    if (text == "-inf") {
      v.kind = Value::Kind::number;
      v.num = -std::numeric_limits<double>::infinity();
      return v;
    }
    v.kind = Value::Kind::number;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [iptr, iec] = std::from_chars(begin, end, v.int_val);
    if (iec == std::errc() && iptr == end) {
      v.integral = true;
      v.num = static_cast<double>(v.int_val);
      return v;
    }
    auto [fptr, fec] = std::from_chars(begin, end, v.num);
    if (fec != std::errc() || fptr != end) fail("cannot parse value '" + text + "'");
    return v;
  }

  double number(const Value& v, const std::string& key) const {
    if (v.kind != Value::Kind::number) fail("key '" + key + "' expects a number");
    return v.num;
  }

  long long integer(const Value& v, const std::string& key) const {
    if (v.kind != Value::Kind::number || !v.integral)
      fail("key '" + key + "' expects an integer");
    return v.int_val;
  }

  std::string text(const Value& v, const std::string& key) const {
    if (v.kind != Value::Kind::string) fail("key '" + key + "' expects a quoted string");
    return v.str;
  }

  void assign(RunConfig& c, const std::string& key, const Value& v) {
    if (key == "mass_kg") c.mass_kg = number(v, key);
    else if (key == "d_m") c.d_m = number(v, key);
    else if (key == "s_m") c.s_m = number(v, key);
    else if (key == "t_grav_s") c.t_grav_s = number(v, key);
    else if (key == "n_dd") c.n_dd = static_cast<int>(integer(v, key));
    else if (key == "t2_path_s") c.t2_path_s = number(v, key);
    else if (key == "shots") c.shots = integer(v, key);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(integer(v, key));
    else if (key == "phase_convention") {
      const std::string s = text(v, key);
      if (s == "eq1") c.convention = PhaseConvention::eq1;
      else if (s == "eq5") c.convention = PhaseConvention::eq5;
      else fail("phase_convention must be \"eq1\" or \"eq5\"");
    } else if (key == "b_prime_t_per_m") c.b_prime_t_per_m = number(v, key);
    else if (key == "chi") c.chi = number(v, key);
    else if (key == "rho_nd_kg_m3") c.rho_nd_kg_m3 = number(v, key);
    else if (key == "readout_fidelity") c.readout_fidelity = number(v, key);
    else if (key == "gwt_samples") c.gwt_samples = integer(v, key);
    else if (key == "target_phase_sum_rad") c.target_phase_sum_rad = number(v, key);
    else if (key == "sweep.param") sweep_axis(c).param = text(v, key);
    else if (key == "sweep.min") sweep_axis(c).min = number(v, key);
    else if (key == "sweep.max") sweep_axis(c).max = number(v, key);
    else if (key == "sweep.steps") sweep_axis(c).steps = static_cast<int>(integer(v, key));
    else if (key == "output.path") c.output_path = text(v, key);
    else if (key == "output.records") c.records_path = text(v, key);
    else if (key == "output.format") {
      const std::string s = text(v, key);
      if (s == "csv") c.format = OutputFormat::csv;
      else if (s == "json") c.format = OutputFormat::json;
      else fail("output.format must be \"csv\" or \"json\"");
    } else {
      const std::string hint = suggest_key(key);
      fail("unknown key '" + key + "'" + (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
    }
  }

  SweepAxis& sweep_axis(RunConfig& c) {
    if (c.sweep.empty()) c.sweep.emplace_back();
    return c.sweep.back();
  }

  void finalize(RunConfig& config) const {
    for (const SweepAxis& axis : config.sweep) {
      if (axis.param.empty()) throw ConfigError(filename_ + ": sweep axis missing 'param'");
      if (!is_sweepable(axis.param))
        throw ConfigError(filename_ + ": parameter '" + axis.param + "' is not sweepable");
      if (axis.steps < 1)
        throw ConfigError(filename_ + ": sweep axis '" + axis.param + "' needs steps >= 1");
    }
    if (config.shots < 2) throw ConfigError(filename_ + ": shots must be >= 2");
    if (!(config.readout_fidelity >= 0.0 && config.readout_fidelity <= 1.0))
      throw ConfigError(filename_ + ": readout_fidelity must lie in [0, 1]");
    if (config.gwt_samples < 1) throw ConfigError(filename_ + ": gwt_samples must be >= 1");
    config.protocol();  // surfaces geometry/trap invariant violations with key context
  }

  std::string_view text_;
  std::string filename_;
  std::string section_;
  int line_ = 1;
};

}  // namespace

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  return parse_config_text(content, path);
}

RunConfig parse_config_text(std::string_view text, const std::string& filename) {
  return Parser(text, filename).parse();
}

bool is_sweepable(const std::string& param) {
  static const char* kSweepable[] = {"mass_kg",     "d_m",       "s_m",
                                     "t_grav_s",    "t2_path_s", "b_prime_t_per_m",
                                     "chi",         "rho_nd_kg_m3",
                                     "readout_fidelity", "n_dd"};
  return std::any_of(std::begin(kSweepable), std::end(kSweepable),
                     [&](const char* k) { return param == k; });
}

void apply_sweep_value(RunConfig& config, const std::string& param, double value) {
  if (param == "mass_kg") config.mass_kg = value;
  else if (param == "d_m") config.d_m = value;
  else if (param == "s_m") config.s_m = value;
  else if (param == "t_grav_s") config.t_grav_s = value;
  else if (param == "t2_path_s") config.t2_path_s = value;
  else if (param == "b_prime_t_per_m") config.b_prime_t_per_m = value;
  else if (param == "chi") config.chi = value;
  else if (param == "rho_nd_kg_m3") config.rho_nd_kg_m3 = value;
  else if (param == "readout_fidelity") config.readout_fidelity = value;
  else if (param == "n_dd") config.n_dd = static_cast<int>(std::llround(value));
  else throw ConfigError("parameter '" + param + "' is not sweepable");
}

}  // namespace bmv
