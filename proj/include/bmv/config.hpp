#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bmv/protocol.hpp"

// Strict TOML-style run configuration. Unknown keys are fatal (with a
// nearest-key suggestion): a silently misconfigured physics sweep is worse
// than a loud failure.

namespace bmv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepAxis {
  std::string param;
  double min = 0.0;
  double max = 0.0;
  int steps = 0;
};

enum class OutputFormat { csv, json };

struct RunConfig {
  double mass_kg = 1e-14;
  double d_m = 300e-6;
  double s_m = 100e-6;
  double t_grav_s = 1.0;
  int n_dd = 0;
  double t2_path_s = std::numeric_limits<double>::infinity();
  long long shots = 10000;
  std::uint64_t seed = 1;
  PhaseConvention convention = PhaseConvention::eq1;
  double b_prime_t_per_m = 10.0;
  double chi = 2.2e-5;
  double rho_nd_kg_m3 = 3500.0;
  double readout_fidelity = 1.0;
  long long gwt_samples = 10000;
  double target_phase_sum_rad = 3.141592653589793;

  std::vector<SweepAxis> sweep;
  std::string output_path;     // empty = stdout
  std::string records_path;    // optional per-shot measurement record CSV
  OutputFormat format = OutputFormat::csv;

  // command-line only
  int jobs = 0;  // 0 = hardware concurrency
  bool quiet = false;

  // Assembles and validates the protocol-facing view of this config.
  ProtocolConfig protocol() const;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(std::string_view text, const std::string& filename);

// true for keys a sweep axis may reference
bool is_sweepable(const std::string& param);
// assigns a swept value onto the named parameter
void apply_sweep_value(RunConfig& config, const std::string& param, double value);

}  // namespace bmv
