#pragma once

#include <string>
#include <vector>

#include "bmv/config.hpp"
#include "bmv/witness.hpp"

// File-writing command entry points behind the CLI subcommands. Every command
// is a deterministic function of (config, seed): identical inputs produce
// byte-identical output files.

namespace bmv {

struct RowResult {
  std::vector<double> swept;  // one value per sweep axis, in axis order
  double dphi1;
  double dphi2;
  double concurrence;
  double negativity;
  double witness_exact;
  double witness_strategy1;
  double witness_strategy2;
  double std_error;  // larger of the two strategy standard errors
};

// Runs the protocol and all witness evaluations for one parameter point.
RowResult evaluate_row(const RunConfig& config, std::uint64_t row_seed,
                       std::vector<MeasurementRecord>* records = nullptr);

int cmd_run(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_feasibility(const RunConfig& config);
int cmd_gwt(const RunConfig& config);

// shortest decimal form that parses back to the identical double
std::string format_double(double v);

}  // namespace bmv
