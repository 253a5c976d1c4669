#include "bmv/commands.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bmv/mediator.hpp"

namespace bmv {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

void write_text(const std::string& path, const std::string& content, bool quiet) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
  if (!quiet) std::cerr << "wrote " << path << "\n";
}

const char* kRowColumns[] = {"dphi1",         "dphi2",
                             "concurrence",   "negativity",
                             "witness_exact", "witness_strategy1",
                             "witness_strategy2", "stderr"};

std::vector<double> row_values(const RowResult& row) {
  return {row.dphi1,         row.dphi2,          row.concurrence,
          row.negativity,    row.witness_exact,  row.witness_strategy1,
          row.witness_strategy2, row.std_error};
}

std::string rows_to_csv(const std::vector<std::string>& axis_names,
                        const std::vector<RowResult>& rows) {
  std::ostringstream out;
  for (const std::string& name : axis_names) out << name << ',';
  for (std::size_t i = 0; i < std::size(kRowColumns); ++i)
    out << kRowColumns[i] << (i + 1 < std::size(kRowColumns) ? ',' : '\n');
  for (const RowResult& row : rows) {
    for (double v : row.swept) out << format_double(v) << ',';
    const auto values = row_values(row);
    for (std::size_t i = 0; i < values.size(); ++i)
      out << format_double(values[i]) << (i + 1 < values.size() ? ',' : '\n');
  }
  return out.str();
}

ordered_json row_to_json(const std::vector<std::string>& axis_names, const RowResult& row) {
  ordered_json j;
  for (std::size_t i = 0; i < axis_names.size(); ++i) j[axis_names[i]] = row.swept[i];
  const auto values = row_values(row);
  for (std::size_t i = 0; i < std::size(kRowColumns); ++i) j[kRowColumns[i]] = values[i];
  return j;
}

std::string rows_to_text(const RunConfig& config, const std::vector<std::string>& axis_names,
                         const std::vector<RowResult>& rows) {
  if (config.format == OutputFormat::csv) return rows_to_csv(axis_names, rows);
  if (rows.size() == 1 && axis_names.empty()) return row_to_json(axis_names, rows[0]).dump(2) + "\n";
  ordered_json j = ordered_json::array();
  for (const RowResult& row : rows) j.push_back(row_to_json(axis_names, row));
  return j.dump(2) + "\n";
}

}  // namespace

RowResult evaluate_row(const RunConfig& config, std::uint64_t row_seed,
                       std::vector<MeasurementRecord>* records) {
  const ProtocolRun run = run_protocol(config.protocol());
  const DensityMatrix path_pair = extract_path_state(run.pre_recombination);

  RowResult row{};
  row.dphi1 = run.phases.dphi1;
  row.dphi2 = run.phases.dphi2;
  row.concurrence = concurrence(path_pair);
  row.negativity = negativity(path_pair);
  row.witness_exact = witness_exact(path_pair).value;

  SplitMix64 rng(row_seed);
  const WitnessEstimate w1 =
      run_strategy1(run, config.shots, rng, config.readout_fidelity, records);
  const WitnessEstimate w2 =
      run_strategy2(run, config.shots, rng, config.readout_fidelity, records);
  row.witness_strategy1 = w1.value;
  row.witness_strategy2 = w2.value;
  row.std_error = std::max(w1.std_error, w2.std_error);
  return row;
}

int cmd_run(const RunConfig& config) {
  std::vector<MeasurementRecord> records;
  RowResult row = evaluate_row(config, config.seed,
                               config.records_path.empty() ? nullptr : &records);
  write_text(config.output_path, rows_to_text(config, {}, {row}), config.quiet);
  if (!config.records_path.empty()) {
    std::ostringstream out;
    write_records_csv(out, records);
    write_text(config.records_path, out.str(), config.quiet);
  }
  return 0;
}

int cmd_sweep(const RunConfig& config) {
  if (config.sweep.empty()) throw ConfigError("sweep command needs at least one [sweep] axis");

  std::vector<std::string> axis_names;
  long long total = 1;
  for (const SweepAxis& axis : config.sweep) {
    axis_names.push_back(axis.param);
    total *= axis.steps;
  }

  // lexicographic order over the axis grid, first axis outermost
  std::vector<RowResult> rows(static_cast<std::size_t>(total));
  std::vector<RunConfig> points(static_cast<std::size_t>(total), config);
  for (long long index = 0; index < total; ++index) {
    long long rem = index;
    std::vector<double> swept(config.sweep.size());
    for (std::size_t a = config.sweep.size(); a-- > 0;) {
      const SweepAxis& axis = config.sweep[a];
      const long long i = rem % axis.steps;
      rem /= axis.steps;
      swept[a] = axis.steps == 1 ? axis.min
                                 : axis.min + (axis.max - axis.min) * static_cast<double>(i) /
                                                  static_cast<double>(axis.steps - 1);
      apply_sweep_value(points[static_cast<std::size_t>(index)], axis.param, swept[a]);
    }
    points[static_cast<std::size_t>(index)].sweep.clear();
    rows[static_cast<std::size_t>(index)].swept = std::move(swept);
  }

  int jobs = config.jobs > 0 ? config.jobs
                             : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, jobs);

  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<long long> cursor{0};
  auto worker = [&] {
    for (;;) {
      const long long index = cursor.fetch_add(1);
      if (index >= total) return;
      try {
        // per-row seed keeps the grid reproducible under any thread count
        const std::vector<double> swept = rows[static_cast<std::size_t>(index)].swept;
        RowResult row = evaluate_row(points[static_cast<std::size_t>(index)],
                                     config.seed ^ static_cast<std::uint64_t>(index));
        row.swept = swept;
        rows[static_cast<std::size_t>(index)] = std::move(row);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        cursor.store(total);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  write_text(config.output_path, rows_to_text(config, axis_names, rows), config.quiet);
  return 0;
}

int cmd_feasibility(const RunConfig& config) {
  const ProtocolConfig proto = config.protocol();
  const BranchGeometry& geom = proto.geometry;
  const CasimirVerdict gate = casimir_gate(geom.d1());
  const TrapFrequency trap = trap_frequency(proto.trap);
  const PhaseSet phases = phase_set(geom, proto.mass, proto.t_grav);

  // per-second relative phase rates fix the time needed to hit the target sum
  const double rate1 = pairwise_phase(proto.mass, geom.d1(), 1.0);
  const double rate2 = pairwise_phase(proto.mass, geom.d2(), 1.0);
  const double rate3 = pairwise_phase(proto.mass, geom.d3(), 1.0);
  const double sum_rate = rate1 + rate2 - 2.0 * rate3;
  const double required_t =
      sum_rate > 0.0 ? config.target_phase_sum_rad / sum_rate
                     : std::numeric_limits<double>::infinity();

  ordered_json j;
  j["d1_m"] = geom.d1();
  j["d2_m"] = geom.d2();
  j["d3_m"] = geom.d3();
  j["casimir_pass"] = gate.pass;
  j["casimir_margin_m"] = gate.margin;
  j["trap_omega_rad_s"] = trap.omega;
  j["trap_used_abs_chi"] = trap.used_abs_chi;
  j["split_time_s"] = split_time(trap.omega);
  j["phi1_rad"] = phases.phi1;
  j["phi2_rad"] = phases.phi2;
  j["phi3_rad"] = phases.phi3;
  j["dphi1_rad"] = phases.dphi1;
  j["dphi2_rad"] = phases.dphi2;
  j["phase_sum_rad"] = phases.dphi1 + phases.dphi2;
  j["target_phase_sum_rad"] = config.target_phase_sum_rad;
  j["required_t_grav_s"] = required_t;
  write_text(config.output_path, j.dump(2) + "\n", config.quiet);
  return 0;
}

int cmd_gwt(const RunConfig& config) {
  const GwtScanReport report = gwt_scan(config.gwt_samples, config.seed, config.jobs);
  const DirectCouplingCounterexample cx = direct_coupling_counterexample();

  ordered_json j;
  j["n"] = report.n;
  j["samples"] = report.samples;
  j["accepted"] = report.accepted;
  j["max_negativity"] = report.max_negativity;
  j["seed"] = report.seed;
  j["counterexample_negativity"] = cx.negativity;
  write_text(config.output_path, j.dump(2) + "\n", config.quiet);
  return 0;
}

}  // namespace bmv
