#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "meanshift/contamination.hpp"
#include "meanshift/estimator.hpp"

namespace meanshift {

struct BenchmarkRecord {
  std::string dist_label;
  int dim = 1;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double runtime_ms = 0.0;
  double score = 0.0;
  std::string adversary_label;
  bool skipped = false;
  std::string skip_reason;

  nlohmann::json to_json() const;
  static BenchmarkRecord from_json(const nlohmann::json& j);
};

// Columns: dist,d,alpha,epsilon,n,seed,success,runtime_ms,score,adversary.
// Floats printed with 17 significant digits; success as 0/1; skip_reason only
// appears in the JSON form.
void write_records_csv(const std::string& path,
                       std::span<const BenchmarkRecord> records);
void write_records_json(const std::string& path,
                        std::span<const BenchmarkRecord> records);

struct SweepConfig {
  ContaminationModel model;
  std::vector<double> epsilons;
  std::vector<std::uint64_t> sample_counts;  // empty: use sample_budget per cell
  std::size_t trials = 1;
  std::uint64_t master_seed = 1;
  std::optional<EstimatorConfig> estimator;  // absent: preset per cell
  double preset_radius = 1.5;
  double preset_budget_constant = 64.0;
  double preset_cf_level_floor = 0.08;

  nlohmann::json to_json() const;
  static SweepConfig from_json(const nlohmann::json& j);
};

// Runs every (epsilon, sample count, trial) cell. Epsilons and sample counts
// are processed in ascending order; the trial seed is
//   master_seed + trial + trials * (n_index + n_count * eps_index)
// so records are reproducible cell by cell. Cells whose configuration is
// infeasible produce one skipped record instead of aborting the sweep.
// Records are returned sorted by (dist, dim, alpha, epsilon, n, seed).
std::vector<BenchmarkRecord> run_benchmark(const SweepConfig& sweep);

}  // namespace meanshift
