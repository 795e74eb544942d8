#include "meanshift/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "meanshift/errors.hpp"
#include "meanshift/rng.hpp"

namespace meanshift {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string dist_label_of(const BaseDistribution& d) {
  if (d.kind() == DistKind::uniform_conv)
    return kind_name(d.kind()) + "_" + std::to_string(d.fold());
  return kind_name(d.kind());
}

}  // namespace

nlohmann::json BenchmarkRecord::to_json() const {
  nlohmann::json j;
  j["dist"] = dist_label;
  j["d"] = dim;
  j["alpha"] = alpha;
  j["epsilon"] = epsilon;
  j["n"] = samples;
  j["seed"] = seed;
  j["success"] = success;
  j["runtime_ms"] = runtime_ms;
  if (std::isnan(score)) {
    j["score"] = nullptr;
  } else {
    j["score"] = score;
  }
  j["adversary"] = adversary_label;
  j["skipped"] = skipped;
  if (skipped) j["skip_reason"] = skip_reason;
  return j;
}

BenchmarkRecord BenchmarkRecord::from_json(const nlohmann::json& j) {
  BenchmarkRecord r;
  r.dist_label = j.at("dist").get<std::string>();
  r.dim = j.at("d").get<int>();
  r.alpha = j.at("alpha").get<double>();
  r.epsilon = j.at("epsilon").get<double>();
  r.samples = j.at("n").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.success = j.at("success").get<bool>();
  r.runtime_ms = j.at("runtime_ms").get<double>();
  r.score = j.at("score").is_null()
                ? std::numeric_limits<double>::quiet_NaN()
                : j.at("score").get<double>();
  r.adversary_label = j.at("adversary").get<std::string>();
  r.skipped = j.value("skipped", false);
  r.skip_reason = j.value("skip_reason", "");
  return r;
}

void write_records_csv(const std::string& path,
                       std::span<const BenchmarkRecord> records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "dist,d,alpha,epsilon,n,seed,success,runtime_ms,score,adversary\n";
  for (const auto& r : records) {
    out << r.dist_label << ',' << r.dim << ',' << fmt17(r.alpha) << ','
        << fmt17(r.epsilon) << ',' << r.samples << ',' << r.seed << ','
        << (r.success ? 1 : 0) << ',' << fmt17(r.runtime_ms) << ','
        << fmt17(r.score) << ',' << r.adversary_label << '\n';
  }
}

void write_records_json(const std::string& path,
                        std::span<const BenchmarkRecord> records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(r.to_json());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << arr.dump(2) << "\n";
}

nlohmann::json SweepConfig::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["model"] = model.to_json();
  j["epsilons"] = epsilons;
  if (!sample_counts.empty()) j["samples"] = sample_counts;
  j["trials"] = trials;
  j["master_seed"] = master_seed;
  if (estimator) j["estimator"] = estimator->to_json();
  j["preset_radius"] = preset_radius;
  j["preset_budget_constant"] = preset_budget_constant;
  j["preset_cf_level_floor"] = preset_cf_level_floor;
  return j;
}

SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
  if (j.value("version", 0) != 1)
    throw std::invalid_argument("sweep config: unsupported version");
  SweepConfig s{ContaminationModel::from_json(j.at("model")),
                j.at("epsilons").get<std::vector<double>>(),
                {},
                j.value("trials", std::size_t{1}),
                j.value("master_seed", std::uint64_t{1}),
                std::nullopt,
                j.value("preset_radius", 1.5),
                j.value("preset_budget_constant", 64.0),
                j.value("preset_cf_level_floor", 0.08)};
  if (j.contains("samples"))
    s.sample_counts = j.at("samples").get<std::vector<std::uint64_t>>();
  if (j.contains("estimator"))
    s.estimator = EstimatorConfig::from_json(j.at("estimator"));
  if (s.epsilons.empty())
    throw std::invalid_argument("sweep config: epsilons must be nonempty");
  if (s.trials < 1) throw std::invalid_argument("sweep config: trials < 1");
  return s;
}

std::vector<BenchmarkRecord> run_benchmark(const SweepConfig& sweep) {
  sweep.model.validate();
  const BaseDistribution& dist = sweep.model.base;
  const int d = dist.dim();

  std::vector<double> epsilons = sweep.epsilons;
  std::sort(epsilons.begin(), epsilons.end());
  std::vector<std::uint64_t> counts = sweep.sample_counts;
  std::sort(counts.begin(), counts.end());
  const std::size_t n_slots = counts.empty() ? 1 : counts.size();

  std::vector<BenchmarkRecord> records;
  for (std::size_t ei = 0; ei < epsilons.size(); ++ei) {
    const double eps = epsilons[ei];
    for (std::size_t ni = 0; ni < n_slots; ++ni) {
      BenchmarkRecord stub;
      stub.dist_label = dist_label_of(dist);
      stub.dim = d;
      stub.alpha = sweep.model.alpha;
      stub.epsilon = eps;
      stub.adversary_label = adversary_label(sweep.model.adversary);
      stub.score = std::numeric_limits<double>::quiet_NaN();

      EstimatorConfig cfg;
      std::uint64_t n = 0;
      try {
        if (sweep.estimator) {
          cfg = *sweep.estimator;
          cfg.epsilon = eps;
        } else {
          cfg = preset_config(dist, sweep.model.alpha, eps, sweep.preset_radius,
                              sweep.preset_budget_constant,
                              sweep.preset_cf_level_floor);
        }
        cfg.validate(d);
        n = counts.empty() ? sample_budget(cfg, d) : counts[ni];
        if (n == 0) throw std::invalid_argument("cell: zero samples");
      } catch (const std::exception& e) {
        stub.seed = sweep.master_seed +
                    sweep.trials * (ni + n_slots * ei);
        stub.skipped = true;
        stub.skip_reason = e.what();
        records.push_back(stub);
        continue;
      }

      for (std::size_t t = 0; t < sweep.trials; ++t) {
        BenchmarkRecord rec = stub;
        rec.samples = n;
        rec.seed = sweep.master_seed + t + sweep.trials * (ni + n_slots * ei);
        try {
          Rng rng(rec.seed);
          std::vector<double> samples;
          sweep.model.draw(rng, n, samples);
          std::vector<double> clean;
          if (cfg.cf_mode == CfMode::empirical) {
            Rng clean_rng = Rng::substream(rec.seed, 1);
            dist.sample(clean_rng, cfg.clean_count, clean);
          }
          const auto t0 = std::chrono::steady_clock::now();
          const EstimateReport rep = estimate(cfg, dist, samples, clean);
          const auto t1 = std::chrono::steady_clock::now();
          rec.runtime_ms =
              std::chrono::duration<double, std::milli>(t1 - t0).count();
          rec.score = rep.score;
          double err2 = 0.0;
          for (int j = 0; j < d; ++j) {
            const double diff = rep.mean[j] - sweep.model.mean[j];
            err2 += diff * diff;
          }
          rec.success = std::sqrt(err2) <= eps;
        } catch (const std::exception& e) {
          rec.skipped = true;
          rec.skip_reason = e.what();
          rec.success = false;
          rec.score = std::numeric_limits<double>::quiet_NaN();
        }
        records.push_back(rec);
      }
    }
  }
  std::sort(records.begin(), records.end(),
            [](const BenchmarkRecord& a, const BenchmarkRecord& b) {
              return std::tie(a.dist_label, a.dim, a.alpha, a.epsilon,
                              a.samples, a.seed) <
                     std::tie(b.dist_label, b.dim, b.alpha, b.epsilon,
                              b.samples, b.seed);
            });
  return records;
}

}  // namespace meanshift
