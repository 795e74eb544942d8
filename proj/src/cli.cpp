#include "meanshift/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "meanshift/bench.hpp"
#include "meanshift/contamination.hpp"
#include "meanshift/errors.hpp"
#include "meanshift/estimator.hpp"
#include "meanshift/lowerbound.hpp"
#include "meanshift/rng.hpp"
#include "meanshift/witness.hpp"

namespace meanshift {

namespace {

std::vector<double> parse_vector(const std::string& csv) {
  std::vector<double> v;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
  if (v.empty()) throw std::invalid_argument("empty vector argument");
  return v;
}

BaseDistribution make_dist(const std::string& kind, int dim, int fold) {
  switch (kind_from_name(kind)) {
    case DistKind::gaussian: return BaseDistribution::gaussian(dim);
    case DistKind::laplace: return BaseDistribution::laplace(dim);
    case DistKind::uniform: return BaseDistribution::uniform();
    case DistKind::uniform_conv: return BaseDistribution::uniform_conv(fold);
  }
  throw std::invalid_argument("bad distribution kind");
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void emit(const nlohmann::json& j, const std::string& out_path) {
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << j.dump(2) << "\n";
  }
  std::cout << j.dump(2) << "\n";
}

std::string complex_str(std::complex<double> z) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g%s%.17gi", z.real(),
                z.imag() < 0.0 ? "" : "+", z.imag());
  return buf;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Robust mean estimation under mean-shift contamination"};
  app.require_subcommand(1);

  std::string dist_kind = "gaussian";
  int dim = 1;
  int fold = 2;
  std::string omega_csv, v_csv;
  std::string config_path, samples_path, out_path, json_path, instance_path;
  std::uint64_t n = 0, seed = 1;
  double sin_level = 0.0, cf_level = 0.0;
  double grid_radius = 0.0, grid_resolution = 0.0;
  double epsilon = 0.0, alpha = 0.0;
  double scan_max = 16.0;
  std::size_t scan_count = 32768;
  double dir_resolution = 0.2;
  double band_halfwidth = 0.0, omega_max = 0.0, quad_step = 0.0;
  double quad_tol = 1e-8;
  std::optional<double> window_scale;
  std::optional<std::size_t> truncation_index;

  auto add_dist = [&](CLI::App* cmd) {
    cmd->add_option("--dist", dist_kind,
                    "gaussian | laplace | uniform | uniform_conv");
    cmd->add_option("--d", dim, "dimension");
    cmd->add_option("--fold", fold, "fold count for uniform_conv");
  };

  CLI::App* cf = app.add_subcommand("cf", "evaluate the base CF");
  add_dist(cf);
  cf->add_option("--omega", omega_csv, "frequency vector, comma separated")
      ->required();
  cf->callback([&] {
    const auto dist = make_dist(dist_kind, dim, fold);
    const auto w = parse_vector(omega_csv);
    std::cout << complex_str(dist.cf(w)) << "\n";
  });

  CLI::App* sample = app.add_subcommand("sample", "draw contaminated samples");
  sample->add_option("--model", config_path, "contamination model JSON")
      ->required();
  sample->add_option("--n", n, "sample count")->required();
  sample->add_option("--seed", seed, "random seed");
  sample->add_option("--out", out_path, "output CSV")->required();
  sample->callback([&] {
    const auto model = ContaminationModel::from_json(load_json(config_path));
    Rng rng(seed);
    std::vector<double> xs;
    model.draw(rng, n, xs);
    write_samples_csv(out_path, model, seed, xs);
    std::cout << nlohmann::json{{"out", out_path}, {"n", n}, {"seed", seed}}
                     .dump()
              << "\n";
  });

  CLI::App* est = app.add_subcommand("estimate", "run the tournament");
  est->add_option("--config", config_path,
                  "estimator JSON (with a dist object)")
      ->required();
  est->add_option("--samples", samples_path, "samples CSV")->required();
  est->add_option("--out", out_path, "report JSON path");
  est->add_option("--seed", seed, "seed for empirical-mode reference draws");
  est->callback([&] {
    const nlohmann::json j = load_json(config_path);
    const auto dist = BaseDistribution::from_json(j.at("dist"));
    const auto cfg = EstimatorConfig::from_json(j);
    int file_dim = 0;
    const auto xs = read_samples_csv(samples_path, file_dim);
    if (file_dim != dist.dim())
      throw std::invalid_argument("samples dimension mismatch");
    std::vector<double> clean;
    if (cfg.cf_mode == CfMode::empirical) {
      Rng rng = Rng::substream(seed, 1);
      dist.sample(rng, cfg.clean_count, clean);
    }
    emit(estimate(cfg, dist, xs, clean).to_json(), out_path);
  });

  CLI::App* wit = app.add_subcommand("witness", "find a frequency witness");
  add_dist(wit);
  wit->add_option("--v", v_csv, "shift vector, comma separated")->required();
  wit->add_option("--sin-level", sin_level, "required |sin(pi v.w)|")
      ->required();
  wit->add_option("--cf-level", cf_level, "required |cf(w)|")->required();
  wit->add_option("--grid-radius", grid_radius, "fallback grid ball radius");
  wit->add_option("--grid-resolution", grid_resolution,
                  "fallback grid resolution");
  wit->callback([&] {
    const auto dist = make_dist(dist_kind, dim, fold);
    const auto v = parse_vector(v_csv);
    const double b = grid_radius > 0.0
                         ? grid_radius
                         : witness_norm_bound(dist.constants().deriv_l1,
                                              cf_level, dist.dim());
    const double res = grid_resolution > 0.0 ? grid_resolution : b / 64.0;
    const Cover grid = build_cover(b, res, dist.dim());
    emit(find_witness(dist, v, sin_level, cf_level, grid).to_json(), "");
  });

  CLI::App* vis = app.add_subcommand(
      "delta", "worst-direction CF level over feasible frequencies");
  add_dist(vis);
  vis->add_option("--epsilon", epsilon, "shift scale")->required();
  vis->add_option("--alpha", alpha, "outlier fraction")->required();
  vis->add_option("--scan-max", scan_max, "radial scan upper end");
  vis->add_option("--scan-count", scan_count, "radial scan points");
  vis->add_option("--dir-resolution", dir_resolution,
                  "direction net resolution (d >= 2)");
  vis->callback([&] {
    const auto dist = make_dist(dist_kind, dim, fold);
    const auto dirs = sphere_directions(dist.dim(), dir_resolution);
    const auto r =
        shift_visibility(dist, epsilon, alpha, dirs, {scan_max, scan_count});
    std::vector<double> v(r.direction.size()), omega(r.direction.size());
    for (std::size_t j = 0; j < r.direction.size(); ++j) {
      v[j] = epsilon * r.direction[j];
      omega[j] = r.radial * r.direction[j];
    }
    emit({{"value", r.value},
          {"feasible", r.feasible},
          {"v", v},
          {"omega", omega}},
         "");
  });

  CLI::App* band = app.add_subcommand(
      "band-l2", "off-band L2 mass of the base CF");
  add_dist(band);
  band->add_option("--epsilon", epsilon, "lattice scale")->required();
  band->add_option("--band-halfwidth", band_halfwidth,
                   "band halfwidth in lattice units")
      ->required();
  band->add_option("--omega-max", omega_max, "quadrature cut")->required();
  band->add_option("--quad-step", quad_step, "quadrature step")->required();
  band->callback([&] {
    const auto dist = make_dist(dist_kind, dim, fold);
    emit({{"value", band_l2_mass(dist, epsilon, band_halfwidth, omega_max,
                                 quad_step)}},
         "");
  });

  CLI::App* lbc = app.add_subcommand(
      "lb-construct", "build a Fourier-matched hard instance pair");
  add_dist(lbc);
  double ws = 0.0;
  std::int64_t ti = -1;
  lbc->add_option("--epsilon", epsilon, "mean separation")->required();
  lbc->add_option("--alpha", alpha, "outlier fraction")->required();
  lbc->add_option("--window-scale", ws, "window scale c in (0, 1]");
  lbc->add_option("--truncation-index", ti, "lattice truncation index");
  lbc->add_option("--out", out_path, "instance JSON path")->required();
  lbc->callback([&] {
    const auto dist = make_dist(dist_kind, dim, fold);
    if (ws > 0.0) window_scale = ws;
    if (ti >= 0) truncation_index = static_cast<std::size_t>(ti);
    const auto inst =
        build_hard_instance(dist, epsilon, alpha, window_scale, truncation_index);
    {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot open " + out_path);
      out << inst.to_json().dump(2) << "\n";
    }
    std::cout << nlohmann::json{{"out", out_path},
                                {"window_scale", inst.window_scale},
                                {"w", inst.w},
                                {"mix_mass", inst.mix_mass},
                                {"atoms", inst.g.atoms.size()},
                                {"l1_norm", inst.g.l1_norm()},
                                {"dropped_l1_bound", inst.g.dropped_l1_bound}}
                     .dump(2)
              << "\n";
  });

  CLI::App* lbtv = app.add_subcommand(
      "lb-tv", "total variation certificates for a hard instance pair");
  lbtv->add_option("--instance", instance_path, "instance JSON")->required();
  lbtv->add_option("--quad-tol", quad_tol, "direct quadrature tolerance");
  lbtv->callback([&] {
    const auto inst = HardInstancePair::from_json(load_json(instance_path));
    const TvBound tv = tv_distance(inst, quad_tol);
    const auto lb = sample_lower_bound_from_tv(tv.certified);
    nlohmann::json j{{"certified", tv.certified},
                     {"direct", tv.direct},
                     {"direct_error", tv.direct_error},
                     {"split_radius", tv.split_radius},
                     {"gap_l2", tv.gap_l2}};
    j["sample_lower_bound"] = lb ? nlohmann::json(*lb) : nlohmann::json();
    emit(j, "");
  });

  CLI::App* bench = app.add_subcommand("bench", "run a benchmark sweep");
  bench->add_option("--config", config_path, "sweep JSON")->required();
  bench->add_option("--out", out_path, "records CSV path")->required();
  bench->add_option("--json", json_path, "records JSON path");
  bench->callback([&] {
    const auto sweep = SweepConfig::from_json(load_json(config_path));
    const auto records = run_benchmark(sweep);
    write_records_csv(out_path, records);
    if (!json_path.empty()) write_records_json(json_path, records);
    std::cout << nlohmann::json{{"out", out_path},
                                {"records", records.size()}}
                     .dump()
              << "\n";
  });

  std::vector<const char*> argv;
  argv.push_back("meanshift");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const resource_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const infeasible_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace meanshift
