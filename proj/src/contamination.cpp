#include "meanshift/contamination.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "meanshift/rng.hpp"

namespace meanshift {

namespace {

std::complex<double> unit_phase(double dot) {
  return {std::cos(kTwoPi * dot), std::sin(kTwoPi * dot)};
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::string adversary_label(const Adversary& a) {
  struct V {
    std::string operator()(const PointShift&) const { return "point_shift"; }
    std::string operator()(const MixtureOfPoints&) const { return "mixture"; }
    std::string operator()(const AtomicMeasure1D&) const { return "atomic"; }
    std::string operator()(const NullAdversary&) const { return "null"; }
  };
  return std::visit(V{}, a);
}

std::complex<double> adversary_cf(const Adversary& a,
                                  std::span<const double> omega,
                                  std::span<const double> mean) {
  if (std::holds_alternative<PointShift>(a)) {
    return unit_phase(dot(omega, std::get<PointShift>(a).shift));
  }
  if (std::holds_alternative<MixtureOfPoints>(a)) {
    std::complex<double> s = 0.0;
    for (const auto& atom : std::get<MixtureOfPoints>(a).atoms)
      s += atom.prob * unit_phase(dot(omega, atom.location));
    return s;
  }
  if (std::holds_alternative<AtomicMeasure1D>(a)) {
    const auto& m = std::get<AtomicMeasure1D>(a);
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < m.locations.size(); ++i)
      s += m.probs[i] * unit_phase(omega[0] * m.locations[i]);
    return s;
  }
  return unit_phase(dot(omega, mean));
}

nlohmann::json adversary_to_json(const Adversary& a) {
  nlohmann::json j;
  j["type"] = adversary_label(a);
  if (std::holds_alternative<PointShift>(a)) {
    j["shift"] = std::get<PointShift>(a).shift;
  } else if (std::holds_alternative<MixtureOfPoints>(a)) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& atom : std::get<MixtureOfPoints>(a).atoms)
      atoms.push_back({{"location", atom.location}, {"prob", atom.prob}});
    j["atoms"] = atoms;
  } else if (std::holds_alternative<AtomicMeasure1D>(a)) {
    const auto& m = std::get<AtomicMeasure1D>(a);
    j["locations"] = m.locations;
    j["probs"] = m.probs;
  }
  return j;
}

Adversary adversary_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "point_shift")
    return PointShift{j.at("shift").get<std::vector<double>>()};
  if (type == "mixture") {
    MixtureOfPoints m;
    for (const auto& atom : j.at("atoms"))
      m.atoms.push_back({atom.at("location").get<std::vector<double>>(),
                         atom.at("prob").get<double>()});
    return m;
  }
  if (type == "atomic")
    return AtomicMeasure1D{j.at("locations").get<std::vector<double>>(),
                           j.at("probs").get<std::vector<double>>()};
  if (type == "null") return NullAdversary{};
  throw std::invalid_argument("unknown adversary type: " + type);
}

void ContaminationModel::validate() const {
  if (static_cast<int>(mean.size()) != base.dim())
    throw std::invalid_argument("model: mean dimension mismatch");
  if (!(alpha >= 0.0 && alpha < 0.5))
    throw std::invalid_argument("model: alpha must lie in [0, 1/2)");
  if (std::holds_alternative<PointShift>(adversary)) {
    if (static_cast<int>(std::get<PointShift>(adversary).shift.size()) !=
        base.dim())
      throw std::invalid_argument("model: shift dimension mismatch");
  } else if (std::holds_alternative<MixtureOfPoints>(adversary)) {
    const auto& m = std::get<MixtureOfPoints>(adversary);
    if (m.atoms.empty()) throw std::invalid_argument("model: empty mixture");
    double total = 0.0;
    for (const auto& atom : m.atoms) {
      if (static_cast<int>(atom.location.size()) != base.dim())
        throw std::invalid_argument("model: atom dimension mismatch");
      if (atom.prob < 0.0)
        throw std::invalid_argument("model: negative atom prob");
      total += atom.prob;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("model: mixture probs must sum to 1");
  } else if (std::holds_alternative<AtomicMeasure1D>(adversary)) {
    const auto& m = std::get<AtomicMeasure1D>(adversary);
    if (base.dim() != 1)
      throw std::invalid_argument("model: atomic adversary is univariate");
    if (m.locations.size() != m.probs.size() || m.locations.empty())
      throw std::invalid_argument("model: malformed atomic adversary");
    if (!std::is_sorted(m.locations.begin(), m.locations.end()))
      throw std::invalid_argument("model: atomic locations must be sorted");
    double total = 0.0;
    for (double p : m.probs) {
      if (p < 0.0) throw std::invalid_argument("model: negative atom prob");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("model: atomic probs must sum to 1");
  }
}

void ContaminationModel::draw(Rng& rng, std::size_t n,
                              std::vector<double>& out) const {
  validate();
  const int d = base.dim();
  std::vector<double> cdf;
  if (std::holds_alternative<AtomicMeasure1D>(adversary)) {
    const auto& m = std::get<AtomicMeasure1D>(adversary);
    cdf.resize(m.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m.probs.size(); ++i) {
      acc += m.probs[i];
      cdf[i] = acc;
    }
  }
  std::vector<double> noise;
  out.reserve(out.size() + n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const bool outlier = rng.bernoulli(alpha);
    const double* shift = mean.data();
    std::vector<double> picked;
    if (outlier) {
      if (std::holds_alternative<PointShift>(adversary)) {
        shift = std::get<PointShift>(adversary).shift.data();
      } else if (std::holds_alternative<MixtureOfPoints>(adversary)) {
        const auto& m = std::get<MixtureOfPoints>(adversary);
        double u = rng.uniform01();
        double acc = 0.0;
        std::size_t pick = m.atoms.size() - 1;
        for (std::size_t k = 0; k < m.atoms.size(); ++k) {
          acc += m.atoms[k].prob;
          if (u < acc) {
            pick = k;
            break;
          }
        }
        shift = m.atoms[pick].location.data();
      } else if (std::holds_alternative<AtomicMeasure1D>(adversary)) {
        const auto& m = std::get<AtomicMeasure1D>(adversary);
        const double u = rng.uniform01();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const std::size_t pick =
            std::min<std::size_t>(it - cdf.begin(), m.locations.size() - 1);
        picked = {m.locations[pick]};
        shift = picked.data();
      }
      // NullAdversary keeps shift == mean.
    }
    noise.clear();
    base.sample(rng, 1, noise);
    for (int j = 0; j < d; ++j) out.push_back(shift[j] + noise[j]);
  }
}

std::complex<double> ContaminationModel::observed_cf(
    std::span<const double> omega) const {
  return base.cf(omega) * shift_mixture_cf(omega);
}

std::complex<double> ContaminationModel::shift_mixture_cf(
    std::span<const double> omega) const {
  const double md = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) s += omega[i] * mean[i];
    return s;
  }();
  const std::complex<double> clean{std::cos(kTwoPi * md), std::sin(kTwoPi * md)};
  return (1.0 - alpha) * clean + alpha * adversary_cf(adversary, omega, mean);
}

nlohmann::json ContaminationModel::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["dist"] = base.to_json();
  j["mean"] = mean;
  j["alpha"] = alpha;
  j["adversary"] = adversary_to_json(adversary);
  return j;
}

ContaminationModel ContaminationModel::from_json(const nlohmann::json& j) {
  if (j.value("version", 0) != 1)
    throw std::invalid_argument("model config: unsupported version");
  ContaminationModel m{BaseDistribution::from_json(j.at("dist")),
                       j.at("mean").get<std::vector<double>>(),
                       j.at("alpha").get<double>(),
                       j.contains("adversary")
                           ? adversary_from_json(j.at("adversary"))
                           : Adversary{NullAdversary{}}};
  m.validate();
  return m;
}

void write_samples_csv(const std::string& path, const ContaminationModel& model,
                       std::uint64_t seed, std::span<const double> samples) {
  const int d = model.base.dim();
  if (samples.size() % static_cast<std::size_t>(d) != 0)
    throw std::invalid_argument("write_samples_csv: ragged sample block");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# seed=" << seed << " model=" << model.to_json().dump() << "\n";
  char buf[32];
  for (std::size_t i = 0; i < samples.size(); i += d) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", samples[i + j]);
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

std::vector<double> read_samples_csv(const std::string& path, int& dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> values;
  std::string line;
  dim = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++cols;
    }
    if (dim == 0) dim = cols;
    if (cols != dim)
      throw std::invalid_argument("read_samples_csv: ragged row in " + path);
  }
  if (dim == 0) throw std::invalid_argument("read_samples_csv: no data rows");
  return values;
}

}  // namespace meanshift
