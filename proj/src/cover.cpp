#include "meanshift/cover.hpp"

#include <cmath>
#include <stdexcept>

#include "meanshift/distributions.hpp"
#include "meanshift/errors.hpp"

namespace meanshift {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double witness_norm_bound(double deriv_l1, double delta, int dim) {
  if (!(deriv_l1 > 0.0) || !(delta > 0.0) || dim < 1)
    throw std::invalid_argument("witness_norm_bound: bad arguments");
  return std::sqrt(static_cast<double>(dim)) * deriv_l1 / (kTwoPi * delta);
}

Cover build_cover(double radius, double resolution, int dim,
                  std::size_t max_points) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("build_cover: dim must be 1, 2, or 3");
  if (!(radius >= 0.0)) throw std::invalid_argument("build_cover: radius < 0");
  if (!(resolution > 0.0))
    throw std::invalid_argument("build_cover: resolution must be positive");

  const double pitch = 2.0 * resolution / std::sqrt(static_cast<double>(dim));
  const double reach = radius + resolution;
  const long long k = static_cast<long long>(std::floor(reach / pitch));
  const double side = 2.0 * static_cast<double>(k) + 1.0;
  double predicted = 1.0;
  for (int j = 0; j < dim; ++j) predicted *= side;
  if (predicted > static_cast<double>(max_points))
    throw resource_error("build_cover: grid needs about " +
                         std::to_string(predicted) + " points, cap is " +
                         std::to_string(max_points));

  Cover c;
  c.dim = dim;
  c.radius = radius;
  c.resolution = resolution;
  std::vector<long long> idx(dim, -k);
  std::vector<double> p(dim);
  while (true) {
    double s = 0.0;
    for (int j = 0; j < dim; ++j) {
      p[j] = pitch * static_cast<double>(idx[j]);
      s += p[j] * p[j];
    }
    if (s <= reach * reach * (1.0 + 1e-15)) c.points.push_back(p);
    int j = dim - 1;
    while (j >= 0 && idx[j] == k) {
      idx[j] = -k;
      --j;
    }
    if (j < 0) break;
    ++idx[j];
  }
  return c;
}

nlohmann::json Cover::to_json() const {
  return {{"dim", dim},
          {"radius", radius},
          {"resolution", resolution},
          {"points", points}};
}

Cover Cover::from_json(const nlohmann::json& j) {
  Cover c;
  c.dim = j.at("dim").get<int>();
  c.radius = j.at("radius").get<double>();
  c.resolution = j.at("resolution").get<double>();
  c.points = j.at("points").get<std::vector<std::vector<double>>>();
  return c;
}

}  // namespace meanshift
