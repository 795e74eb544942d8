#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

namespace meanshift {

// Frequencies where the base CF can stay above level delta all lie inside the
// ball of this radius: sqrt(dim) * deriv_l1 / (2 pi delta).
double witness_norm_bound(double deriv_l1, double delta, int dim);

// Finite point set whose points lie within radius + resolution of the origin
// and such that every point of the radius-ball is within resolution of it.
struct Cover {
  int dim = 1;
  double radius = 0.0;
  double resolution = 0.0;
  std::vector<std::vector<double>> points;  // lexicographically sorted

  nlohmann::json to_json() const;
  static Cover from_json(const nlohmann::json& j);
};

// Axis-aligned grid of pitch 2*resolution/sqrt(dim) centered at the origin,
// pruned to the ball of radius + resolution. dim restricted to {1, 2, 3};
// throws resource_error when the grid would exceed max_points.
Cover build_cover(double radius, double resolution, int dim,
                  std::size_t max_points = 10'000'000);

double norm2(std::span<const double> v);

}  // namespace meanshift
