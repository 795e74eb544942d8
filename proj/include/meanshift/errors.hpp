#pragma once

#include <stdexcept>
#include <string>

namespace meanshift {

// A computation would exceed an explicit size or budget cap.
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// The requested configuration admits no valid construction.
class infeasible_error : public std::runtime_error {
 public:
  explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace meanshift
