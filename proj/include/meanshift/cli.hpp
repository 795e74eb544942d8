#pragma once

#include <string>
#include <vector>

namespace meanshift {

// Entry point shared by the binary and the tests. Returns the process exit
// code: 0 on success, 1 on usage or validation errors, 2 when a computation
// reports an infeasible configuration or a resource cap.
int run_cli(const std::vector<std::string>& args);

}  // namespace meanshift
