#pragma once

#include <vector>

namespace erm {

// Min-cost perfect assignment of n rows to m columns (n <= m), Hungarian
// algorithm with potentials, O(n^2 m). Returns the column chosen for each row.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace erm
