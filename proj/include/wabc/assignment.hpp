#pragma once

#include <vector>

#include "wabc/types.hpp"

namespace wabc {

// Minimum-cost perfect matching on a dense n x n cost matrix via shortest
// augmenting paths with dual potentials (Jonker-Volgenant style), O(n^3).
// Ties are broken by the lowest column index, so the result is deterministic.
// Returns the optimal total cost; row_to_col[i] is the column matched to row i.
double solve_assignment(const Matrix& cost, std::vector<int>& row_to_col);

}  // namespace wabc
