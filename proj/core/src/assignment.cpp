#include "shapespace/registration.hpp"

#include <limits>
#include <vector>

namespace shapespace {

// Jonker-Volgenant shortest augmenting path assignment, O(n^3).
// Potentials keep reduced costs nonnegative, so each augmentation is a
// Dijkstra pass over one row's alternating tree.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw ShapeMismatchError("solve_assignment: cost must be square");
  if (n == 0) return {};

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> col_to_row(n + 1, n);  // n = unassigned sentinel
  std::vector<int> way(n + 1, 0);

  for (int row = 0; row < n; ++row) {
    int j0 = n;
    col_to_row[j0] = row;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = col_to_row[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[col_to_row[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_to_row[j0] != n);
    // Augment along the alternating path back to the virtual column.
    do {
      const int j1 = way[j0];
      col_to_row[j0] = col_to_row[j1];
      j0 = j1;
    } while (j0 != n);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 0; j < n; ++j)
    if (col_to_row[j] != n) row_to_col[col_to_row[j]] = j;
  return row_to_col;
}

}  // namespace shapespace
