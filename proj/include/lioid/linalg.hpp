#pragma once

#include <optional>
#include <vector>

#include "poly.hpp"

namespace lioid {

/// Dense exact matrix over Q, row major.
using QMat = std::vector<std::vector<Rat>>;

inline int matrix_rank(QMat a) {
  int rows = static_cast<int>(a.size());
  int cols = rows ? static_cast<int>(a[0].size()) : 0;
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (a[r][col] != 0) { pivot = r; break; }
    if (pivot < 0) continue;
    std::swap(a[rank], a[pivot]);
    Rat inv = 1 / a[rank][col];
    for (int c = col; c < cols; ++c) a[rank][c] *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || a[r][col] == 0) continue;
      Rat f = a[r][col];
      for (int c = col; c < cols; ++c) a[r][c] -= f * a[rank][c];
    }
    ++rank;
  }
  return rank;
}

/// Solve A x = b exactly. Returns the canonical particular solution obtained
/// from reduced row echelon form with all free coordinates set to zero, or
/// nullopt when inconsistent. Deterministic for a fixed column order.
inline std::optional<std::vector<Rat>> solve_linear(QMat a, std::vector<Rat> b) {
  int rows = static_cast<int>(a.size());
  int cols = rows ? static_cast<int>(a[0].size()) : 0;
  std::vector<int> pivot_col;
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (a[r][col] != 0) { pivot = r; break; }
    if (pivot < 0) continue;
    std::swap(a[rank], a[pivot]);
    std::swap(b[rank], b[pivot]);
    Rat inv = 1 / a[rank][col];
    for (int c = col; c < cols; ++c) a[rank][c] *= inv;
    b[rank] *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || a[r][col] == 0) continue;
      Rat f = a[r][col];
      for (int c = col; c < cols; ++c) a[r][c] -= f * a[rank][c];
      b[r] -= f * b[rank];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  for (int r = rank; r < rows; ++r)
    if (b[r] != 0) return std::nullopt;
  std::vector<Rat> x(cols, Rat(0));
  for (int r = 0; r < rank; ++r) x[pivot_col[r]] = b[r];
  return x;
}

}  // namespace lioid
