#pragma once

#include <span>
#include <vector>

namespace logconf {

/// Square compressed-sparse-row matrix with sorted, unique columns per row.
struct CsrMatrix {
  int n{0};
  std::vector<int> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  [[nodiscard]] int nnz() const { return static_cast<int>(col.size()); }
  /// Position of (row, column) in val, or -1 when outside the pattern.
  [[nodiscard]] int find(int row, int column) const;
  [[nodiscard]] double at(int row, int column) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
  /// Throws std::invalid_argument when the structural invariants fail.
  void validate() const;

  struct Triplet {
    int row;
    int col;
    double value;
  };
  /// Duplicates are summed.
  static CsrMatrix from_triplets(int n, std::vector<Triplet> triplets);
};

}  // namespace logconf
