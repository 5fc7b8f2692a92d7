#include "logconf/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace logconf {

int CsrMatrix::find(int row, int column) const {
  const auto first = col.begin() + row_ptr[row];
  const auto last = col.begin() + row_ptr[row + 1];
  const auto it = std::lower_bound(first, last, column);
  return (it != last && *it == column) ? static_cast<int>(it - col.begin()) : -1;
}

double CsrMatrix::at(int row, int column) const {
  const int k = find(row, column);
  return k < 0 ? 0.0 : val[k];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n);
  multiply(x, y);
  return y;
}

void CsrMatrix::validate() const {
  if (n < 0 || static_cast<int>(row_ptr.size()) != n + 1 || row_ptr.front() != 0) {
    throw std::invalid_argument("CsrMatrix: bad row offsets");
  }
  if (row_ptr.back() != nnz() || val.size() != col.size()) throw std::invalid_argument("CsrMatrix: size mismatch");
  for (int i = 0; i < n; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) throw std::invalid_argument("CsrMatrix: decreasing row offsets");
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col[k] < 0 || col[k] >= n) throw std::invalid_argument("CsrMatrix: column out of range");
      if (k > row_ptr[i] && col[k] <= col[k - 1]) throw std::invalid_argument("CsrMatrix: columns not sorted and unique");
    }
  }
}

CsrMatrix CsrMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  CsrMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  int last_row = -1;
  int last_col = -1;
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) throw std::invalid_argument("CsrMatrix: triplet out of range");
    if (t.row == last_row && t.col == last_col) {
      m.val.back() += t.value;
      continue;
    }
    m.col.push_back(t.col);
    m.val.push_back(t.value);
    m.row_ptr[t.row + 1] = static_cast<int>(m.col.size());
    last_row = t.row;
    last_col = t.col;
  }
  // rows without entries inherit the previous offset
  for (int i = 1; i <= n; ++i) m.row_ptr[i] = std::max(m.row_ptr[i], m.row_ptr[i - 1]);
  return m;
}

}  // namespace logconf
