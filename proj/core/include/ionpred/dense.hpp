#pragma once

#include <cstddef>
#include <vector>

namespace ionpred::numerics {

// Row-major dense matrix of doubles. Small and value-semantic; every kernel
// in this project is O(d^3) at worst with d <= a few hundred.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows_in);
};

// out = A^T * A  (cols x cols)
DenseMatrix gram(const DenseMatrix& a);

// out = A^T * B
DenseMatrix transpose_times(const DenseMatrix& a, const DenseMatrix& b);

// out = A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

// row vector v (length = m.rows) times m -> length m.cols
std::vector<double> vec_mat(const std::vector<double>& v, const DenseMatrix& m);

double frobenius_norm(const DenseMatrix& m);

}  // namespace ionpred::numerics
