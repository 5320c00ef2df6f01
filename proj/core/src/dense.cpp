#include "ionpred/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace ionpred::numerics {

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows_in) {
  if (rows_in.empty()) return {};
  DenseMatrix m(static_cast<int>(rows_in.size()), static_cast<int>(rows_in.front().size()));
  for (int r = 0; r < m.rows; ++r) {
    if (static_cast<int>(rows_in[r].size()) != m.cols) {
      throw std::invalid_argument("from_rows: ragged input");
    }
    for (int c = 0; c < m.cols; ++c) m.at(r, c) = rows_in[r][c];
  }
  return m;
}

DenseMatrix gram(const DenseMatrix& a) {
  DenseMatrix g(a.cols, a.cols);
  for (int r = 0; r < a.rows; ++r) {
    const double* row = &a.data[static_cast<std::size_t>(r) * a.cols];
    for (int i = 0; i < a.cols; ++i) {
      const double vi = row[i];
      if (vi == 0.0) continue;
      double* grow = &g.data[static_cast<std::size_t>(i) * a.cols];
      for (int j = i; j < a.cols; ++j) grow[j] += vi * row[j];
    }
  }
  for (int i = 0; i < a.cols; ++i) {
    for (int j = 0; j < i; ++j) g.at(i, j) = g.at(j, i);
  }
  return g;
}

DenseMatrix transpose_times(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("transpose_times: row mismatch");
  DenseMatrix out(a.cols, b.cols);
  for (int r = 0; r < a.rows; ++r) {
    const double* arow = &a.data[static_cast<std::size_t>(r) * a.cols];
    const double* brow = &b.data[static_cast<std::size_t>(r) * b.cols];
    for (int i = 0; i < a.cols; ++i) {
      const double vi = arow[i];
      if (vi == 0.0) continue;
      double* orow = &out.data[static_cast<std::size_t>(i) * b.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += vi * brow[j];
    }
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: dimension mismatch");
  DenseMatrix out(a.rows, b.cols);
  for (int r = 0; r < a.rows; ++r) {
    const double* arow = &a.data[static_cast<std::size_t>(r) * a.cols];
    double* orow = &out.data[static_cast<std::size_t>(r) * b.cols];
    for (int k = 0; k < a.cols; ++k) {
      const double v = arow[k];
      if (v == 0.0) continue;
      const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += v * brow[j];
    }
  }
  return out;
}

std::vector<double> vec_mat(const std::vector<double>& v, const DenseMatrix& m) {
  if (static_cast<int>(v.size()) != m.rows) throw std::invalid_argument("vec_mat: dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(m.cols), 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double vi = v[static_cast<std::size_t>(i)];
    if (vi == 0.0) continue;
    const double* row = &m.data[static_cast<std::size_t>(i) * m.cols];
    for (int j = 0; j < m.cols; ++j) out[static_cast<std::size_t>(j)] += vi * row[j];
  }
  return out;
}

double frobenius_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.data) s += v * v;
  return std::sqrt(s);
}

}  // namespace ionpred::numerics
