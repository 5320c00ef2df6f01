#include "ionpred/ridge.hpp"

#include <cmath>
#include <stdexcept>

namespace ionpred::numerics {

namespace {

// In-place lower Cholesky factor of a symmetric positive definite matrix.
DenseMatrix cholesky(const DenseMatrix& a) {
  const int n = a.rows;
  DenseMatrix l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = a.at(i, j);
      for (int k = 0; k < j; ++k) sum -= l.at(i, k) * l.at(j, k);
      if (i == j) {
        if (!(sum > 0.0)) {
          throw std::runtime_error("cholesky: non-positive pivot (corrupt or non-PD input)");
        }
        l.at(i, j) = std::sqrt(sum);
      } else {
        l.at(i, j) = sum / l.at(j, j);
      }
    }
  }
  return l;
}

// Solve (L L^T) w = b for one column b, forward then backward substitution.
void cholesky_solve_column(const DenseMatrix& l, std::vector<double>& b) {
  const int n = l.rows;
  for (int i = 0; i < n; ++i) {
    double sum = b[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) sum -= l.at(i, k) * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = sum / l.at(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double sum = b[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) sum -= l.at(k, i) * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = sum / l.at(i, i);
  }
}

DenseMatrix solve_all(const DenseMatrix& l, const DenseMatrix& b) {
  DenseMatrix w(b.rows, b.cols);
  std::vector<double> col(static_cast<std::size_t>(b.rows));
  for (int c = 0; c < b.cols; ++c) {
    for (int r = 0; r < b.rows; ++r) col[static_cast<std::size_t>(r)] = b.at(r, c);
    cholesky_solve_column(l, col);
    for (int r = 0; r < b.rows; ++r) w.at(r, c) = col[static_cast<std::size_t>(r)];
  }
  return w;
}

}  // namespace

DenseMatrix ridge_solve(const DenseMatrix& x, const DenseMatrix& h, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ridge_solve: lambda must be > 0");
  if (x.rows != h.rows) throw std::invalid_argument("ridge_solve: X and H row counts differ");

  DenseMatrix g = gram(x);
  for (int i = 0; i < g.rows; ++i) g.at(i, i) += lambda;
  const DenseMatrix b = transpose_times(x, h);

  const DenseMatrix l = cholesky(g);
  DenseMatrix w = solve_all(l, b);

  // One refinement pass: solve G dw = (B - G w) and correct.
  DenseMatrix resid = matmul(g, w);
  for (std::size_t i = 0; i < resid.data.size(); ++i) resid.data[i] = b.data[i] - resid.data[i];
  const DenseMatrix dw = solve_all(l, resid);
  for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] += dw.data[i];
  return w;
}

double ridge_objective(const DenseMatrix& x, const DenseMatrix& h, const DenseMatrix& w,
                       double lambda) {
  const DenseMatrix fit = matmul(x, w);
  double obj = 0.0;
  for (std::size_t i = 0; i < fit.data.size(); ++i) {
    const double d = fit.data[i] - h.data[i];
    obj += d * d;
  }
  for (double v : w.data) obj += lambda * v * v;
  return obj;
}

double ridge_residual(const DenseMatrix& x, const DenseMatrix& h, const DenseMatrix& w,
                      double lambda) {
  DenseMatrix g = gram(x);
  for (int i = 0; i < g.rows; ++i) g.at(i, i) += lambda;
  const DenseMatrix b = transpose_times(x, h);
  const DenseMatrix gw = matmul(g, w);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < b.data.size(); ++i) {
    const double d = gw.data[i] - b.data[i];
    num += d * d;
    den += b.data[i] * b.data[i];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace ionpred::numerics
