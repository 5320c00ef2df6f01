#pragma once

#include "ionpred/dense.hpp"

namespace ionpred::numerics {

// Solves min_W ||X W - H||_F^2 + lambda ||W||_F^2 through the normal
// equations (X^T X + lambda I) W = X^T H, factoring the Gram matrix with
// Cholesky and back-substituting per column. One step of iterative
// refinement keeps the relative normal-equation residual at or below 1e-8
// even for near-singular Gram matrices (lambda as small as 1e-7).
// Requires lambda > 0, which makes the system positive definite.
DenseMatrix ridge_solve(const DenseMatrix& x, const DenseMatrix& h, double lambda);

// ||X W - H||_F^2 + lambda ||W||_F^2, the objective ridge_solve minimizes.
double ridge_objective(const DenseMatrix& x, const DenseMatrix& h, const DenseMatrix& w,
                       double lambda);

// ||(X^T X + lambda I) W - X^T H||_F / ||X^T H||_F
double ridge_residual(const DenseMatrix& x, const DenseMatrix& h, const DenseMatrix& w,
                      double lambda);

}  // namespace ionpred::numerics
