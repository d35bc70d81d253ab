#pragma once

#include <Eigen/Dense>

namespace switchdiff {

/// A linear operator A on R^n that is self-adjoint with respect to the
/// weighted inner product (f, g)_m = sum_v m(v) f(v) g(v).
///
/// Validity means: m(v) A[v][w] == m(w) A[w][v] up to rounding, and the
/// spectrum lies in (-inf, 0].  Construction does not verify the spectral
/// half; eigendecompose() checks it when the spectrum is actually needed.
struct OperatorModel {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd mass;

  int dim() const { return static_cast<int>(matrix.rows()); }

  /// Structural validation: square matrix, matching strictly positive mass,
  /// weighted symmetry entrywise to `sym_tol` relative.
  void validate(double sym_tol = 1e-12) const;
};

}  // namespace switchdiff
