#pragma once

#include <vector>

#include <Eigen/Dense>

#include "switchdiff/operator_model.hpp"

namespace switchdiff {

/// Eigendecomposition in the m-inner product.  Eigenvalues are sorted
/// descending; eigenvector columns are m-orthonormal, so the inverse of the
/// eigenvector matrix V is V^T M.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd mass;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

/// m-orthogonal projector: idempotent and self-adjoint in the m-inner
/// product, with trace equal to its rank.
struct Projector {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd mass;
  int rank = 0;
};

/// Computed via the similarity M^(1/2) A M^(-1/2), which is symmetric for a
/// valid OperatorModel.  Throws if the symmetrized matrix fails its symmetry
/// check or if an eigenvalue sits meaningfully above zero.
Spectrum eigendecompose(const OperatorModel& op);

/// Eigenvalues only (descending).  Tridiagonal operators take an O(n^2)
/// path, which keeps large one-dimensional meshes cheap.
Eigen::VectorXd eigenvalues_only(const OperatorModel& op);

/// e^{tA} for t >= 0 through the spectral calculus.  t == 0 returns the
/// identity exactly; eigenvalues are clamped to (-inf, 0] so the result is a
/// contraction in the m-norm by construction.
Eigen::MatrixXd evolve(const OperatorModel& op, double t);
Eigen::MatrixXd evolve(const Spectrum& spectrum, double t);

/// Projector onto the span of eigenvectors with |lambda| <= tol * max(1,
/// |lambda_min|).
Projector kernel_projector(const OperatorModel& op, double tol = 1e-9);
Projector kernel_projector(const Spectrum& spectrum, double tol = 1e-9);

/// Projector onto the intersection of the kernels, computed as the kernel of
/// the (negated PSD) sum of the operators.  All operators must share the
/// dimension and mass vector.
Projector intersection_projector(const std::vector<OperatorModel>& ops,
                                 double tol = 1e-9);

/// Rank-one projector onto constants in the m-inner product.
Projector constants_projector(const Eigen::VectorXd& mass);

/// Operator norm induced by ||.||_m: the largest singular value of
/// M^(1/2) B M^(-1/2).
double weighted_operator_norm(const Eigen::MatrixXd& matrix,
                              const Eigen::VectorXd& mass);

/// Largest eigenvalue strictly below the kernel band (the spectral gap,
/// a negative number).  Throws when every eigenvalue lies in the band.
double spectral_gap(const OperatorModel& op, double tol = 1e-9);

/// || P_m ... P_1 (I - P_K) ||_m for the given projector list, applied in
/// list order.  Strictly below 1 when the intersection of the ranges equals
/// the range of p_k.
double projector_product_contraction(const std::vector<Projector>& projectors,
                                     const Projector& p_k);

/// Behavior of t -> ||e^{tA} x||_m on a strictly increasing grid.
struct MonotonicityReport {
  bool fixed_vector = false;         // x is (numerically) a fixed point
  bool exactly_constant = false;     // norms constant to rounding
  bool strictly_decreasing = false;  // every step drops
  double min_relative_drop = 0.0;    // smallest per-step relative decrease
  std::vector<double> norms;

  /// Fixed vectors must stay constant, everything else must strictly decay.
  bool consistent() const {
    return fixed_vector ? exactly_constant : strictly_decreasing;
  }
};

MonotonicityReport monotonicity_check(const OperatorModel& op,
                                      const Eigen::VectorXd& x,
                                      const std::vector<double>& grid);

}  // namespace switchdiff
