#include "switchdiff/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace switchdiff {

namespace {

// M^(1/2) A M^(-1/2); symmetric whenever the model is valid.
Eigen::MatrixXd symmetrized(const OperatorModel& op) {
  const Eigen::VectorXd s = op.mass.cwiseSqrt();
  Eigen::MatrixXd tilde = op.matrix;
  for (int i = 0; i < tilde.rows(); ++i)
    for (int j = 0; j < tilde.cols(); ++j) tilde(i, j) *= s[i] / s[j];
  return tilde;
}

void check_symmetric(const Eigen::MatrixXd& tilde) {
  const double scale = std::max(1.0, tilde.cwiseAbs().maxCoeff());
  const double defect = (tilde - tilde.transpose()).cwiseAbs().maxCoeff();
  if (defect > 1e-11 * scale)
    throw std::invalid_argument(
        "operator fails the weighted symmetry check; not a valid model");
}

void check_negative_semidefinite(const Eigen::VectorXd& descending) {
  const double scale = std::max(1.0, std::abs(descending.minCoeff()));
  if (descending.size() > 0 && descending.maxCoeff() > 1e-7 * scale)
    throw std::invalid_argument(
        "operator has an eigenvalue above zero; not a dissipative model");
}

// 0 when sub- and superdiagonal capture all off-diagonal mass.
bool is_tridiagonal(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j)
      if (a(i, j) != 0.0 || a(j, i) != 0.0) return false;
  return true;
}

}  // namespace

Spectrum eigendecompose(const OperatorModel& op) {
  if (op.matrix.rows() != op.matrix.cols() || op.mass.size() != op.matrix.rows())
    throw std::invalid_argument("operator matrix and mass sizes are inconsistent");
  Eigen::MatrixXd tilde = symmetrized(op);
  check_symmetric(tilde);
  tilde = 0.5 * (tilde + tilde.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tilde);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed to converge");

  const int n = op.dim();
  Spectrum spec;
  spec.mass = op.mass;
  spec.eigenvalues = solver.eigenvalues().reverse();
  check_negative_semidefinite(spec.eigenvalues);
  const Eigen::VectorXd inv_s = op.mass.cwiseSqrt().cwiseInverse();
  spec.eigenvectors.resize(n, n);
  for (int k = 0; k < n; ++k)
    spec.eigenvectors.col(k) = inv_s.cwiseProduct(solver.eigenvectors().col(n - 1 - k));
  return spec;
}

Eigen::VectorXd eigenvalues_only(const OperatorModel& op) {
  Eigen::MatrixXd tilde = symmetrized(op);
  check_symmetric(tilde);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  if (is_tridiagonal(tilde)) {
    const int n = static_cast<int>(tilde.rows());
    Eigen::VectorXd diag = tilde.diagonal();
    Eigen::VectorXd sub(n - 1);
    for (int i = 0; i + 1 < n; ++i)
      sub[i] = 0.5 * (tilde(i + 1, i) + tilde(i, i + 1));
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  } else {
    tilde = 0.5 * (tilde + tilde.transpose().eval());
    solver.compute(tilde, Eigen::EigenvaluesOnly);
  }
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue computation failed to converge");
  Eigen::VectorXd descending = solver.eigenvalues().reverse();
  check_negative_semidefinite(descending);
  return descending;
}

Eigen::MatrixXd evolve(const Spectrum& spectrum, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be >= 0");
  const int n = spectrum.dim();
  if (t == 0.0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd factors(n);
  for (int k = 0; k < n; ++k)
    factors[k] = std::exp(t * std::min(spectrum.eigenvalues[k], 0.0));
  // V e^{t Lambda} V^T M; V^T M is the inverse of V in the m-inner product.
  return spectrum.eigenvectors * factors.asDiagonal() *
         spectrum.eigenvectors.transpose() * spectrum.mass.asDiagonal();
}

Eigen::MatrixXd evolve(const OperatorModel& op, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be >= 0");
  if (t == 0.0) return Eigen::MatrixXd::Identity(op.dim(), op.dim());
  return evolve(eigendecompose(op), t);
}

Projector kernel_projector(const Spectrum& spectrum, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
  const int n = spectrum.dim();
  const double scale =
      std::max(1.0, n > 0 ? std::abs(spectrum.eigenvalues.minCoeff()) : 0.0);
  const double band = tol * scale;

  Projector p;
  p.mass = spectrum.mass;
  p.matrix = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    if (std::abs(spectrum.eigenvalues[k]) > band) continue;
    ++p.rank;
    p.matrix.noalias() += spectrum.eigenvectors.col(k) *
                          spectrum.eigenvectors.col(k).transpose() *
                          spectrum.mass.asDiagonal();
  }
  return p;
}

Projector kernel_projector(const OperatorModel& op, double tol) {
  return kernel_projector(eigendecompose(op), tol);
}

Projector intersection_projector(const std::vector<OperatorModel>& ops,
                                 double tol) {
  if (ops.empty())
    throw std::invalid_argument("operator list must be non-empty");
  const int n = ops.front().dim();
  for (const auto& op : ops) {
    if (op.dim() != n)
      throw std::invalid_argument("operators must share one dimension");
    const double mass_diff =
        (op.mass - ops.front().mass).cwiseAbs().maxCoeff();
    if (mass_diff > 1e-12 * ops.front().mass.cwiseAbs().maxCoeff())
      throw std::invalid_argument("operators must share one mass vector");
  }

  // Each -A_j is positive semi-definite in the shared inner product, so the
  // kernel of the sum is exactly the intersection of the kernels.
  OperatorModel sum{Eigen::MatrixXd::Zero(n, n), ops.front().mass};
  for (const auto& op : ops) sum.matrix += op.matrix;
  return kernel_projector(sum, tol);
}

Projector constants_projector(const Eigen::VectorXd& mass) {
  const int n = static_cast<int>(mass.size());
  Projector p;
  p.mass = mass;
  p.rank = 1;
  p.matrix = Eigen::MatrixXd::Zero(n, n);
  const double total = mass.sum();
  for (int i = 0; i < n; ++i) p.matrix.row(i) = mass.transpose() / total;
  return p;
}

double weighted_operator_norm(const Eigen::MatrixXd& matrix,
                              const Eigen::VectorXd& mass) {
  if (matrix.rows() != matrix.cols() || mass.size() != matrix.rows())
    throw std::invalid_argument("matrix and mass sizes are inconsistent");
  const Eigen::VectorXd s = mass.cwiseSqrt();
  Eigen::MatrixXd conj = matrix;
  for (int i = 0; i < conj.rows(); ++i)
    for (int j = 0; j < conj.cols(); ++j) conj(i, j) *= s[i] / s[j];
  if (conj.rows() <= 2) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(conj);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(conj);
  return svd.singularValues()[0];
}

double spectral_gap(const OperatorModel& op, double tol) {
  const Eigen::VectorXd lambda = eigenvalues_only(op);
  const double scale = std::max(1.0, std::abs(lambda.minCoeff()));
  const double band = tol * scale;
  double gap = 0.0;
  bool found = false;
  for (int k = 0; k < lambda.size(); ++k) {
    if (lambda[k] >= -band) continue;
    if (!found || lambda[k] > gap) gap = lambda[k];
    found = true;
  }
  if (!found)
    throw std::invalid_argument(
        "all eigenvalues lie in the kernel band; the spectral gap is undefined");
  return gap;
}

double projector_product_contraction(const std::vector<Projector>& projectors,
                                     const Projector& p_k) {
  if (projectors.empty())
    throw std::invalid_argument("projector list must be non-empty");
  const int n = static_cast<int>(p_k.matrix.rows());
  for (const auto& p : projectors)
    if (p.matrix.rows() != n)
      throw std::invalid_argument("projectors must share one dimension");

  Eigen::MatrixXd acc =
      Eigen::MatrixXd::Identity(n, n) - p_k.matrix;  // complement first
  for (const auto& p : projectors) acc = p.matrix * acc;
  return weighted_operator_norm(acc, p_k.mass);
}

MonotonicityReport monotonicity_check(const OperatorModel& op,
                                      const Eigen::VectorXd& x,
                                      const std::vector<double>& grid) {
  if (grid.size() < 2)
    throw std::invalid_argument("time grid needs at least two points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0)
      throw std::invalid_argument("time grid must be nonnegative");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw std::invalid_argument("time grid must be strictly increasing");
  }
  if (x.size() != op.dim())
    throw std::invalid_argument("vector length must match the operator dimension");

  const Spectrum spec = eigendecompose(op);
  const Projector p = kernel_projector(spec);
  auto m_norm = [&](const Eigen::VectorXd& v) {
    return std::sqrt(v.dot(op.mass.cwiseProduct(v)));
  };

  MonotonicityReport report;
  const double x_norm = m_norm(x);
  report.fixed_vector = m_norm(p.matrix * x - x) <= 1e-12 * std::max(1.0, x_norm);
  report.norms.reserve(grid.size());
  for (double t : grid) report.norms.push_back(m_norm(evolve(spec, t) * x));

  double worst_span = 0.0;
  double min_drop = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < report.norms.size(); ++i) {
    const double drop = report.norms[i] - report.norms[i + 1];
    const double rel = report.norms[i] > 0.0 ? drop / report.norms[i] : 0.0;
    min_drop = std::min(min_drop, rel);
    worst_span = std::max(worst_span, std::abs(report.norms[i] - report.norms[0]));
  }
  worst_span = std::max(worst_span,
                        std::abs(report.norms.back() - report.norms.front()));
  report.min_relative_drop = min_drop;
  report.strictly_decreasing = min_drop > 0.0;
  report.exactly_constant = worst_span <= 1e-12 * std::max(1.0, report.norms[0]);
  return report;
}

}  // namespace switchdiff
