#include "switchdiff/operator_model.hpp"

#include <cmath>
#include <stdexcept>

namespace switchdiff {

void OperatorModel::validate(double sym_tol) const {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("operator matrix must be square");
  if (mass.size() != matrix.rows())
    throw std::invalid_argument("mass vector length must match the matrix dimension");
  if (!matrix.allFinite() || !mass.allFinite())
    throw std::invalid_argument("operator entries must be finite");
  for (int v = 0; v < mass.size(); ++v)
    if (mass[v] <= 0.0)
      throw std::invalid_argument("mass entries must be strictly positive");

  // Weighted symmetry m(v) A[v][w] == m(w) A[w][v], entrywise relative with
  // an absolute fallback at the overall scale.
  const int n = dim();
  double scale = 0.0;
  for (int v = 0; v < n; ++v)
    for (int w = 0; w < n; ++w)
      scale = std::max(scale, std::abs(mass[v] * matrix(v, w)));
  for (int v = 0; v < n; ++v) {
    for (int w = v + 1; w < n; ++w) {
      const double a = mass[v] * matrix(v, w);
      const double b = mass[w] * matrix(w, v);
      const double bound = sym_tol * std::max({std::abs(a), std::abs(b), scale});
      if (std::abs(a - b) > bound)
        throw std::invalid_argument(
            "operator is not self-adjoint in the weighted inner product");
    }
  }
}

}  // namespace switchdiff
