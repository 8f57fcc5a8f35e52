#include "vproj/finite_diff.hpp"

#include <algorithm>
#include <stdexcept>

namespace vproj {

double finite_difference_step(const DenseVector& a) {
  return 1e-6 * std::max(1.0, norm_inf(a));
}

DenseMatrix finite_difference_jacobian(const std::function<DenseVector(const DenseVector&)>& f,
                                       const DenseVector& a, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_jacobian: h must be positive");
  const std::size_t k = a.size();
  DenseVector probe = a;

  const auto eval = [&](std::size_t coord) {
    DenseVector value = f(probe);
    if (auto bad = first_nonfinite(value))
      throw std::invalid_argument("finite_difference_jacobian: non-finite f while perturbing coordinate " +
                                  std::to_string(coord) + " (output index " + std::to_string(*bad) + ")");
    return value;
  };

  DenseMatrix jac;
  for (std::size_t j = 0; j < k; ++j) {
    const double saved = probe[j];
    probe[j] = saved + h;
    const DenseVector fp = eval(j);
    probe[j] = saved - h;
    const DenseVector fm = eval(j);
    probe[j] = saved;

    if (fp.size() != fm.size())
      throw std::invalid_argument("finite_difference_jacobian: inconsistent output length");
    if (jac.empty()) jac = DenseMatrix(fp.size(), k);
    for (std::size_t i = 0; i < fp.size(); ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return jac;
}

}  // namespace vproj
