#include "rbfpu/kernels.hpp"

#include <string>

#include "rbfpu/errors.hpp"

namespace rbfpu {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::imq:
      return "imq";
    case KernelFamily::m2:
      return "m2";
    case KernelFamily::w2:
      return "w2";
  }
  return "?";
}

KernelFamily parse_kernel_family(std::string_view token) {
  if (token == "imq") return KernelFamily::imq;
  if (token == "m2") return KernelFamily::m2;
  if (token == "w2") return KernelFamily::w2;
  throw UsageError("unknown kernel family '" + std::string(token) + "' (expected imq, m2 or w2)");
}

double base_phi(KernelFamily family, double s) {
  if (!std::isfinite(s) || s < 0.0)
    throw UsageError("base_phi: scaled radius must be finite and nonnegative");
  return phi(family, s);
}

AnisotropicScale::AnisotropicScale(Point eps) : eps_(std::move(eps)) {
  if (eps_.size() == 0) throw UsageError("anisotropic scale: empty");
  if (!eps_.allFinite() || (eps_.array() <= 0.0).any())
    throw UsageError("anisotropic scale: entries must be positive and finite");
}

AnisotropicScale AnisotropicScale::isotropic(Index dim, double eps) {
  return AnisotropicScale(Point::Constant(dim, eps));
}

double eval_kernel(KernelFamily family, const AnisotropicScale& scale, PointRef x, PointRef y) {
  if (x.size() != scale.dim() || y.size() != scale.dim())
    throw UsageError("eval_kernel: dimension mismatch");
  return phi(family, scaled_distance(scale.values(), x, y));
}

Eigen::MatrixXd kernel_matrix(KernelFamily family, const AnisotropicScale& scale,
                              const PointMatrix& points) {
  std::vector<Index> all(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) all[static_cast<std::size_t>(i)] = i;
  return kernel_matrix(family, scale, points, all);
}

Eigen::MatrixXd kernel_matrix(KernelFamily family, const AnisotropicScale& scale,
                              const PointMatrix& points, std::span<const Index> indices) {
  Eigen::MatrixXd a;
  kernel_matrix_into(family, scale, points, indices, a);
  return a;
}

void kernel_matrix_into(KernelFamily family, const AnisotropicScale& scale,
                        const PointMatrix& points, std::span<const Index> indices,
                        Eigen::MatrixXd& out) {
  if (points.cols() != scale.dim()) throw UsageError("kernel_matrix: dimension mismatch");
  const auto n = static_cast<Index>(indices.size());
  out.resize(n, n);
  const Point& eps = scale.values();
  for (Index i = 0; i < n; ++i) {
    const auto xi = points.row(indices[static_cast<std::size_t>(i)]);
    out(i, i) = phi(family, 0.0);
    for (Index k = 0; k < i; ++k) {
      const double v = phi(family, scaled_distance(eps, xi, points.row(indices[static_cast<std::size_t>(k)])));
      out(i, k) = v;
      out(k, i) = v;
    }
  }
}

}  // namespace rbfpu
