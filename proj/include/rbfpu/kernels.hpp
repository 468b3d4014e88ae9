#pragma once

#include <cmath>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "rbfpu/geometry.hpp"

namespace rbfpu {

/// Strictly positive definite radial kernels.
enum class KernelFamily {
  imq,  ///< inverse multiquadric, (1 + s^2)^(-1/2)
  m2,   ///< Matern C2, e^(-s) (s + 1)
  w2,   ///< Wendland C2, max(1 - s, 0)^4 (4 s + 1)
};

/// Lowercase token used on the command line and in model files.
std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view token);

/// Profile value at the scaled radius s = |E (x - y)|, without argument checks.
inline double phi(KernelFamily family, double s) {
  switch (family) {
    case KernelFamily::imq:
      return 1.0 / std::sqrt(1.0 + s * s);
    case KernelFamily::m2:
      return std::exp(-s) * (s + 1.0);
    case KernelFamily::w2: {
      const double u = 1.0 - s;
      if (u <= 0.0) return 0.0;
      const double u2 = u * u;
      return u2 * u2 * (4.0 * s + 1.0);
    }
  }
  return 0.0;
}

/// Checked profile evaluation. Throws UsageError for negative or non-finite s.
double base_phi(KernelFamily family, double s);

/// Diagonal shape matrix E = diag(eps_1, ..., eps_M); entries positive and finite.
class AnisotropicScale {
 public:
  explicit AnisotropicScale(Point eps);
  static AnisotropicScale isotropic(Index dim, double eps);

  const Point& values() const { return eps_; }
  Index dim() const { return eps_.size(); }
  double operator[](Index m) const { return eps_[m]; }

 private:
  Point eps_;
};

/// Scaled radius sqrt(sum_m (eps_m (x_m - y_m))^2); no checks.
inline double scaled_distance(const Point& eps, PointRef x, PointRef y) {
  return (x - y).cwiseProduct(eps).norm();
}

/// phi(|E (x - y)|). Throws UsageError on dimension mismatch.
double eval_kernel(KernelFamily family, const AnisotropicScale& scale, PointRef x, PointRef y);

/// Symmetric N x N interpolation matrix of the given points.
Eigen::MatrixXd kernel_matrix(KernelFamily family, const AnisotropicScale& scale,
                              const PointMatrix& points);

/// Interpolation matrix of the subset points.row(indices[k]).
Eigen::MatrixXd kernel_matrix(KernelFamily family, const AnisotropicScale& scale,
                              const PointMatrix& points, std::span<const Index> indices);

/// Same as above, writing into `out` (resized as needed) to allow buffer reuse.
void kernel_matrix_into(KernelFamily family, const AnisotropicScale& scale,
                        const PointMatrix& points, std::span<const Index> indices,
                        Eigen::MatrixXd& out);

}  // namespace rbfpu
