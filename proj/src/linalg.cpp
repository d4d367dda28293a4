#include "gmcr/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace gmcr::linalg {

template <int N>
SymmetricEigen<N> jacobi_eigen(const Eigen::Matrix<double, N, N>& m) {
  using Mat = Eigen::Matrix<double, N, N>;
  Mat a = m.template selfadjointView<Eigen::Upper>();
  Mat v = Mat::Identity();

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) off += a(p, q) * a(p, q);
    if (off == 0.0 || off <= 1e-34 * a.squaredNorm()) break;

    for (int p = 0; p < N; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < N; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < N; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < N; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, N> idx;
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return a(x, x) > a(y, y); });
  SymmetricEigen<N> out;
  for (int k = 0; k < N; ++k) {
    out.values[k] = a(idx[k], idx[k]);
    out.vectors.col(k) = v.col(idx[k]);
  }
  return out;
}

template SymmetricEigen<3> jacobi_eigen<3>(const Eigen::Matrix<double, 3, 3>&);
template SymmetricEigen<4> jacobi_eigen<4>(const Eigen::Matrix<double, 4, 4>&);

}  // namespace gmcr::linalg
