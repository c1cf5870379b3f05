#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <vector>

namespace sswm {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// n cell-centred samples covering [-half_width, half_width]:
/// x_m = (m - n/2 + 1/2) * (2 half_width / n). Closed under negation.
template <typename Scalar = double>
VectorX<Scalar> centered_axis(Scalar half_width, Eigen::Index n) {
  VectorX<Scalar> axis(n);
  const Scalar step = Scalar(2) * half_width / Scalar(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    axis[m] = (Scalar(m) - Scalar(n) / Scalar(2) + Scalar(0.5)) * step;
  }
  return axis;
}

/// Strictly increasing with constant spacing to within `rel_tol`.
template <typename Derived>
bool is_uniform_axis(const Eigen::MatrixBase<Derived>& axis, double rel_tol = 1e-12) {
  using std::abs;
  const Eigen::Index n = axis.size();
  if (n < 2) return n == 1;
  const double step = double(axis[n - 1] - axis[0]) / double(n - 1);
  if (!(step > 0.0)) return false;
  for (Eigen::Index i = 1; i < n; ++i) {
    const double d = double(axis[i] - axis[i - 1]);
    if (!(d > 0.0) || abs(d - step) > rel_tol * abs(step) * double(n)) return false;
  }
  return true;
}

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

/// Deterministic pairwise (tree) summation.
template <typename T>
T pairwise_sum(const T* data, std::size_t n) {
  if (n == 0) return T(0);
  if (n <= 8) {
    T s = data[0];
    for (std::size_t i = 1; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.size());
}

template <typename Derived>
typename Derived::Scalar pairwise_sum(const Eigen::DenseBase<Derived>& m) {
  using T = typename Derived::Scalar;
  std::vector<T> flat(static_cast<std::size_t>(m.size()));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) flat[k++] = m(i, j);
  }
  return pairwise_sum(flat);
}

}  // namespace sswm
