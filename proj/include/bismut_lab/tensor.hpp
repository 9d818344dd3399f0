#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace bismut_lab {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

inline constexpr cd I_unit{0.0, 1.0};

/**
 * \brief Dense complex tensor of rank R with every index running over [0, n).
 *
 * Storage is row-major: the last index varies fastest.
 */
template <std::size_t R>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(int n) : n_(n), data_(count(n), cd{0.0, 0.0}) {}

  int dim() const { return n_; }
  std::size_t size() const { return data_.size(); }
  std::vector<cd>& data() { return data_; }
  const std::vector<cd>& data() const { return data_; }

  template <class... Idx>
  cd& operator()(Idx... idx) {
    static_assert(sizeof...(Idx) == R);
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <class... Idx>
  const cd& operator()(Idx... idx) const {
    static_assert(sizeof...(Idx) == R);
    return data_[offset({static_cast<int>(idx)...})];
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  Tensor& operator+=(const Tensor& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Tensor& operator*=(cd s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator*(cd s, Tensor a) { return a *= s; }

 private:
  static std::size_t count(int n) {
    std::size_t c = 1;
    for (std::size_t k = 0; k < R; ++k) c *= static_cast<std::size_t>(n);
    return c;
  }
  std::size_t offset(const std::array<int, R>& idx) const {
    std::size_t o = 0;
    for (std::size_t k = 0; k < R; ++k) o = o * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[k]);
    return o;
  }

  int n_ = 0;
  std::vector<cd> data_;
};

using Tensor3 = Tensor<3>;
using Tensor4 = Tensor<4>;

/** Max-abs difference of two equally shaped tensors. */
template <std::size_t R>
double max_abs_diff(const Tensor<R>& a, const Tensor<R>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

/** Residual relative to the reference scale, floored at one. */
template <std::size_t R>
double relative_residual(const Tensor<R>& a, const Tensor<R>& ref) {
  return max_abs_diff(a, ref) / std::max(1.0, ref.max_abs());
}

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double relative_residual(const Mat& a, const Mat& ref) {
  return max_abs(a - ref) / std::max(1.0, max_abs(ref));
}

}  // namespace bismut_lab
