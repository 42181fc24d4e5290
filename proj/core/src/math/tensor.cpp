#include "flywheel/math/tensor.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flywheel::math {

namespace {
int64_t product(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  for (int d : shape_) {
    if (d <= 0) throw std::invalid_argument("Tensor: dimensions must be positive, got " + shape_str());
  }
  if (shape_.empty() || shape_.size() > 2) {
    throw std::invalid_argument("Tensor: rank must be 1 or 2");
  }
  values_.assign(static_cast<size_t>(product(shape_)), 0.0);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> values) : Tensor(std::move(shape)) {
  if (static_cast<int64_t>(values.size()) != size()) {
    throw std::invalid_argument("Tensor: value count " + std::to_string(values.size()) +
                                " does not match shape " + shape_str());
  }
  values_ = std::move(values);
  check_finite("Tensor construction");
}

Tensor Tensor::row(std::vector<double> v) {
  const int n = static_cast<int>(v.size());
  return Tensor({1, n}, std::move(v));
}

int Tensor::rows() const { return rank() == 2 ? shape_[0] : 1; }
int Tensor::cols() const { return rank() == 2 ? shape_[1] : shape_[0]; }

double Tensor::item() const {
  if (size() != 1) throw std::invalid_argument("Tensor::item: tensor has " + std::to_string(size()) + " elements");
  return values_[0];
}

void Tensor::fill(double v) {
  for (auto& x : values_) x = v;
}

void Tensor::check_finite(const char* context) const {
  for (double x : values_) {
    if (!std::isfinite(x)) {
      throw std::runtime_error(std::string(context) + ": non-finite value in tensor of shape " + shape_str());
    }
  }
}

std::string Tensor::shape_str() const {
  std::string s = "(";
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape_[i]);
  }
  return s + ")";
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: shapes " + a.shape_str() + " x " + b.shape_str() +
                                " are not conformable");
  }
  const int m = a.rows(), k = a.cols(), n = b.cols();
  Tensor c({m, n});
  // ikj ordering keeps the inner loop contiguous in both b and c.
  for (int i = 0; i < m; ++i) {
    for (int kk = 0; kk < k; ++kk) {
      const double aik = a(i, kk);
      if (aik == 0.0) continue;
      const double* brow = &b.values()[static_cast<size_t>(kk) * n];
      double* crow = &c.values()[static_cast<size_t>(i) * n];
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Tensor add_rowvec(const Tensor& a, const Tensor& bias) {
  if (bias.rows() != 1 || bias.cols() != a.cols()) {
    throw std::invalid_argument("add_rowvec: bias " + bias.shape_str() + " does not broadcast over " +
                                a.shape_str());
  }
  Tensor c = a;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) c(i, j) += bias(0, j);
  }
  return c;
}

}  // namespace flywheel::math
