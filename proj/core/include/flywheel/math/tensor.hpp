#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flywheel::math {

/// Dense row-major tensor of 64-bit reals, rank 1 or 2. Value-semantic;
/// every public producer leaves only finite values behind.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor({1, 1}, {v}); }
  static Tensor row(std::vector<double> v);
  static Tensor zeros(int rows, int cols) { return Tensor({rows, cols}); }
  static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_); }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t size() const { return static_cast<int64_t>(values_.size()); }
  int rows() const;
  int cols() const;

  double& operator()(int r, int c) { return values_[static_cast<size_t>(r) * cols() + c]; }
  double operator()(int r, int c) const { return values_[static_cast<size_t>(r) * cols() + c]; }
  double& operator[](int64_t i) { return values_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return values_[static_cast<size_t>(i)]; }
  double item() const;

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  bool operator==(const Tensor& o) const { return shape_ == o.shape_ && values_ == o.values_; }

  void fill(double v);
  void check_finite(const char* context) const;
  std::string shape_str() const;

 private:
  std::vector<int> shape_;
  std::vector<double> values_;
};

/// C = A * B for 2-d tensors; throws on non-conformable shapes.
Tensor matmul(const Tensor& a, const Tensor& b);
/// Row-broadcast add: (B,D) + (1,D).
Tensor add_rowvec(const Tensor& a, const Tensor& bias);

}  // namespace flywheel::math
