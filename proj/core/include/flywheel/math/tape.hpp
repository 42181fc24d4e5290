#pragma once

#include <vector>

#include "flywheel/math/tensor.hpp"

namespace flywheel::math {

/// Handle to a tensor recorded on a Tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode autodiff over a flat operation record. Operations append in
/// forward order; backward() walks the record in exact reverse order and
/// accumulates gradients into zero-initialized per-node buffers.
///
/// A Tape is confined to one thread and usually lives for a single
/// forward/backward pass.
class Tape {
 public:
  Var leaf(Tensor value);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var add_rowvec(Var a, Var bias);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var emin(Var a, Var b);
  Var scale(Var a, double k);
  Var add_const(Var a, double k);
  Var tanh(Var a);
  Var relu(Var a);
  Var softplus(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var clamp(Var a, double lo, double hi);
  Var concat_cols(Var a, Var b);
  Var sum_rows(Var a);      // (B,D) -> (B,1)
  Var reduce_sum(Var a);    // -> (1,1)
  Var reduce_mean(Var a);   // -> (1,1)
  Var square(Var a) { return mul(a, a); }

  /// Populates gradients for every node reachable from `loss`; unreachable
  /// leaves keep zero gradients. `loss` must be a scalar.
  void backward(Var loss);

  const Tensor& value(Var v) const { return node(v).value; }
  const Tensor& grad(Var v) const { return node(v).grad; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  enum class Op {
    Leaf, MatMul, Add, AddRow, Sub, Mul, Min, Scale, AddConst,
    Tanh, Relu, Softplus, Exp, Log, Clamp, ConcatCols, SumRows, SumAll, MeanAll,
  };

  struct Node {
    Op op;
    Tensor value;
    Tensor grad;
    int a = -1;
    int b = -1;
    double c0 = 0.0;
    double c1 = 0.0;
  };

  Var push(Op op, Tensor value, int a, int b, double c0 = 0.0, double c1 = 0.0);
  const Node& node(Var v) const;
  Node& node(Var v);
  void backprop(const Node& n);

  std::vector<Node> nodes_;
};

}  // namespace flywheel::math
