#include "flywheel/math/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace flywheel::math {

namespace {

double softplus_stable(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); }

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
}

}  // namespace

Var Tape::push(Op op, Tensor value, int a, int b, double c0, double c1) {
  value.check_finite("Tape op");
  Node n;
  n.op = op;
  n.grad = Tensor::zeros_like(value);
  n.value = std::move(value);
  n.a = a;
  n.b = b;
  n.c0 = c0;
  n.c1 = c1;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || v.id >= size()) throw std::invalid_argument("Tape: invalid Var");
  return nodes_[static_cast<size_t>(v.id)];
}

Tape::Node& Tape::node(Var v) {
  if (!v.valid() || v.id >= size()) throw std::invalid_argument("Tape: invalid Var");
  return nodes_[static_cast<size_t>(v.id)];
}

Var Tape::leaf(Tensor value) { return push(Op::Leaf, std::move(value), -1, -1); }

Var Tape::matmul(Var a, Var b) {
  Tensor c = flywheel::math::matmul(value(a), value(b));
  return push(Op::MatMul, std::move(c), a.id, b.id);
}

Var Tape::add(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require_same_shape(ta, tb, "add");
  Tensor c = ta;
  for (int64_t i = 0; i < c.size(); ++i) c[i] += tb[i];
  return push(Op::Add, std::move(c), a.id, b.id);
}

Var Tape::add_rowvec(Var a, Var bias) {
  Tensor c = flywheel::math::add_rowvec(value(a), value(bias));
  return push(Op::AddRow, std::move(c), a.id, bias.id);
}

Var Tape::sub(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require_same_shape(ta, tb, "sub");
  Tensor c = ta;
  for (int64_t i = 0; i < c.size(); ++i) c[i] -= tb[i];
  return push(Op::Sub, std::move(c), a.id, b.id);
}

Var Tape::mul(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require_same_shape(ta, tb, "mul");
  Tensor c = ta;
  for (int64_t i = 0; i < c.size(); ++i) c[i] *= tb[i];
  return push(Op::Mul, std::move(c), a.id, b.id);
}

Var Tape::emin(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require_same_shape(ta, tb, "emin");
  Tensor c = ta;
  for (int64_t i = 0; i < c.size(); ++i) c[i] = std::min(ta[i], tb[i]);
  return push(Op::Min, std::move(c), a.id, b.id);
}

Var Tape::scale(Var a, double k) {
  Tensor c = value(a);
  for (int64_t i = 0; i < c.size(); ++i) c[i] *= k;
  return push(Op::Scale, std::move(c), a.id, -1, k);
}

Var Tape::add_const(Var a, double k) {
  Tensor c = value(a);
  for (int64_t i = 0; i < c.size(); ++i) c[i] += k;
  return push(Op::AddConst, std::move(c), a.id, -1, k);
}

Var Tape::tanh(Var a) {
  Tensor c = value(a);
  for (int64_t i = 0; i < c.size(); ++i) c[i] = std::tanh(c[i]);
  return push(Op::Tanh, std::move(c), a.id, -1);
}

Var Tape::relu(Var a) {
  Tensor c = value(a);
  for (int64_t i = 0; i < c.size(); ++i) c[i] = std::max(0.0, c[i]);
  return push(Op::Relu, std::move(c), a.id, -1);
}

Var Tape::softplus(Var a) {
  Tensor c = value(a);
  for (int64_t i = 0; i < c.size(); ++i) c[i] = softplus_stable(c[i]);
  return push(Op::Softplus, std::move(c), a.id, -1);
}

Var Tape::exp(Var a) {
  Tensor c = value(a);
  for (int64_t i = 0; i < c.size(); ++i) c[i] = std::exp(c[i]);
  return push(Op::Exp, std::move(c), a.id, -1);
}

Var Tape::log(Var a) {
  Tensor c = value(a);
  for (int64_t i = 0; i < c.size(); ++i) {
    if (c[i] <= 0.0) throw std::invalid_argument("log: non-positive input");
    c[i] = std::log(c[i]);
  }
  return push(Op::Log, std::move(c), a.id, -1);
}

Var Tape::clamp(Var a, double lo, double hi) {
  if (lo >= hi) throw std::invalid_argument("clamp: lo must be < hi");
  Tensor c = value(a);
  for (int64_t i = 0; i < c.size(); ++i) c[i] = std::clamp(c[i], lo, hi);
  return push(Op::Clamp, std::move(c), a.id, -1, lo, hi);
}

Var Tape::concat_cols(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.rows() != tb.rows()) {
    throw std::invalid_argument("concat_cols: row mismatch " + ta.shape_str() + " vs " + tb.shape_str());
  }
  Tensor c({ta.rows(), ta.cols() + tb.cols()});
  for (int i = 0; i < ta.rows(); ++i) {
    for (int j = 0; j < ta.cols(); ++j) c(i, j) = ta(i, j);
    for (int j = 0; j < tb.cols(); ++j) c(i, ta.cols() + j) = tb(i, j);
  }
  return push(Op::ConcatCols, std::move(c), a.id, b.id);
}

Var Tape::sum_rows(Var a) {
  const Tensor& ta = value(a);
  Tensor c({ta.rows(), 1});
  for (int i = 0; i < ta.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < ta.cols(); ++j) s += ta(i, j);
    c(i, 0) = s;
  }
  return push(Op::SumRows, std::move(c), a.id, -1);
}

Var Tape::reduce_sum(Var a) {
  double s = 0.0;
  for (double x : value(a).values()) s += x;
  return push(Op::SumAll, Tensor::scalar(s), a.id, -1);
}

Var Tape::reduce_mean(Var a) {
  double s = 0.0;
  for (double x : value(a).values()) s += x;
  const auto n = static_cast<double>(value(a).size());
  return push(Op::MeanAll, Tensor::scalar(s / n), a.id, -1, n);
}

void Tape::backward(Var loss) {
  Node& top = node(loss);
  if (top.value.size() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar, got shape " + top.value.shape_str());
  }
  top.grad[0] = 1.0;
  for (int i = loss.id; i >= 0; --i) backprop(nodes_[static_cast<size_t>(i)]);
}

void Tape::backprop(const Node& n) {
  if (n.op == Op::Leaf) return;
  Tensor& ga = nodes_[static_cast<size_t>(n.a)].grad;
  const Tensor& va = nodes_[static_cast<size_t>(n.a)].value;
  const Tensor& g = n.grad;

  switch (n.op) {
    case Op::MatMul: {
      const Tensor& vb = nodes_[static_cast<size_t>(n.b)].value;
      Tensor& gb = nodes_[static_cast<size_t>(n.b)].grad;
      const int m = va.rows(), k = va.cols(), nn = vb.cols();
      // dA += dC * B^T
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < nn; ++j) {
          const double gij = g(i, j);
          if (gij == 0.0) continue;
          for (int kk = 0; kk < k; ++kk) ga(i, kk) += gij * vb(kk, j);
        }
      }
      // dB += A^T * dC
      for (int kk = 0; kk < k; ++kk) {
        for (int i = 0; i < m; ++i) {
          const double aik = va(i, kk);
          if (aik == 0.0) continue;
          for (int j = 0; j < nn; ++j) gb(kk, j) += aik * g(i, j);
        }
      }
      break;
    }
    case Op::Add: {
      Tensor& gb = nodes_[static_cast<size_t>(n.b)].grad;
      for (int64_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i];
        gb[i] += g[i];
      }
      break;
    }
    case Op::AddRow: {
      Tensor& gb = nodes_[static_cast<size_t>(n.b)].grad;
      for (int i = 0; i < n.value.rows(); ++i) {
        for (int j = 0; j < n.value.cols(); ++j) {
          ga(i, j) += g(i, j);
          gb(0, j) += g(i, j);
        }
      }
      break;
    }
    case Op::Sub: {
      Tensor& gb = nodes_[static_cast<size_t>(n.b)].grad;
      for (int64_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i];
        gb[i] -= g[i];
      }
      break;
    }
    case Op::Mul: {
      const Tensor& vb = nodes_[static_cast<size_t>(n.b)].value;
      Tensor& gb = nodes_[static_cast<size_t>(n.b)].grad;
      for (int64_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i] * vb[i];
        gb[i] += g[i] * va[i];
      }
      break;
    }
    case Op::Min: {
      const Tensor& vb = nodes_[static_cast<size_t>(n.b)].value;
      Tensor& gb = nodes_[static_cast<size_t>(n.b)].grad;
      for (int64_t i = 0; i < g.size(); ++i) {
        if (va[i] <= vb[i]) {
          ga[i] += g[i];
        } else {
          gb[i] += g[i];
        }
      }
      break;
    }
    case Op::Scale:
      for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.c0;
      break;
    case Op::AddConst:
      for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      break;
    case Op::Tanh:
      for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
      break;
    case Op::Relu:
      for (int64_t i = 0; i < g.size(); ++i) ga[i] += va[i] > 0.0 ? g[i] : 0.0;
      break;
    case Op::Softplus:
      for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] / (1.0 + std::exp(-va[i]));
      break;
    case Op::Exp:
      for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.value[i];
      break;
    case Op::Log:
      for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] / va[i];
      break;
    case Op::Clamp:
      for (int64_t i = 0; i < g.size(); ++i) {
        if (va[i] > n.c0 && va[i] < n.c1) ga[i] += g[i];
      }
      break;
    case Op::ConcatCols: {
      Tensor& gb = nodes_[static_cast<size_t>(n.b)].grad;
      const int ca = va.cols();
      for (int i = 0; i < n.value.rows(); ++i) {
        for (int j = 0; j < ca; ++j) ga(i, j) += g(i, j);
        for (int j = 0; j < gb.cols(); ++j) gb(i, j) += g(i, ca + j);
      }
      break;
    }
    case Op::SumRows:
      for (int i = 0; i < va.rows(); ++i) {
        for (int j = 0; j < va.cols(); ++j) ga(i, j) += g(i, 0);
      }
      break;
    case Op::SumAll:
      for (int64_t i = 0; i < va.size(); ++i) ga[i] += g[0];
      break;
    case Op::MeanAll:
      for (int64_t i = 0; i < va.size(); ++i) ga[i] += g[0] / n.c0;
      break;
    case Op::Leaf:
      break;
  }
}

}  // namespace flywheel::math
