#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "flywheel/math/checkpoint.hpp"
#include "flywheel/math/nn.hpp"
#include "flywheel/math/optim.hpp"
#include "flywheel/math/rng.hpp"
#include "flywheel/math/tape.hpp"
#include "flywheel/math/tensor.hpp"

using namespace flywheel::math;

namespace {

// Central finite differences over a parameter vector; independent of the
// tape. `f` evaluates the scalar loss from current parameter values.
template <class F>
double fd_grad(F&& f, double& param, double h = 1e-5) {
  const double saved = param;
  param = saved + h;
  const double up = f();
  param = saved - h;
  const double down = f();
  param = saved;
  return (up - down) / (2.0 * h);
}

double rel_err(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-3});
  return std::abs(a - b) / denom;
}

}  // namespace

TEST_CASE("tensor basics and forward primitives") {
  Tensor eye({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  Tensor m({3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(matmul(eye, m) == m);

  Tape t;
  Var x = t.leaf(Tensor::scalar(0.0));
  CHECK(t.value(t.tanh(x)).item() == 0.0);

  Var v = t.leaf(Tensor::row({1, 2, 3}));
  CHECK(t.value(t.reduce_sum(v)).item() == 6.0);
  CHECK(t.value(t.reduce_mean(v)).item() == 2.0);

  CHECK_THROWS(matmul(Tensor({2, 3}), Tensor({2, 3})));
  CHECK_THROWS(Tensor({2, 2}, {1, 2, 3}));
}

TEST_CASE("backward on simple expressions") {
  Tape t;
  Var x = t.leaf(Tensor::scalar(3.0));
  Var loss = t.square(x);
  t.backward(loss);
  CHECK(t.grad(x).item() == doctest::Approx(6.0).epsilon(1e-12));

  // Parameter not reachable from the loss keeps a zero gradient.
  Tape t2;
  Var a = t2.leaf(Tensor::scalar(2.0));
  Var unused = t2.leaf(Tensor::scalar(5.0));
  t2.backward(t2.square(a));
  CHECK(t2.grad(unused).item() == 0.0);

  // Loss must be scalar.
  Tape t3;
  Var vec = t3.leaf(Tensor::row({1, 2}));
  CHECK_THROWS(t3.backward(vec));
}

TEST_CASE("gradient check: random 2-layer MLP vs central differences") {
  for (uint64_t seed = 0; seed < 32; ++seed) {
    Rng rng(derive_seed(77, {seed}));
    Mlp net = Mlp::init({5, 8, 3}, Act::Tanh, rng);
    Tensor x({4, 5});
    for (auto& v : x.values()) v = rng.uniform(-1, 1);
    Tensor target({4, 3});
    for (auto& v : target.values()) v = rng.uniform(-1, 1);

    auto loss_value = [&]() {
      Tensor out = net.apply(x);
      double s = 0;
      for (int64_t i = 0; i < out.size(); ++i) {
        const double d = out[i] - target[i];
        s += d * d;
      }
      return s / static_cast<double>(out.size());
    };

    Tape t;
    auto staged = net.stage(t);
    Var out = net.forward(t, staged, t.leaf(x));
    Var loss = t.reduce_mean(t.square(t.sub(out, t.leaf(target))));
    t.backward(loss);
    auto grads = staged_grads(t, staged);

    auto params = net.params();
    double max_err = 0;
    for (size_t k = 0; k < params.size(); ++k) {
      Tensor& p = *params[k];
      for (int64_t i = 0; i < p.size(); i += 3) {  // probe a subset
        const double fd = fd_grad(loss_value, p[i]);
        max_err = std::max(max_err, rel_err(fd, grads[k][i]));
      }
    }
    CHECK(max_err <= 1e-4);
  }
}

TEST_CASE("gradient check: tape op zoo vs finite differences") {
  Rng rng(123);
  Tensor a({3, 4});
  Tensor b({3, 4});
  for (auto& v : a.values()) v = rng.uniform(-2, 2);
  for (auto& v : b.values()) v = rng.uniform(0.1, 2);

  auto build = [&](Tape& t, Var va, Var vb) {
    Var h = t.mul(t.softplus(va), t.exp(t.scale(vb, 0.3)));
    h = t.add(h, t.emin(va, vb));
    h = t.sub(h, t.relu(va));
    h = t.concat_cols(h, t.log(vb));
    h = t.add_const(t.clamp(h, -1.5, 1.5), 0.25);
    return t.reduce_mean(t.sum_rows(h));
  };
  auto loss_value = [&]() {
    Tape t;
    return t.value(build(t, t.leaf(a), t.leaf(b))).item();
  };

  Tape t;
  Var va = t.leaf(a), vb = t.leaf(b);
  t.backward(build(t, va, vb));

  double max_err = 0;
  for (int64_t i = 0; i < a.size(); ++i) {
    max_err = std::max(max_err, rel_err(fd_grad(loss_value, a[i]), t.grad(va)[i]));
    max_err = std::max(max_err, rel_err(fd_grad(loss_value, b[i]), t.grad(vb)[i]));
  }
  CHECK(max_err <= 1e-4);
}

TEST_CASE("clip_global_norm") {
  std::vector<Tensor> g1{Tensor::row({3, 4})};  // norm 5
  CHECK(clip_global_norm(g1, 10.0) == 1.0);
  CHECK(g1[0][0] == 3.0);

  std::vector<Tensor> g2{Tensor::row({12, 16})};  // norm 20
  const double f = clip_global_norm(g2, 10.0);
  CHECK(f == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(global_norm(g2) - 10.0) <= 1e-12);

  // Never increases the norm, never changes direction.
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Tensor> g{Tensor({2, 3}), Tensor({1, 4})};
    for (auto& t : g) {
      for (auto& v : t.values()) v = rng.uniform(-5, 5);
    }
    const auto before = g;
    const double norm_before = global_norm(g);
    const double max_norm = rng.uniform(0.1, 8.0);
    clip_global_norm(g, max_norm);
    CHECK(global_norm(g) <= std::max(max_norm, norm_before) + 1e-12);
    CHECK(global_norm(g) <= max_norm + 1e-12);
    double dot = 0, na = 0, nb = 0;
    for (size_t k = 0; k < g.size(); ++k) {
      for (int64_t i = 0; i < g[k].size(); ++i) {
        dot += g[k][i] * before[k][i];
        na += g[k][i] * g[k][i];
        nb += before[k][i] * before[k][i];
      }
    }
    CHECK(dot / std::sqrt(na * nb) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("adam") {
  SUBCASE("zero gradient, zero weight decay leaves params unchanged") {
    Tensor p = Tensor::row({1.0, -2.0, 3.0});
    Adam opt({&p}, {.lr = 1e-2});
    opt.step({Tensor::zeros_like(p)});
    CHECK(p == Tensor::row({1.0, -2.0, 3.0}));
    CHECK(opt.steps() == 1);
    opt.step({Tensor::zeros_like(p)});
    CHECK(opt.steps() == 2);
  }
  SUBCASE("converges to the closed-form minimizer of a scalar quadratic") {
    const double c = 3.7;  // minimizer of 0.5*(x-c)^2
    Tensor x = Tensor::scalar(-1.0);
    Adam opt({&x}, {.lr = 1e-2});
    for (int i = 0; i < 8000; ++i) {
      opt.step({Tensor::scalar(x.item() - c)});
    }
    CHECK(std::abs(x.item() - c) <= 1e-3);
  }
  SUBCASE("deterministic across reruns") {
    auto run = [] {
      Rng rng(5);
      Mlp net = Mlp::init({3, 4, 2}, Act::Tanh, rng);
      Adam opt(net.params(), {.lr = 3e-4, .weight_decay = 1e-6});
      for (int i = 0; i < 20; ++i) {
        std::vector<Tensor> grads;
        Rng grng(derive_seed(11, {static_cast<uint64_t>(i)}));
        for (auto* p : net.params()) {
          Tensor g = Tensor::zeros_like(*p);
          for (auto& v : g.values()) v = grng.uniform(-1, 1);
          grads.push_back(std::move(g));
        }
        opt.step(grads);
      }
      Checkpoint ck;
      int idx = 0;
      for (auto* p : net.params()) ck.tensors["p" + std::to_string(idx++)] = *p;
      return fingerprint(ck);
    };
    CHECK(run() == run());
  }
}

TEST_CASE("checkpoint round-trip and version guard") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fw_ckpt_test";
  fs::create_directories(dir);

  Checkpoint ck;
  ck.meta["variant"] = "bc-mlp";
  ck.meta["obs_layout"] = "1";
  Rng rng(42);
  Tensor t({3, 5});
  for (auto& v : t.values()) v = rng.uniform(-1e6, 1e6);
  ck.tensors["net.w"] = t;
  ck.tensors["net.b"] = Tensor::row({0.0, -0.0, 1e-300});

  const fs::path p = dir / "a.fwck";
  save_checkpoint(ck, p);
  Checkpoint back = load_checkpoint(p);
  CHECK(back.meta == ck.meta);
  CHECK(back.tensors.at("net.w") == ck.tensors.at("net.w"));
  CHECK(fingerprint(back) == fingerprint(ck));

  // Corrupt the version field.
  {
    std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const char bad = 9;
    f.write(&bad, 1);
  }
  CHECK_THROWS_WITH_AS(load_checkpoint(p), doctest::Contains("version"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("rng determinism and distribution sanity") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  Rng r(7);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);

  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
}
