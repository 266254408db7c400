// vmbeam/nn/ops.cpp
//
// Copyright 2026 vmbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vmbeam/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vmbeam/kernels/kernels.hpp"

namespace vmbeam::nn {

namespace {

constexpr double kLog10Scale = 4.342944819032518;  // 10 / ln(10)

bool any_requires_grad(const std::vector<Tensor>& parents) {
  for (const auto& p : parents) {
    if (p.requires_grad()) return true;
  }
  return false;
}

double stable_softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor make_op(std::vector<std::int64_t> shape, std::vector<double> value,
               std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backward_fn) {
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  if (any_requires_grad(parents)) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(p.node());
    node->backward_fn = std::move(backward_fn);
  }
  return Tensor(node);
}

Tensor detach(const Tensor& t) {
  return Tensor::from_data(t.shape(), t.data(), false);
}

Tensor add(const Tensor& a, const Tensor& b) {
  require(same_shape(a, b), ErrorKind::numeric, "add: shape mismatch");
  std::vector<double> out(a.numel());
  kernels::add(a.data().data(), b.data().data(), out.data(), out.size());
  return make_op(a.shape(), std::move(out), {a, b}, [](TensorNode& self) {
    const auto& g = self.grad;
    kernels::axpy(1.0, g.data(), self.parents[0]->grad.data(), g.size());
    kernels::axpy(1.0, g.data(), self.parents[1]->grad.data(), g.size());
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require(same_shape(a, b), ErrorKind::numeric, "sub: shape mismatch");
  std::vector<double> out(a.numel());
  kernels::sub(a.data().data(), b.data().data(), out.data(), out.size());
  return make_op(a.shape(), std::move(out), {a, b}, [](TensorNode& self) {
    const auto& g = self.grad;
    kernels::axpy(1.0, g.data(), self.parents[0]->grad.data(), g.size());
    kernels::axpy(-1.0, g.data(), self.parents[1]->grad.data(), g.size());
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require(same_shape(a, b), ErrorKind::numeric, "mul: shape mismatch");
  std::vector<double> out(a.numel());
  kernels::mul(a.data().data(), b.data().data(), out.data(), out.size());
  return make_op(a.shape(), std::move(out), {a, b}, [](TensorNode& self) {
    const auto& g = self.grad;
    const auto& av = self.parents[0]->value;
    const auto& bv = self.parents[1]->value;
    auto& ga = self.parents[0]->grad;
    auto& gb = self.parents[1]->grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * bv[i];
      gb[i] += g[i] * av[i];
    }
  });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor scale(const Tensor& a, double s) {
  std::vector<double> out(a.data());
  for (auto& v : out) v *= s;
  return make_op(a.shape(), std::move(out), {a}, [s](TensorNode& self) {
    kernels::axpy(s, self.grad.data(), self.parents[0]->grad.data(),
                  self.grad.size());
  });
}

Tensor add_scalar(const Tensor& a, double s) {
  std::vector<double> out(a.data());
  for (auto& v : out) v += s;
  return make_op(a.shape(), std::move(out), {a}, [](TensorNode& self) {
    kernels::axpy(1.0, self.grad.data(), self.parents[0]->grad.data(),
                  self.grad.size());
  });
}

Tensor mul_bcast0(const Tensor& a, const Tensor& m) {
  require(m.dim(0) == 1 && a.rank() == m.rank(), ErrorKind::numeric,
          "mul_bcast0: m must have leading dim 1");
  const std::int64_t inner = m.numel();
  require(a.numel() % inner == 0 &&
              std::equal(a.shape().begin() + 1, a.shape().end(),
                         m.shape().begin() + 1),
          ErrorKind::numeric, "mul_bcast0: trailing dims mismatch");
  const std::int64_t c = a.dim(0);
  std::vector<double> out(a.numel());
  for (std::int64_t i = 0; i < c; ++i) {
    kernels::mul(a.data().data() + i * inner, m.data().data(),
                 out.data() + i * inner, inner);
  }
  return make_op(a.shape(), std::move(out), {a, m},
                 [c, inner](TensorNode& self) {
                   const auto& g = self.grad;
                   const auto& av = self.parents[0]->value;
                   const auto& mv = self.parents[1]->value;
                   auto& ga = self.parents[0]->grad;
                   auto& gm = self.parents[1]->grad;
                   for (std::int64_t i = 0; i < c; ++i) {
                     const double* gp = g.data() + i * inner;
                     const double* ap = av.data() + i * inner;
                     double* gap = ga.data() + i * inner;
                     for (std::int64_t j = 0; j < inner; ++j) {
                       gap[j] += gp[j] * mv[j];
                       gm[j] += gp[j] * ap[j];
                     }
                   }
                 });
}

Tensor scale_by(const Tensor& x, const Tensor& s) {
  require(s.numel() == 1, ErrorKind::numeric, "scale_by: s must be scalar");
  const double sv = s.data()[0];
  std::vector<double> out(x.data());
  for (auto& v : out) v *= sv;
  return make_op(x.shape(), std::move(out), {x, s}, [](TensorNode& self) {
    const double sv = self.parents[1]->value[0];
    const auto& xv = self.parents[0]->value;
    kernels::axpy(sv, self.grad.data(), self.parents[0]->grad.data(),
                  self.grad.size());
    self.parents[1]->grad[0] +=
        kernels::dot(self.grad.data(), xv.data(), xv.size());
  });
}

Tensor mish(const Tensor& x) {
  std::vector<double> out(x.numel());
  const auto& xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = xv[i] * std::tanh(stable_softplus(xv[i]));
  }
  return make_op(x.shape(), std::move(out), {x}, [](TensorNode& self) {
    const auto& xv = self.parents[0]->value;
    auto& gx = self.parents[0]->grad;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const double t = std::tanh(stable_softplus(xv[i]));
      const double d = t + xv[i] * (1.0 - t * t) * stable_sigmoid(xv[i]);
      gx[i] += self.grad[i] * d;
    }
  });
}

Tensor sigmoid(const Tensor& x) {
  std::vector<double> out(x.numel());
  const auto& xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = stable_sigmoid(xv[i]);
  return make_op(x.shape(), std::move(out), {x}, [](TensorNode& self) {
    auto& gx = self.parents[0]->grad;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const double y = self.value[i];
      gx[i] += self.grad[i] * y * (1.0 - y);
    }
  });
}

Tensor sum_all(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  return make_op({1}, {acc}, {x}, [](TensorNode& self) {
    const double g = self.grad[0];
    auto& gx = self.parents[0]->grad;
    for (auto& v : gx) v += g;
  });
}

Tensor mean_all(const Tensor& x) {
  return scale(sum_all(x), 1.0 / static_cast<double>(x.numel()));
}

Tensor sum_sq(const Tensor& x) {
  const double acc = kernels::sum_sq(x.data().data(), x.numel());
  return make_op({1}, {acc}, {x}, [](TensorNode& self) {
    const double g = 2.0 * self.grad[0];
    kernels::axpy(g, self.parents[0]->value.data(),
                  self.parents[0]->grad.data(),
                  self.parents[0]->value.size());
  });
}

Tensor log_scalar(const Tensor& x) {
  require(x.numel() == 1, ErrorKind::numeric, "log_scalar: non-scalar");
  require(x.data()[0] > 0.0, ErrorKind::numeric, "log_scalar: non-positive");
  return make_op({1}, {std::log(x.data()[0])}, {x}, [](TensorNode& self) {
    self.parents[0]->grad[0] += self.grad[0] / self.parents[0]->value[0];
  });
}

Tensor min_const(const Tensor& x, double c) {
  std::vector<double> out(x.numel());
  const auto& xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(xv[i], c);
  return make_op(x.shape(), std::move(out), {x}, [c](TensorNode& self) {
    const auto& xv = self.parents[0]->value;
    auto& gx = self.parents[0]->grad;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (xv[i] < c) gx[i] += self.grad[i];
    }
  });
}

Tensor index(const Tensor& x, std::int64_t i) {
  require(i >= 0 && i < x.numel(), ErrorKind::numeric, "index out of range");
  return make_op({1}, {x.data()[i]}, {x}, [i](TensorNode& self) {
    self.parents[0]->grad[i] += self.grad[0];
  });
}

Tensor concat_channels(const std::vector<Tensor>& parts) {
  require(!parts.empty(), ErrorKind::numeric, "concat of nothing");
  auto shape = parts[0].shape();
  std::int64_t total_c = 0;
  std::int64_t inner = parts[0].numel() / parts[0].dim(0);
  for (const auto& p : parts) {
    require(p.rank() == static_cast<int>(shape.size()) &&
                std::equal(shape.begin() + 1, shape.end(), p.shape().begin() + 1),
            ErrorKind::numeric, "concat: trailing dims mismatch");
    total_c += p.dim(0);
  }
  shape[0] = total_c;
  std::vector<double> out;
  out.reserve(total_c * inner);
  for (const auto& p : parts) {
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  return make_op(std::move(shape), std::move(out), parts, [](TensorNode& self) {
    std::size_t off = 0;
    for (auto& p : self.parents) {
      kernels::axpy(1.0, self.grad.data() + off, p->grad.data(),
                    p->value.size());
      off += p->value.size();
    }
  });
}

Tensor slice_channels(const Tensor& x, std::int64_t begin, std::int64_t count) {
  require(begin >= 0 && count > 0 && begin + count <= x.dim(0),
          ErrorKind::numeric, "slice_channels out of range");
  const std::int64_t inner = x.numel() / x.dim(0);
  auto shape = x.shape();
  shape[0] = count;
  std::vector<double> out(x.data().begin() + begin * inner,
                          x.data().begin() + (begin + count) * inner);
  return make_op(std::move(shape), std::move(out), {x},
                 [begin, inner](TensorNode& self) {
                   kernels::axpy(1.0, self.grad.data(),
                                 self.parents[0]->grad.data() + begin * inner,
                                 self.grad.size());
                 });
}

Tensor slice_cols(const Tensor& x, std::int64_t begin, std::int64_t count) {
  require(x.rank() == 2, ErrorKind::numeric, "slice_cols expects rank 2");
  const std::int64_t rows = x.dim(0);
  const std::int64_t cols = x.dim(1);
  require(begin >= 0 && count > 0 && begin + count <= cols, ErrorKind::numeric,
          "slice_cols out of range");
  std::vector<double> out(rows * count);
  for (std::int64_t r = 0; r < rows; ++r) {
    std::copy(x.data().begin() + r * cols + begin,
              x.data().begin() + r * cols + begin + count,
              out.begin() + r * count);
  }
  return make_op({rows, count}, std::move(out), {x},
                 [rows, cols, begin, count](TensorNode& self) {
                   auto& gx = self.parents[0]->grad;
                   for (std::int64_t r = 0; r < rows; ++r) {
                     kernels::axpy(1.0, self.grad.data() + r * count,
                                   gx.data() + r * cols + begin, count);
                   }
                 });
}

Tensor linear(const Tensor& w, const Tensor& x, const Tensor& b) {
  require(w.rank() == 2 && x.rank() == 1 && w.dim(1) == x.dim(0),
          ErrorKind::numeric, "linear: shape mismatch");
  const std::int64_t out_dim = w.dim(0);
  const std::int64_t in_dim = w.dim(1);
  std::vector<double> out(out_dim, 0.0);
  for (std::int64_t i = 0; i < out_dim; ++i) {
    out[i] = kernels::dot(w.data().data() + i * in_dim, x.data().data(), in_dim);
  }
  std::vector<Tensor> parents = {w, x};
  const bool has_bias = b.defined();
  if (has_bias) {
    require(b.rank() == 1 && b.dim(0) == out_dim, ErrorKind::numeric,
            "linear: bias shape mismatch");
    for (std::int64_t i = 0; i < out_dim; ++i) out[i] += b.data()[i];
    parents.push_back(b);
  }
  return make_op({out_dim}, std::move(out), parents,
                 [in_dim, out_dim, has_bias](TensorNode& self) {
                   const auto& wv = self.parents[0]->value;
                   const auto& xv = self.parents[1]->value;
                   auto& gw = self.parents[0]->grad;
                   auto& gx = self.parents[1]->grad;
                   for (std::int64_t i = 0; i < out_dim; ++i) {
                     const double g = self.grad[i];
                     if (g == 0.0) continue;
                     kernels::axpy(g, xv.data(), gw.data() + i * in_dim, in_dim);
                     kernels::axpy(g, wv.data() + i * in_dim, gx.data(), in_dim);
                   }
                   if (has_bias) {
                     kernels::axpy(1.0, self.grad.data(),
                                   self.parents[2]->grad.data(), out_dim);
                   }
                 });
}

Tensor global_avg_pool(const Tensor& x) {
  require(x.rank() == 3, ErrorKind::numeric, "global_avg_pool expects [C,H,W]");
  const std::int64_t c = x.dim(0);
  const std::int64_t inner = x.dim(1) * x.dim(2);
  std::vector<double> out(c, 0.0);
  for (std::int64_t i = 0; i < c; ++i) {
    double acc = 0.0;
    const double* p = x.data().data() + i * inner;
    for (std::int64_t j = 0; j < inner; ++j) acc += p[j];
    out[i] = acc / static_cast<double>(inner);
  }
  return make_op({c}, std::move(out), {x}, [c, inner](TensorNode& self) {
    auto& gx = self.parents[0]->grad;
    for (std::int64_t i = 0; i < c; ++i) {
      const double g = self.grad[i] / static_cast<double>(inner);
      double* p = gx.data() + i * inner;
      for (std::int64_t j = 0; j < inner; ++j) p[j] += g;
    }
  });
}

Tensor softmax(const Tensor& x) {
  require(x.rank() == 1, ErrorKind::numeric, "softmax expects 1-D input");
  const auto& xv = x.data();
  const double m = *std::max_element(xv.begin(), xv.end());
  std::vector<double> out(xv.size());
  double z = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = std::exp(xv[i] - m);
    z += out[i];
  }
  for (auto& v : out) v /= z;
  return make_op(x.shape(), std::move(out), {x}, [](TensorNode& self) {
    auto& gx = self.parents[0]->grad;
    const auto& y = self.value;
    double gy_dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) gy_dot += self.grad[i] * y[i];
    for (std::size_t i = 0; i < y.size(); ++i) {
      gx[i] += y[i] * (self.grad[i] - gy_dot);
    }
  });
}

Tensor complex_magnitude(const Tensor& spec, double eps) {
  require(spec.rank() == 3 && spec.dim(0) % 2 == 0, ErrorKind::numeric,
          "complex_magnitude expects [2M,T,F]");
  const std::int64_t m = spec.dim(0) / 2;
  const std::int64_t inner = spec.dim(1) * spec.dim(2);
  std::vector<double> out(m * inner);
  const auto& v = spec.data();
  for (std::int64_t c = 0; c < m; ++c) {
    const double* re = v.data() + (2 * c) * inner;
    const double* im = v.data() + (2 * c + 1) * inner;
    double* o = out.data() + c * inner;
    for (std::int64_t j = 0; j < inner; ++j) {
      o[j] = std::sqrt(re[j] * re[j] + im[j] * im[j] + eps);
    }
  }
  return make_op({m, spec.dim(1), spec.dim(2)}, std::move(out), {spec},
                 [m, inner](TensorNode& self) {
                   const auto& v = self.parents[0]->value;
                   auto& gs = self.parents[0]->grad;
                   for (std::int64_t c = 0; c < m; ++c) {
                     const double* re = v.data() + (2 * c) * inner;
                     const double* im = v.data() + (2 * c + 1) * inner;
                     double* gre = gs.data() + (2 * c) * inner;
                     double* gim = gs.data() + (2 * c + 1) * inner;
                     const double* y = self.value.data() + c * inner;
                     const double* g = self.grad.data() + c * inner;
                     for (std::int64_t j = 0; j < inner; ++j) {
                       gre[j] += g[j] * re[j] / y[j];
                       gim[j] += g[j] * im[j] / y[j];
                     }
                   }
                 });
}

Tensor snr_loss(const Tensor& est, const std::vector<double>& ref,
                double clip_db) {
  require(static_cast<std::size_t>(est.numel()) == ref.size(),
          ErrorKind::numeric, "snr_loss: length mismatch");
  const double p_ref = kernels::sum_sq(ref.data(), ref.size());
  require(p_ref > 0.0, ErrorKind::numeric, "snr_loss: zero-power reference");
  std::vector<double> diff(ref.size());
  kernels::sub(est.data().data(), ref.data(), diff.data(), ref.size());
  const double p_err = kernels::sum_sq(diff.data(), diff.size());
  const double snr_db =
      p_err == 0.0 ? std::numeric_limits<double>::infinity()
                   : kLog10Scale * (std::log(p_ref) - std::log(p_err));
  const double loss = -std::min(snr_db, clip_db);
  const bool clipped = !(snr_db < clip_db);
  auto diff_ptr = std::make_shared<std::vector<double>>(std::move(diff));
  return make_op({1}, {loss}, {est},
                 [clipped, p_err, diff_ptr](TensorNode& self) {
                   if (clipped) return;
                   // d(-snr)/d est = (10/ln10) * 2 * diff / p_err
                   const double g =
                       self.grad[0] * kLog10Scale * 2.0 / p_err;
                   kernels::axpy(g, diff_ptr->data(),
                                 self.parents[0]->grad.data(),
                                 diff_ptr->size());
                 });
}

}  // namespace vmbeam::nn
