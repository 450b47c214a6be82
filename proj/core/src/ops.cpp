// Copyright 2026 The evptrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evptrack/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace evp {

namespace detail {

template <typename T>
Tensor<T> make_result(const char* op, Shape shape, std::vector<T> data,
                      std::vector<Tensor<T>> inputs, std::function<void(Node<T>&)> backward) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw NumericError(std::string("non-finite value produced by ") + op + " at flat index " +
                         std::to_string(i) + " of shape " + shape_str(shape));
    }
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->op = op;
  node->is_leaf = false;
  if (grad_enabled()) {
    bool any = false;
    for (const auto& in : inputs) any = any || in.requires_grad();
    if (any) {
      node->requires_grad = true;
      node->parents.reserve(inputs.size());
      for (const auto& in : inputs) node->parents.push_back(in.node());
      node->backward = std::move(backward);
    }
  }
  return Tensor<T>(std::move(node));
}

}  // namespace detail

namespace {

using detail::make_result;
using detail::Node;
using detail::parent_grad;

template <typename T>
using RowMajor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapC = Eigen::Map<const RowMajor<T>>;
template <typename T>
using MapM = Eigen::Map<RowMajor<T>>;

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
}

template <typename T>
void require_rank2(const char* op, const Tensor<T>& a) {
  if (a.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected rank-2 tensor, got " + shape_str(a.shape()));
  }
}

// y = f(x) elementwise; df(x, y) is the local derivative.
template <typename T, typename F, typename DF>
Tensor<T> unary(const char* op, const Tensor<T>& a, F f, DF df) {
  const auto x = a.data();
  std::vector<T> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  return make_result<T>(op, a.shape(), std::move(y), {a}, [df](Node<T>& out) {
    auto* ga = parent_grad(out, 0);
    if (!ga) return;
    const auto& x = out.parents[0]->data;
    for (std::size_t i = 0; i < x.size(); ++i) (*ga)[i] += out.grad[i] * df(x[i], out.data[i]);
  });
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("add", a, b);
  const auto x = a.data();
  const auto y = b.data();
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return make_result<T>("add", a.shape(), std::move(out), {a, b}, [](Node<T>& o) {
    for (std::size_t k = 0; k < 2; ++k) {
      if (auto* g = parent_grad(o, k)) {
        for (std::size_t i = 0; i < o.grad.size(); ++i) (*g)[i] += o.grad[i];
      }
    }
  });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("sub", a, b);
  const auto x = a.data();
  const auto y = b.data();
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return make_result<T>("sub", a.shape(), std::move(out), {a, b}, [](Node<T>& o) {
    if (auto* g = parent_grad(o, 0)) {
      for (std::size_t i = 0; i < o.grad.size(); ++i) (*g)[i] += o.grad[i];
    }
    if (auto* g = parent_grad(o, 1)) {
      for (std::size_t i = 0; i < o.grad.size(); ++i) (*g)[i] -= o.grad[i];
    }
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("mul", a, b);
  const auto x = a.data();
  const auto y = b.data();
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  return make_result<T>("mul", a.shape(), std::move(out), {a, b}, [](Node<T>& o) {
    const auto& x = o.parents[0]->data;
    const auto& y = o.parents[1]->data;
    if (auto* g = parent_grad(o, 0)) {
      for (std::size_t i = 0; i < o.grad.size(); ++i) (*g)[i] += o.grad[i] * y[i];
    }
    if (auto* g = parent_grad(o, 1)) {
      for (std::size_t i = 0; i < o.grad.size(); ++i) (*g)[i] += o.grad[i] * x[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  return unary<T>(
      "scale", a, [factor](T x) { return x * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, T value) {
  return unary<T>(
      "add_scalar", a, [value](T x) { return x + value; }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> add_rowwise(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() < 1 || b.numel() != a.shape().back()) {
    throw ShapeError("add_rowwise: bias of shape " + shape_str(b.shape()) +
                     " does not match last axis of " + shape_str(a.shape()));
  }
  const std::size_t d = b.numel();
  const auto x = a.data();
  const auto y = b.data();
  std::vector<T> out(x.size());
  const std::size_t rows = x.size() / d;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < d; ++j) out[r * d + j] = x[r * d + j] + y[j];
  return make_result<T>("add_rowwise", a.shape(), std::move(out), {a, b}, [d, rows](Node<T>& o) {
    if (auto* g = parent_grad(o, 0)) {
      for (std::size_t i = 0; i < o.grad.size(); ++i) (*g)[i] += o.grad[i];
    }
    if (auto* g = parent_grad(o, 1)) {
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < d; ++j) (*g)[j] += o.grad[r * d + j];
    }
  });
}

template <typename T>
Tensor<T> add_n(std::span<const Tensor<T>> parts) {
  if (parts.empty()) throw ShapeError("add_n: no operands");
  for (const auto& p : parts) require_same_shape("add_n", parts[0], p);
  std::vector<T> out(parts[0].numel(), T(0));
  for (const auto& p : parts) {
    const auto x = p.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += x[i];
  }
  return make_result<T>("add_n", parts[0].shape(), std::move(out),
                        std::vector<Tensor<T>>(parts.begin(), parts.end()), [](Node<T>& o) {
                          for (std::size_t k = 0; k < o.parents.size(); ++k) {
                            if (auto* g = parent_grad(o, k)) {
                              for (std::size_t i = 0; i < o.grad.size(); ++i) (*g)[i] += o.grad[i];
                            }
                          }
                        });
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& a) {
  return unary<T>(
      "gelu", a,
      [](T x) { return T(0.5) * x * (T(1) + std::erf(x / std::numbers::sqrt2_v<T>)); },
      [](T x, T) {
        const T cdf = T(0.5) * (T(1) + std::erf(x / std::numbers::sqrt2_v<T>));
        const T pdf = std::exp(T(-0.5) * x * x) * std::numbers::inv_sqrtpi_v<T> /
                      std::numbers::sqrt2_v<T>;
        return cdf + x * pdf;
      });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  return unary<T>(
      "sigmoid", a,
      [](T x) {
        if (x >= 0) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> exp(const Tensor<T>& a) {
  return unary<T>(
      "exp", a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Tensor<T> log(const Tensor<T>& a) {
  return unary<T>(
      "log", a, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; });
}

template <typename T>
Tensor<T> abs(const Tensor<T>& a) {
  return unary<T>(
      "abs", a, [](T x) { return std::abs(x); },
      [](T x, T) { return x > 0 ? T(1) : (x < 0 ? T(-1) : T(0)); });
}

template <typename T>
Tensor<T> clamp(const Tensor<T>& a, T lo, T hi) {
  if (!(lo <= hi)) throw std::invalid_argument("clamp: lo > hi");
  return unary<T>(
      "clamp", a, [lo, hi](T x) { return std::clamp(x, lo, hi); },
      [lo, hi](T x, T) { return (x >= lo && x <= hi) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw ShapeError("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
  }
  const auto x = a.data();
  return make_result<T>("reshape", std::move(shape), std::vector<T>(x.begin(), x.end()), {a},
                        [](Node<T>& o) {
                          if (auto* g = parent_grad(o, 0)) {
                            for (std::size_t i = 0; i < o.grad.size(); ++i) (*g)[i] += o.grad[i];
                          }
                        });
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& a) {
  require_rank2("transpose", a);
  const std::size_t m = a.dim(0), n = a.dim(1);
  const auto x = a.data();
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = x[i * n + j];
  return make_result<T>("transpose", Shape{n, m}, std::move(out), {a}, [m, n](Node<T>& o) {
    if (auto* g = parent_grad(o, 0)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) (*g)[i * n + j] += o.grad[j * m + i];
    }
  });
}

template <typename T>
Tensor<T> concat_tokens(std::span<const Tensor<T>> parts) {
  if (parts.empty()) throw ShapeError("concat_tokens: no parts");
  for (const auto& p : parts) require_rank2("concat_tokens", p);
  const std::size_t d = parts[0].dim(1);
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.dim(1) != d) {
      throw ShapeError("concat_tokens: feature dim mismatch " + shape_str(parts[0].shape()) +
                       " vs " + shape_str(p.shape()));
    }
    rows += p.dim(0);
  }
  std::vector<T> out;
  out.reserve(rows * d);
  for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
  return make_result<T>("concat_tokens", Shape{rows, d}, std::move(out),
                        std::vector<Tensor<T>>(parts.begin(), parts.end()), [](Node<T>& o) {
                          std::size_t offset = 0;
                          for (std::size_t k = 0; k < o.parents.size(); ++k) {
                            const std::size_t n = o.parents[k]->data.size();
                            if (auto* g = parent_grad(o, k)) {
                              for (std::size_t i = 0; i < n; ++i) (*g)[i] += o.grad[offset + i];
                            }
                            offset += n;
                          }
                        });
}

template <typename T>
Tensor<T> slice_rows(const Tensor<T>& a, std::size_t begin, std::size_t count) {
  require_rank2("slice_rows", a);
  if (count == 0 || begin + count > a.dim(0)) {
    throw ShapeError("slice_rows: rows [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") out of range for " + shape_str(a.shape()));
  }
  const std::size_t d = a.dim(1);
  const auto x = a.data();
  std::vector<T> out(x.begin() + static_cast<std::ptrdiff_t>(begin * d),
                     x.begin() + static_cast<std::ptrdiff_t>((begin + count) * d));
  return make_result<T>("slice_rows", Shape{count, d}, std::move(out), {a},
                        [begin, d](Node<T>& o) {
                          if (auto* g = parent_grad(o, 0)) {
                            for (std::size_t i = 0; i < o.grad.size(); ++i)
                              (*g)[begin * d + i] += o.grad[i];
                          }
                        });
}

template <typename T>
std::vector<Tensor<T>> split_tokens(const Tensor<T>& a, std::span<const std::size_t> sizes) {
  require_rank2("split_tokens", a);
  std::size_t total = 0;
  for (std::size_t s : sizes) total += s;
  if (total != a.dim(0)) {
    throw ShapeError("split_tokens: sizes sum to " + std::to_string(total) + " but tensor has " +
                     std::to_string(a.dim(0)) + " tokens");
  }
  std::vector<Tensor<T>> parts;
  parts.reserve(sizes.size());
  std::size_t begin = 0;
  for (std::size_t s : sizes) {
    parts.push_back(slice_rows(a, begin, s));
    begin += s;
  }
  return parts;
}

template <typename T>
Tensor<T> concat_cols(std::span<const Tensor<T>> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no parts");
  for (const auto& p : parts) require_rank2("concat_cols", p);
  const std::size_t rows = parts[0].dim(0);
  std::size_t cols = 0;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    if (p.dim(0) != rows) throw ShapeError("concat_cols: row count mismatch");
    widths.push_back(p.dim(1));
    cols += p.dim(1);
  }
  std::vector<T> out(rows * cols);
  std::size_t c0 = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto x = parts[k].data();
    const std::size_t w = widths[k];
    for (std::size_t i = 0; i < rows; ++i)
      std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(i * w), w,
                  out.begin() + static_cast<std::ptrdiff_t>(i * cols + c0));
    c0 += w;
  }
  return make_result<T>("concat_cols", Shape{rows, cols}, std::move(out),
                        std::vector<Tensor<T>>(parts.begin(), parts.end()),
                        [rows, cols, widths](Node<T>& o) {
                          std::size_t c0 = 0;
                          for (std::size_t k = 0; k < widths.size(); ++k) {
                            const std::size_t w = widths[k];
                            if (auto* g = parent_grad(o, k)) {
                              for (std::size_t i = 0; i < rows; ++i)
                                for (std::size_t j = 0; j < w; ++j)
                                  (*g)[i * w + j] += o.grad[i * cols + c0 + j];
                            }
                            c0 += w;
                          }
                        });
}

template <typename T>
Tensor<T> slice_cols(const Tensor<T>& a, std::size_t begin, std::size_t count) {
  require_rank2("slice_cols", a);
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  if (count == 0 || begin + count > cols) throw ShapeError("slice_cols: columns out of range");
  const auto x = a.data();
  std::vector<T> out(rows * count);
  for (std::size_t i = 0; i < rows; ++i)
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(i * cols + begin), count,
                out.begin() + static_cast<std::ptrdiff_t>(i * count));
  return make_result<T>("slice_cols", Shape{rows, count}, std::move(out), {a},
                        [rows, cols, begin, count](Node<T>& o) {
                          if (auto* g = parent_grad(o, 0)) {
                            for (std::size_t i = 0; i < rows; ++i)
                              for (std::size_t j = 0; j < count; ++j)
                                (*g)[i * cols + begin + j] += o.grad[i * count + j];
                          }
                        });
}

template <typename T>
Tensor<T> gather(const Tensor<T>& a, std::span<const std::size_t> flat_indices) {
  if (flat_indices.empty()) throw ShapeError("gather: no indices");
  const auto x = a.data();
  std::vector<T> out;
  out.reserve(flat_indices.size());
  for (std::size_t idx : flat_indices) {
    if (idx >= x.size()) throw ShapeError("gather: index out of range");
    out.push_back(x[idx]);
  }
  std::vector<std::size_t> idx(flat_indices.begin(), flat_indices.end());
  return make_result<T>("gather", Shape{idx.size()}, std::move(out), {a}, [idx](Node<T>& o) {
    if (auto* g = parent_grad(o, 0)) {
      for (std::size_t k = 0; k < idx.size(); ++k) (*g)[idx[k]] += o.grad[k];
    }
  });
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank2("matmul", a);
  require_rank2("matmul", b);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul: inner dimensions disagree " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()));
  }
  std::vector<T> out(m * n);
  const auto ea = MapC<T>(a.data().data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  const auto eb = MapC<T>(b.data().data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  MapM<T>(out.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)).noalias() = ea * eb;
  return make_result<T>("matmul", Shape{m, n}, std::move(out), {a, b}, [m, k, n](Node<T>& o) {
    const auto em = static_cast<Eigen::Index>(m), ek = static_cast<Eigen::Index>(k),
               en = static_cast<Eigen::Index>(n);
    const auto g = MapC<T>(o.grad.data(), em, en);
    if (auto* ga = parent_grad(o, 0)) {
      const auto b = MapC<T>(o.parents[1]->data.data(), ek, en);
      MapM<T>(ga->data(), em, ek).noalias() += g * b.transpose();
    }
    if (auto* gb = parent_grad(o, 1)) {
      const auto a = MapC<T>(o.parents[0]->data.data(), em, ek);
      MapM<T>(gb->data(), ek, en).noalias() += a.transpose() * g;
    }
  });
}

template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& a) {
  if (a.rank() < 1) throw ShapeError("softmax_rows: rank-0 input");
  const std::size_t n = a.shape().back();
  const std::size_t rows = a.numel() / n;
  const auto x = a.data();
  for (T v : x) {
    if (!std::isfinite(v)) throw NumericError("softmax_rows: non-finite input");
  }
  std::vector<T> out(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x.data() + r * n;
    T* yr = out.data() + r * n;
    const T mx = *std::max_element(xr, xr + n);
    T total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      yr[j] = std::exp(xr[j] - mx);
      total += yr[j];
    }
    for (std::size_t j = 0; j < n; ++j) yr[j] /= total;
  }
  return make_result<T>("softmax_rows", a.shape(), std::move(out), {a}, [rows, n](Node<T>& o) {
    auto* g = parent_grad(o, 0);
    if (!g) return;
    for (std::size_t r = 0; r < rows; ++r) {
      const T* y = o.data.data() + r * n;
      const T* gy = o.grad.data() + r * n;
      T dot = 0;
      for (std::size_t j = 0; j < n; ++j) dot += gy[j] * y[j];
      for (std::size_t j = 0; j < n; ++j) (*g)[r * n + j] += y[j] * (gy[j] - dot);
    }
  });
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& a, const Tensor<T>& gamma, const Tensor<T>& beta, T eps) {
  if (a.rank() < 1) throw ShapeError("layer_norm: rank-0 input");
  const std::size_t d = a.shape().back();
  if (gamma.numel() != d || beta.numel() != d) {
    throw ShapeError("layer_norm: gamma/beta size does not match feature dim " + std::to_string(d));
  }
  if (!(eps > 0)) throw std::invalid_argument("layer_norm: eps must be positive");
  const std::size_t rows = a.numel() / d;
  const auto x = a.data();
  const auto gm = gamma.data();
  const auto bt = beta.data();
  std::vector<T> out(x.size());
  // Normalized values and inverse std are kept for the backward pass.
  auto xhat = std::make_shared<std::vector<T>>(x.size());
  auto inv_std = std::make_shared<std::vector<T>>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x.data() + r * d;
    T mu = 0;
    for (std::size_t j = 0; j < d; ++j) mu += xr[j];
    mu /= static_cast<T>(d);
    T var = 0;
    for (std::size_t j = 0; j < d; ++j) var += (xr[j] - mu) * (xr[j] - mu);
    var /= static_cast<T>(d);
    const T is = T(1) / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t j = 0; j < d; ++j) {
      const T h = (xr[j] - mu) * is;
      (*xhat)[r * d + j] = h;
      out[r * d + j] = h * gm[j] + bt[j];
    }
  }
  return make_result<T>(
      "layer_norm", a.shape(), std::move(out), {a, gamma, beta},
      [rows, d, xhat, inv_std](Node<T>& o) {
        const auto& gm = o.parents[1]->data;
        auto* gx = parent_grad(o, 0);
        auto* gg = parent_grad(o, 1);
        auto* gb = parent_grad(o, 2);
        std::vector<T> dh(d);
        for (std::size_t r = 0; r < rows; ++r) {
          const T* gy = o.grad.data() + r * d;
          const T* h = xhat->data() + r * d;
          if (gg) for (std::size_t j = 0; j < d; ++j) (*gg)[j] += gy[j] * h[j];
          if (gb) for (std::size_t j = 0; j < d; ++j) (*gb)[j] += gy[j];
          if (!gx) continue;
          T mean_dh = 0, mean_dh_h = 0;
          for (std::size_t j = 0; j < d; ++j) {
            dh[j] = gy[j] * gm[j];
            mean_dh += dh[j];
            mean_dh_h += dh[j] * h[j];
          }
          mean_dh /= static_cast<T>(d);
          mean_dh_h /= static_cast<T>(d);
          const T is = (*inv_std)[r];
          for (std::size_t j = 0; j < d; ++j)
            (*gx)[r * d + j] += is * (dh[j] - mean_dh - h[j] * mean_dh_h);
        }
      });
}

template <typename T>
Tensor<T> mean_pool(const Tensor<T>& a) {
  require_rank2("mean_pool", a);
  const std::size_t n = a.dim(0), d = a.dim(1);
  const auto x = a.data();
  std::vector<T> out(d, T(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out[j] += x[i * d + j];
  for (auto& v : out) v /= static_cast<T>(n);
  return make_result<T>("mean_pool", Shape{1, d}, std::move(out), {a}, [n, d](Node<T>& o) {
    if (auto* g = parent_grad(o, 0)) {
      const T w = T(1) / static_cast<T>(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) (*g)[i * d + j] += o.grad[j] * w;
    }
  });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = 0;
  for (T v : a.data()) total += v;
  return make_result<T>("sum", Shape{1}, std::vector<T>{total}, {a}, [](Node<T>& o) {
    if (auto* g = parent_grad(o, 0)) {
      for (auto& v : *g) v += o.grad[0];
    }
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  return scale(sum(a), T(1) / static_cast<T>(a.numel()));
}

#define EVP_INSTANTIATE_OPS(T)                                                                  \
  template Tensor<T> detail::make_result<T>(const char*, Shape, std::vector<T>,                 \
                                            std::vector<Tensor<T>>,                             \
                                            std::function<void(detail::Node<T>&)>);             \
  template Tensor<T> add<T>(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> sub<T>(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> mul<T>(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> scale<T>(const Tensor<T>&, T);                                             \
  template Tensor<T> add_scalar<T>(const Tensor<T>&, T);                                        \
  template Tensor<T> add_rowwise<T>(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> add_n<T>(std::span<const Tensor<T>>);                                      \
  template Tensor<T> gelu<T>(const Tensor<T>&);                                                 \
  template Tensor<T> sigmoid<T>(const Tensor<T>&);                                              \
  template Tensor<T> exp<T>(const Tensor<T>&);                                                  \
  template Tensor<T> log<T>(const Tensor<T>&);                                                  \
  template Tensor<T> abs<T>(const Tensor<T>&);                                                  \
  template Tensor<T> clamp<T>(const Tensor<T>&, T, T);                                          \
  template Tensor<T> reshape<T>(const Tensor<T>&, Shape);                                       \
  template Tensor<T> transpose<T>(const Tensor<T>&);                                            \
  template Tensor<T> concat_tokens<T>(std::span<const Tensor<T>>);                              \
  template std::vector<Tensor<T>> split_tokens<T>(const Tensor<T>&, std::span<const std::size_t>); \
  template Tensor<T> slice_rows<T>(const Tensor<T>&, std::size_t, std::size_t);                 \
  template Tensor<T> concat_cols<T>(std::span<const Tensor<T>>);                                \
  template Tensor<T> slice_cols<T>(const Tensor<T>&, std::size_t, std::size_t);                 \
  template Tensor<T> gather<T>(const Tensor<T>&, std::span<const std::size_t>);                 \
  template Tensor<T> matmul<T>(const Tensor<T>&, const Tensor<T>&);                             \
  template Tensor<T> softmax_rows<T>(const Tensor<T>&);                                         \
  template Tensor<T> layer_norm<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T);    \
  template Tensor<T> mean_pool<T>(const Tensor<T>&);                                            \
  template Tensor<T> sum<T>(const Tensor<T>&);                                                  \
  template Tensor<T> mean<T>(const Tensor<T>&);

EVP_INSTANTIATE_OPS(float)
EVP_INSTANTIATE_OPS(double)

}  // namespace evp
