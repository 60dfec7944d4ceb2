// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "saf/error.hpp"
#include "saf/tensor.hpp"

namespace saf {

/// Per-call-site kernel parameters (exponent, divisor, labels, ...).
using Params = nlohmann::json;

inline double param_number(const Params& p, std::string_view key, double fallback) {
  if (!p.is_object()) return fallback;
  auto it = p.find(key);
  if (it == p.end() || it->is_null()) return fallback;
  if (!it->is_number())
    throw UsageError("parameter '" + std::string(key) + "' must be a number");
  return it->get<double>();
}

/// Executable kernel: forward in either precision plus a vector-Jacobian
/// product that always runs in double.
struct Kernel {
  using Forward =
      std::function<Tensor(std::span<const Tensor>, const Params&, Precision)>;
  /// (inputs in double, params, output adjoint) -> one adjoint per input.
  using Vjp = std::function<std::vector<Tensor>(std::span<const Tensor>,
                                                const Params&, const Tensor&)>;

  std::string name;
  std::size_t min_arity = 1;
  std::size_t max_arity = 1;
  /// Helpers (add, sub, scale, constant, reshape) are never fuzzing sites.
  bool helper = false;
  Forward forward;
  Vjp vjp;
};

namespace detail {

template <class T>
std::vector<T> to_vec(const Tensor& t) {
  std::vector<T> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = static_cast<T>(t[i]);
  return out;
}

template <class T>
Tensor from_vec(Shape shape, const std::vector<T>& v, Precision p) {
  return Tensor(std::move(shape), std::vector<double>(v.begin(), v.end()), p);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

inline void require_arity(std::span<const Tensor> in, std::size_t n,
                          std::string_view name) {
  require(in.size() == n, std::string(name) + " expects " + std::to_string(n) +
                              " input(s), got " + std::to_string(in.size()));
}

inline void require_matrix(const Tensor& t, std::string_view what) {
  require(t.rank() == 2, std::string(what) + " must be a matrix, got shape " +
                             shape_string(t.shape()));
}

/// Calls f.template operator()<T>() with T = float or double.
template <class F>
Tensor by_precision(Precision p, F&& f) {
  if (p == Precision::Single) return f.template operator()<float>();
  return f.template operator()<double>();
}

// ---- element-wise ---------------------------------------------------------

template <class Op>
Kernel unary(std::string name, Op op, std::function<double(double, const Params&)> dfdx) {
  Kernel k;
  k.name = name;
  k.forward = [op, name](std::span<const Tensor> in, const Params& params,
                         Precision p) {
    require_arity(in, 1, name);
    return by_precision(p, [&]<class T>() {
      auto x = to_vec<T>(in[0]);
      for (auto& v : x) v = op(v, params);
      return from_vec(in[0].shape(), x, p);
    });
  };
  k.vjp = [dfdx](std::span<const Tensor> in, const Params& params,
                 const Tensor& adj) {
    Tensor g = Tensor::zeros(in[0].shape());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = adj[i] * dfdx(in[0][i], params);
    return std::vector<Tensor>{g};
  };
  return k;
}

inline double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <class T>
T remainder_floor(T x, T d) {
  T r = std::fmod(x, d);
  if (r != T(0) && ((r < T(0)) != (d < T(0)))) r += d;
  return r;
}

// ---- broadcasting binary helpers ----------------------------------------

/// Same shape, or one side holds a single element.
inline Shape broadcast_shape(const Tensor& a, const Tensor& b, std::string_view name) {
  if (a.shape() == b.shape()) return a.shape();
  if (b.size() == 1) return a.shape();
  if (a.size() == 1) return b.shape();
  throw UsageError(std::string(name) + ": incompatible shapes " +
                   shape_string(a.shape()) + " and " + shape_string(b.shape()));
}

template <class Op>
Kernel binary(std::string name, Op op,
              std::function<std::pair<double, double>(double, double)> partials) {
  Kernel k;
  k.name = name;
  k.min_arity = k.max_arity = 2;
  k.forward = [op, name](std::span<const Tensor> in, const Params&, Precision p) {
    require_arity(in, 2, name);
    Shape shape = broadcast_shape(in[0], in[1], name);
    return by_precision(p, [&]<class T>() {
      const auto a = to_vec<T>(in[0]);
      const auto b = to_vec<T>(in[1]);
      std::vector<T> out(shape_size(shape));
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = op(a[a.size() == 1 ? 0 : i], b[b.size() == 1 ? 0 : i]);
      return from_vec(shape, out, p);
    });
  };
  k.vjp = [partials](std::span<const Tensor> in, const Params&, const Tensor& adj) {
    Tensor ga = Tensor::zeros(in[0].shape());
    Tensor gb = Tensor::zeros(in[1].shape());
    for (std::size_t i = 0; i < adj.size(); ++i) {
      const std::size_t ia = in[0].size() == 1 ? 0 : i;
      const std::size_t ib = in[1].size() == 1 ? 0 : i;
      const auto [da, db] = partials(in[0][ia], in[1][ib]);
      ga[ia] += adj[i] * da;
      gb[ib] += adj[i] * db;
    }
    return std::vector<Tensor>{ga, gb};
  };
  return k;
}

// ---- last-axis reductions -------------------------------------------------

inline Shape rows_shape(const Tensor& t) {
  if (t.rank() <= 1) return {1};
  return Shape(t.shape().begin(), t.shape().end() - 1);
}

/// Row-wise softmax in double, max-shifted.
inline std::vector<double> softmax_rows(const Tensor& x) {
  std::vector<double> out(x.size());
  const std::size_t n = x.inner();
  for (std::size_t r = 0; r < x.outer(); ++r) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, x[r * n + j]);
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) s += out[r * n + j] = std::exp(x[r * n + j] - m);
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] /= s;
  }
  return out;
}

// ---- dense linear algebra -------------------------------------------------

/// Gauss-Jordan inverse with partial pivoting, in T. A singular pivot is
/// divided through and shows up as INF/NaN in the result.
template <class T>
std::vector<T> gauss_jordan_inverse(std::vector<T> a, std::size_t n) {
  std::vector<T> inv(n * n, T(0));
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = T(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (piv != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a[c * n + j], a[piv * n + j]);
        std::swap(inv[c * n + j], inv[piv * n + j]);
      }
    const T d = a[c * n + c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c * n + j] /= d;
      inv[c * n + j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const T f = a[r * n + c];
      if (f == T(0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[c * n + j];
        inv[r * n + j] -= f * inv[c * n + j];
      }
    }
  }
  return inv;
}

/// LU determinant with partial pivoting, in T.
template <class T>
T lu_determinant(std::vector<T> a, std::size_t n) {
  T det = T(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      det = -det;
    }
    const T d = a[c * n + c];
    det *= d;
    if (d == T(0)) return det;
    for (std::size_t r = c + 1; r < n; ++r) {
      const T f = a[r * n + c] / d;
      for (std::size_t j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

inline std::vector<double> transpose(std::span<const double> a, std::size_t rows,
                                     std::size_t cols) {
  std::vector<double> t(a.size());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j * rows + i] = a[i * cols + j];
  return t;
}

inline std::vector<double> matmul_d(std::span<const double> a, std::span<const double> b,
                                    std::size_t n, std::size_t k, std::size_t m) {
  std::vector<double> c(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t j = 0; j < m; ++j) c[i * m + j] += a[i * k + p] * b[p * m + j];
  return c;
}

inline std::size_t square_side(const Tensor& t, std::string_view name) {
  require(t.rank() == 2 && t.shape()[0] == t.shape()[1],
          std::string(name) + " needs a square matrix, got " + shape_string(t.shape()));
  return t.shape()[0];
}

// ---- kernel table ---------------------------------------------------------

inline std::map<std::string, Kernel, std::less<>> build_catalog() {
  std::map<std::string, Kernel, std::less<>> cat;
  auto add = [&](Kernel k) { cat.emplace(k.name, std::move(k)); };

  // Element-wise unstable kernels. Each forward is the textbook formula
  // evaluated directly in the requested precision.
  add(unary(
      "log", []<class T>(T x, const Params&) { return std::log(x); },
      [](double x, const Params&) { return 1.0 / x; }));
  add(unary(
      "exp", []<class T>(T x, const Params&) { return std::exp(x); },
      [](double x, const Params&) { return std::exp(x); }));
  add(unary(
      "sigmoid",
      []<class T>(T x, const Params&) {
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](double x, const Params&) {
        const double s = stable_sigmoid(x);
        return s * (1.0 - s);
      }));
  add(unary(
      "sqrt", []<class T>(T x, const Params&) { return std::sqrt(x); },
      [](double x, const Params&) { return 0.5 / std::sqrt(x); }));
  add(unary(
      "tanh",
      []<class T>(T x, const Params&) {
        const T a = std::exp(x), b = std::exp(-x);
        return (a - b) / (a + b);
      },
      [](double x, const Params&) {
        const double t = std::tanh(x);
        return 1.0 - t * t;
      }));
  add(unary(
      "relu",
      []<class T>(T x, const Params&) { return x > T(0) || std::isnan(x) ? x : T(0); },
      [](double x, const Params&) { return x > 0 ? 1.0 : 0.0; }));
  add(unary(
      "elu",
      []<class T>(T x, const Params& p) {
        const T alpha = static_cast<T>(param_number(p, "alpha", 1.0));
        return x > T(0) ? x : alpha * (std::exp(x) - T(1));
      },
      [](double x, const Params& p) {
        return x > 0 ? 1.0 : param_number(p, "alpha", 1.0) * std::exp(x);
      }));
  add(unary(
      "softplus", []<class T>(T x, const Params&) { return std::log(T(1) + std::exp(x)); },
      [](double x, const Params&) { return stable_sigmoid(x); }));
  add(unary(
      "rsqrt", []<class T>(T x, const Params&) { return T(1) / std::sqrt(x); },
      [](double x, const Params&) { return -0.5 / (x * std::sqrt(x)); }));
  add(unary(
      "reciprocal", []<class T>(T x, const Params&) { return T(1) / x; },
      [](double x, const Params&) { return -1.0 / (x * x); }));
  add(unary(
      "acos", []<class T>(T x, const Params&) { return std::acos(x); },
      [](double x, const Params&) { return -1.0 / std::sqrt(1.0 - x * x); }));
  add(unary(
      "cosh",
      []<class T>(T x, const Params&) { return (std::exp(x) + std::exp(-x)) / T(2); },
      [](double x, const Params&) { return std::sinh(x); }));
  add(unary(
      "sinh",
      []<class T>(T x, const Params&) { return (std::exp(x) - std::exp(-x)) / T(2); },
      [](double x, const Params&) { return std::cosh(x); }));
  add(unary(
      "square", []<class T>(T x, const Params&) { return x * x; },
      [](double x, const Params&) { return 2.0 * x; }));
  add(unary(
      "pow",
      []<class T>(T x, const Params& p) {
        return std::pow(x, static_cast<T>(param_number(p, "exponent", 3.0)));
      },
      [](double x, const Params& p) {
        const double e = param_number(p, "exponent", 3.0);
        return e * std::pow(x, e - 1.0);
      }));
  add(unary(
      "remainder",
      []<class T>(T x, const Params& p) {
        return remainder_floor(x, static_cast<T>(param_number(p, "divisor", 53.0)));
      },
      [](double, const Params&) { return 1.0; }));

  add(binary(
      "div", []<class T>(T a, T b) { return a / b; },
      [](double a, double b) { return std::pair{1.0 / b, -a / (b * b)}; }));

  {  // softmax over the last axis, without max-shifting
    Kernel k;
    k.name = "softmax";
    k.forward = [](std::span<const Tensor> in, const Params&, Precision p) {
      require_arity(in, 1, "softmax");
      return by_precision(p, [&]<class T>() {
        auto x = to_vec<T>(in[0]);
        const std::size_t n = in[0].inner();
        for (std::size_t r = 0; r < in[0].outer(); ++r) {
          T s = T(0);
          for (std::size_t j = 0; j < n; ++j) s += x[r * n + j] = std::exp(x[r * n + j]);
          for (std::size_t j = 0; j < n; ++j) x[r * n + j] /= s;
        }
        return from_vec(in[0].shape(), x, p);
      });
    };
    k.vjp = [](std::span<const Tensor> in, const Params&, const Tensor& adj) {
      const auto s = softmax_rows(in[0]);
      Tensor g = Tensor::zeros(in[0].shape());
      const std::size_t n = in[0].inner();
      for (std::size_t r = 0; r < in[0].outer(); ++r) {
        double dot = 0;
        for (std::size_t j = 0; j < n; ++j) dot += adj[r * n + j] * s[r * n + j];
        for (std::size_t j = 0; j < n; ++j)
          g[r * n + j] = s[r * n + j] * (adj[r * n + j] - dot);
      }
      return std::vector<Tensor>{g};
    };
    add(std::move(k));
  }

  {  // x - log(sum(exp(x))) over the last axis
    Kernel k;
    k.name = "log_softmax";
    k.forward = [](std::span<const Tensor> in, const Params&, Precision p) {
      require_arity(in, 1, "log_softmax");
      return by_precision(p, [&]<class T>() {
        auto x = to_vec<T>(in[0]);
        const std::size_t n = in[0].inner();
        for (std::size_t r = 0; r < in[0].outer(); ++r) {
          T s = T(0);
          for (std::size_t j = 0; j < n; ++j) s += std::exp(x[r * n + j]);
          const T ls = std::log(s);
          for (std::size_t j = 0; j < n; ++j) x[r * n + j] -= ls;
        }
        return from_vec(in[0].shape(), x, p);
      });
    };
    k.vjp = [](std::span<const Tensor> in, const Params&, const Tensor& adj) {
      const auto s = softmax_rows(in[0]);
      Tensor g = Tensor::zeros(in[0].shape());
      const std::size_t n = in[0].inner();
      for (std::size_t r = 0; r < in[0].outer(); ++r) {
        double total = 0;
        for (std::size_t j = 0; j < n; ++j) total += adj[r * n + j];
        for (std::size_t j = 0; j < n; ++j)
          g[r * n + j] = adj[r * n + j] - s[r * n + j] * total;
      }
      return std::vector<Tensor>{g};
    };
    add(std::move(k));
  }

  for (const bool average : {false, true}) {
    Kernel k;
    k.name = average ? "mean" : "sum";
    k.forward = [average, name = k.name](std::span<const Tensor> in, const Params&,
                                         Precision p) {
      require_arity(in, 1, name);
      require(!in[0].empty(), name + " of an empty tensor");
      return by_precision(p, [&]<class T>() {
        T s = T(0);
        for (double v : in[0].values()) s += static_cast<T>(v);
        if (average) s /= static_cast<T>(in[0].size());
        return from_vec<T>({1}, {s}, p);
      });
    };
    k.vjp = [average](std::span<const Tensor> in, const Params&, const Tensor& adj) {
      const double f = average ? adj[0] / static_cast<double>(in[0].size()) : adj[0];
      return std::vector<Tensor>{Tensor::filled(in[0].shape(), f)};
    };
    add(std::move(k));
  }

  {  // A[n,k] @ B[k,m]
    Kernel k;
    k.name = "matmul";
    k.min_arity = k.max_arity = 2;
    k.forward = [](std::span<const Tensor> in, const Params&, Precision p) {
      require_arity(in, 2, "matmul");
      require_matrix(in[0], "matmul lhs");
      require_matrix(in[1], "matmul rhs");
      const std::size_t n = in[0].shape()[0], kk = in[0].shape()[1], m = in[1].shape()[1];
      require(in[1].shape()[0] == kk, "matmul inner dimensions differ: " +
                                          shape_string(in[0].shape()) + " x " +
                                          shape_string(in[1].shape()));
      return by_precision(p, [&]<class T>() {
        const auto a = to_vec<T>(in[0]);
        const auto b = to_vec<T>(in[1]);
        std::vector<T> c(n * m, T(0));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < m; ++j) {
            T s = T(0);
            for (std::size_t q = 0; q < kk; ++q) s += a[i * kk + q] * b[q * m + j];
            c[i * m + j] = s;
          }
        return from_vec({n, m}, c, p);
      });
    };
    k.vjp = [](std::span<const Tensor> in, const Params&, const Tensor& adj) {
      const std::size_t n = in[0].shape()[0], kk = in[0].shape()[1], m = in[1].shape()[1];
      const auto bt = transpose(in[1].values(), kk, m);
      const auto at = transpose(in[0].values(), n, kk);
      return std::vector<Tensor>{
          Tensor(in[0].shape(), matmul_d(adj.values(), bt, n, m, kk)),
          Tensor(in[1].shape(), matmul_d(at, adj.values(), kk, n, m))};
    };
    add(std::move(k));
  }

  {  // x[n,k] @ W[m,k]^T + b[m]
    Kernel k;
    k.name = "linear";
    k.min_arity = k.max_arity = 3;
    k.forward = [](std::span<const Tensor> in, const Params&, Precision p) {
      require_arity(in, 3, "linear");
      require_matrix(in[0], "linear input");
      require_matrix(in[1], "linear weight");
      const std::size_t n = in[0].shape()[0], kk = in[0].shape()[1], m = in[1].shape()[0];
      require(in[1].shape()[1] == kk, "linear weight " + shape_string(in[1].shape()) +
                                          " does not match input " +
                                          shape_string(in[0].shape()));
      require(in[2].size() == m, "linear bias must hold " + std::to_string(m) + " values");
      return by_precision(p, [&]<class T>() {
        const auto x = to_vec<T>(in[0]);
        const auto w = to_vec<T>(in[1]);
        const auto b = to_vec<T>(in[2]);
        std::vector<T> y(n * m);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < m; ++j) {
            T s = T(0);
            for (std::size_t q = 0; q < kk; ++q) s += x[i * kk + q] * w[j * kk + q];
            y[i * m + j] = s + b[j];
          }
        return from_vec({n, m}, y, p);
      });
    };
    k.vjp = [](std::span<const Tensor> in, const Params&, const Tensor& adj) {
      const std::size_t n = in[0].shape()[0], kk = in[0].shape()[1], m = in[1].shape()[0];
      Tensor gx(in[0].shape(), matmul_d(adj.values(), in[1].values(), n, m, kk));
      const auto adj_t = transpose(adj.values(), n, m);
      Tensor gw(in[1].shape(), matmul_d(adj_t, in[0].values(), m, n, kk));
      Tensor gb = Tensor::zeros(in[2].shape());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) gb[j] += adj[i * m + j];
      return std::vector<Tensor>{gx, gw, gb};
    };
    add(std::move(k));
  }

  {  // row-wise cosine similarity with each norm clamped below at eps
    Kernel k;
    k.name = "cosine_similarity";
    k.min_arity = k.max_arity = 2;
    k.forward = [](std::span<const Tensor> in, const Params& params, Precision p) {
      require_arity(in, 2, "cosine_similarity");
      require(in[0].shape() == in[1].shape(),
              "cosine_similarity operands differ: " + shape_string(in[0].shape()) +
                  " vs " + shape_string(in[1].shape()));
      const double eps = param_number(params, "eps", 1e-8);
      return by_precision(p, [&]<class T>() {
        const auto x = to_vec<T>(in[0]);
        const auto y = to_vec<T>(in[1]);
        const std::size_t n = in[0].inner();
        std::vector<T> out(in[0].outer());
        for (std::size_t r = 0; r < out.size(); ++r) {
          T sx = T(0), sy = T(0);
          for (std::size_t j = 0; j < n; ++j) {
            sx += x[r * n + j] * x[r * n + j];
            sy += y[r * n + j] * y[r * n + j];
          }
          const T nx = std::max(std::sqrt(sx), static_cast<T>(eps));
          const T ny = std::max(std::sqrt(sy), static_cast<T>(eps));
          T c = T(0);
          for (std::size_t j = 0; j < n; ++j) c += (x[r * n + j] / nx) * (y[r * n + j] / ny);
          out[r] = c;
        }
        return from_vec(rows_shape(in[0]), out, p);
      });
    };
    k.vjp = [](std::span<const Tensor> in, const Params& params, const Tensor& adj) {
      const double eps = param_number(params, "eps", 1e-8);
      const std::size_t n = in[0].inner();
      Tensor gx = Tensor::zeros(in[0].shape()), gy = Tensor::zeros(in[1].shape());
      for (std::size_t r = 0; r < in[0].outer(); ++r) {
        double sx = 0, sy = 0, dot = 0;
        for (std::size_t j = 0; j < n; ++j) {
          sx += in[0][r * n + j] * in[0][r * n + j];
          sy += in[1][r * n + j] * in[1][r * n + j];
          dot += in[0][r * n + j] * in[1][r * n + j];
        }
        const double nx = std::sqrt(sx), ny = std::sqrt(sy);
        const double ax = std::max(nx, eps), ay = std::max(ny, eps);
        const double c = dot / (ax * ay);
        for (std::size_t j = 0; j < n; ++j) {
          const double xi = in[0][r * n + j], yi = in[1][r * n + j];
          double dx = yi / (ax * ay), dy = xi / (ax * ay);
          if (nx > eps) dx -= c * xi / sx;
          if (ny > eps) dy -= c * yi / sy;
          gx[r * n + j] = adj[r] * dx;
          gy[r * n + j] = adj[r] * dy;
        }
      }
      return std::vector<Tensor>{gx, gy};
    };
    add(std::move(k));
  }

  {  // mean over rows of -log(softmax(z)[label]), softmax computed naively
    Kernel k;
    k.name = "cross_entropy";
    auto labels_of = [](const Params& params, std::size_t rows, std::size_t classes) {
      std::vector<std::size_t> labels(rows, 0);
      if (params.is_object() && params.contains("labels")) {
        const auto& l = params.at("labels");
        if (l.is_number()) {
          std::fill(labels.begin(), labels.end(), l.get<std::size_t>());
        } else {
          require(l.is_array() && l.size() == rows,
                  "cross_entropy labels must hold one class per row");
          for (std::size_t i = 0; i < rows; ++i) labels[i] = l[i].get<std::size_t>();
        }
      }
      for (auto c : labels) require(c < classes, "cross_entropy label out of range");
      return labels;
    };
    k.forward = [labels_of](std::span<const Tensor> in, const Params& params,
                            Precision p) {
      require_arity(in, 1, "cross_entropy");
      const std::size_t n = in[0].inner(), rows = in[0].outer();
      const auto labels = labels_of(params, rows, n);
      return by_precision(p, [&]<class T>() {
        const auto z = to_vec<T>(in[0]);
        T loss = T(0);
        for (std::size_t r = 0; r < rows; ++r) {
          T s = T(0);
          for (std::size_t j = 0; j < n; ++j) s += std::exp(z[r * n + j]);
          loss -= std::log(std::exp(z[r * n + labels[r]]) / s);
        }
        return from_vec<T>({1}, {loss / static_cast<T>(rows)}, p);
      });
    };
    k.vjp = [labels_of](std::span<const Tensor> in, const Params& params,
                        const Tensor& adj) {
      const std::size_t n = in[0].inner(), rows = in[0].outer();
      const auto labels = labels_of(params, rows, n);
      const auto s = softmax_rows(in[0]);
      Tensor g = Tensor::zeros(in[0].shape());
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < n; ++j)
          g[r * n + j] = adj[0] * (s[r * n + j] - (j == labels[r] ? 1.0 : 0.0)) /
                         static_cast<double>(rows);
      return std::vector<Tensor>{g};
    };
    add(std::move(k));
  }

  {  // single-channel valid cross-correlation
    Kernel k;
    k.name = "conv2d";
    k.min_arity = k.max_arity = 2;
    k.forward = [](std::span<const Tensor> in, const Params&, Precision p) {
      require_arity(in, 2, "conv2d");
      require_matrix(in[0], "conv2d input");
      require_matrix(in[1], "conv2d kernel");
      const std::size_t h = in[0].shape()[0], w = in[0].shape()[1];
      const std::size_t kh = in[1].shape()[0], kw = in[1].shape()[1];
      require(kh <= h && kw <= w, "conv2d kernel larger than input");
      const std::size_t oh = h - kh + 1, ow = w - kw + 1;
      return by_precision(p, [&]<class T>() {
        const auto x = to_vec<T>(in[0]);
        const auto f = to_vec<T>(in[1]);
        std::vector<T> y(oh * ow);
        for (std::size_t i = 0; i < oh; ++i)
          for (std::size_t j = 0; j < ow; ++j) {
            T s = T(0);
            for (std::size_t a = 0; a < kh; ++a)
              for (std::size_t b = 0; b < kw; ++b)
                s += x[(i + a) * w + (j + b)] * f[a * kw + b];
            y[i * ow + j] = s;
          }
        return from_vec({oh, ow}, y, p);
      });
    };
    k.vjp = [](std::span<const Tensor> in, const Params&, const Tensor& adj) {
      const std::size_t w = in[0].shape()[1];
      const std::size_t kh = in[1].shape()[0], kw = in[1].shape()[1];
      const std::size_t oh = adj.shape()[0], ow = adj.shape()[1];
      Tensor gx = Tensor::zeros(in[0].shape()), gf = Tensor::zeros(in[1].shape());
      for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j)
          for (std::size_t a = 0; a < kh; ++a)
            for (std::size_t b = 0; b < kw; ++b) {
              gx[(i + a) * w + (j + b)] += adj[i * ow + j] * in[1][a * kw + b];
              gf[a * kw + b] += adj[i * ow + j] * in[0][(i + a) * w + (j + b)];
            }
      return std::vector<Tensor>{gx, gf};
    };
    add(std::move(k));
  }

  {
    Kernel k;
    k.name = "matrix_inverse";
    k.forward = [](std::span<const Tensor> in, const Params&, Precision p) {
      require_arity(in, 1, "matrix_inverse");
      const std::size_t n = square_side(in[0], "matrix_inverse");
      return by_precision(p, [&]<class T>() {
        return from_vec(in[0].shape(), gauss_jordan_inverse(to_vec<T>(in[0]), n), p);
      });
    };
    k.vjp = [](std::span<const Tensor> in, const Params&, const Tensor& adj) {
      const std::size_t n = in[0].shape()[0];
      const auto inv = gauss_jordan_inverse(to_vec<double>(in[0]), n);
      const auto inv_t = transpose(inv, n, n);
      auto g = matmul_d(matmul_d(inv_t, adj.values(), n, n, n), inv_t, n, n, n);
      for (auto& v : g) v = -v;
      return std::vector<Tensor>{Tensor(in[0].shape(), g)};
    };
    add(std::move(k));
  }

  {
    Kernel k;
    k.name = "determinant";
    k.forward = [](std::span<const Tensor> in, const Params&, Precision p) {
      require_arity(in, 1, "determinant");
      const std::size_t n = square_side(in[0], "determinant");
      return by_precision(p, [&]<class T>() {
        return from_vec<T>({1}, {lu_determinant(to_vec<T>(in[0]), n)}, p);
      });
    };
    k.vjp = [](std::span<const Tensor> in, const Params&, const Tensor& adj) {
      const std::size_t n = in[0].shape()[0];
      const double det = lu_determinant(to_vec<double>(in[0]), n);
      const auto inv_t = transpose(gauss_jordan_inverse(to_vec<double>(in[0]), n), n, n);
      Tensor g(in[0].shape(), inv_t);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= adj[0] * det;
      return std::vector<Tensor>{g};
    };
    add(std::move(k));
  }

  // ---- stable helpers -----------------------------------------------------

  {
    Kernel k = binary(
        "add", []<class T>(T a, T b) { return a + b; },
        [](double, double) { return std::pair{1.0, 1.0}; });
    k.helper = true;
    add(std::move(k));
  }
  {
    Kernel k = binary(
        "sub", []<class T>(T a, T b) { return a - b; },
        [](double, double) { return std::pair{1.0, -1.0}; });
    k.helper = true;
    add(std::move(k));
  }
  {
    Kernel k = unary(
        "scale",
        []<class T>(T x, const Params& p) {
          return x * static_cast<T>(param_number(p, "factor", 1.0));
        },
        [](double, const Params& p) { return param_number(p, "factor", 1.0); });
    k.helper = true;
    add(std::move(k));
  }
  {
    Kernel k;
    k.name = "constant";
    k.helper = true;
    k.min_arity = k.max_arity = 0;
    k.forward = [](std::span<const Tensor> in, const Params& params, Precision p) {
      require_arity(in, 0, "constant");
      require(params.is_object() && params.contains("value"), "constant needs a value");
      const auto& v = params.at("value");
      std::vector<double> values;
      if (v.is_array())
        for (const auto& e : v) values.push_back(e.get<double>());
      else
        values.push_back(v.get<double>());
      Shape shape{values.size()};
      if (params.contains("shape")) shape = params.at("shape").get<Shape>();
      if (values.size() == 1 && shape_size(shape) != 1)
        values.assign(shape_size(shape), values[0]);
      return Tensor(shape, values, p);
    };
    k.vjp = [](std::span<const Tensor>, const Params&, const Tensor&) {
      return std::vector<Tensor>{};
    };
    add(std::move(k));
  }
  {
    Kernel k;
    k.name = "reshape";
    k.helper = true;
    k.forward = [](std::span<const Tensor> in, const Params& params, Precision p) {
      require_arity(in, 1, "reshape");
      require(params.is_object() && params.contains("shape"), "reshape needs a shape");
      return in[0].as(p).reshaped(params.at("shape").get<Shape>());
    };
    k.vjp = [](std::span<const Tensor> in, const Params&, const Tensor& adj) {
      return std::vector<Tensor>{adj.reshaped(in[0].shape())};
    };
    add(std::move(k));
  }
  return cat;
}

}  // namespace detail

inline const std::map<std::string, Kernel, std::less<>>& kernel_catalog() {
  static const auto catalog = detail::build_catalog();
  return catalog;
}

/// nullptr when no executable kernel of that name exists.
inline const Kernel* find_kernel(std::string_view name) {
  const auto& cat = kernel_catalog();
  auto it = cat.find(name);
  return it == cat.end() ? nullptr : &it->second;
}

inline const Kernel& get_kernel(std::string_view name) {
  if (const Kernel* k = find_kernel(name)) return *k;
  throw CapabilityError("no executable kernel named '" + std::string(name) + "'");
}

/// Evaluates one kernel. NaN/INF in the output are data, not errors.
inline Tensor kernel_eval(std::string_view name, std::span<const Tensor> inputs,
                          Precision precision, const Params& params = Params::object()) {
  const Kernel& k = get_kernel(name);
  std::vector<Tensor> cast;
  cast.reserve(inputs.size());
  for (const auto& t : inputs) cast.push_back(t.as(precision));
  return k.forward(cast, params, precision);
}

inline Tensor kernel_eval(std::string_view name, std::initializer_list<Tensor> inputs,
                          Precision precision, const Params& params = Params::object()) {
  return kernel_eval(name, std::span<const Tensor>(inputs.begin(), inputs.size()),
                     precision, params);
}

}  // namespace saf
