// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "saf/default_registry.hpp"
#include "saf/error.hpp"
#include "saf/kernels.hpp"
#include "saf/registry.hpp"
#include "saf/tensor.hpp"

namespace saf {

enum class FailureClass {
  NaNorINF,
  OutOfRange,
  RewriteMismatch,
  StableAlgoMismatch,
  ReferenceMismatch,
  WidthMismatch,
};

inline std::string_view to_string(FailureClass c) {
  switch (c) {
    case FailureClass::NaNorINF: return "NaNorINF";
    case FailureClass::OutOfRange: return "OutOfRange";
    case FailureClass::RewriteMismatch: return "RewriteMismatch";
    case FailureClass::StableAlgoMismatch: return "StableAlgoMismatch";
    case FailureClass::ReferenceMismatch: return "ReferenceMismatch";
    case FailureClass::WidthMismatch: return "WidthMismatch";
  }
  return "?";
}

inline FailureClass parse_failure_class(std::string_view s) {
  for (auto c : {FailureClass::NaNorINF, FailureClass::OutOfRange, FailureClass::RewriteMismatch,
                 FailureClass::StableAlgoMismatch, FailureClass::ReferenceMismatch,
                 FailureClass::WidthMismatch})
    if (to_string(c) == s) return c;
  throw ParseError("unknown failure class '" + std::string(s) + "'");
}

enum class OracleStatus { Pass, Fail };

struct VerdictDetail {
  int oracle = 0;
  std::optional<std::size_t> index;
  double observed = 0;
  double reference = 0;
  double delta = 0;
  std::string message;
};

struct OracleVerdict {
  OracleStatus status = OracleStatus::Pass;
  std::optional<FailureClass> failure_class;
  VerdictDetail detail;

  bool failed() const noexcept { return status == OracleStatus::Fail; }
  bool passed() const noexcept { return status == OracleStatus::Pass; }

  static OracleVerdict pass(int oracle) {
    OracleVerdict v;
    v.detail.oracle = oracle;
    return v;
  }
  static OracleVerdict fail(FailureClass c, VerdictDetail d) {
    OracleVerdict v;
    v.status = OracleStatus::Fail;
    v.failure_class = c;
    v.detail = std::move(d);
    return v;
  }
};

namespace detail {

/// |a - b| where matching non-finite values count as equal and any other
/// non-finite pairing counts as infinitely far apart.
inline double abs_delta(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return 0;
  if (std::isinf(a) && a == b) return 0;
  if (!std::isfinite(a) || !std::isfinite(b)) return std::numeric_limits<double>::infinity();
  return std::abs(a - b);
}

/// Largest element-wise delta, or a Fail verdict when it exceeds `tol`.
inline OracleVerdict compare(const Tensor& observed, const Tensor& reference, double tol,
                             int oracle, FailureClass cls,
                             const std::function<double(double, double)>& delta) {
  if (observed.size() != reference.size())
    throw UsageError("oracle comparison of tensors with different sizes");
  std::size_t worst = 0;
  double worst_delta = -1;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = delta(observed[i], reference[i]);
    if (d > worst_delta || std::isnan(d)) {
      worst_delta = std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
      worst = i;
    }
  }
  if (observed.size() == 0 || !(worst_delta > tol)) return OracleVerdict::pass(oracle);
  VerdictDetail d{oracle, worst, observed[worst], reference[worst], worst_delta,
                  "difference exceeds tolerance " + std::to_string(tol)};
  return OracleVerdict::fail(cls, d);
}

}  // namespace detail

// ---- oracle 1 --------------------------------------------------------------

inline OracleVerdict check_nan_inf(const Tensor& output) {
  for (std::size_t i = 0; i < output.size(); ++i)
    if (!std::isfinite(output[i]))
      return OracleVerdict::fail(FailureClass::NaNorINF,
                                 {1, i, output[i], 0, 0,
                                  std::isnan(output[i]) ? "NaN" : (output[i] > 0 ? "+INF" : "-INF")});
  return OracleVerdict::pass(1);
}

// ---- oracle 2 --------------------------------------------------------------

inline OracleVerdict check_range(const Tensor& output, double lo, double hi, bool lo_open = false,
                                 bool hi_open = false) {
  if (!(lo < hi)) throw UsageError("range oracle needs lo < hi");
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double v = output[i];
    const bool below = lo_open ? !(v > lo) : !(v >= lo);
    const bool above = hi_open ? !(v < hi) : !(v <= hi);
    if (std::isnan(v) || below || above)
      return OracleVerdict::fail(FailureClass::OutOfRange,
                                 {2, i, v, below ? lo : hi, below ? lo - v : v - hi,
                                  "outside valid range"});
  }
  return OracleVerdict::pass(2);
}

// ---- stable counterparts ---------------------------------------------------

/// A formula and its algebraically equivalent, better-conditioned rewrite.
struct RewritePair {
  std::string rewritten_name;
  std::size_t arity = 1;
  std::function<Tensor(std::span<const Tensor>, Precision)> original;
  std::function<Tensor(std::span<const Tensor>, Precision)> rewritten;
};

namespace detail {

template <class F>
std::function<Tensor(std::span<const Tensor>, Precision)> elementwise3(F f) {
  return [f](std::span<const Tensor> in, Precision p) {
    return by_precision(p, [&]<class T>() {
      const auto a = to_vec<T>(in[0]);
      std::vector<T> out(a.size());
      if (in.size() == 1) {
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], T(0), T(0));
      } else {
        const auto b = to_vec<T>(in[1]);
        const auto c = to_vec<T>(in[2]);
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i], c[i]);
      }
      return from_vec(in[0].shape(), out, p);
    });
  };
}

inline std::map<std::string, RewritePair, std::less<>> build_rewrites() {
  std::map<std::string, RewritePair, std::less<>> m;
  m["log_softmax"] = RewritePair{
      "log_softmax_shifted", 1,
      [](std::span<const Tensor> in, Precision p) {
        return get_kernel("log_softmax").forward(in, Params::object(), p);
      },
      [](std::span<const Tensor> in, Precision p) {
        return by_precision(p, [&]<class T>() {
          auto x = to_vec<T>(in[0]);
          const std::size_t n = in[0].inner();
          for (std::size_t r = 0; r < in[0].outer(); ++r) {
            T mx = -std::numeric_limits<T>::infinity();
            for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, x[r * n + j]);
            T s = T(0);
            for (std::size_t j = 0; j < n; ++j) s += std::exp(x[r * n + j] - mx);
            const T ls = std::log(s);
            for (std::size_t j = 0; j < n; ++j) x[r * n + j] = x[r * n + j] - mx - ls;
          }
          return from_vec(in[0].shape(), x, p);
        });
      }};
  m["ratio_sqrt"] = RewritePair{
      "ratio_sqrt_joint", 1,
      elementwise3([]<class T>(T x, T, T) { return x / (std::sqrt(x) * std::sqrt(x)); }),
      elementwise3([]<class T>(T x, T, T) { return x / std::sqrt(x * x); })};
  m["shifted_log_diff"] = RewritePair{
      "shifted_log_diff_split", 3,
      elementwise3([]<class T>(T x, T mx, T y) { return x - (mx + std::log(y)); }),
      elementwise3([]<class T>(T x, T mx, T y) { return x - mx - std::log(y); })};
  return m;
}

/// Lower Cholesky factor in T, or nullopt when `a` is not symmetric positive
/// definite. Definiteness is decided in double on the given values.
template <class T>
std::optional<std::vector<T>> cholesky(const std::vector<double>& a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (a[i * n + j] != a[j * n + i]) return std::nullopt;
  {
    std::vector<double> l(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double d = a[j * n + j];
      for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
      if (!(d > 0) || !std::isfinite(d)) return std::nullopt;
      l[j * n + j] = std::sqrt(d);
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = a[i * n + j];
        for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
        l[i * n + j] = s / l[j * n + j];
      }
    }
  }
  std::vector<T> l(n * n, T(0));
  for (std::size_t j = 0; j < n; ++j) {
    T d = static_cast<T>(a[j * n + j]);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    l[j * n + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      T s = static_cast<T>(a[i * n + j]);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / l[j * n + j];
    }
  }
  return l;
}

/// A^-1 = L^-T L^-1 from the Cholesky factor.
template <class T>
std::vector<T> cholesky_inverse(const std::vector<T>& l, std::size_t n) {
  std::vector<T> li(n * n, T(0));
  for (std::size_t c = 0; c < n; ++c) {
    li[c * n + c] = T(1) / l[c * n + c];
    for (std::size_t i = c + 1; i < n; ++i) {
      T s = T(0);
      for (std::size_t k = c; k < i; ++k) s += l[i * n + k] * li[k * n + c];
      li[i * n + c] = -s / l[i * n + i];
    }
  }
  std::vector<T> inv(n * n, T(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T s = T(0);
      for (std::size_t k = std::max(i, j); k < n; ++k) s += li[k * n + i] * li[k * n + j];
      inv[i * n + j] = s;
    }
  return inv;
}

}  // namespace detail

inline const std::map<std::string, RewritePair, std::less<>>& rewrite_pairs() {
  static const auto m = detail::build_rewrites();
  return m;
}

/// Stable counterpart of an unstable kernel; nullopt outside its domain.
using StableAlgorithm =
    std::function<std::optional<Tensor>(std::span<const Tensor>, const Params&, Precision)>;

inline const std::map<std::string, StableAlgorithm, std::less<>>& stable_algorithms() {
  static const std::map<std::string, StableAlgorithm, std::less<>> m = {
      {"matrix_inverse",
       [](std::span<const Tensor> in, const Params&, Precision p) -> std::optional<Tensor> {
         const std::size_t n = detail::square_side(in[0], "matrix_inverse");
         const std::vector<double> a(in[0].values().begin(), in[0].values().end());
         if (!detail::cholesky<double>(a, n)) return std::nullopt;
         return detail::by_precision(p, [&]<class T>() {
           return detail::from_vec(in[0].shape(),
                                   detail::cholesky_inverse(*detail::cholesky<T>(a, n), n), p);
         });
       }},
      {"determinant",
       [](std::span<const Tensor> in, const Params&, Precision p) -> std::optional<Tensor> {
         const std::size_t n = detail::square_side(in[0], "determinant");
         const std::vector<double> a(in[0].values().begin(), in[0].values().end());
         if (!detail::cholesky<double>(a, n)) return std::nullopt;
         return detail::by_precision(p, [&]<class T>() {
           const auto l = *detail::cholesky<T>(a, n);
           T d = T(1);
           for (std::size_t i = 0; i < n; ++i) d *= l[i * n + i];
           return detail::from_vec<T>({1}, {d * d}, p);
         });
       }},
  };
  return m;
}

/// Independent reference implementation, always evaluated in Double;
/// nullopt where the reference itself is undefined.
using ReferenceImpl = std::function<std::optional<Tensor>(std::span<const Tensor>, const Params&)>;

inline std::optional<Tensor> cosine_similarity_reference(const Tensor& x, const Tensor& y) {
  if (x.shape() != y.shape()) throw UsageError("cosine_similarity operands differ");
  const std::size_t n = x.inner();
  Shape shape = detail::rows_shape(x);
  std::vector<double> out(x.outer());
  for (std::size_t r = 0; r < out.size(); ++r) {
    // Scale by the largest magnitude first so the squared sums cannot
    // overflow or underflow.
    double mx = 0, my = 0;
    for (std::size_t j = 0; j < n; ++j) {
      mx = std::max(mx, std::abs(x[r * n + j]));
      my = std::max(my, std::abs(y[r * n + j]));
    }
    if (!(mx > 0) || !(my > 0) || !std::isfinite(mx) || !std::isfinite(my)) return std::nullopt;
    long double sx = 0, sy = 0, dot = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const long double a = x[r * n + j] / mx, b = y[r * n + j] / my;
      sx += a * a;
      sy += b * b;
      dot += a * b;
    }
    out[r] = static_cast<double>(dot / (std::sqrt(sx) * std::sqrt(sy)));
  }
  return Tensor(shape, out);
}

inline const std::map<std::string, ReferenceImpl, std::less<>>& reference_impls() {
  static const std::map<std::string, ReferenceImpl, std::less<>> m = {
      {"cosine_similarity",
       [](std::span<const Tensor> in, const Params&) {
         return cosine_similarity_reference(in[0], in[1]);
       }},
  };
  return m;
}

// ---- oracle 3 --------------------------------------------------------------

inline OracleVerdict check_rewrite(std::string_view name, std::span<const Tensor> inputs,
                                   double tolerance = 1e-6,
                                   Precision precision = Precision::Single) {
  const auto& pairs = rewrite_pairs();
  auto it = pairs.find(name);
  if (it == pairs.end())
    throw CapabilityError("'" + std::string(name) + "' has no registered rewrite");
  if (inputs.size() != it->second.arity)
    throw UsageError("rewrite '" + std::string(name) + "' takes " +
                     std::to_string(it->second.arity) + " input(s)");
  std::vector<Tensor> cast;
  for (const auto& t : inputs) cast.push_back(t.as(precision));
  const Tensor a = it->second.original(cast, precision);
  const Tensor b = it->second.rewritten(cast, precision);
  return detail::compare(a, b, tolerance, 3, FailureClass::RewriteMismatch, detail::abs_delta);
}

inline OracleVerdict check_rewrite(std::string_view name, std::initializer_list<Tensor> inputs,
                                   double tolerance = 1e-6,
                                   Precision precision = Precision::Single) {
  return check_rewrite(name, std::span<const Tensor>(inputs.begin(), inputs.size()), tolerance,
                       precision);
}

// ---- oracle 4 --------------------------------------------------------------

/// nullopt when the input lies outside the stable counterpart's domain.
inline std::optional<OracleVerdict> check_stable_algorithm(
    std::string_view name, std::span<const Tensor> inputs, double tolerance = 1e-6,
    Precision precision = Precision::Single, const Params& params = Params::object()) {
  const auto& algos = stable_algorithms();
  auto it = algos.find(name);
  if (it == algos.end())
    throw CapabilityError("'" + std::string(name) + "' has no stable counterpart");
  std::vector<Tensor> cast;
  for (const auto& t : inputs) cast.push_back(t.as(precision));
  const auto stable = it->second(cast, params, precision);
  if (!stable) return std::nullopt;
  const Tensor unstable = get_kernel(name).forward(cast, params, precision);
  return detail::compare(unstable, *stable, tolerance, 4, FailureClass::StableAlgoMismatch,
                         detail::abs_delta);
}

// ---- oracle 5 --------------------------------------------------------------

/// nullopt when the reference is undefined at the input (e.g. a zero norm).
inline std::optional<OracleVerdict> check_reference_consistency(
    std::string_view name, std::span<const Tensor> inputs, double tolerance = 1e-6,
    Precision precision = Precision::Single, const Params& params = Params::object()) {
  const auto& refs = reference_impls();
  auto it = refs.find(name);
  if (it == refs.end())
    throw CapabilityError("'" + std::string(name) + "' has no reference implementation");
  std::vector<Tensor> cast;
  for (const auto& t : inputs) cast.push_back(t.as(precision));
  const auto ref = it->second(cast, params);
  if (!ref) return std::nullopt;
  const Tensor unstable = get_kernel(name).forward(cast, params, precision);
  return detail::compare(unstable, *ref, tolerance, 5, FailureClass::ReferenceMismatch,
                         detail::abs_delta);
}

// ---- oracle 6 --------------------------------------------------------------

enum class WidthMetric { Relative, Integer };

/// Evaluates the kernel in Single and in Double on the same full-precision
/// inputs. Integer-valued kernels compare against the Double result rounded
/// to Single; others use |s - d| / max(1, |d|).
inline OracleVerdict check_increased_width(std::string_view name, std::span<const Tensor> inputs,
                                           double tolerance, WidthMetric metric,
                                           const Params& params = Params::object()) {
  if (!(tolerance > 0)) throw UsageError("width tolerance must be positive");
  const Tensor s = kernel_eval(name, inputs, Precision::Single, params);
  Tensor d = kernel_eval(name, inputs, Precision::Double, params);
  if (metric == WidthMetric::Integer) d = d.as(Precision::Single);
  const auto delta = [metric](double a, double b) {
    const double diff = detail::abs_delta(a, b);
    if (metric == WidthMetric::Integer || !std::isfinite(diff) || diff == 0) return diff;
    return diff / std::max(1.0, std::abs(b));
  };
  return detail::compare(s, d, tolerance, 6, FailureClass::WidthMismatch, delta);
}

inline OracleVerdict check_increased_width(std::string_view name, std::span<const Tensor> inputs,
                                           double tolerance = 1e-6,
                                           const Params& params = Params::object()) {
  WidthMetric metric = WidthMetric::Relative;
  if (const KernelSpec* k = default_registry().find(name))
    for (const auto& o : k->oracles)
      if (o.type == OracleType::IncreasedWidth && o.metric == "integer")
        metric = WidthMetric::Integer;
  return check_increased_width(name, inputs, tolerance, metric, params);
}

inline OracleVerdict check_increased_width(std::string_view name,
                                           std::initializer_list<Tensor> inputs,
                                           double tolerance = 1e-6,
                                           const Params& params = Params::object()) {
  return check_increased_width(name, std::span<const Tensor>(inputs.begin(), inputs.size()),
                               tolerance, params);
}

// ---- dispatcher ------------------------------------------------------------

struct OracleRun {
  OracleVerdict verdict;
  /// Oracles whose counterpart was undefined at this input.
  std::vector<std::string> skipped;
  /// Single-precision kernel output.
  Tensor output;
};

/// Runs the bound oracles of `spec` in registry order and returns the first
/// failure. `inputs` are the kernel operands at full precision; the kernel
/// itself executes in Single. `wide_inputs`, when given, are the operands
/// from a Double execution of the surrounding program and feed the
/// increased-width oracle.
inline OracleRun run_oracles(const KernelSpec& spec, std::span<const Tensor> inputs,
                             const Params& params = Params::object(),
                             std::span<const Tensor> wide_inputs = {}) {
  if (!spec.executable())
    throw CapabilityError("'" + spec.name + "' has no executable implementation");
  OracleRun run;
  std::vector<Tensor> single;
  for (const auto& t : inputs) single.push_back(t.as(Precision::Single));
  run.output = get_kernel(spec.name).forward(single, params, Precision::Single);
  std::size_t ran = 0;
  for (const auto& o : spec.oracles) {
    std::optional<OracleVerdict> v;
    switch (o.type) {
      case OracleType::NanInf: {
        for (const auto& t : single)
          if (auto in = check_nan_inf(t); in.failed()) {
            in.detail.message = "non-finite input (" + in.detail.message + ")";
            v = in;
            break;
          }
        if (!v) v = check_nan_inf(run.output);
        break;
      }
      case OracleType::Range:
        v = check_range(run.output, o.lo, o.hi, o.lo_open, o.hi_open);
        break;
      case OracleType::Rewrite:
        v = check_rewrite(spec.name, inputs, o.tolerance);
        break;
      case OracleType::StableAlgorithm:
        v = check_stable_algorithm(spec.name, inputs, o.tolerance, Precision::Single, params);
        break;
      case OracleType::Reference:
        v = check_reference_consistency(spec.name, inputs, o.tolerance, Precision::Single, params);
        break;
      case OracleType::IncreasedWidth:
        v = check_increased_width(spec.name, wide_inputs.empty() ? inputs : wide_inputs,
                                  o.tolerance,
                                  o.metric == "integer" ? WidthMetric::Integer
                                                        : WidthMetric::Relative,
                                  params);
        break;
    }
    if (!v) {
      run.skipped.push_back("oracle " + std::to_string(static_cast<int>(o.type)) +
                            " unavailable at this input");
      continue;
    }
    ++ran;
    if (v->failed()) {
      run.verdict = *v;
      return run;
    }
  }
  if (ran == 0) throw CapabilityError("no applicable oracle for '" + spec.name + "'");
  run.verdict = OracleVerdict::pass(0);
  return run;
}

inline OracleVerdict run_oracles(std::string_view name, std::span<const Tensor> inputs,
                                 const Params& params = Params::object(),
                                 const Registry& reg = default_registry()) {
  return run_oracles(reg.at(name), inputs, params).verdict;
}

inline OracleVerdict run_oracles(std::string_view name, std::initializer_list<Tensor> inputs,
                                 const Params& params = Params::object(),
                                 const Registry& reg = default_registry()) {
  return run_oracles(name, std::span<const Tensor>(inputs.begin(), inputs.size()), params, reg);
}

}  // namespace saf
