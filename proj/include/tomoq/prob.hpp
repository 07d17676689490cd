#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "tomoq/rng.hpp"

namespace tomoq {

// Probability components this close below zero are treated as rounding noise
// and clamped to zero; anything more negative is rejected.
inline constexpr double component_clamp_tol = 1e-10;
// A component sum within this distance of one is renormalized; beyond it the
// vector is rejected.
inline constexpr double sum_tol = 1e-9;
// Uniform acceptance floor for inequality margins.
inline constexpr double default_margin_tol = 1e-9;
// Acceptance floor for identities that hold algebraically.
inline constexpr double identity_tol = 1e-10;

// Finite probability vector.  Construction establishes the invariant that
// every component is >= 0 and the components sum to exactly one (after a
// single renormalization), so downstream code never re-validates.
class ProbVector {
public:
  explicit ProbVector(std::vector<double> components) : c_(std::move(components)) {
    if (c_.empty()) throw std::invalid_argument("ProbVector: empty component list");
    double sum = 0.0;
    for (double& v : c_) {
      if (!std::isfinite(v)) throw std::invalid_argument("ProbVector: non-finite component");
      if (v < 0.0) {
        if (v < -component_clamp_tol)
          throw std::invalid_argument("ProbVector: negative component " + std::to_string(v));
        v = 0.0;
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > sum_tol)
      throw std::invalid_argument("ProbVector: components sum to " + std::to_string(sum));
    for (double& v : c_) v /= sum;
  }

  static ProbVector uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("ProbVector: zero dimension");
    return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static ProbVector point_mass(std::size_t n, std::size_t k) {
    if (k >= n) throw std::invalid_argument("ProbVector: point mass index out of range");
    std::vector<double> c(n, 0.0);
    c[k] = 1.0;
    return ProbVector(std::move(c));
  }

  // Uniform draw from the probability simplex (normalized unit exponentials).
  static ProbVector random(std::size_t n, SeededRng& rng) {
    std::vector<double> c(n);
    for (double& v : c) {
      double u = 0.0;
      do {
        u = rng.uniform01();
      } while (u <= 0.0);
      v = -std::log(u);
    }
    const double sum = std::accumulate(c.begin(), c.end(), 0.0);
    for (double& v : c) v /= sum;
    return ProbVector(std::move(c));
  }

  std::size_t dim() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  const std::vector<double>& components() const { return c_; }

private:
  std::vector<double> c_;
};

// Entropic order parameter q > 0.  q == 1 is dispatched to the Shannon
// limit explicitly; nearby values go through the generic formulas.
class QParam {
public:
  explicit QParam(double q) : q_(q) {
    if (!std::isfinite(q) || q <= 0.0)
      throw std::invalid_argument("QParam: q must be finite and positive");
  }
  double value() const { return q_; }
  bool is_one() const { return q_ == 1.0; }

private:
  double q_;
};

// Bijection on {0, ..., n-1}.  Applied to a vector, entry i moves to
// position target(i).
class Permutation {
public:
  explicit Permutation(std::vector<std::size_t> mapping) : map_(std::move(mapping)) {
    if (map_.empty()) throw std::invalid_argument("Permutation: empty mapping");
    std::vector<bool> seen(map_.size(), false);
    for (std::size_t t : map_) {
      if (t >= map_.size() || seen[t])
        throw std::invalid_argument("Permutation: mapping is not a bijection");
      seen[t] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), std::size_t{0});
    return Permutation(std::move(m));
  }

  static Permutation transposition(std::size_t n, std::size_t i, std::size_t j) {
    Permutation p = identity(n);
    if (i >= n || j >= n) throw std::invalid_argument("Permutation: index out of range");
    std::swap(p.map_[i], p.map_[j]);
    return p;
  }

  // Fisher-Yates with a dedicated engine; fully determined by the seed state.
  static Permutation random(std::size_t n, SeededRng& rng) {
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.below(i));
      std::swap(m[i - 1], m[j]);
    }
    return Permutation(std::move(m));
  }

  std::size_t size() const { return map_.size(); }
  std::size_t target(std::size_t i) const { return map_[i]; }
  const std::vector<std::size_t>& mapping() const { return map_; }

private:
  std::vector<std::size_t> map_;
};

inline ProbVector permute(const ProbVector& p, const Permutation& perm) {
  if (perm.size() != p.dim())
    throw std::invalid_argument("permute: permutation size does not match vector dimension");
  std::vector<double> out(p.dim(), 0.0);
  for (std::size_t i = 0; i < p.dim(); ++i) out[perm.target(i)] = p[i];
  return ProbVector(std::move(out));
}

namespace detail {

// -sum p ln p over raw components; zero components contribute zero.
inline double shannon_sum(const std::vector<double>& c) {
  double h = 0.0;
  for (double v : c)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

inline double power_sum(const std::vector<double>& c, double q) {
  double s = 0.0;
  for (double v : c)
    if (v > 0.0) s += std::pow(v, q);
  return s;
}

} // namespace detail

inline double shannon_entropy(const ProbVector& p) {
  return detail::shannon_sum(p.components());
}

inline double renyi_entropy(const ProbVector& p, QParam q) {
  if (q.is_one()) return shannon_entropy(p);
  return std::log(detail::power_sum(p.components(), q.value())) / (1.0 - q.value());
}

inline double tsallis_entropy(const ProbVector& p, QParam q) {
  if (q.is_one()) return shannon_entropy(p);
  return (detail::power_sum(p.components(), q.value()) - 1.0) / (1.0 - q.value());
}

// Deformed logarithm: (x^{1-q} - 1)/(1-q), with the q -> 1 limit ln x.
inline double q_log(double x, QParam q) {
  if (!(x > 0.0)) throw std::domain_error("q_log: argument must be positive");
  if (q.is_one()) return std::log(x);
  return (std::pow(x, 1.0 - q.value()) - 1.0) / (1.0 - q.value());
}

// Deformed relative entropy -sum_k p_k ln_q(r_k / p_k).  A component with
// p_k > 0 and r_k == 0 makes the divergence infinite for every q; the
// infinity is returned as a marker rather than thrown.
inline double relative_q_entropy(const ProbVector& p, const ProbVector& r, QParam q) {
  if (p.dim() != r.dim())
    throw std::invalid_argument("relative_q_entropy: dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.dim(); ++k) {
    if (p[k] == 0.0) continue;
    if (r[k] == 0.0) return std::numeric_limits<double>::infinity();
    acc -= p[k] * q_log(r[k] / p[k], q);
  }
  return acc;
}

enum class EntropyKind { shannon, renyi, tsallis };

inline double entropy(const ProbVector& p, EntropyKind kind, QParam q) {
  switch (kind) {
    case EntropyKind::shannon: return shannon_entropy(p);
    case EntropyKind::renyi: return renyi_entropy(p, q);
    case EntropyKind::tsallis: return tsallis_entropy(p, q);
  }
  throw std::logic_error("entropy: unknown kind");
}

inline const char* to_string(EntropyKind kind) {
  switch (kind) {
    case EntropyKind::shannon: return "shannon";
    case EntropyKind::renyi: return "renyi";
    case EntropyKind::tsallis: return "tsallis";
  }
  return "unknown";
}

inline ProbVector tensor_product(const ProbVector& a, const ProbVector& b) {
  std::vector<double> out;
  out.reserve(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) out.push_back(a[i] * b[j]);
  return ProbVector(std::move(out));
}

} // namespace tomoq
