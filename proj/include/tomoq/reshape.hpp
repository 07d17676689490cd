#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tomoq/prob.hpp"
#include "tomoq/report.hpp"

namespace tomoq {

// Row-major two-index view of a joint distribution.  Entries obey the same
// invariants as ProbVector (nonnegative, sum one).
class GridView {
public:
  GridView(std::size_t rows, std::size_t cols, std::vector<double> row_major)
      : rows_(rows), cols_(cols), flat_(ProbVector(std::move(row_major))) {
    if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("GridView: zero extent");
    if (flat_.dim() != rows_ * cols_)
      throw std::invalid_argument("GridView: entry count does not match shape");
  }

  // Lays a vector out row-major into an m x n grid, padding with zeros.  Any
  // nonnegative vector of dimension <= m*n is a valid joint distribution on
  // the product index set, so no relabeling is lost.
  static GridView from_vector(const ProbVector& p, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("GridView: zero extent");
    if (p.dim() > rows * cols)
      throw std::invalid_argument("GridView: vector does not fit the requested shape");
    std::vector<double> e(rows * cols, 0.0);
    for (std::size_t i = 0; i < p.dim(); ++i) e[i] = p[i];
    return GridView(rows, cols, std::move(e));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t r, std::size_t c) const { return flat_[r * cols_ + c]; }
  const ProbVector& flattened() const { return flat_; }

private:
  std::size_t rows_, cols_;
  ProbVector flat_;
};

// Row-major three-index view; index (i, j, k) maps to (i*n2 + j)*n3 + k.
class CubeView {
public:
  CubeView(std::array<std::size_t, 3> shape, std::vector<double> row_major)
      : shape_(shape), flat_(ProbVector(std::move(row_major))) {
    if (shape_[0] == 0 || shape_[1] == 0 || shape_[2] == 0)
      throw std::invalid_argument("CubeView: zero extent");
    if (flat_.dim() != shape_[0] * shape_[1] * shape_[2])
      throw std::invalid_argument("CubeView: entry count does not match shape");
  }

  static CubeView from_vector(const ProbVector& p, std::array<std::size_t, 3> shape) {
    const std::size_t total = shape[0] * shape[1] * shape[2];
    if (total == 0) throw std::invalid_argument("CubeView: zero extent");
    if (p.dim() > total)
      throw std::invalid_argument("CubeView: vector does not fit the requested shape");
    std::vector<double> e(total, 0.0);
    for (std::size_t i = 0; i < p.dim(); ++i) e[i] = p[i];
    return CubeView(shape, std::move(e));
  }

  const std::array<std::size_t, 3>& shape() const { return shape_; }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return flat_[(i * shape_[1] + j) * shape_[2] + k];
  }
  const ProbVector& flattened() const { return flat_; }

private:
  std::array<std::size_t, 3> shape_;
  ProbVector flat_;
};

inline ProbVector row_marginal(const GridView& g) {
  std::vector<double> m(g.rows(), 0.0);
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c) m[r] += g.at(r, c);
  return ProbVector(std::move(m));
}

inline ProbVector col_marginal(const GridView& g) {
  std::vector<double> m(g.cols(), 0.0);
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c) m[c] += g.at(r, c);
  return ProbVector(std::move(m));
}

// Sums out the dropped axis; the result keeps the remaining two axes in
// their original order.
inline GridView pair_marginal(const CubeView& c, std::size_t dropped_axis) {
  if (dropped_axis > 2) throw std::invalid_argument("pair_marginal: axis out of range");
  const auto& s = c.shape();
  std::array<std::size_t, 2> kept{};
  std::size_t n = 0;
  for (std::size_t a = 0; a < 3; ++a)
    if (a != dropped_axis) kept[n++] = a;
  std::vector<double> m(s[kept[0]] * s[kept[1]], 0.0);
  for (std::size_t i = 0; i < s[0]; ++i)
    for (std::size_t j = 0; j < s[1]; ++j)
      for (std::size_t k = 0; k < s[2]; ++k) {
        const std::array<std::size_t, 3> idx{i, j, k};
        m[idx[kept[0]] * s[kept[1]] + idx[kept[1]]] += c.at(i, j, k);
      }
  return GridView(s[kept[0]], s[kept[1]], std::move(m));
}

inline ProbVector axis_marginal(const CubeView& c, std::size_t kept_axis) {
  if (kept_axis > 2) throw std::invalid_argument("axis_marginal: axis out of range");
  const auto& s = c.shape();
  std::vector<double> m(s[kept_axis], 0.0);
  for (std::size_t i = 0; i < s[0]; ++i)
    for (std::size_t j = 0; j < s[1]; ++j)
      for (std::size_t k = 0; k < s[2]; ++k) {
        const std::array<std::size_t, 3> idx{i, j, k};
        m[idx[kept_axis]] += c.at(i, j, k);
      }
  return ProbVector(std::move(m));
}

inline double mutual_information(const GridView& g) {
  return shannon_entropy(row_marginal(g)) + shannon_entropy(col_marginal(g)) -
         shannon_entropy(g.flattened());
}

// H(row) + H(col) >= H(joint) for any grid; margin is lhs - rhs.
inline CheckReport subadditivity_check(const GridView& g) {
  const double lhs =
      shannon_entropy(row_marginal(g)) + shannon_entropy(col_marginal(g));
  const double rhs = shannon_entropy(g.flattened());
  return CheckReport::make("grid-M1", lhs, rhs, lhs - rhs, default_margin_tol);
}

// H(12) + H(23) >= H(123) + H(2) for any cube; margin is lhs - rhs.
inline CheckReport strong_subadditivity_check(const CubeView& c) {
  const double h12 = shannon_entropy(pair_marginal(c, 2).flattened());
  const double h23 = shannon_entropy(pair_marginal(c, 0).flattened());
  const double h123 = shannon_entropy(c.flattened());
  const double h2 = shannon_entropy(axis_marginal(c, 1));
  const double lhs = h12 + h23;
  const double rhs = h123 + h2;
  CheckReport r = CheckReport::make("cube-M18", lhs, rhs, lhs - rhs, default_margin_tol);
  r.extra = {{"h_12", h12}, {"h_23", h23}, {"h_123", h123}, {"h_2", h2}};
  return r;
}

// Coarse-graining of an index set: an optional relabeling permutation
// followed by grouping of consecutive blocks.  Group sizes must partition
// the full index range.
class PortraitMap {
public:
  explicit PortraitMap(std::vector<std::size_t> group_sizes,
                       std::optional<Permutation> relabel = std::nullopt)
      : sizes_(std::move(group_sizes)), relabel_(std::move(relabel)) {
    if (sizes_.empty()) throw std::invalid_argument("PortraitMap: no groups");
    total_ = 0;
    for (std::size_t s : sizes_) {
      if (s == 0) throw std::invalid_argument("PortraitMap: empty group");
      total_ += s;
    }
    if (relabel_ && relabel_->size() != total_)
      throw std::invalid_argument("PortraitMap: permutation size does not match groups");
    offsets_.reserve(sizes_.size());
    std::size_t off = 0;
    for (std::size_t s : sizes_) {
      offsets_.push_back(off);
      off += s;
    }
  }

  // Groups a row-major m x n grid into its m rows.
  static PortraitMap rows_of(std::size_t rows, std::size_t cols) {
    return PortraitMap(std::vector<std::size_t>(rows, cols));
  }

  std::size_t total() const { return total_; }
  std::size_t group_count() const { return sizes_.size(); }
  std::size_t group_size(std::size_t k) const { return sizes_.at(k); }
  std::size_t group_offset(std::size_t k) const { return offsets_.at(k); }
  const std::optional<Permutation>& relabel() const { return relabel_; }

  // Vector as seen by the grouping stage: relabeled if a permutation is set.
  ProbVector arranged(const ProbVector& p) const {
    if (p.dim() != total_)
      throw std::invalid_argument("PortraitMap: vector dimension does not match map");
    return relabel_ ? permute(p, *relabel_) : p;
  }

private:
  std::vector<std::size_t> sizes_;
  std::optional<Permutation> relabel_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

// Group sums after relabeling: a shorter distribution, one entry per group.
inline ProbVector portrait(const ProbVector& p, const PortraitMap& map) {
  const ProbVector q = map.arranged(p);
  std::vector<double> out(map.group_count(), 0.0);
  for (std::size_t k = 0; k < map.group_count(); ++k)
    for (std::size_t i = 0; i < map.group_size(k); ++i)
      out[k] += q[map.group_offset(k) + i];
  return ProbVector(std::move(out));
}

// Distribution inside group k, normalized by the group sum.  Undefined when
// the group sum vanishes.
inline ProbVector conditional_distribution(const ProbVector& p, const PortraitMap& map,
                                           std::size_t k) {
  if (k >= map.group_count())
    throw std::invalid_argument("conditional_distribution: group index out of range");
  const ProbVector q = map.arranged(p);
  double mass = 0.0;
  for (std::size_t i = 0; i < map.group_size(k); ++i)
    mass += q[map.group_offset(k) + i];
  if (mass <= 0.0)
    throw std::invalid_argument("conditional_distribution: group has zero mass");
  std::vector<double> out(map.group_size(k));
  for (std::size_t i = 0; i < map.group_size(k); ++i)
    out[i] = q[map.group_offset(k) + i] / mass;
  return ProbVector(std::move(out));
}

// sum_k Pi_k H(p | group k), computed from the definition.  Zero-mass groups
// contribute zero.  Equals H(p) - H(portrait(p)) identically.
inline double average_conditional_entropy(const ProbVector& p, const PortraitMap& map) {
  const ProbVector q = map.arranged(p);
  double acc = 0.0;
  for (std::size_t k = 0; k < map.group_count(); ++k) {
    double mass = 0.0;
    for (std::size_t i = 0; i < map.group_size(k); ++i)
      mass += q[map.group_offset(k) + i];
    if (mass <= 0.0) continue;
    double h = 0.0;
    for (std::size_t i = 0; i < map.group_size(k); ++i) {
      const double v = q[map.group_offset(k) + i] / mass;
      if (v > 0.0) h -= v * std::log(v);
    }
    acc += mass * h;
  }
  return acc;
}

struct PermutationSweepOptions {
  std::size_t max_samples = 10000;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::string permutation_label(const Permutation& perm) {
  std::string s = "perm:";
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(perm.target(i));
  }
  return s;
}

} // namespace detail

// Subadditivity of one vector under relabelings: every permutation of p is
// laid out on the same rows x cols grid and checked.  Exhaustive when the
// dimension allows it, seeded sampling otherwise.  The joint entropy is
// permutation invariant, so all reports share their rhs.
inline std::vector<CheckReport> permutation_inequality_sweep(
    const ProbVector& p, std::size_t rows, std::size_t cols,
    PermutationSweepOptions opts = {}) {
  if (p.dim() > rows * cols)
    throw std::invalid_argument(
        "permutation_inequality_sweep: vector does not fit the requested shape");
  std::vector<CheckReport> out;
  const std::size_t n = p.dim();
  if (n <= 8) {
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), std::size_t{0});
    std::uint64_t index = 0;
    do {
      const Permutation perm{std::vector<std::size_t>(m)};
      CheckReport r =
          subadditivity_check(GridView::from_vector(permute(p, perm), rows, cols));
      r.witness.seed = index++;
      r.witness.state = detail::permutation_label(perm);
      out.push_back(std::move(r));
    } while (std::next_permutation(m.begin(), m.end()));
  } else {
    SeededRng rng(opts.seed);
    out.reserve(opts.max_samples);
    for (std::uint64_t index = 0; index < opts.max_samples; ++index) {
      const Permutation perm = Permutation::random(n, rng);
      CheckReport r =
          subadditivity_check(GridView::from_vector(permute(p, perm), rows, cols));
      r.witness.seed = index;
      r.witness.state = detail::permutation_label(perm);
      out.push_back(std::move(r));
    }
  }
  return out;
}

} // namespace tomoq
