#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tomoq/prob.hpp"
#include "tomoq/quantum.hpp"
#include "tomoq/report.hpp"
#include "tomoq/reshape.hpp"

namespace tomoq {

inline double tomographic_shannon(const DensityMatrix& rho, const UnitaryMatrix& u) {
  return shannon_entropy(tomogram(rho, u).probs);
}

inline double tomographic_q_entropy(const DensityMatrix& rho, const UnitaryMatrix& u,
                                    QParam q, EntropyKind kind) {
  return entropy(tomogram(rho, u).probs, kind, q);
}

enum class MinimizationStrategy { analytic, sampled };

struct MinimizationOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
};

struct GroupMinimum {
  double value = 0.0;
  UnitaryMatrix minimizer;
  bool degenerate = false;
};

// Minimum of the tomographic entropy over the unitary group.  The analytic
// strategy returns the diagonalizing unitary (columns are the eigenvectors,
// so u^dagger rho u is diagonal) together with the spectral entropy; the
// sampled strategy scans seeded Haar probes and returns the best one found.
// With a degenerate spectrum the minimizer is gauge-dependent, which the
// flag records.
inline GroupMinimum min_entropy_over_group(const DensityMatrix& rho, EntropyKind kind,
                                           QParam q,
                                           MinimizationStrategy strategy,
                                           MinimizationOptions opts = {}) {
  if (strategy == MinimizationStrategy::analytic) {
    return GroupMinimum{quantum_q_entropy(rho, q, kind),
                        UnitaryMatrix(rho.eigenbasis()), rho.degenerate()};
  }
  if (opts.samples == 0)
    throw std::invalid_argument("min_entropy_over_group: no samples requested");
  double best = 0.0;
  UnitaryMatrix argmin = UnitaryMatrix::identity(rho.dim());
  for (std::size_t i = 0; i < opts.samples; ++i) {
    const UnitaryMatrix u = haar_sample(rho.dim(), derive_seed(opts.seed, i));
    const double value = tomographic_q_entropy(rho, u, q, kind);
    if (i == 0 || value < best) {
      best = value;
      argmin = u;
    }
  }
  return GroupMinimum{best, argmin, rho.degenerate()};
}

namespace detail {

inline void require_factors(const DensityMatrix& rho, std::size_t n, const char* who) {
  if (rho.factor_count() != n)
    throw std::invalid_argument(std::string(who) + ": state must have " +
                                std::to_string(n) + " subsystems");
}

} // namespace detail

// H_1(u) + H_2(u) >= H_12(u) for every bipartite state and every unitary.
inline CheckReport subadditivity_on_group(const DensityMatrix& rho, const UnitaryMatrix& u,
                                          double tol = default_margin_tol) {
  detail::require_factors(rho, 2, "subadditivity_on_group");
  const Tomogram t = tomogram(rho, u);
  const double h1 = shannon_entropy(marginal_tomogram(t, {0}).probs);
  const double h2 = shannon_entropy(marginal_tomogram(t, {1}).probs);
  const double h12 = shannon_entropy(t.probs);
  CheckReport r = CheckReport::make("subadd-23", h1 + h2, h12, h1 + h2 - h12, tol);
  r.extra = {{"h_1", h1}, {"h_2", h2}, {"h_12", h12}};
  return r;
}

// H_12(u) + H_23(u) >= H_123(u) + H_2(u) for every tripartite state.
inline CheckReport strong_subadditivity_on_group(const DensityMatrix& rho,
                                                 const UnitaryMatrix& u,
                                                 double tol = default_margin_tol) {
  detail::require_factors(rho, 3, "strong_subadditivity_on_group");
  const Tomogram t = tomogram(rho, u);
  const double h12 = shannon_entropy(marginal_tomogram(t, {0, 1}).probs);
  const double h23 = shannon_entropy(marginal_tomogram(t, {1, 2}).probs);
  const double h123 = shannon_entropy(t.probs);
  const double h2 = shannon_entropy(marginal_tomogram(t, {1}).probs);
  CheckReport r = CheckReport::make("ssa-31", h12 + h23, h123 + h2,
                                    (h12 + h23) - (h123 + h2), tol);
  r.extra = {{"h_12", h12}, {"h_23", h23}, {"h_123", h123}, {"h_2", h2}};
  return r;
}

inline double tomographic_information(const DensityMatrix& rho, const UnitaryMatrix& u) {
  detail::require_factors(rho, 2, "tomographic_information");
  const Tomogram t = tomogram(rho, u);
  return shannon_entropy(marginal_tomogram(t, {0}).probs) +
         shannon_entropy(marginal_tomogram(t, {1}).probs) - shannon_entropy(t.probs);
}

// Spectral counterparts of the group-level checks: subadditivity of the
// von Neumann entropy for bipartite input, that plus strong subadditivity
// for tripartite input.
inline std::vector<CheckReport> von_neumann_counterparts(const DensityMatrix& rho,
                                                         double tol = default_margin_tol) {
  std::vector<CheckReport> out;
  if (rho.factor_count() == 2) {
    const double s1 = von_neumann_entropy(partial_trace(rho, {0}));
    const double s2 = von_neumann_entropy(partial_trace(rho, {1}));
    const double s12 = von_neumann_entropy(rho);
    CheckReport r = CheckReport::make("vn-27", s1 + s2, s12, s1 + s2 - s12, tol);
    r.extra = {{"s_1", s1}, {"s_2", s2}, {"s_12", s12}};
    out.push_back(std::move(r));
    return out;
  }
  if (rho.factor_count() == 3) {
    const double s1 = von_neumann_entropy(partial_trace(rho, {0}));
    const double s2 = von_neumann_entropy(partial_trace(rho, {1}));
    const double s12 = von_neumann_entropy(partial_trace(rho, {0, 1}));
    const double s23 = von_neumann_entropy(partial_trace(rho, {1, 2}));
    const double s123 = von_neumann_entropy(rho);
    CheckReport sub = CheckReport::make("vn-27", s1 + s2, s12, s1 + s2 - s12, tol);
    sub.extra = {{"s_1", s1}, {"s_2", s2}, {"s_12", s12}};
    out.push_back(std::move(sub));
    CheckReport ssa = CheckReport::make("vn-36", s12 + s23, s123 + s2,
                                        (s12 + s23) - (s123 + s2), tol);
    ssa.extra = {{"s_12", s12}, {"s_23", s23}, {"s_123", s123}, {"s_2", s2}};
    out.push_back(std::move(ssa));
    return out;
  }
  throw std::invalid_argument(
      "von_neumann_counterparts: state must have 2 or 3 subsystems");
}

// Per-factor diagonalizers of the reduced states and their tensor product.
// The joint unitary minimizes each single-subsystem tomographic entropy
// simultaneously; degenerate reductions make the choice gauge-dependent.
struct LocalMinimizers {
  std::vector<UnitaryMatrix> factors;
  UnitaryMatrix joint;
  bool degenerate = false;
};

inline LocalMinimizers local_minimizers(const DensityMatrix& rho) {
  std::vector<UnitaryMatrix> factors;
  bool degenerate = false;
  for (std::size_t f = 0; f < rho.factor_count(); ++f) {
    const DensityMatrix red = partial_trace(rho, {f});
    degenerate = degenerate || red.degenerate();
    factors.emplace_back(red.eigenbasis());
  }
  UnitaryMatrix joint = factors.front();
  for (std::size_t f = 1; f < factors.size(); ++f) joint = tensor(joint, factors[f]);
  return LocalMinimizers{std::move(factors), std::move(joint), degenerate};
}

// Two-sided bound through the joint tomographic entropy at the local
// minimizer: S_1 + S_2 >= H_12(u_loc) >= S_12.  The margin is the tighter of
// the two sides.
inline CheckReport sandwich_check(const DensityMatrix& rho,
                                  double tol = default_margin_tol) {
  detail::require_factors(rho, 2, "sandwich_check");
  const double s1 = von_neumann_entropy(partial_trace(rho, {0}));
  const double s2 = von_neumann_entropy(partial_trace(rho, {1}));
  const double s12 = von_neumann_entropy(rho);
  const LocalMinimizers lm = local_minimizers(rho);
  const double h12 = tomographic_shannon(rho, lm.joint);
  const double upper = s1 + s2 - h12;
  const double lower = h12 - s12;
  CheckReport r = CheckReport::make("sandwich-E", s1 + s2, s12, std::min(upper, lower), tol);
  r.degenerate_flag = lm.degenerate;
  r.extra = {{"h_12_local", h12}, {"upper_margin", upper}, {"lower_margin", lower},
             {"s_1", s1},         {"s_2", s2},             {"s_12", s12}};
  return r;
}

// Discord-like deficit D = H_12(u_loc) - S_12: the information left in the
// joint state that the best product-basis measurement does not see.  The
// cross check recomputes D as the gap between the spectral mutual
// information and the tomographic information at the same unitary.
inline CheckReport discord_like_D(const DensityMatrix& rho,
                                  double tol = default_margin_tol) {
  detail::require_factors(rho, 2, "discord_like_D");
  const double s1 = von_neumann_entropy(partial_trace(rho, {0}));
  const double s2 = von_neumann_entropy(partial_trace(rho, {1}));
  const double s12 = von_neumann_entropy(rho);
  const LocalMinimizers lm = local_minimizers(rho);
  const Tomogram t = tomogram(rho, lm.joint);
  const double h1 = shannon_entropy(marginal_tomogram(t, {0}).probs);
  const double h2 = shannon_entropy(marginal_tomogram(t, {1}).probs);
  const double h12 = shannon_entropy(t.probs);
  const double d = h12 - s12;
  const double i_quantum = s1 + s2 - s12;
  const double i_local = h1 + h2 - h12;
  CheckReport r = CheckReport::make("discord-G", h12, s12, d, tol);
  r.degenerate_flag = lm.degenerate;
  r.extra = {{"i_quantum", i_quantum},   {"i_local", i_local},
             {"d_cross_check", i_quantum - i_local},
             {"h_1_local", h1},          {"h_2_local", h2},
             {"s_1", s1},                {"s_2", s2},
             {"s_12", s12}};
  return r;
}

struct GaugeSpread {
  double d_min = 0.0;
  double d_max = 0.0;
  std::size_t evaluations = 0;
};

// Spread of the discord-like deficit over the gauge freedom of the local
// minimizers.  Eigenvectors inside a near-degenerate block of a reduced
// state can be rotated freely; each sample redraws those blocks Haar and
// re-evaluates D.  The deterministic gauge is always evaluation zero, so a
// nondegenerate state reports a single point.
inline GaugeSpread discord_gauge_spread(const DensityMatrix& rho, std::size_t samples,
                                        std::uint64_t seed) {
  detail::require_factors(rho, 2, "discord_gauge_spread");
  const double s12 = von_neumann_entropy(rho);

  std::vector<DensityMatrix> reduced;
  reduced.push_back(partial_trace(rho, {0}));
  reduced.push_back(partial_trace(rho, {1}));

  // Maximal runs of eigenvalues with consecutive gaps below the threshold.
  auto blocks_of = [](const std::vector<double>& values) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;  // offset, size
    std::size_t start = 0;
    for (std::size_t i = 1; i <= values.size(); ++i) {
      if (i == values.size() || values[i - 1] - values[i] >= degenerate_gap_tol) {
        blocks.emplace_back(start, i - start);
        start = i;
      }
    }
    return blocks;
  };

  GaugeSpread spread;
  bool any_block = false;
  for (const auto& red : reduced)
    for (const auto& b : blocks_of(red.eigenvalues()))
      if (b.second > 1) any_block = true;

  const std::size_t total = any_block ? samples + 1 : 1;
  for (std::size_t s = 0; s < total; ++s) {
    UnitaryMatrix joint = UnitaryMatrix::identity(1);
    bool first = true;
    for (std::size_t f = 0; f < reduced.size(); ++f) {
      ComplexMatrix basis = reduced[f].eigenbasis();
      if (s > 0) {
        ComplexMatrix rot = ComplexMatrix::identity(reduced[f].dim());
        const auto blocks = blocks_of(reduced[f].eigenvalues());
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
          const auto [off, size] = blocks[bi];
          if (size < 2) continue;
          const UnitaryMatrix g = haar_sample(
              size, derive_seed(derive_seed(seed, s, stream_gauge), f * 4096 + off));
          for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = 0; j < size; ++j) rot(off + i, off + j) = g.mat()(i, j);
        }
        basis = basis * rot;
      }
      const UnitaryMatrix uf{std::move(basis)};
      joint = first ? uf : tensor(joint, uf);
      first = false;
    }
    const double d = tomographic_shannon(rho, joint) - s12;
    if (s == 0) {
      spread.d_min = spread.d_max = d;
    } else {
      spread.d_min = std::min(spread.d_min, d);
      spread.d_max = std::max(spread.d_max, d);
    }
  }
  spread.evaluations = total;
  return spread;
}

namespace detail {

// Deformed conditional entropy sum_b w_b^q T_q(column b), with the q -> 1
// Shannon limit.  Zero-mass columns contribute zero.
inline double tsallis_conditional(const std::vector<double>& joint, std::size_t n1,
                                  std::size_t n2, const std::vector<double>& wb,
                                  QParam q) {
  double acc = 0.0;
  for (std::size_t b = 0; b < n2; ++b) {
    const double mass = wb[b];
    if (mass <= 0.0) continue;
    if (q.is_one()) {
      double h = 0.0;
      for (std::size_t a = 0; a < n1; ++a) {
        const double v = joint[a * n2 + b] / mass;
        if (v > 0.0) h -= v * std::log(v);
      }
      acc += mass * h;
    } else {
      double s = 0.0;
      for (std::size_t a = 0; a < n1; ++a) {
        const double v = joint[a * n2 + b] / mass;
        if (v > 0.0) s += std::pow(v, q.value());
      }
      acc += std::pow(mass, q.value()) * (s - 1.0) / (1.0 - q.value());
    }
  }
  return acc;
}

} // namespace detail

// Deformed chain rule T_q(A,B | u) = T_q(A|B, u) + T_q(B | u), which holds
// as an algebraic identity; the margin is the negated absolute residual.
inline CheckReport tsallis_chain_rule(const DensityMatrix& rho, const UnitaryMatrix& u,
                                      QParam q, double tol = identity_tol) {
  detail::require_factors(rho, 2, "tsallis_chain_rule");
  const Tomogram t = tomogram(rho, u);
  const std::size_t n1 = rho.dims()[0];
  const std::size_t n2 = rho.dims()[1];
  const std::vector<double>& joint = t.probs.components();
  const ProbVector wb = marginal_tomogram(t, {1}).probs;

  const double t_joint = tsallis_entropy(t.probs, q);
  const double t_b = tsallis_entropy(wb, q);
  const double t_cond = detail::tsallis_conditional(joint, n1, n2, wb.components(), q);
  const double residual = t_joint - (t_cond + t_b);
  CheckReport r = CheckReport::make("chain-A2", t_joint, t_cond + t_b,
                                    -std::abs(residual), tol);
  r.witness.q = q.value();
  r.extra = {{"t_joint", t_joint}, {"t_conditional", t_cond}, {"t_marginal_b", t_b},
             {"residual", residual}};
  return r;
}

// Deformed-entropy relations evaluated on one (state, unitary, q) triple:
//   tsallis-mono  joint dominates the marginal, any q > 0;
//   tsallis-cond  conditioning does not raise the entropy; guaranteed for
//                 q >= 1 and reported as conjectural below it, where product
//                 states already violate it;
//   tsallis-A5    at the local minimizer the A-marginal matches the spectral
//                 value of the reduced state and the joint dominates the
//                 spectral value of the full state;
//   tsallis-A6    the q -> 1 (Shannon) bounds at the local minimizer,
//                 H_12 >= S_1 >= H(A|B).
inline std::vector<CheckReport> tsallis_inequalities(const DensityMatrix& rho,
                                                     const UnitaryMatrix& u, QParam q,
                                                     double tol = default_margin_tol) {
  detail::require_factors(rho, 2, "tsallis_inequalities");
  std::vector<CheckReport> out;
  const Tomogram t = tomogram(rho, u);
  const std::size_t n1 = rho.dims()[0];
  const std::size_t n2 = rho.dims()[1];
  const std::vector<double>& joint = t.probs.components();
  const ProbVector wa = marginal_tomogram(t, {0}).probs;
  const ProbVector wb = marginal_tomogram(t, {1}).probs;

  const double t_joint = tsallis_entropy(t.probs, q);
  const double t_a = tsallis_entropy(wa, q);
  const double t_cond = detail::tsallis_conditional(joint, n1, n2, wb.components(), q);

  CheckReport mono = CheckReport::make("tsallis-mono", t_joint, t_a, t_joint - t_a, tol);
  mono.witness.q = q.value();
  out.push_back(std::move(mono));

  CheckReport cond = CheckReport::make("tsallis-cond", t_a, t_cond, t_a - t_cond, tol);
  cond.witness.q = q.value();
  cond.conjectural = q.value() < 1.0;
  out.push_back(std::move(cond));

  const LocalMinimizers lm = local_minimizers(rho);
  const Tomogram t_loc = tomogram(rho, lm.joint);
  const DensityMatrix rho_a = partial_trace(rho, {0});

  const double t_a_loc = tsallis_entropy(marginal_tomogram(t_loc, {0}).probs, q);
  const double t_a_spec = quantum_q_entropy(rho_a, q, EntropyKind::tsallis);
  const double t_joint_loc = tsallis_entropy(t_loc.probs, q);
  const double t_joint_spec = quantum_q_entropy(rho, q, EntropyKind::tsallis);
  const double eq_margin = -std::abs(t_a_loc - t_a_spec);
  const double dom_margin = t_joint_loc - t_joint_spec;
  CheckReport a5 = CheckReport::make("tsallis-A5", t_joint_loc, t_joint_spec,
                                     std::min(eq_margin, dom_margin), tol);
  a5.witness.q = q.value();
  a5.degenerate_flag = lm.degenerate;
  a5.extra = {{"t_a_local", t_a_loc}, {"t_a_spectral", t_a_spec},
              {"t_joint_local", t_joint_loc}, {"t_joint_spectral", t_joint_spec},
              {"equality_margin", eq_margin}, {"dominance_margin", dom_margin}};
  out.push_back(std::move(a5));

  const QParam one{1.0};
  const double h12_loc = shannon_entropy(t_loc.probs);
  const double s_a = von_neumann_entropy(rho_a);
  const ProbVector wb_loc = marginal_tomogram(t_loc, {1}).probs;
  const double h_cond_loc = detail::tsallis_conditional(t_loc.probs.components(), n1, n2,
                                                        wb_loc.components(), one);
  const double upper = h12_loc - s_a;
  const double lower = s_a - h_cond_loc;
  CheckReport a6 = CheckReport::make("tsallis-A6", h12_loc, s_a,
                                     std::min(upper, lower), tol);
  a6.witness.q = 1.0;
  a6.degenerate_flag = lm.degenerate;
  a6.extra = {{"h_12_local", h12_loc}, {"s_a", s_a}, {"h_cond_local", h_cond_loc},
              {"upper_margin", upper}, {"lower_margin", lower}};
  out.push_back(std::move(a6));

  return out;
}

} // namespace tomoq
