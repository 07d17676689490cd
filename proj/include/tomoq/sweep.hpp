#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tomoq/inequalities.hpp"
#include "tomoq/prob.hpp"
#include "tomoq/quantum.hpp"
#include "tomoq/report.hpp"
#include "tomoq/reshape.hpp"
#include "tomoq/rng.hpp"

namespace tomoq {

// Inequality ids accepted by the single-check interface.
inline const std::vector<std::string>& inequality_catalog() {
  static const std::vector<std::string> ids = {
      "subadd-23", "ssa-31",     "sandwich-E", "discord-G", "chain-A2", "tsallis-A5",
      "tsallis-A6", "vn-27",     "vn-36",      "grid-M1",   "cube-M18"};
  return ids;
}

// Sweeps additionally select the two relations that only appear bundled in
// the deformed-entropy checker.
inline const std::vector<std::string>& sweep_selectable_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v = inequality_catalog();
    v.push_back("tsallis-mono");
    v.push_back("tsallis-cond");
    return v;
  }();
  return ids;
}

// Ids meaningful for a given subsystem structure.  Classical grid and cube
// relabelings apply to any tomogram; the group-level checks need the exact
// arity they quantify over.
inline std::vector<std::string> applicable_inequalities(const std::vector<std::size_t>& dims) {
  switch (dims.size()) {
    case 2:
      return {"subadd-23", "vn-27",      "sandwich-E",  "discord-G",  "chain-A2",
              "tsallis-mono", "tsallis-cond", "tsallis-A5", "tsallis-A6", "grid-M1",
              "cube-M18"};
    case 3:
      return {"ssa-31", "vn-27", "vn-36", "grid-M1", "cube-M18"};
    default:
      return {"grid-M1", "cube-M18"};
  }
}

// Near-square layout covering n entries: rows = floor(sqrt(n)).
inline std::pair<std::size_t, std::size_t> balanced_grid_shape(std::size_t n) {
  if (n == 0) throw std::invalid_argument("balanced_grid_shape: zero size");
  std::size_t rows = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  if (rows == 0) rows = 1;
  const std::size_t cols = (n + rows - 1) / rows;
  return {rows, cols};
}

inline std::array<std::size_t, 3> balanced_cube_shape(std::size_t n) {
  if (n == 0) throw std::invalid_argument("balanced_cube_shape: zero size");
  std::size_t n1 = static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n))));
  if (n1 == 0) n1 = 1;
  const std::size_t rest = (n + n1 - 1) / n1;
  const auto [n2, n3] = balanced_grid_shape(rest);
  return {n1, n2, n3};
}

struct SweepConfig {
  std::size_t sample_count = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::size_t> dims;
  std::size_t rank = 0;  // 0 selects full rank
  std::vector<double> q_list = {0.5, 1.0, 2.0};
  std::vector<std::string> inequalities;  // empty selects all applicable
  std::optional<double> tolerance;        // overrides per-id defaults

  std::size_t hilbert_dim() const {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return n;
  }

  void validate() const {
    if (sample_count == 0) throw std::invalid_argument("sweep config: sample_count must be >= 1");
    if (dims.empty()) throw std::invalid_argument("sweep config: dims must be nonempty");
    for (std::size_t d : dims)
      if (d == 0) throw std::invalid_argument("sweep config: zero subsystem dimension");
    if (hilbert_dim() < 2)
      throw std::invalid_argument("sweep config: total dimension must be >= 2");
    if (rank > hilbert_dim())
      throw std::invalid_argument("sweep config: rank exceeds total dimension");
    if (q_list.empty()) throw std::invalid_argument("sweep config: q_list must be nonempty");
    for (double q : q_list)
      if (!(q > 0.0) || !std::isfinite(q))
        throw std::invalid_argument("sweep config: q values must be finite and positive");
    if (tolerance && !std::isfinite(*tolerance))
      throw std::invalid_argument("sweep config: tolerance must be finite");
    const auto applicable = applicable_inequalities(dims);
    for (const std::string& id : inequalities) {
      bool known = false;
      for (const std::string& s : sweep_selectable_ids()) known = known || s == id;
      if (!known) throw std::invalid_argument("sweep config: unknown inequality id '" + id + "'");
      bool ok = false;
      for (const std::string& s : applicable) ok = ok || s == id;
      if (!ok)
        throw std::invalid_argument("sweep config: inequality '" + id +
                                    "' does not apply to the configured dims");
    }
  }
};

struct SweepSummaryRow {
  std::string inequality_id;
  std::size_t evaluations = 0;
  std::size_t failures = 0;  // non-conjectural reports with pass == false
  double min_margin = 0.0;
};

struct SweepResult {
  std::vector<CheckReport> reports;  // sample-major, deterministic order
  std::vector<SweepSummaryRow> summary;
};

// Worker-thread budget: TOMOQ_THREADS wins when set, otherwise the hardware
// concurrency.  Values parse as a positive integer; zero means one.
inline std::size_t sweep_thread_cap() {
  if (const char* env = std::getenv("TOMOQ_THREADS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v == 0 ? 1 : static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t max_threads, Fn&& fn) {
  const std::size_t workers = std::min(max_threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline bool wants(const std::vector<std::string>& ids, const char* id) {
  for (const std::string& s : ids)
    if (s == id) return true;
  return false;
}

} // namespace detail

// Seeded Monte Carlo over (state, unitary) pairs: each sample draws a
// rank-constrained Ginibre state and a Haar unitary from seeds derived off
// the master seed, evaluates the selected checks, and the driver aggregates
// one summary row per id.  Reports come back in sample-major order
// regardless of the thread count.
inline SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> ids =
      cfg.inequalities.empty() ? applicable_inequalities(cfg.dims) : cfg.inequalities;
  const std::size_t n = cfg.hilbert_dim();
  const std::size_t rank = cfg.rank == 0 ? n : cfg.rank;

  const bool tsallis_bundle = detail::wants(ids, "tsallis-mono") ||
                              detail::wants(ids, "tsallis-cond") ||
                              detail::wants(ids, "tsallis-A5") ||
                              detail::wants(ids, "tsallis-A6");

  std::string dims_label;
  for (std::size_t f = 0; f < cfg.dims.size(); ++f) {
    if (f) dims_label += ',';
    dims_label += std::to_string(cfg.dims[f]);
  }

  std::vector<std::vector<CheckReport>> slots(cfg.sample_count);
  auto evaluate_sample = [&](std::size_t i) {
    const std::uint64_t base = derive_seed(cfg.master_seed, i);
    const std::uint64_t state_seed = derive_seed(base, 0, stream_state);
    const std::uint64_t unitary_seed = derive_seed(base, 0, stream_unitary);
    const DensityMatrix rho = random_density(cfg.dims, rank, state_seed);
    const UnitaryMatrix u = haar_sample(n, unitary_seed);

    const std::string state_label = "ginibre:dims=" + dims_label +
                                    ";rank=" + std::to_string(rank) +
                                    ";seed=" + std::to_string(state_seed);
    const std::string unitary_label = "haar:seed=" + std::to_string(unitary_seed);

    std::vector<CheckReport> out;
    auto finish = [&](CheckReport r, const std::string& state, const std::string& unitary) {
      r.witness.seed = i;
      r.witness.state = state;
      r.witness.unitary = unitary;
      if (cfg.tolerance) r.apply_tol(*cfg.tolerance);
      out.push_back(std::move(r));
    };

    std::optional<Tomogram> probe;
    auto probe_tomogram = [&]() -> const Tomogram& {
      if (!probe) probe = tomogram(rho, u);
      return *probe;
    };

    std::vector<CheckReport> vn;
    if (detail::wants(ids, "vn-27") || detail::wants(ids, "vn-36"))
      vn = von_neumann_counterparts(rho);

    std::vector<std::vector<CheckReport>> tsallis_per_q;
    if (tsallis_bundle)
      for (double q : cfg.q_list)
        tsallis_per_q.push_back(tsallis_inequalities(rho, u, QParam(q)));

    for (const std::string& id : ids) {
      if (id == "grid-M1" || id == "cube-M18") {
        const ProbVector& p = probe_tomogram().probs;
        SeededRng relabel_rng(derive_seed(base, 0, stream_relabel));
        const Permutation perm = Permutation::random(p.dim(), relabel_rng);
        const ProbVector shuffled = permute(p, perm);
        const std::string src = state_label + ";" + detail::permutation_label(perm);
        if (id == "grid-M1") {
          const auto [rows, cols] = cfg.dims.size() == 2
                                        ? std::pair<std::size_t, std::size_t>{cfg.dims[0], cfg.dims[1]}
                                        : balanced_grid_shape(p.dim());
          finish(subadditivity_check(GridView::from_vector(shuffled, rows, cols)), src,
                 unitary_label);
        } else {
          const std::array<std::size_t, 3> shape =
              cfg.dims.size() == 3
                  ? std::array<std::size_t, 3>{cfg.dims[0], cfg.dims[1], cfg.dims[2]}
                  : balanced_cube_shape(p.dim());
          finish(strong_subadditivity_check(CubeView::from_vector(shuffled, shape)), src,
                 unitary_label);
        }
      } else if (id == "subadd-23") {
        finish(subadditivity_on_group(rho, u), state_label, unitary_label);
      } else if (id == "ssa-31") {
        finish(strong_subadditivity_on_group(rho, u), state_label, unitary_label);
      } else if (id == "vn-27" || id == "vn-36") {
        for (const CheckReport& r : vn)
          if (r.inequality_id == id) finish(r, state_label, "spectral");
      } else if (id == "sandwich-E") {
        finish(sandwich_check(rho), state_label, "local-min");
      } else if (id == "discord-G") {
        finish(discord_like_D(rho), state_label, "local-min");
      } else if (id == "chain-A2") {
        for (double q : cfg.q_list)
          finish(tsallis_chain_rule(rho, u, QParam(q)), state_label, unitary_label);
      } else {
        // tsallis-mono / tsallis-cond / tsallis-A5 / tsallis-A6
        for (std::size_t qi = 0; qi < cfg.q_list.size(); ++qi) {
          if (id == "tsallis-A6" && qi > 0) break;  // q-independent
          for (const CheckReport& r : tsallis_per_q[qi])
            if (r.inequality_id == id)
              finish(r, state_label,
                     id == "tsallis-A5" || id == "tsallis-A6" ? "local-min" : unitary_label);
        }
      }
    }
    slots[i] = std::move(out);
  };

  detail::parallel_for(cfg.sample_count, sweep_thread_cap(), evaluate_sample);

  SweepResult result;
  for (auto& s : slots)
    for (auto& r : s) result.reports.push_back(std::move(r));

  for (const CheckReport& r : result.reports) {
    SweepSummaryRow* row = nullptr;
    for (auto& existing : result.summary)
      if (existing.inequality_id == r.inequality_id) row = &existing;
    if (!row) {
      result.summary.push_back(SweepSummaryRow{r.inequality_id, 0, 0, r.margin});
      row = &result.summary.back();
    }
    row->evaluations += 1;
    if (!r.pass && !r.conjectural) row->failures += 1;
    if (r.margin < row->min_margin) row->min_margin = r.margin;
  }
  return result;
}

} // namespace tomoq
