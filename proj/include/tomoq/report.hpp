#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tomoq {

// Provenance of the objects a check was evaluated on.  Labels are free-form
// but deterministic for a given run configuration.
struct Witness {
  std::optional<std::uint64_t> seed;
  std::string state;
  std::string unitary;
  std::optional<double> q;
};

// Outcome of one inequality or identity evaluation.  margin >= -tol defines
// pass; for identities the margin is -|lhs - rhs| so the same rule applies.
// conjectural marks evaluations of relations that are only believed to hold
// in the evaluated regime; they are reported but never counted as failures.
struct CheckReport {
  std::string inequality_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tol = 0.0;
  bool pass = false;
  bool degenerate_flag = false;
  bool conjectural = false;
  Witness witness;
  std::vector<std::pair<std::string, double>> extra;

  static CheckReport make(std::string id, double lhs, double rhs, double margin,
                          double tol) {
    CheckReport r;
    r.inequality_id = std::move(id);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = margin;
    r.tol = tol;
    r.pass = margin >= -tol;
    return r;
  }

  // Re-evaluates pass after a tolerance override.
  void apply_tol(double new_tol) {
    tol = new_tol;
    pass = margin >= -new_tol;
  }
};

} // namespace tomoq
