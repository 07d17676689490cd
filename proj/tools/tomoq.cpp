// Command-line front end: state generation, single inequality checks,
// seeded sweeps, tomogram extraction and entropy evaluation.
//
// Exit codes: 0 success / inequality holds, 1 usage or data error,
// 2 inequality violation.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "tomoq/tomoq.hpp"

namespace {

using tomoq::ojson;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    tomoq::write_text_file(out_path, text);
}

std::string catalog_line() {
  std::string s;
  for (const std::string& id : tomoq::inequality_catalog()) {
    if (!s.empty()) s += ' ';
    s += id;
  }
  return s;
}

struct UnitaryChoice {
  tomoq::UnitaryMatrix u;
  std::string label;
};

UnitaryChoice resolve_unitary(const std::string& source, const tomoq::DensityMatrix& rho) {
  if (source == "identity")
    return {tomoq::UnitaryMatrix::identity(rho.dim()), "identity"};
  if (source == "local-min") {
    if (rho.factor_count() == 1)
      return {tomoq::UnitaryMatrix(rho.eigenbasis()), "local-min"};
    return {tomoq::local_minimizers(rho).joint, "local-min"};
  }
  if (source.rfind("haar:", 0) == 0) {
    const std::string seed_text = source.substr(5);
    std::uint64_t seed = 0;
    try {
      seed = tomoq::detail::parse_unsigned(seed_text);
    } catch (const std::exception&) {
      throw std::runtime_error("invalid unitary source '" + source +
                               "': expected haar:<seed>");
    }
    return {tomoq::haar_sample(rho.dim(), seed), "haar:seed=" + std::to_string(seed)};
  }
  throw std::runtime_error("invalid unitary source '" + source +
                           "': expected identity, haar:<seed> or local-min");
}

std::string q_key(double q) { return ojson(q).dump(); }

int cmd_gen_state(const std::vector<std::size_t>& dims, std::size_t rank,
                  std::uint64_t seed, const std::string& out_path) {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  const tomoq::DensityMatrix rho = tomoq::random_density(dims, rank == 0 ? n : rank, seed);
  emit(tomoq::density_to_json(rho).dump(2) + "\n", out_path);
  return 0;
}

int cmd_tomogram(const std::string& state_path, const std::string& u_source,
                 const std::string& out_path) {
  const tomoq::DensityMatrix rho = tomoq::density_from_json(tomoq::parse_json_file(state_path));
  const UnitaryChoice uc = resolve_unitary(u_source, rho);
  emit(tomoq::prob_to_json(tomoq::tomogram(rho, uc.u).probs).dump() + "\n", out_path);
  return 0;
}

int cmd_entropy(const std::string& path, const std::vector<double>& q_values,
                const std::string& out_path) {
  const ojson j = tomoq::parse_json_file(path);
  ojson out;
  ojson renyi, tsallis;
  if (j.is_array()) {
    const tomoq::ProbVector p = tomoq::prob_from_json(j);
    out["kind"] = "distribution";
    out["shannon"] = tomoq::shannon_entropy(p);
    for (double q : q_values) {
      renyi[q_key(q)] = tomoq::renyi_entropy(p, tomoq::QParam(q));
      tsallis[q_key(q)] = tomoq::tsallis_entropy(p, tomoq::QParam(q));
    }
  } else {
    const tomoq::DensityMatrix rho = tomoq::density_from_json(j);
    out["kind"] = "spectral";
    out["von_neumann"] = tomoq::von_neumann_entropy(rho);
    for (double q : q_values) {
      renyi[q_key(q)] =
          tomoq::quantum_q_entropy(rho, tomoq::QParam(q), tomoq::EntropyKind::renyi);
      tsallis[q_key(q)] =
          tomoq::quantum_q_entropy(rho, tomoq::QParam(q), tomoq::EntropyKind::tsallis);
    }
  }
  out["renyi"] = std::move(renyi);
  out["tsallis"] = std::move(tsallis);
  emit(out.dump(2) + "\n", out_path);
  return 0;
}

struct CheckArgs {
  std::string state_path;
  std::string id;
  std::string u_source = "identity";
  bool u_given = false;
  double q = 2.0;
  std::optional<double> tol;
  std::vector<std::size_t> shape;
  std::size_t gauge_samples = 0;
  std::uint64_t seed = 0;
  std::string out_path;
};

// Ids whose unitary is fixed internally (spectral or local-minimizer based).
bool internal_unitary(const std::string& id) {
  return id == "vn-27" || id == "vn-36" || id == "sandwich-E" || id == "discord-G" ||
         id == "tsallis-A5" || id == "tsallis-A6";
}

int cmd_check(const CheckArgs& args) {
  bool known = false;
  for (const std::string& id : tomoq::inequality_catalog()) known = known || id == args.id;
  if (!known)
    throw std::runtime_error("unknown inequality id '" + args.id +
                             "'; catalog: " + catalog_line());
  if (args.u_given && internal_unitary(args.id))
    throw std::runtime_error("--u does not apply to '" + args.id +
                             "': its unitary is determined internally");

  const ojson j = tomoq::parse_json_file(args.state_path);
  tomoq::CheckReport report;

  if (j.is_array()) {
    // A bare probability vector only supports the classical relabeling checks.
    if (args.id != "grid-M1" && args.id != "cube-M18")
      throw std::runtime_error("'" + args.id + "' needs a density-matrix file; '" +
                               args.state_path + "' holds a probability vector");
    if (args.u_given)
      throw std::runtime_error("--u does not apply to probability-vector input");
    const tomoq::ProbVector p = tomoq::prob_from_json(j);
    if (args.id == "grid-M1") {
      auto [rows, cols] = tomoq::balanced_grid_shape(p.dim());
      if (!args.shape.empty()) {
        if (args.shape.size() != 2)
          throw std::runtime_error("--shape for grid-M1 needs two extents");
        rows = args.shape[0];
        cols = args.shape[1];
      }
      report = tomoq::subadditivity_check(tomoq::GridView::from_vector(p, rows, cols));
    } else {
      auto shape = tomoq::balanced_cube_shape(p.dim());
      if (!args.shape.empty()) {
        if (args.shape.size() != 3)
          throw std::runtime_error("--shape for cube-M18 needs three extents");
        shape = {args.shape[0], args.shape[1], args.shape[2]};
      }
      report = tomoq::strong_subadditivity_check(tomoq::CubeView::from_vector(p, shape));
    }
    report.witness.state = args.state_path;
  } else {
    const tomoq::DensityMatrix rho = tomoq::density_from_json(j);
    const tomoq::QParam q(args.q);

    if (args.id == "grid-M1" || args.id == "cube-M18") {
      const UnitaryChoice uc = resolve_unitary(args.u_source, rho);
      const tomoq::ProbVector p = tomoq::tomogram(rho, uc.u).probs;
      if (args.id == "grid-M1") {
        auto [rows, cols] = rho.factor_count() == 2
                                ? std::pair<std::size_t, std::size_t>{rho.dims()[0],
                                                                      rho.dims()[1]}
                                : tomoq::balanced_grid_shape(p.dim());
        if (!args.shape.empty()) {
          if (args.shape.size() != 2)
            throw std::runtime_error("--shape for grid-M1 needs two extents");
          rows = args.shape[0];
          cols = args.shape[1];
        }
        report = tomoq::subadditivity_check(tomoq::GridView::from_vector(p, rows, cols));
      } else {
        auto shape = rho.factor_count() == 3
                         ? std::array<std::size_t, 3>{rho.dims()[0], rho.dims()[1],
                                                      rho.dims()[2]}
                         : tomoq::balanced_cube_shape(p.dim());
        if (!args.shape.empty()) {
          if (args.shape.size() != 3)
            throw std::runtime_error("--shape for cube-M18 needs three extents");
          shape = {args.shape[0], args.shape[1], args.shape[2]};
        }
        report = tomoq::strong_subadditivity_check(tomoq::CubeView::from_vector(p, shape));
      }
      report.witness.unitary = uc.label;
    } else if (args.id == "subadd-23") {
      const UnitaryChoice uc = resolve_unitary(args.u_source, rho);
      report = tomoq::subadditivity_on_group(rho, uc.u);
      report.witness.unitary = uc.label;
    } else if (args.id == "ssa-31") {
      const UnitaryChoice uc = resolve_unitary(args.u_source, rho);
      report = tomoq::strong_subadditivity_on_group(rho, uc.u);
      report.witness.unitary = uc.label;
    } else if (args.id == "vn-27" || args.id == "vn-36") {
      bool found = false;
      for (tomoq::CheckReport& r : tomoq::von_neumann_counterparts(rho)) {
        if (r.inequality_id == args.id) {
          report = std::move(r);
          found = true;
        }
      }
      if (!found)
        throw std::runtime_error("'" + args.id + "' does not apply to this state");
      report.witness.unitary = "spectral";
    } else if (args.id == "sandwich-E") {
      report = tomoq::sandwich_check(rho);
      report.witness.unitary = "local-min";
    } else if (args.id == "discord-G") {
      report = tomoq::discord_like_D(rho);
      report.witness.unitary = "local-min";
      if (args.gauge_samples > 0) {
        const tomoq::GaugeSpread spread =
            tomoq::discord_gauge_spread(rho, args.gauge_samples, args.seed);
        report.extra.emplace_back("d_gauge_min", spread.d_min);
        report.extra.emplace_back("d_gauge_max", spread.d_max);
        report.extra.emplace_back("gauge_evaluations",
                                  static_cast<double>(spread.evaluations));
      }
    } else if (args.id == "chain-A2") {
      const UnitaryChoice uc = resolve_unitary(args.u_source, rho);
      report = tomoq::tsallis_chain_rule(rho, uc.u, q);
      report.witness.unitary = uc.label;
    } else if (args.id == "tsallis-A5" || args.id == "tsallis-A6") {
      const auto bundle =
          tomoq::tsallis_inequalities(rho, tomoq::UnitaryMatrix::identity(rho.dim()), q);
      for (const tomoq::CheckReport& r : bundle)
        if (r.inequality_id == args.id) report = r;
      report.witness.unitary = "local-min";
    }
    report.witness.state = args.state_path;
  }

  if (args.tol) report.apply_tol(*args.tol);
  emit(tomoq::report_to_json(report).dump(2) + "\n", args.out_path);
  return report.pass ? 0 : 2;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path) {
  const tomoq::SweepConfig cfg =
      tomoq::parse_sweep_config(tomoq::read_text_file(config_path), config_path);
  const tomoq::SweepResult result = tomoq::run_sweep(cfg);
  const ojson manifest = tomoq::build_manifest("sweep", cfg, result);
  tomoq::write_text_file(out_path, manifest.dump(2) + "\n");

  std::size_t total_failures = 0;
  std::printf("%-14s %12s %10s %14s\n", "inequality_id", "evaluations", "failures",
              "min_margin");
  for (const tomoq::SweepSummaryRow& row : result.summary) {
    std::printf("%-14s %12zu %10zu %14.6e\n", row.inequality_id.c_str(), row.evaluations,
                row.failures, row.min_margin);
    total_failures += row.failures;
  }
  std::printf("manifest: %s\n", out_path.c_str());
  return total_failures == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"tomographic entropy toolkit"};
  app.require_subcommand(1);

  // gen-state
  auto* gen = app.add_subcommand("gen-state", "sample a random density matrix");
  std::vector<std::size_t> gen_dims;
  std::size_t gen_rank = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--dims", gen_dims, "subsystem dimensions, e.g. 2,2")
      ->required()
      ->delimiter(',');
  gen->add_option("--rank", gen_rank, "state rank (default: full)");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file (default: stdout)");

  // check
  auto* check = app.add_subcommand("check", "evaluate one inequality on one state");
  CheckArgs check_args;
  check->add_option("state", check_args.state_path, "state or probability-vector JSON file")
      ->required();
  check->add_option("id", check_args.id, "inequality id")->required();
  auto* u_opt = check->add_option("--u", check_args.u_source,
                                  "unitary source: identity, haar:<seed>, local-min");
  check->add_option("--q", check_args.q, "entropic order for q-dependent ids");
  double check_tol = 0.0;
  auto* tol_opt = check->add_option("--tol", check_tol, "margin tolerance override");
  check->add_option("--shape", check_args.shape, "grid/cube shape override, e.g. 4,4")
      ->delimiter(',');
  check->add_option("--gauge-samples", check_args.gauge_samples,
                    "discord-G: sample the degenerate-gauge spread");
  check->add_option("--seed", check_args.seed, "seed for gauge sampling");
  check->add_option("--out", check_args.out_path, "report file (default: stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a seeded inequality sweep");
  std::string sweep_config;
  std::string sweep_out = "sweep_manifest.json";
  sweep->add_option("config", sweep_config, "sweep configuration file")->required();
  sweep->add_option("--out", sweep_out, "manifest output file");

  // tomogram
  auto* tomo = app.add_subcommand("tomogram", "measurement distribution of a state");
  std::string tomo_state, tomo_u = "identity", tomo_out;
  tomo->add_option("state", tomo_state, "state JSON file")->required();
  tomo->add_option("--u", tomo_u, "unitary source: identity, haar:<seed>, local-min");
  tomo->add_option("--out", tomo_out, "output file (default: stdout)");

  // entropy
  auto* ent = app.add_subcommand("entropy", "entropies of a state or distribution");
  std::string ent_path, ent_out;
  std::vector<double> ent_q = {0.5, 1.0, 2.0};
  ent->add_option("file", ent_path, "state or probability-vector JSON file")->required();
  ent->add_option("--q", ent_q, "entropic orders, e.g. 0.5,1,2")->delimiter(',');
  ent->add_option("--out", ent_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(gen)) return cmd_gen_state(gen_dims, gen_rank, gen_seed, gen_out);
    if (app.got_subcommand(check)) {
      check_args.u_given = u_opt->count() > 0;
      if (tol_opt->count() > 0) check_args.tol = check_tol;
      return cmd_check(check_args);
    }
    if (app.got_subcommand(sweep)) return cmd_sweep(sweep_config, sweep_out);
    if (app.got_subcommand(tomo)) return cmd_tomogram(tomo_state, tomo_u, tomo_out);
    if (app.got_subcommand(ent)) return cmd_entropy(ent_path, ent_q, ent_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
