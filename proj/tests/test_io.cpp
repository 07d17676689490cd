#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <string>
#include <vector>

#include "tomoq/io.hpp"
#include "testutil.hpp"

using namespace tomoq;
using Catch::Matchers::ContainsSubstring;

namespace {

template <typename Fn>
std::string thrown_message(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "<no exception>";
}

// dump/parse cycle, the exact path CLI output takes through a file
ojson recycled(const ojson& j) { return ojson::parse(j.dump()); }

} // namespace

TEST_CASE("matrix JSON round trips") {
  const UnitaryMatrix u = haar_sample(3, 17);
  const ComplexMatrix back = matrix_from_json(recycled(matrix_to_json(u.mat())));
  REQUIRE(max_abs_diff(back, u.mat()) == 0.0);

  SECTION("shape and type validation") {
    REQUIRE_THROWS_AS(matrix_from_json(ojson::parse(R"({"re": [[1]]})")),
                      std::runtime_error);
    REQUIRE_THROWS_AS(
        matrix_from_json(ojson::parse(R"({"re": [[1, 2], [3]], "im": [[0, 0], [0]]})")),
        std::runtime_error);
    REQUIRE_THROWS_AS(
        matrix_from_json(ojson::parse(R"({"re": [[1]], "im": [["x"]]})")),
        std::runtime_error);
    REQUIRE_THROWS_AS(matrix_from_json(ojson::parse(R"({"re": [], "im": []})")),
                      std::runtime_error);
  }
}

TEST_CASE("density matrix JSON") {
  const DensityMatrix rho = random_density({2, 3}, 5, 21);
  const ojson j = density_to_json(rho);

  SECTION("key layout is dims, re, im") {
    const std::string text = j.dump();
    const auto dims_at = text.find("\"dims\"");
    const auto re_at = text.find("\"re\"");
    const auto im_at = text.find("\"im\"");
    REQUIRE(dims_at < re_at);
    REQUIRE(re_at < im_at);
  }
  SECTION("round trip is exact") {
    const DensityMatrix back = density_from_json(recycled(j));
    REQUIRE(back.dims() == rho.dims());
    REQUIRE(max_abs_diff(back.mat(), rho.mat()) == 0.0);
  }
  SECTION("missing dims defaults to a single subsystem") {
    ojson stripped = j;
    stripped.erase("dims");
    REQUIRE(density_from_json(stripped).dims() == std::vector<std::size_t>{6});
  }
  SECTION("invalid payloads are rejected with context") {
    ojson zero_dim = j;
    zero_dim["dims"] = {0, 6};
    REQUIRE_THAT(thrown_message([&] { density_from_json(zero_dim); }),
                 ContainsSubstring("dims"));

    ojson wrong_dims = j;
    wrong_dims["dims"] = {2, 2};
    REQUIRE_THAT(thrown_message([&] { density_from_json(wrong_dims); }),
                 ContainsSubstring("density matrix:"));

    ojson not_normalized = j;
    not_normalized["re"][0][0] = j["re"][0][0].get<double>() + 0.5;
    REQUIRE_THROWS_AS(density_from_json(not_normalized), std::runtime_error);
  }
}

TEST_CASE("unitary JSON") {
  const UnitaryMatrix u = haar_sample(4, 5);
  const UnitaryMatrix back = unitary_from_json(recycled(matrix_to_json(u.mat())));
  REQUIRE(max_abs_diff(back.mat(), u.mat()) == 0.0);

  ojson skewed = matrix_to_json(u.mat());
  skewed["re"][0][0] = 2.0;
  REQUIRE_THAT(thrown_message([&] { unitary_from_json(skewed); }),
               ContainsSubstring("unitary matrix:"));
}

TEST_CASE("probability vector JSON") {
  SeededRng rng(31);
  const ProbVector p{testutil::random_distribution(7, rng)};
  const ProbVector back = prob_from_json(recycled(prob_to_json(p)));
  REQUIRE(back.dim() == 7);
  for (std::size_t i = 0; i < 7; ++i) REQUIRE(back[i] == p[i]);

  SECTION("rejects malformed payloads") {
    REQUIRE_THROWS_AS(prob_from_json(ojson::parse("[]")), std::runtime_error);
    REQUIRE_THROWS_AS(prob_from_json(ojson::parse(R"({"p": [1]})")), std::runtime_error);
    REQUIRE_THROWS_AS(prob_from_json(ojson::parse(R"([0.5, "x"])")), std::runtime_error);
    // negative beyond clamp and sum beyond tolerance
    REQUIRE_THAT(thrown_message([] { prob_from_json(ojson::parse("[0.5, 0.6, -0.2]")); }),
                 ContainsSubstring("probability vector:"));
  }
}

TEST_CASE("grid and cube JSON") {
  const GridView g(2, 3, {0.1, 0.2, 0.1, 0.25, 0.15, 0.2});
  const ojson gj = grid_to_json(g);
  REQUIRE(gj["shape"] == ojson({2, 3}));
  const GridView gback = grid_from_json(recycled(gj));
  REQUIRE(gback.rows() == 2);
  REQUIRE(gback.cols() == 3);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) REQUIRE(gback.at(r, c) == g.at(r, c));

  const CubeView c({2, 2, 2}, {0.1, 0.1, 0.1, 0.1, 0.2, 0.2, 0.1, 0.1});
  const ojson cj = cube_to_json(c);
  const CubeView cback = cube_from_json(recycled(cj));
  REQUIRE(cback.shape() == c.shape());
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) REQUIRE(cback.at(i, j, k) == c.at(i, j, k));

  SECTION("shape arity is enforced") {
    ojson bad = gj;
    bad["shape"] = {2, 3, 1};
    REQUIRE_THROWS_AS(grid_from_json(bad), std::runtime_error);
    ojson badc = cj;
    badc["shape"] = {2, 2};
    REQUIRE_THROWS_AS(cube_from_json(badc), std::runtime_error);
  }
  SECTION("entry count must match the shape") {
    ojson bad = gj;
    bad["shape"] = {3, 3};
    REQUIRE_THAT(thrown_message([&] { grid_from_json(bad); }),
                 ContainsSubstring("grid:"));
  }
}

TEST_CASE("report JSON layout") {
  CheckReport r = CheckReport::make("subadd-23", 1.5, 1.0, 0.5, 1e-9);
  r.witness.seed = 7;
  r.witness.state = "ginibre:dims=2,2;rank=4;seed=123";
  r.witness.unitary = "haar:seed=456";
  r.witness.q = 2.0;
  r.extra = {{"h_1", 0.9}, {"h_2", 0.6}};

  const ojson j = report_to_json(r);
  const std::string text = j.dump();
  const char* keys[] = {"\"inequality_id\"", "\"lhs\"",  "\"rhs\"",
                        "\"margin\"",        "\"tol\"",  "\"pass\"",
                        "\"degenerate_flag\"", "\"conjectural\"", "\"witness\"",
                        "\"extra\""};
  std::size_t prev = 0;
  for (const char* k : keys) {
    const std::size_t at = text.find(k);
    REQUIRE(at != std::string::npos);
    REQUIRE(at >= prev);
    prev = at;
  }
  REQUIRE(j["pass"] == true);
  REQUIRE(j["witness"]["seed"] == 7);
  REQUIRE(j["witness"]["q"] == 2.0);
  REQUIRE(j["extra"]["h_1"] == 0.9);

  // empty witness fields stay out of the payload
  const ojson bare = report_to_json(CheckReport::make("grid-M1", 1.0, 0.5, 0.5, 1e-9));
  REQUIRE(bare["witness"].empty());
}

TEST_CASE("sweep config parsing") {
  SECTION("full happy path with comments and spacing") {
    const std::string text =
        "# exercise every key\n"
        "sample_count = 4\n"
        "\n"
        "master_seed = 7\n"
        "dims = 2, 2\n"
        "rank = 3\n"
        "q_list = 0.5, 1, 2\n"
        "inequalities = subadd-23, grid-M1\n"
        "tolerance = 1e-8\n";
    const SweepConfig cfg = parse_sweep_config(text, "cfg");
    REQUIRE(cfg.sample_count == 4);
    REQUIRE(cfg.master_seed == 7);
    REQUIRE(cfg.dims == std::vector<std::size_t>{2, 2});
    REQUIRE(cfg.rank == 3);
    REQUIRE(cfg.q_list == std::vector<double>{0.5, 1.0, 2.0});
    REQUIRE(cfg.inequalities == std::vector<std::string>{"subadd-23", "grid-M1"});
    REQUIRE(cfg.tolerance);
    REQUIRE(*cfg.tolerance == 1e-8);
  }
  SECTION("defaults when optional keys are absent") {
    const SweepConfig cfg =
        parse_sweep_config("sample_count=2\nmaster_seed=1\ndims=2,2\n", "cfg");
    REQUIRE(cfg.rank == 0);
    REQUIRE(cfg.q_list == std::vector<double>{0.5, 1.0, 2.0});
    REQUIRE(cfg.inequalities.empty());
    REQUIRE_FALSE(cfg.tolerance);
  }
  SECTION("errors carry the file and line") {
    REQUIRE_THAT(thrown_message([] {
                   parse_sweep_config("sample_count = 1\nwhat is this\n", "cfg");
                 }),
                 ContainsSubstring("cfg:2: expected 'key = value'"));
    REQUIRE_THAT(thrown_message([] {
                   parse_sweep_config("sample_count = 1\nsample_count = 2\n", "cfg");
                 }),
                 ContainsSubstring("cfg:2: duplicate key 'sample_count'"));
    REQUIRE_THAT(thrown_message([] { parse_sweep_config("bogus = 1\n", "cfg"); }),
                 ContainsSubstring("cfg:1: unknown key 'bogus'"));
    REQUIRE_THAT(thrown_message([] {
                   parse_sweep_config("sample_count = 1\nmaster_seed = -5\n", "cfg");
                 }),
                 ContainsSubstring("cfg:2: invalid value for 'master_seed'"));
    REQUIRE_THAT(thrown_message([] {
                   parse_sweep_config("sample_count = 12x\n", "cfg");
                 }),
                 ContainsSubstring("cfg:1: invalid value for 'sample_count'"));
    REQUIRE_THAT(thrown_message([] {
                   parse_sweep_config("dims = 2,2\nmaster_seed = 3\n", "cfg");
                 }),
                 ContainsSubstring("cfg: missing required key 'sample_count'"));
  }
  SECTION("semantic validation is wrapped with the file name") {
    REQUIRE_THAT(thrown_message([] {
                   parse_sweep_config(
                       "sample_count=1\nmaster_seed=1\ndims=2,2\nrank=5\n", "cfg");
                 }),
                 ContainsSubstring("cfg: sweep config: rank exceeds"));
    REQUIRE_THAT(thrown_message([] {
                   parse_sweep_config(
                       "sample_count=1\nmaster_seed=1\ndims=2,2\nq_list=0\n", "cfg");
                 }),
                 ContainsSubstring("q values must be finite and positive"));
    REQUIRE_THAT(thrown_message([] {
                   parse_sweep_config(
                       "sample_count=1\nmaster_seed=1\ndims=2,2\ninequalities=ssa-31\n",
                       "cfg");
                 }),
                 ContainsSubstring("does not apply"));
    REQUIRE_THAT(thrown_message([] {
                   parse_sweep_config(
                       "sample_count=1\nmaster_seed=1\ndims=2,2\ninequalities=nope\n",
                       "cfg");
                 }),
                 ContainsSubstring("unknown inequality id 'nope'"));
  }
}

TEST_CASE("config echo resolves defaults") {
  SweepConfig cfg;
  cfg.sample_count = 2;
  cfg.master_seed = 5;
  cfg.dims = {2, 2};
  const ojson j = config_to_json(cfg);
  REQUIRE(j["rank"] == 4);
  REQUIRE(j["inequalities"].size() == applicable_inequalities({2, 2}).size());
  REQUIRE_FALSE(j.contains("tolerance"));
}

TEST_CASE("sweep driver") {
  SweepConfig cfg;
  cfg.sample_count = 3;
  cfg.master_seed = 99;
  cfg.dims = {2, 2};

  SECTION("summary covers the applicable catalog in order, no failures") {
    const SweepResult res = run_sweep(cfg);
    const std::vector<std::string> ids = applicable_inequalities(cfg.dims);
    REQUIRE(res.summary.size() == ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
      REQUIRE(res.summary[i].inequality_id == ids[i]);
    for (const SweepSummaryRow& row : res.summary) {
      std::size_t want = cfg.sample_count;
      if (row.inequality_id == "chain-A2" || row.inequality_id == "tsallis-mono" ||
          row.inequality_id == "tsallis-cond" || row.inequality_id == "tsallis-A5")
        want = cfg.sample_count * cfg.q_list.size();
      REQUIRE(row.evaluations == want);
      REQUIRE(row.failures == 0);
    }
  }
  SECTION("witness labels carry the generating seeds") {
    SweepConfig sub = cfg;
    sub.inequalities = {"subadd-23"};
    const SweepResult res = run_sweep(sub);
    REQUIRE(res.reports.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const CheckReport& r = res.reports[i];
      REQUIRE(r.witness.seed);
      REQUIRE(*r.witness.seed == i);
      REQUIRE(r.witness.state.rfind("ginibre:dims=2,2;rank=4;seed=", 0) == 0);
      REQUIRE(r.witness.unitary.rfind("haar:seed=", 0) == 0);
    }
  }
  SECTION("classical relabelings ride along for any arity") {
    SweepConfig flat = cfg;
    flat.dims = {5};
    flat.inequalities = {"grid-M1", "cube-M18"};
    const SweepResult res = run_sweep(flat);
    REQUIRE(res.reports.size() == 6);
    for (const CheckReport& r : res.reports) {
      REQUIRE(r.margin >= -default_margin_tol);
      REQUIRE_THAT(r.witness.state, ContainsSubstring(";perm:"));
    }
  }
  SECTION("manifests are deterministic modulo the timestamp") {
    ojson a = build_manifest("sweep cfg", cfg, run_sweep(cfg));
    ojson b = build_manifest("sweep cfg", cfg, run_sweep(cfg));
    REQUIRE(a["command"] == "sweep cfg");
    REQUIRE(a["version"] == version_string);
    const std::string stamp = a["timestamp"].get<std::string>();
    REQUIRE(stamp.size() == 20);
    REQUIRE(stamp[10] == 'T');
    REQUIRE(stamp.back() == 'Z');
    a.erase("timestamp");
    b.erase("timestamp");
    REQUIRE(a.dump() == b.dump());
  }
  SECTION("results do not depend on the thread count") {
    const char* old = std::getenv("TOMOQ_THREADS");
    const std::string saved = old ? old : "";
    setenv("TOMOQ_THREADS", "1", 1);
    ojson a = build_manifest("sweep cfg", cfg, run_sweep(cfg));
    setenv("TOMOQ_THREADS", "3", 1);
    ojson b = build_manifest("sweep cfg", cfg, run_sweep(cfg));
    if (old)
      setenv("TOMOQ_THREADS", saved.c_str(), 1);
    else
      unsetenv("TOMOQ_THREADS");
    a.erase("timestamp");
    b.erase("timestamp");
    REQUIRE(a.dump() == b.dump());
  }
  SECTION("tolerance override flips the pass bookkeeping") {
    SweepConfig strict = cfg;
    strict.inequalities = {"subadd-23"};
    strict.tolerance = -10.0;  // demands margin >= 10, unreachable for qubits
    const SweepResult res = run_sweep(strict);
    REQUIRE(res.summary.size() == 1);
    REQUIRE(res.summary[0].failures == 3);
    for (const CheckReport& r : res.reports) {
      REQUIRE(r.tol == -10.0);
      REQUIRE_FALSE(r.pass);
    }
  }
  SECTION("invalid selections are rejected up front") {
    SweepConfig bad = cfg;
    bad.inequalities = {"ssa-31"};
    REQUIRE_THROWS_AS(run_sweep(bad), std::invalid_argument);
  }
}

TEST_CASE("text file helpers") {
  const std::string path = "tomoq_io_test_scratch.json";
  write_text_file(path, "{\"k\": 1}\n");
  REQUIRE(read_text_file(path) == "{\"k\": 1}\n");
  REQUIRE(parse_json_file(path)["k"] == 1);

  write_text_file(path, "{broken");
  REQUIRE_THAT(thrown_message([&] { parse_json_file(path); }),
               ContainsSubstring("invalid JSON"));
  std::remove(path.c_str());

  REQUIRE_THROWS_AS(read_text_file("definitely_missing_file.json"), std::runtime_error);
}
