#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tomoq/inequalities.hpp"
#include "testutil.hpp"

using namespace tomoq;

namespace {
constexpr double ln2 = 0.6931471805599453;
}

TEST_CASE("group minimum of the tomographic entropy") {
  SECTION("analytic strategy returns the spectral value and its diagonalizer") {
    const DensityMatrix rho = random_density({2, 2}, 4, 21);
    const GroupMinimum gm = min_entropy_over_group(
        rho, EntropyKind::shannon, QParam(1.0), MinimizationStrategy::analytic);
    REQUIRE(gm.value == Catch::Approx(von_neumann_entropy(rho)).margin(1e-12));
    REQUIRE(tomographic_shannon(rho, gm.minimizer) ==
            Catch::Approx(gm.value).margin(1e-10));
    REQUIRE_FALSE(gm.degenerate);
  }
  SECTION("sampled scan never beats the spectral floor") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const DensityMatrix rho = random_density({3}, 3, seed);
      const double floor = von_neumann_entropy(rho);
      const GroupMinimum gm =
          min_entropy_over_group(rho, EntropyKind::shannon, QParam(1.0),
                                 MinimizationStrategy::sampled, {200, seed});
      REQUIRE(gm.value >= floor - 1e-9);
      REQUIRE(tomographic_shannon(rho, gm.minimizer) ==
              Catch::Approx(gm.value).margin(1e-14));
    }
  }
  SECTION("the floor holds for Renyi and Tsallis too") {
    const DensityMatrix rho = random_density({2, 2}, 3, 6);
    for (double qv : {0.5, 2.0}) {
      for (EntropyKind kind : {EntropyKind::renyi, EntropyKind::tsallis}) {
        const double floor = quantum_q_entropy(rho, QParam(qv), kind);
        const GroupMinimum gm = min_entropy_over_group(
            rho, kind, QParam(qv), MinimizationStrategy::sampled, {200, 3});
        REQUIRE(gm.value >= floor - 1e-9);
      }
    }
  }
  SECTION("degenerate spectra are flagged") {
    const GroupMinimum gm = min_entropy_over_group(
        testutil::diagonal_state({0.5, 0.5}, {2}), EntropyKind::shannon, QParam(1.0),
        MinimizationStrategy::analytic);
    REQUIRE(gm.degenerate);
    REQUIRE(gm.value == Catch::Approx(ln2).margin(1e-12));
  }
  SECTION("sampled strategy needs samples") {
    REQUIRE_THROWS_AS(
        min_entropy_over_group(random_density({2}, 2, 1), EntropyKind::shannon,
                               QParam(1.0), MinimizationStrategy::sampled, {0, 0}),
        std::invalid_argument);
  }
}

TEST_CASE("tomographic subadditivity") {
  SECTION("frozen: maximally entangled pair in the natural basis") {
    const CheckReport r =
        subadditivity_on_group(testutil::bell_state(), UnitaryMatrix::identity(4));
    REQUIRE(r.inequality_id == "subadd-23");
    REQUIRE(r.lhs == Catch::Approx(2 * ln2).margin(1e-12));
    REQUIRE(r.rhs == Catch::Approx(ln2).margin(1e-12));
    REQUIRE(r.margin == Catch::Approx(ln2).margin(1e-12));
    REQUIRE(r.pass);
  }
  SECTION("holds across random states and unitaries") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const DensityMatrix rho = random_density({2, 3}, 6, seed);
      const UnitaryMatrix u = haar_sample(6, seed + 900);
      const CheckReport r = subadditivity_on_group(rho, u);
      REQUIRE(r.margin >= -default_margin_tol);
      REQUIRE(r.pass);
    }
  }
  SECTION("needs a bipartite state") {
    REQUIRE_THROWS_AS(
        subadditivity_on_group(random_density({2, 2, 2}, 8, 1), UnitaryMatrix::identity(8)),
        std::invalid_argument);
  }
}

TEST_CASE("tomographic strong subadditivity") {
  SECTION("frozen: classical GHZ mixture in the natural basis") {
    const CheckReport r =
        strong_subadditivity_on_group(testutil::ghz_state(), UnitaryMatrix::identity(8));
    REQUIRE(r.inequality_id == "ssa-31");
    // every marginal entropy of the GHZ tomogram equals ln 2
    REQUIRE(r.lhs == Catch::Approx(2 * ln2).margin(1e-12));
    REQUIRE(r.rhs == Catch::Approx(2 * ln2).margin(1e-12));
    REQUIRE(r.margin == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(r.pass);
  }
  SECTION("holds across random states and unitaries") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const DensityMatrix rho = random_density({2, 2, 2}, 8, seed);
      const UnitaryMatrix u = haar_sample(8, seed + 1700);
      const CheckReport r = strong_subadditivity_on_group(rho, u);
      REQUIRE(r.margin >= -default_margin_tol);
    }
  }
  SECTION("needs a tripartite state") {
    REQUIRE_THROWS_AS(
        strong_subadditivity_on_group(testutil::bell_state(), UnitaryMatrix::identity(4)),
        std::invalid_argument);
  }
}

TEST_CASE("von Neumann counterparts") {
  SECTION("bipartite pure state saturates at the marginal entropies") {
    const auto reports = von_neumann_counterparts(testutil::bell_state());
    REQUIRE(reports.size() == 1);
    REQUIRE(reports[0].inequality_id == "vn-27");
    REQUIRE(reports[0].lhs == Catch::Approx(2 * ln2).margin(1e-10));
    REQUIRE(reports[0].rhs == Catch::Approx(0.0).margin(1e-10));
    REQUIRE(reports[0].pass);
  }
  SECTION("tripartite GHZ gives both counterparts with margin ln 2") {
    const auto reports = von_neumann_counterparts(testutil::ghz_state());
    REQUIRE(reports.size() == 2);
    REQUIRE(reports[0].inequality_id == "vn-27");
    REQUIRE(reports[1].inequality_id == "vn-36");
    REQUIRE(reports[0].margin == Catch::Approx(ln2).margin(1e-10));
    REQUIRE(reports[1].margin == Catch::Approx(ln2).margin(1e-10));
  }
  SECTION("holds across random tripartite states") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const DensityMatrix rho = random_density({2, 2, 2}, 4, seed);
      for (const auto& r : von_neumann_counterparts(rho))
        REQUIRE(r.margin >= -default_margin_tol);
    }
  }
  SECTION("needs two or three subsystems") {
    REQUIRE_THROWS_AS(von_neumann_counterparts(random_density({4}, 4, 1)),
                      std::invalid_argument);
  }
}

TEST_CASE("local minimizers") {
  SECTION("joint unitary is the tensor of factor diagonalizers") {
    const DensityMatrix rho = random_density({2, 3}, 6, 9);
    const LocalMinimizers lm = local_minimizers(rho);
    REQUIRE(lm.factors.size() == 2);
    REQUIRE(max_abs_diff(lm.joint.mat(),
                         kron(lm.factors[0].mat(), lm.factors[1].mat())) == 0.0);
    // each factor diagonalizes its reduced state
    for (std::size_t f = 0; f < 2; ++f) {
      const DensityMatrix red = partial_trace(rho, {f});
      const ComplexMatrix rotated =
          lm.factors[f].mat().adjoint() * red.mat() * lm.factors[f].mat();
      for (std::size_t i = 0; i < red.dim(); ++i)
        for (std::size_t j = 0; j < red.dim(); ++j)
          if (i != j) REQUIRE(std::abs(rotated(i, j)) < 1e-9);
    }
    REQUIRE_FALSE(lm.degenerate);
  }
  SECTION("degenerate reductions are flagged") {
    REQUIRE(local_minimizers(testutil::bell_state()).degenerate);
  }
}

TEST_CASE("entropy sandwich at the local minimizer") {
  SECTION("frozen: maximally entangled pair") {
    const CheckReport r = sandwich_check(testutil::bell_state());
    REQUIRE(r.inequality_id == "sandwich-E");
    REQUIRE(r.margin == Catch::Approx(ln2).margin(1e-10));
    REQUIRE(r.degenerate_flag);
    REQUIRE(r.pass);
  }
  SECTION("product states collapse the upper side") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const DensityMatrix a = random_density({2}, 2, seed);
      const DensityMatrix b = random_density({3}, 3, seed + 40);
      const CheckReport r = sandwich_check(tensor(a, b));
      double upper = 0.0;
      for (const auto& [k, v] : r.extra)
        if (k == "upper_margin") upper = v;
      REQUIRE(std::abs(upper) < 1e-9);
      REQUIRE(r.margin >= -default_margin_tol);
    }
  }
  SECTION("holds across random bipartite states") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const CheckReport r = sandwich_check(random_density({2, 2}, 1 + seed % 4, seed));
      REQUIRE(r.margin >= -default_margin_tol);
    }
  }
}

TEST_CASE("discord-like deficit") {
  SECTION("frozen: maximally entangled pair reads ln 2") {
    const CheckReport r = discord_like_D(testutil::bell_state());
    REQUIRE(r.inequality_id == "discord-G");
    REQUIRE(r.margin == Catch::Approx(ln2).margin(1e-10));
    REQUIRE(r.degenerate_flag);
  }
  SECTION("frozen: classically correlated pair reads zero in this gauge") {
    const CheckReport r = discord_like_D(testutil::correlated_pair());
    REQUIRE(r.margin == Catch::Approx(0.0).margin(1e-10));
    REQUIRE(r.degenerate_flag);
  }
  SECTION("product states carry no deficit") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const DensityMatrix a = random_density({2}, 2, seed);
      const DensityMatrix b = random_density({2}, 2, seed + 80);
      const CheckReport r = discord_like_D(tensor(a, b));
      REQUIRE(std::abs(r.margin) < 1e-9);
    }
  }
  SECTION("the cross check agrees with the direct difference") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const CheckReport r = discord_like_D(random_density({2, 3}, 6, seed));
      REQUIRE(r.margin >= -default_margin_tol);
      double cross = 0.0;
      for (const auto& [k, v] : r.extra)
        if (k == "d_cross_check") cross = v;
      REQUIRE(cross == Catch::Approx(r.margin).margin(1e-9));
    }
  }
}

TEST_CASE("gauge spread of the deficit") {
  SECTION("nondegenerate states evaluate a single gauge") {
    const GaugeSpread spread = discord_gauge_spread(random_density({2, 2}, 4, 33), 16, 5);
    REQUIRE(spread.evaluations == 1);
    REQUIRE(spread.d_min == spread.d_max);
  }
  SECTION("the classically correlated pair is gauge sensitive") {
    const GaugeSpread spread = discord_gauge_spread(testutil::correlated_pair(), 24, 7);
    REQUIRE(spread.evaluations == 25);
    // deterministic gauge sits at the bottom of the spread
    REQUIRE(spread.d_min == Catch::Approx(0.0).margin(1e-10));
    REQUIRE(spread.d_max > 0.05);
    REQUIRE(spread.d_max <= 2 * ln2 + 1e-9);
  }
  SECTION("reproducible for a fixed seed") {
    const GaugeSpread a = discord_gauge_spread(testutil::correlated_pair(), 8, 11);
    const GaugeSpread b = discord_gauge_spread(testutil::correlated_pair(), 8, 11);
    REQUIRE(a.d_max == b.d_max);
    REQUIRE(a.d_min == b.d_min);
  }
}

TEST_CASE("deformed chain rule") {
  SECTION("identity holds for random states, unitaries and orders") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      const DensityMatrix rho = random_density({2, 3}, 6, seed);
      const UnitaryMatrix u = haar_sample(6, seed + 400);
      for (double qv : {0.3, 0.5, 1.0, 2.0, 3.5}) {
        const CheckReport r = tsallis_chain_rule(rho, u, QParam(qv));
        REQUIRE(r.inequality_id == "chain-A2");
        REQUIRE(r.margin >= -identity_tol);
        REQUIRE(r.pass);
        REQUIRE(r.witness.q == qv);
      }
    }
  }
  SECTION("sparse tomograms with empty columns still balance") {
    const CheckReport r = tsallis_chain_rule(testutil::correlated_pair(),
                                             UnitaryMatrix::identity(4), QParam(0.5));
    REQUIRE(r.margin >= -identity_tol);
  }
}

TEST_CASE("deformed entropy relations") {
  SECTION("report bundle shape") {
    const auto reports = tsallis_inequalities(random_density({2, 2}, 4, 2),
                                              haar_sample(4, 3), QParam(2.0));
    REQUIRE(reports.size() == 4);
    REQUIRE(reports[0].inequality_id == "tsallis-mono");
    REQUIRE(reports[1].inequality_id == "tsallis-cond");
    REQUIRE(reports[2].inequality_id == "tsallis-A5");
    REQUIRE(reports[3].inequality_id == "tsallis-A6");
    REQUIRE(reports[3].witness.q == 1.0);
  }
  SECTION("all four hold for q >= 1 on random inputs") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      const DensityMatrix rho = random_density({2, 2}, 1 + seed % 4, seed);
      const UnitaryMatrix u = haar_sample(4, seed + 2500);
      for (double qv : {1.0, 2.0, 3.5}) {
        for (const auto& r : tsallis_inequalities(rho, u, QParam(qv))) {
          REQUIRE(r.margin >= -default_margin_tol);
          REQUIRE_FALSE(r.conjectural);
        }
      }
    }
  }
  SECTION("monotonicity and the minimizer relations survive q < 1") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      const DensityMatrix rho = random_density({2, 3}, 6, seed);
      const UnitaryMatrix u = haar_sample(6, seed + 2600);
      const auto reports = tsallis_inequalities(rho, u, QParam(0.5));
      for (const auto& r : reports)
        if (r.inequality_id != "tsallis-cond") REQUIRE(r.margin >= -default_margin_tol);
      REQUIRE(reports[1].conjectural);
    }
  }
  SECTION("below q = 1 a biased product state defeats conditional reduction") {
    // For a product tomogram the conditional entropy factorizes as
    // T_q(A|B) = T_q(A) * sum_b w_b^q, and the power sum exceeds one for q < 1.
    const DensityMatrix rho = tensor(testutil::diagonal_state({0.6, 0.4}, {2}),
                                     testutil::diagonal_state({0.7, 0.3}, {2}));
    const auto reports = tsallis_inequalities(rho, UnitaryMatrix::identity(4), QParam(0.5));
    const CheckReport& cond = reports[1];
    REQUIRE(cond.conjectural);
    REQUIRE_FALSE(cond.pass);

    const double t_a = testutil::oracle_tsallis({0.6, 0.4}, 0.5);
    const double power_sum = testutil::oracle_power_sum({0.7, 0.3}, 0.5);
    REQUIRE(cond.lhs == Catch::Approx(t_a).margin(1e-12));
    REQUIRE(cond.rhs == Catch::Approx(t_a * power_sum).margin(1e-12));

    // the same state satisfies it comfortably at q = 2
    const auto at_two = tsallis_inequalities(rho, UnitaryMatrix::identity(4), QParam(2.0));
    REQUIRE(at_two[1].pass);
    REQUIRE_FALSE(at_two[1].conjectural);
  }
  SECTION("frozen: maximally entangled pair at q = 2") {
    const auto reports = tsallis_inequalities(testutil::bell_state(),
                                              UnitaryMatrix::identity(4), QParam(2.0));
    // A5: the joint local tomogram keeps Tsallis entropy 1/2 while the pure
    // state has zero, and the marginal matches its spectral value exactly.
    REQUIRE(reports[2].lhs == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(reports[2].rhs == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(reports[2].pass);
    REQUIRE(reports[2].degenerate_flag);
    // A6: H_12 = ln 2 = S_A, conditional vanishes
    REQUIRE(reports[3].lhs == Catch::Approx(ln2).margin(1e-12));
    REQUIRE(reports[3].rhs == Catch::Approx(ln2).margin(1e-12));
    REQUIRE(reports[3].pass);
  }
}
