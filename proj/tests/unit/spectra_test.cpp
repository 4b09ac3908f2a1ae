#include "dlg/spectra.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <tuple>

#include "dlg/error.hpp"
#include "oracles.hpp"

namespace dlg {
namespace {

DisorderField field_of(std::vector<double> a) {
  double K = 0.0;
  for (double v : a) K = std::max(K, std::abs(v));
  return DisorderField(std::move(a), K);
}

std::vector<std::pair<int, int>> bonds_of(const LatticeGeometry& g) {
  std::vector<std::pair<int, int>> out;
  for (const Bond& b : g.bonds()) out.push_back({b.a, b.b});
  return out;
}

TEST(GapTest, TwoSiteKawasaki) {
  const auto base = make_measured_space(CanonicalMeasure(DisorderField::zero(2), 1));
  const auto r = spectral_gap(build_kawasaki(build_box(1, 2, Boundary::kFree), base).form);
  EXPECT_NEAR(r.gap, 4.0, 1e-12);
  EXPECT_EQ(r.method, SolveMethod::kDense);
  EXPECT_FALSE(r.degenerate);
}

TEST(GapTest, MatchesDenseOracle) {
  for (auto [d, L, N] : {std::tuple{1, 8, 3}, std::tuple{2, 3, 4}, std::tuple{1, 6, 2}}) {
    const auto geom = build_box(d, L, Boundary::kFree);
    const auto a = oracle::uniform_field(geom.site_count(), 1.0, 7 * L + N);
    const auto base = make_measured_space(CanonicalMeasure(field_of(a), N));
    const auto r = spectral_gap(build_kawasaki(geom, base).form);
    const double ref = oracle::reversible_gap(oracle::exchange_generator(a, N, bonds_of(geom)),
                                              oracle::canonical_probs(a, N));
    EXPECT_NEAR(r.gap, ref, 1e-10 * ref);
    EXPECT_LE(r.residual, 1e-8);
  }
}

TEST(GapTest, EigenfunctionIsNormalizedSlowMode) {
  const auto geom = build_box(1, 7, Boundary::kFree);
  const auto a = oracle::uniform_field(7, 1.0, 2);
  const auto base = make_measured_space(CanonicalMeasure(field_of(a), 3));
  const auto form = build_kawasaki(geom, base).form;
  const auto r = spectral_gap(form);
  double mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i < r.eigenfunction.size(); ++i) {
    mean += base->probabilities[i] * r.eigenfunction[i];
    second += base->probabilities[i] * r.eigenfunction[i] * r.eigenfunction[i];
  }
  EXPECT_NEAR(mean, 0.0, 1e-10);
  EXPECT_NEAR(second, 1.0, 1e-10);
  EXPECT_NEAR(form.value(r.eigenfunction), r.gap, 1e-9 * r.gap);
}

// Without disorder every sector 1 <= N <= L-1 of the segment has the same gap.
TEST(GapTest, HomogeneousGapIndependentOfSector) {
  for (int L = 2; L <= 8; ++L) {
    const auto geom = build_box(1, L, Boundary::kFree);
    const double expected = 4.0 * (1.0 - std::cos(M_PI / L));
    for (int N = 1; N < L; ++N) {
      const auto base = make_measured_space(CanonicalMeasure(DisorderField::zero(L), N));
      EXPECT_NEAR(spectral_gap(build_kawasaki(geom, base).form).gap, expected, 1e-10);
    }
  }
}

TEST(GapTest, GlauberProductGap) {
  EXPECT_NEAR(spectral_gap(build_glauber(GrandMeasure(DisorderField::zero(3))).form).gap, 4.0, 1e-12);
  const std::vector<double> a{0.3, -1.2, 0.8, 2.0};
  double expected = 1e300;
  for (double v : a) expected = std::min(expected, 2.0 + 2.0 * std::cosh(v));
  EXPECT_NEAR(spectral_gap(build_glauber(GrandMeasure(field_of(a))).form).gap, expected, 1e-11);
}

TEST(GapTest, BernoulliLaplaceAboveKawasaki) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = oracle::uniform_field(8, 1.0, seed);
    const auto base = make_measured_space(CanonicalMeasure(field_of(a), 4));
    const double bl = spectral_gap(build_bl(base).form).gap;
    const double kaw = spectral_gap(build_kawasaki(build_box(1, 8, Boundary::kFree), base).form).gap;
    EXPECT_GE(bl, kaw);
    const double ref = oracle::reversible_gap(oracle::exchange_generator(a, 4, oracle::all_pairs(8)),
                                              oracle::canonical_probs(a, 4));
    EXPECT_NEAR(bl, ref, 1e-10 * ref);
  }
}

TEST(GapTest, HomogeneousBernoulliLaplaceGap) {
  // With rate 2 per unordered pair the gap is 2 |Lambda|.
  for (int n = 2; n <= 9; ++n) {
    const auto base = make_measured_space(CanonicalMeasure(DisorderField::zero(n), n / 2));
    EXPECT_NEAR(spectral_gap(build_bl(base).form).gap, 2.0 * n, 1e-10);
  }
}

TEST(GapTest, DenseAndIterativeAgree) {
  for (auto [d, L, N] : {std::tuple{1, 12, 4}, std::tuple{1, 11, 5}, std::tuple{2, 4, 3}, std::tuple{1, 12, 5}}) {
    const auto geom = build_box(d, L, Boundary::kFree);
    const auto base = make_measured_space(
        CanonicalMeasure(generate_iid(geom, 1.0, static_cast<std::uint64_t>(L * 10 + N)), N));
    ASSERT_GE(base->space.dimension(), 450u);
    const auto form = build_kawasaki(geom, base).form;
    const auto dense = spectral_gap(form, {.method = SolveMethod::kDense});
    const auto iter = spectral_gap(form, {.method = SolveMethod::kIterative});
    EXPECT_EQ(iter.method, SolveMethod::kIterative);
    EXPECT_NEAR(dense.gap, iter.gap, 1e-7 * dense.gap);
    EXPECT_LE(iter.residual, 1e-8);
  }
}

TEST(GapTest, AutoSwitchesAtStateLimit) {
  const auto geom = build_box(1, 14, Boundary::kFree);
  const auto base = make_measured_space(CanonicalMeasure(DisorderField::zero(14), 7));
  ASSERT_GT(base->space.dimension(), kDenseStateLimit);
  const auto r = spectral_gap(build_kawasaki(geom, base).form);
  EXPECT_EQ(r.method, SolveMethod::kIterative);
  EXPECT_NEAR(r.gap, 4.0 * (1.0 - std::cos(M_PI / 14)), 1e-8);
}

TEST(GapTest, DegenerateSector) {
  const auto base = make_measured_space(CanonicalMeasure(DisorderField::zero(4), 0));
  const auto r = spectral_gap(build_kawasaki(build_box(1, 4, Boundary::kFree), base).form);
  EXPECT_TRUE(r.degenerate);
}

TEST(GapTest, ReducibleMoveSetIsReported) {
  const auto base = make_measured_space(CanonicalMeasure(DisorderField::zero(3), 1));
  const auto q = build_single_exchange(base, 0, 1);
  try {
    spectral_gap(q);
    FAIL() << "expected ReducibleMoveSet";
  } catch (const ReducibleMoveSet& e) {
    EXPECT_NE(e.state_a(), e.state_b());
  }
}

TEST(PencilTest, IdenticalFormsGiveOne) {
  const auto geom = build_box(1, 6, Boundary::kFree);
  const auto base = make_measured_space(CanonicalMeasure(generate_iid(geom, 1.0, 3), 3));
  const auto B = build_kawasaki(geom, base).form;
  EXPECT_NEAR(pencil_ratio(B, B).lambda_max, 1.0, 1e-10);
  EXPECT_NEAR(pencil_ratio(B.scaled(2.0), B).lambda_max, 2.0, 1e-10);
  const auto bond = build_single_exchange(base, 1, 2);
  EXPECT_NEAR(pencil_ratio(bond, bond).lambda_max, 1.0, 1e-10);
}

TEST(PencilTest, ScalingInvariance) {
  const auto geom = build_box(1, 6, Boundary::kFree);
  const auto base = make_measured_space(CanonicalMeasure(generate_iid(geom, 1.0, 4), 2));
  const auto A = build_single_exchange(base, 0, 5);
  const auto B = build_kawasaki(geom, base).form;
  const double r = pencil_ratio(A, B).lambda_max;
  EXPECT_NEAR(pencil_ratio(A.scaled(3.0), B.scaled(3.0)).lambda_max, r, 1e-10 * r);
  EXPECT_NEAR(pencil_ratio(A.scaled(3.0), B).lambda_max, 3.0 * r, 1e-10 * r);
}

TEST(PencilTest, MatchesBruteForceGeneralizedEigenproblem) {
  const auto geom = build_box(1, 6, Boundary::kFree);
  const auto base = make_measured_space(CanonicalMeasure(generate_iid(geom, 1.0, 5), 3));
  const auto A = build_bl(base).form;
  const auto B = build_kawasaki(geom, base).form;
  // Both kernels are the constants: restrict to the complement and solve densely.
  const Eigen::MatrixXd a(A.matrix()), b(B.matrix());
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pe(P);
  const Eigen::MatrixXd V = pe.eigenvectors().rightCols(n - 1);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(V.transpose() * a * V, V.transpose() * b * V);
  const double ref = ges.eigenvalues().maxCoeff();
  EXPECT_NEAR(pencil_ratio(A, B).lambda_max, ref, 1e-8 * ref);
}

TEST(PencilTest, DenseAndIterativeAgree) {
  const auto geom = build_box(1, 11, Boundary::kFree);
  const auto base = make_measured_space(CanonicalMeasure(generate_iid(geom, 1.0, 6), 4));
  const auto A = build_single_exchange(base, 0, 10);
  const auto B = build_kawasaki(geom, base).form;
  const auto dense = pencil_ratio(A, B, {.method = SolveMethod::kDense});
  const auto iter = pencil_ratio(A, B, {.method = SolveMethod::kIterative});
  EXPECT_EQ(iter.method, SolveMethod::kIterative);
  EXPECT_NEAR(dense.lambda_max, iter.lambda_max, 1e-7 * dense.lambda_max);
  EXPECT_EQ(dense.kernel_dimension, 1u);
}

TEST(PencilTest, KernelNotContained) {
  const auto base = make_measured_space(CanonicalMeasure(DisorderField::zero(4), 2));
  EXPECT_THROW(pencil_ratio(build_bl(base).form, build_single_exchange(base, 0, 1)), KernelContainmentError);
}

TEST(PencilTest, DisconnectedDenominatorWithContainedKernel) {
  // Both forms only move the particle between sites 0 and 1; ker B has one
  // indicator per component and A vanishes on all of them.
  const auto base = make_measured_space(CanonicalMeasure(DisorderField::zero(3), 1));
  const auto B = build_single_exchange(base, 0, 1);
  const auto r = pencil_ratio(B.scaled(5.0), B);
  EXPECT_NEAR(r.lambda_max, 5.0, 1e-10);
  EXPECT_EQ(r.kernel_dimension, 2u);
}

TEST(Lemma2Test, TwoSitesIsTight) {
  const std::vector<double> rho{1.0};
  const auto r = certify_lemma2(2, 1, rho);
  EXPECT_NEAR(r.lambda_max, 1.0, 1e-10);
  EXPECT_TRUE(r.pass);
}

TEST(Lemma2Test, UniformAndSkewedWeights) {
  for (int k = 3; k <= 8; ++k) {
    for (int N = 1; N < k; ++N) {
      const std::vector<double> rho(k - 1, 1.0 / (k - 1));
      const auto r = certify_lemma2(k, N, rho);
      EXPECT_TRUE(r.pass) << "k=" << k << " N=" << N << " lambda=" << r.lambda_max;
      EXPECT_GT(r.lambda_max, 0.0);
    }
  }
  const std::vector<double> skew{0.4, 0.3, 0.2, 0.1};
  EXPECT_TRUE(certify_lemma2(5, 2, skew).pass);
}

TEST(Lemma2Test, RejectsBadWeights) {
  EXPECT_THROW(certify_lemma2(3, 1, std::vector<double>{0.6, 0.6}), std::invalid_argument);
  EXPECT_THROW(certify_lemma2(3, 1, std::vector<double>{0.5, 0.0}), std::invalid_argument);
  EXPECT_THROW(certify_lemma2(3, 1, std::vector<double>{0.5}), std::invalid_argument);
}

TEST(Lemma1Test, TwoSites) {
  const auto r = certify_lemma1(2, 1, DisorderField::zero(2));
  EXPECT_NEAR(r.lambda_max, 1.0, 1e-10);
  EXPECT_TRUE(r.pass);
}

TEST(Lemma1Test, HomogeneousPathBound) {
  for (int L = 3; L <= 9; ++L) {
    const auto r = certify_lemma1(L, L / 2, DisorderField::zero(L));
    EXPECT_LE(r.lambda_max, L - 1 + 1e-9);
    EXPECT_TRUE(r.pass);
  }
}

TEST(Lemma1Test, RandomFields) {
  for (int L = 3; L <= 8; ++L) {
    const auto f = generate_iid(build_box(1, L, Boundary::kFree), 1.0, 50 + L);
    const auto r = certify_lemma1(L, L / 2, f);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.bound, std::exp(13.0 * f.bound()) * L, 1e-9);
  }
}

TEST(Thm1Test, TwoSiteRow) {
  const std::vector<Thm1Instance> inst{{DisorderField::zero(2), 1, 0}};
  const auto rows = certify_thm1(inst);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].gap, 4.0, 1e-12);
  EXPECT_NEAR(rows[0].c_emp, 0.5, 1e-12);
}

TEST(Thm1Test, TrendUsesPerSizeMaximum) {
  std::vector<Thm1Row> rows;
  rows.push_back({.sites = 4, .c_emp = 0.5});
  rows.push_back({.sites = 4, .c_emp = 0.6});
  rows.push_back({.sites = 6, .c_emp = 0.55});
  rows.push_back({.sites = 8, .c_emp = 0.7});
  const auto t = thm1_trend(rows, 1.2);
  ASSERT_EQ(t.per_size.size(), 3u);
  EXPECT_DOUBLE_EQ(t.first, 0.6);
  EXPECT_DOUBLE_EQ(t.last, 0.7);
  EXPECT_TRUE(t.pass);
  EXPECT_FALSE(thm1_trend(rows, 1.1).pass);
}

TEST(Thm3Test, TwoSiteRow) {
  const std::vector<Thm3Instance> inst{{build_box(1, 2, Boundary::kFree), DisorderField::zero(2), 1, 0}};
  const auto rows = certify_thm3(inst);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].gap, 4.0, 1e-12);
  EXPECT_NEAR(rows[0].scaled, 16.0, 1e-11);
  EXPECT_FALSE(rows[0].excluded);
}

TEST(Thm3Test, DegenerateRowsAreExcluded) {
  const std::vector<Thm3Instance> inst{{build_box(1, 3, Boundary::kFree), DisorderField::zero(3), 3, 0}};
  const auto rows = certify_thm3(inst);
  EXPECT_TRUE(rows[0].excluded);
  EXPECT_EQ(default_particle_number(build_box(2, 3, Boundary::kFree)), 4);
}

TEST(Thm3Test, BandRatio) {
  std::vector<Thm3Row> rows(3);
  rows[0].scaled = 2.0;
  rows[1].scaled = 5.0;
  rows[2].scaled = 100.0;
  rows[2].excluded = true;
  const auto b = thm3_band(rows, 3.0);
  EXPECT_DOUBLE_EQ(b.ratio, 2.5);
  EXPECT_TRUE(b.pass);
  EXPECT_FALSE(thm3_band(rows, 2.0).pass);
}

TEST(ComposedChainTest, DominatesDirectGap) {
  for (auto [d, L, N, K] : {std::tuple{1, 6, 3, 1.0}, std::tuple{2, 3, 4, 1.0}, std::tuple{1, 8, 2, 0.0}}) {
    const auto geom = build_box(d, L, Boundary::kFree);
    const auto c = compose_thm3_chain(geom, generate_iid(geom, K, 9), N);
    EXPECT_TRUE(c.dominates);
    EXPECT_GE(c.composed_inverse_gap * (1 + 1e-9), c.direct_inverse_gap);
    EXPECT_GE(c.paper_inverse_gap * (1 + 1e-9), c.composed_inverse_gap);
    EXPECT_GE(c.gap_bl, c.gap_kawasaki);
  }
}

}  // namespace
}  // namespace dlg
