#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <gtest/gtest.h>

#include <hisparse/bench.hpp>
#include <hisparse/solve.hpp>

using namespace hisparse;

namespace {

RealVector gaussian(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> normal;
  RealVector z(static_cast<Eigen::Index>(d));
  for (auto& v : z) v = normal(rng);
  return z;
}

DenseOperator<double> identity(Index d) {
  return DenseOperator<double>(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d),
                                                         static_cast<Eigen::Index>(d)));
}

}  // namespace

TEST(SolverOptions, Validation) {
  SolverOptions o;
  EXPECT_NO_THROW(o.validate());
  o.max_iters = 0;
  EXPECT_THROW(o.validate(), DomainError);
  o = {};
  o.residual_tol = -1;
  EXPECT_THROW(o.validate(), DomainError);
  o = {};
  o.ls_tol = -1;
  EXPECT_THROW(o.validate(), DomainError);
}

TEST(RestrictedLeastSquares, IdentityProjects) {
  const auto op = identity(6);
  const RealVector y{{1, 2, 3, 4, 5, 6}};
  const auto ls = restricted_least_squares(op, y, {1, 4});
  EXPECT_EQ(ls.solution, project(y, {1, 4}));
  EXPECT_FALSE(ls.rank_deficient);
  EXPECT_EQ(ls.rank, 2u);
}

TEST(RestrictedLeastSquares, OrthonormalColumns) {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(10, 10))
                          .householderQ();
  const DenseOperator<double> op(q.leftCols(7));
  const RealVector y = gaussian(rng, 10);
  const SupportSet omega{0, 3, 6};
  const auto ls = restricted_least_squares(op, y, omega);
  const RealVector expected = op.columns(omega).transpose() * y;
  for (Index k = 0; k < 3; ++k) {
    EXPECT_NEAR(ls.solution[static_cast<Eigen::Index>(omega[k])], expected[static_cast<Eigen::Index>(k)],
                1e-12);
  }
}

TEST(RestrictedLeastSquares, MatchesNormalEquations) {
  std::mt19937_64 rng(2);
  const auto op = gaussian_operator<double>(30, 50, 3);
  const RealVector y = gaussian(rng, 30);
  const SupportSet omega{2, 5, 11, 17, 23, 31, 40, 49};
  const Eigen::MatrixXd a = op.columns(omega);
  const RealVector z = (a.transpose() * a).ldlt().solve(a.transpose() * y);
  for (const Index limit : {Index{2048}, Index{0}}) {
    SolverOptions opts;
    opts.direct_ls_limit = limit;
    const auto ls = restricted_least_squares(op, y, omega, opts);
    RealVector got(8);
    for (Index k = 0; k < 8; ++k) got[static_cast<Eigen::Index>(k)] = ls.solution[static_cast<Eigen::Index>(omega[k])];
    EXPECT_LT((got - z).norm(), 1e-8 * z.norm()) << "direct_ls_limit " << limit;
    EXPECT_LT((ls.residual - (y - op.apply(ls.solution))).norm(), 1e-12);
    // Optimality: the restricted gradient vanishes.
    EXPECT_LT(project(op.adjoint_apply(ls.residual), omega).norm(),
              1e-10 * op.adjoint_apply(y).norm());
  }
}

TEST(RestrictedLeastSquares, RankDeficientGivesMinimumNorm) {
  Eigen::MatrixXd a(3, 3);
  a << 1, 1, 0, 0, 0, 1, 0, 0, 0;  // columns 0 and 1 coincide
  const DenseOperator<double> op(a);
  const RealVector y{{2, 1, 5}};
  const auto ls = restricted_least_squares(op, y, {0, 1, 2});
  EXPECT_TRUE(ls.rank_deficient);
  EXPECT_EQ(ls.rank, 2u);
  EXPECT_NEAR(ls.solution[0], 1.0, 1e-12);
  EXPECT_NEAR(ls.solution[1], 1.0, 1e-12);
  EXPECT_NEAR(ls.solution[2], 1.0, 1e-12);
}

TEST(RestrictedLeastSquares, EmptyAndInvalidSupports) {
  const auto op = identity(4);
  const RealVector y{{1, 2, 3, 4}};
  EXPECT_EQ(restricted_least_squares(op, y, {}).solution, RealVector::Zero(4));
  EXPECT_THROW(restricted_least_squares(op, y, {4}), DimensionError);
  EXPECT_THROW(restricted_least_squares(op, RealVector::Zero(3).eval(), {0}), DimensionError);
}

TEST(ProxyStep, Examples) {
  std::mt19937_64 rng(4);
  const auto op = gaussian_operator<double>(12, 20, 5);
  const RealVector y = gaussian(rng, 12);
  EXPECT_LT((proxy_step(op, y, RealVector::Zero(20).eval()) - op.adjoint_apply(y)).norm(), 1e-14);
  const RealVector x = gaussian(rng, 20);
  EXPECT_LT((proxy_step(op, op.apply(x), x) - x).norm(), 1e-12);
  const Eigen::MatrixXd& a = op.matrix();
  const RealVector explicit_proxy = x + a.transpose() * (y - a * x);
  EXPECT_LT((proxy_step(op, y, x) - explicit_proxy).norm(), 1e-12 * explicit_proxy.norm());
}

TEST(Hihtp, IdentityRecoversInOneIteration) {
  const FlatSparsity fp{4, 5, 2, 3};
  const auto [x, support] = gen_signal<double>(fp, 3);
  const auto result = hihtp(identity(20), x, fp);
  EXPECT_LT((result.estimate - x).norm(), 1e-14 * x.norm());
  EXPECT_EQ(result.iterations, 2u);
  EXPECT_EQ(result.stop_reason, StopReason::support_stalled);
  ASSERT_EQ(result.residual_norms.size(), 2u);
  EXPECT_LT(result.residual_norms[0], 1e-14 * x.norm());
  EXPECT_EQ(result.support.flatten(), support.flatten());
}

TEST(Htp, IdentityAndZeroMeasurements) {
  std::mt19937_64 rng(6);
  RealVector x = RealVector::Zero(15);
  x[2] = 1.5;
  x[9] = -2;
  const auto r = htp(identity(15), x, 2);
  EXPECT_LT((r.estimate - x).norm(), 1e-14 * x.norm());
  EXPECT_LT(r.residual_norms.front(), 1e-14 * x.norm());
  const auto z = htp(identity(15), RealVector::Zero(15).eval(), 3);
  EXPECT_EQ(z.estimate, RealVector::Zero(15));
  EXPECT_EQ(z.iterations, 2u);
  EXPECT_EQ(z.stop_reason, StopReason::support_stalled);
  EXPECT_THROW(htp(identity(15), x, 16), DomainError);
  EXPECT_THROW(htp(identity(15), x, 0), DomainError);
}

TEST(Hihtp, GaussianRecoveryBeatsHtp) {
  const FlatSparsity fp{10, 20, 2, 4};
  int hi = 0, plain = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const auto seeds = instance_seeds(2024, 60, trial);
    const auto raw = gaussian_operator<double>(60, 200, seeds.op);
    const auto [op, scaling] = normalize_columns(raw);
    const RealVector x = gen_signal<double>(fp, seeds.signal).first;
    const RealVector y = raw.apply(x);
    const auto a = hihtp(op, y, fp);
    const auto b = htp(op, y, 8);
    hi += (unnormalize_solution(a.estimate, scaling) - x).norm() < 1e-5 ? 1 : 0;
    plain += (unnormalize_solution(b.estimate, scaling) - x).norm() < 1e-5 ? 1 : 0;
    EXPECT_TRUE(is_sparse(a.estimate, fp));
  }
  EXPECT_GE(hi, 95);
  EXPECT_LT(plain, hi);
}

TEST(Hihtp, GaussianTransitionRegionFavoursHihtp) {
  const FlatSparsity fp{10, 20, 2, 4};
  int hi = 0, plain = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const auto seeds = instance_seeds(2024, 30, trial);
    const auto raw = gaussian_operator<double>(30, 200, seeds.op);
    const auto [op, scaling] = normalize_columns(raw);
    const RealVector x = gen_signal<double>(fp, seeds.signal).first;
    const RealVector y = raw.apply(x);
    hi += (unnormalize_solution(hihtp(op, y, fp).estimate, scaling) - x).norm() < 1e-5 ? 1 : 0;
    plain += (unnormalize_solution(htp(op, y, 8).estimate, scaling) - x).norm() < 1e-5 ? 1 : 0;
  }
  EXPECT_LT(plain, hi);
}

TEST(Hihtp, IterationInvariants) {
  const FlatSparsity fp{8, 10, 2, 3};
  SolverOptions opts;
  opts.keep_iterates = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto op = normalize_columns(gaussian_operator<double>(25, 80, seed)).first;
    const RealVector x = gen_signal<double>(fp, seed + 100).first;
    const RealVector y = op.apply(x);
    const auto r = hihtp(op, y, fp, opts);
    ASSERT_EQ(r.residual_norms.size(), r.iterations);
    ASSERT_EQ(r.iterates.size(), r.iterations);
    const double scale = op.adjoint_apply(y).norm();
    for (const auto& xk : r.iterates) {
      EXPECT_TRUE(is_sparse(xk, fp));
      const auto omega = nonzero_support(xk);
      EXPECT_LE(project(op.adjoint_apply(RealVector(y - op.apply(xk))), omega).norm(),
                opts.ls_tol * scale + 1e-14);
    }
    const auto est_support = nonzero_support(r.estimate);
    const auto final_support = r.support.flatten();
    EXPECT_TRUE(std::includes(final_support.begin(), final_support.end(), est_support.begin(),
                              est_support.end()));
  }
}

TEST(Hihtp, LeastSquaresBeatsRandomCandidatesOnSupport) {
  std::mt19937_64 rng(8);
  const FlatSparsity fp{6, 8, 2, 2};
  const auto op = normalize_columns(gaussian_operator<double>(20, 48, 8)).first;
  const RealVector y = gaussian(rng, 20);
  const auto r = hihtp(op, y, fp);
  const auto omega = r.support.flatten();
  for (int k = 0; k < 200; ++k) {
    const RealVector candidate = project(gaussian(rng, 48), omega);
    EXPECT_LE(r.residual_norms.back(), (y - op.apply(candidate)).norm() + 1e-12);
  }
}

TEST(Hihtp, DepthTwoTreeMatchesFlat) {
  const FlatSparsity fp{10, 20, 2, 4};
  SolverOptions opts;
  opts.keep_iterates = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto op = normalize_columns(gaussian_operator<double>(45, 200, seed)).first;
    const RealVector y = op.apply(gen_signal<double>(fp, seed + 7).first);
    const auto flat = hihtp(op, y, fp, opts);
    const auto tree = hihtp(op, y, SparsityTree::flat(fp), opts);
    ASSERT_EQ(flat.iterations, tree.iterations);
    for (Index k = 0; k < flat.iterations; ++k) EXPECT_EQ(flat.iterates[k], tree.iterates[k]);
    EXPECT_EQ(flat.support, tree.support);
  }
}

TEST(Hihtp, TreeSparseRecovery) {
  const auto tree = SparsityTree::uniform(std::vector<Level>{{4, 2}, {5, 2}, {6, 2}});
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto op = normalize_columns(gaussian_operator<double>(60, tree.leaf_count(), seed)).first;
    const RealVector x = gen_signal<double>(tree, seed + 1).first;
    const auto r = hihtp(op, RealVector(op.apply(x)), tree);
    EXPECT_TRUE(is_sparse(r.estimate, tree));
    recovered += (r.estimate - x).norm() < 1e-6 ? 1 : 0;
  }
  EXPECT_GE(recovered, 18);
}

TEST(Hihtp, FourierComplexRecovery) {
  const FlatSparsity fp{20, 50, 3, 10};
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto op = subsampled_dft(1000, 300, RowSelection::uniform_random, seed);
    const ComplexVector x = gen_signal<Complex>(fp, seed + 50).first;
    const auto r = hihtp(op, op.apply(x), fp);
    recovered += (r.estimate - x).norm() < 1e-5 ? 1 : 0;
  }
  EXPECT_GE(recovered, 9);
}

TEST(Hihtp, StoppingRules) {
  const FlatSparsity fp{10, 20, 2, 4};
  const auto op = normalize_columns(gaussian_operator<double>(30, 200, 1)).first;
  const RealVector y = op.apply(gen_signal<double>(fp, 2).first);
  SolverOptions opts;
  opts.support_stall_stop = false;
  opts.max_iters = 7;
  const auto capped = hihtp(op, y, fp, opts);
  EXPECT_EQ(capped.iterations, 7u);
  EXPECT_EQ(capped.stop_reason, StopReason::max_iters);
  opts = {};
  opts.residual_tol = 1e30;
  const auto quick = hihtp(op, y, fp, opts);
  EXPECT_EQ(quick.iterations, 1u);
  EXPECT_EQ(quick.stop_reason, StopReason::residual_tol);
}

TEST(Hihtp, WarmStartAtSolutionStallsImmediately) {
  const FlatSparsity fp{10, 20, 2, 4};
  const auto op = normalize_columns(gaussian_operator<double>(80, 200, 3)).first;
  const RealVector x = gen_signal<double>(fp, 4).first;
  const auto r = hihtp(op, RealVector(op.apply(x)), fp, SolverOptions{}, x);
  EXPECT_LT((r.estimate - x).norm(), 1e-10);
  EXPECT_EQ(r.iterations, 2u);
}

TEST(Hihtp, DimensionErrors) {
  const auto op = identity(6);
  EXPECT_THROW(hihtp(op, RealVector::Zero(5).eval(), FlatSparsity{2, 3, 1, 1}), DimensionError);
  EXPECT_THROW(hihtp(op, RealVector::Zero(6).eval(), FlatSparsity{2, 4, 1, 1}), DimensionError);
}
