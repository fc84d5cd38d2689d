#include <cmath>
#include <random>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include <hisparse/ripcalc.hpp>
#include <hisparse/threshold.hpp>

#include "oracles.hpp"

using namespace hisparse;

namespace {

// Frozen 60-digit evaluations of the bound for (N, n, s, sigma) = (30, 100, 4, 20),
// delta = 0.577, epsilon = 0.01, and of the unstructured bound for d = 3000, k = 80.
constexpr double kReferenceBound = 2036.2383900235949;
constexpr double kReferenceUnstructured = 3365.472028;

std::uint64_t enumerate_count(const SparsityTree& tree) {
  std::uint64_t n = 0;
  for_each_support(tree, [&](const SupportSet&) { ++n; });
  return n;
}

}  // namespace

TEST(SampleBound, FullBudgetsSimplifyTheLogarithms) {
  const FlatSparsity fp{6, 5, 6, 5};
  const double delta = 0.3, eps = 0.05;
  const double expected = 36.0 / (7.0 * delta) * (6 + 30 + std::log(12.0 / delta) + std::log(1.0 / eps));
  EXPECT_NEAR(gaussian_sample_bound_value(fp, delta, eps), expected, 1e-9 * expected);
}

TEST(SampleBound, IncreasesAsDeltaShrinks) {
  const FlatSparsity fp{30, 100, 4, 20};
  Index previous = 0;
  for (const double delta : {0.9, 0.7, 0.5, 0.3, 0.1, 0.05}) {
    const Index m = gaussian_sample_bound(fp, delta, 0.01);
    EXPECT_GT(m, previous);
    previous = m;
  }
}

TEST(SampleBound, ReferenceDimensionsMatchHighPrecision) {
  const FlatSparsity fp{30, 100, 4, 20};
  const auto hp = oracle::sample_bound({{30, 4}, {100, 20}}, oracle::BigFloat("0.577"),
                                       oracle::BigFloat("0.01"));
  EXPECT_NEAR(hp.convert_to<double>(), kReferenceBound, 1e-9);
  EXPECT_NEAR(gaussian_sample_bound_value(fp, 0.577, 0.01), kReferenceBound, 1e-9 * kReferenceBound);
  EXPECT_EQ(gaussian_sample_bound(fp, 0.577, 0.01), 2037u);
  EXPECT_EQ(boost::multiprecision::ceil(hp).convert_to<Index>(), 2037u);
  EXPECT_NEAR(unstructured_sample_bound_value(3000, 80, 0.577, 0.01), kReferenceUnstructured, 1e-5);
  EXPECT_EQ(unstructured_sample_bound(3000, 80, 0.577, 0.01), 3366u);
  EXPECT_LT(gaussian_sample_bound(fp, 0.577, 0.01), unstructured_sample_bound(3000, 80, 0.577, 0.01));
}

TEST(SampleBound, TreeReducesToFlatAndUnstructured) {
  for (const double delta : {0.1, 0.577, 0.9}) {
    const FlatSparsity fp{30, 100, 4, 20};
    const Level two[] = {{30, 4}, {100, 20}};
    EXPECT_EQ(tree_sample_bound_value(two, delta, 0.01), gaussian_sample_bound_value(fp, delta, 0.01));
    const Level one[] = {{500, 7}};
    EXPECT_EQ(tree_sample_bound_value(one, delta, 0.01),
              unstructured_sample_bound_value(500, 7, delta, 0.01));
    const double expected =
        36.0 / (7.0 * delta) * (7 * std::log(M_E * 500 / 7) + std::log(12.0 / delta) + std::log(100.0));
    EXPECT_NEAR(tree_sample_bound_value(one, delta, 0.01), expected, 1e-10 * expected);
  }
}

TEST(SampleBound, ThreeLevelsMatchHighPrecision) {
  const std::vector<Level> levels{{10, 3}, {8, 2}, {16, 4}};
  for (const char* delta : {"0.2", "0.5", "0.577"}) {
    const auto hp = oracle::sample_bound(levels, oracle::BigFloat(delta), oracle::BigFloat("0.01"));
    const double d = std::stod(delta);
    EXPECT_NEAR(tree_sample_bound_value(levels, d, 0.01), hp.convert_to<double>(),
                1e-12 * hp.convert_to<double>());
    EXPECT_EQ(tree_sample_bound(levels, d, 0.01), boost::multiprecision::ceil(hp).convert_to<Index>());
  }
}

TEST(SampleBound, DomainErrors) {
  const FlatSparsity fp{3, 3, 1, 1};
  EXPECT_THROW(gaussian_sample_bound(fp, 0.0, 0.1), DomainError);
  EXPECT_THROW(gaussian_sample_bound(fp, 1.0, 0.1), DomainError);
  EXPECT_THROW(gaussian_sample_bound(fp, 0.5, 0.0), DomainError);
  EXPECT_THROW(gaussian_sample_bound(fp, 0.5, 1.5), DomainError);
  EXPECT_THROW(unstructured_sample_bound(10, 11, 0.5, 0.1), DomainError);
}

TEST(SupportCount, FlatExamples) {
  EXPECT_EQ(count_flat_supports({2, 2, 1, 1}), 4);
  EXPECT_EQ(count_flat_supports({5, 4, 5, 4}), 1);
  EXPECT_EQ(count_flat_supports({4, 3, 2, 1}), 54);
  EXPECT_EQ(count_maximal_supports(FlatSparsity{4, 3, 2, 1}), 54u);
  const BigInt large = count_flat_supports({30, 100, 4, 20});
  EXPECT_EQ(large, oracle::binomial(30, 4) * boost::multiprecision::pow(oracle::binomial(100, 20), 4));
}

TEST(SupportCount, TreeExamples) {
  EXPECT_EQ(count_tree_supports(SparsityTree::flat({6, 5, 3, 2})), count_flat_supports({6, 5, 3, 2}));
  const std::vector<Level> chain{{1, 1}, {1, 1}, {1, 1}};
  EXPECT_EQ(count_tree_supports(SparsityTree::uniform(chain)), 1);
  const std::vector<Level> three{{4, 2}, {3, 2}, {5, 3}};
  // C(4,2) * C(3,2)^2 * C(5,3)^4
  EXPECT_EQ(count_tree_supports(SparsityTree::uniform(three)), BigInt(6 * 9 * 10000));
  EXPECT_EQ(count_uniform_supports_closed_form(three), BigInt(6 * 9 * 10000));
}

TEST(SupportCount, UniformShapesAgreeWithClosedFormAndEnumeration) {
  // All shapes with up to 4 levels and n_i <= 6.
  std::vector<std::vector<Level>> shapes{{}};
  for (int depth = 1; depth <= 4; ++depth) {
    std::vector<std::vector<Level>> next;
    for (const auto& prefix : shapes) {
      if (static_cast<int>(prefix.size()) != depth - 1) continue;
      for (Index n = 1; n <= 6; ++n) {
        for (Index s = 1; s <= n; ++s) {
          auto shape = prefix;
          shape.push_back({n, s});
          next.push_back(shape);
        }
      }
    }
    shapes.insert(shapes.end(), next.begin(), next.end());
  }
  int enumerated = 0, checked = 0;
  for (const auto& shape : shapes) {
    if (shape.empty()) continue;
    const auto tree = SparsityTree::uniform(shape);
    const BigInt recursion = count_tree_supports(tree);
    // Independent closed form: level i is raised to the number of active vertices above it.
    BigInt closed = 1, active = 1;
    for (const auto& l : shape) {
      closed *= boost::multiprecision::pow(oracle::binomial(static_cast<unsigned>(l.children),
                                                            static_cast<unsigned>(l.budget)),
                                           active.convert_to<unsigned>());
      active *= l.budget;
    }
    ASSERT_EQ(recursion, closed);
    ASSERT_EQ(count_uniform_supports_closed_form(shape), closed);
    ++checked;
    if (recursion <= 2000) {
      ASSERT_EQ(recursion, BigInt(enumerate_count(tree)));
      ++enumerated;
    }
  }
  EXPECT_EQ(checked, 21 + 21 * 21 + 21 * 21 * 21 + 21 * 21 * 21 * 21);
  EXPECT_GT(enumerated, 1000);
}

TEST(SupportCount, IrregularTreeAgainstBitmaskOracle) {
  const SparsityTree::Node root{
      2, {{1, std::vector<SparsityTree::Node>(3)}, {}, {2, {{1, std::vector<SparsityTree::Node>(2)}, {}, {}}}}};
  const auto tree = SparsityTree::from_nested(root);
  const auto masks = oracle::admissible_masks(
      tree.leaf_count(), [&](std::uint32_t m) { return oracle::tree_admissible(m, root, true); });
  EXPECT_EQ(count_tree_supports(tree), BigInt(masks.size()));
}

TEST(GuaranteeConstants, Examples) {
  const auto zero = guarantee_constants(0.0, 0.0);
  EXPECT_EQ(zero.rho, 0.0);
  EXPECT_DOUBLE_EQ(zero.tau_bound, 5.15);
  EXPECT_TRUE(zero.condition_met);
  const auto edge = guarantee_constants(1.0 / std::sqrt(3.0), 0.1);
  EXPECT_FALSE(edge.condition_met);
  EXPECT_TRUE(std::isinf(edge.tau_bound));
  using boost::multiprecision::sqrt;
  const oracle::BigFloat rho = sqrt(oracle::BigFloat("0.32") / oracle::BigFloat("0.91"));
  const auto c = guarantee_constants(0.4, 0.3);
  EXPECT_NEAR(c.rho, rho.convert_to<double>(), 1e-15);
  EXPECT_NEAR(c.rho, 0.592999453328880943, 1e-15);
  EXPECT_NEAR(c.tau_bound, 12.65354565767084924, 1e-12);
  EXPECT_TRUE(c.condition_met);
  EXPECT_LT(c.rho, 1.0);
}

TEST(GuaranteeConstants, RhoBelowOneWheneverConditionHolds) {
  for (double d3 = 0.0; d3 < 0.577; d3 += 0.01) {
    for (double d2 = 0.0; d2 <= d3; d2 += 0.01) {
      const auto c = guarantee_constants(d3, d2);
      ASSERT_TRUE(c.condition_met);
      ASSERT_LT(c.rho, 1.0);
      ASSERT_GE(c.rho, 0.0);
    }
  }
}

TEST(GuaranteeConstants, DomainErrors) {
  EXPECT_THROW(guarantee_constants(1.0, 0.1), DomainError);
  EXPECT_THROW(guarantee_constants(0.5, 1.2), DomainError);
  EXPECT_THROW(guarantee_constants(-0.1, 0.0), DomainError);
  EXPECT_THROW(guarantee_constants(0.2, 0.3), DomainError);
}

TEST(ExhaustiveRip, OrthonormalColumnsGiveZero) {
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(8, 8)).householderQ();
  const DenseOperator<double> op(q.leftCols(6));
  EXPECT_NEAR(exhaustive_rip(op, FlatSparsity{3, 2, 2, 1}).delta_lower, 0.0, 1e-14);
  EXPECT_NEAR(exhaustive_rip(op, FlatSparsity{3, 2, 3, 2}).delta_lower, 0.0, 1e-14);
}

TEST(ExhaustiveRip, DiagonalExample) {
  const DenseOperator<double> op(Eigen::Vector2d(1, 2).asDiagonal().toDenseMatrix());
  const auto est = exhaustive_rip(op, FlatSparsity{2, 1, 1, 1});
  EXPECT_DOUBLE_EQ(est.delta_lower, 3.0);
  EXPECT_EQ(est.worst_support, (SupportSet{1}));
  EXPECT_EQ(est.method, RipMethod::exhaustive);
  EXPECT_EQ(est.supports_checked, 2u);
}

TEST(ExhaustiveRip, MatchesJacobiOracleOverBitmaskSupports) {
  const FlatSparsity fp{4, 2, 2, 1};
  const auto masks = oracle::admissible_masks(
      8, [&](std::uint32_t m) { return m != 0 && oracle::flat_admissible(m, fp, false); });
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto op = gaussian_operator<double>(6, 8, seed);
    double expected = 0.0;
    for (const auto m : masks) expected = std::max(expected, oracle::gram_deviation(op.matrix(), oracle::mask_to_support(m)));
    EXPECT_NEAR(exhaustive_rip(op, fp).delta_lower, expected, 1e-10 * std::max(1.0, expected));
  }
}

TEST(ExhaustiveRip, CapAndDimensionChecks) {
  const auto op = gaussian_operator<double>(6, 40, 1);
  EXPECT_THROW(exhaustive_rip(op, FlatSparsity{4, 10, 2, 5}, 1000), CapExceededError);
  EXPECT_THROW(exhaustive_rip(op, FlatSparsity{4, 2, 1, 1}), DimensionError);
}

TEST(MonteCarloRip, CoversExhaustiveOnTinyInstance) {
  const auto op = gaussian_operator<double>(6, 6, 3);
  const FlatSparsity fp{3, 2, 1, 1};  // six supports
  const double exact = exhaustive_rip(op, fp).delta_lower;
  const auto many = monte_carlo_rip(op, fp, 400, 9);
  EXPECT_EQ(many.delta_lower, exact);
  EXPECT_EQ(many.method, RipMethod::monte_carlo);
  EXPECT_EQ(many.supports_checked, 400u);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_LE(monte_carlo_rip(op, fp, 1, seed).delta_lower, exact);
  }
  EXPECT_EQ(monte_carlo_rip(op, fp, 3, 5).delta_lower, monte_carlo_rip(op, fp, 3, 5).delta_lower);
  EXPECT_THROW(monte_carlo_rip(op, fp, 0, 1), DomainError);
}

TEST(MonteCarloRip, WorksOnFourierOperators) {
  const auto op = subsampled_dft(64, 32, RowSelection::uniform_random, 2);
  const auto est = monte_carlo_rip(op, FlatSparsity{8, 8, 2, 2}, 200, 1);
  EXPECT_GT(est.delta_lower, 0.0);
  EXPECT_LT(est.delta_lower, 1.0);
}

TEST(SupportDeviation, ComplexGram) {
  Eigen::MatrixXcd a(2, 2);
  a << Complex(0, 1), 0, 0, Complex(0, 2);
  EXPECT_DOUBLE_EQ(support_deviation(a), 3.0);
  EXPECT_EQ(support_deviation(Eigen::MatrixXd(3, 0)), 0.0);
}
