#include "hisparse/ripcalc.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "hisparse/parallel.hpp"
#include "hisparse/random.hpp"
#include "hisparse/threshold.hpp"

namespace hisparse {

namespace {

void check_probabilities(double delta, double epsilon) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}

void check_levels(std::span<const Level> levels) {
  if (levels.empty()) throw DomainError("at least one level is required");
  for (const auto& l : levels) {
    if (l.budget < 1 || l.budget > l.children) {
      throw DomainError("every level needs 1 <= s_i <= n_i");
    }
  }
}

Index ceil_to_index(double value) { return static_cast<Index>(std::ceil(value)); }

}  // namespace

double tree_sample_bound_value(std::span<const Level> levels, double delta, double epsilon) {
  check_probabilities(delta, epsilon);
  check_levels(levels);
  double sum = 0.0;
  double active = 1.0;
  for (const auto& l : levels) {
    const double n = static_cast<double>(l.children);
    const double s = static_cast<double>(l.budget);
    sum += active * s * std::log(std::numbers::e * n / s);
    active *= s;
  }
  sum += std::log(12.0 / delta) + std::log(1.0 / epsilon);
  return 36.0 / (7.0 * delta) * sum;
}

Index tree_sample_bound(std::span<const Level> levels, double delta, double epsilon) {
  return ceil_to_index(tree_sample_bound_value(levels, delta, epsilon));
}

double gaussian_sample_bound_value(const FlatSparsity& fp, double delta, double epsilon) {
  fp.validate();
  const Level levels[] = {{fp.num_blocks, fp.active_blocks}, {fp.block_size, fp.active_per_block}};
  return tree_sample_bound_value(levels, delta, epsilon);
}

Index gaussian_sample_bound(const FlatSparsity& fp, double delta, double epsilon) {
  return ceil_to_index(gaussian_sample_bound_value(fp, delta, epsilon));
}

double unstructured_sample_bound_value(Index d, Index k, double delta, double epsilon) {
  const Level levels[] = {{d, k}};
  return tree_sample_bound_value(levels, delta, epsilon);
}

Index unstructured_sample_bound(Index d, Index k, double delta, double epsilon) {
  return ceil_to_index(unstructured_sample_bound_value(d, k, delta, epsilon));
}

BigInt binomial(Index n, Index k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt out = 1;
  for (Index i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;
  }
  return out;
}

BigInt count_flat_supports(const FlatSparsity& fp) {
  fp.validate();
  return binomial(fp.num_blocks, fp.active_blocks) *
         boost::multiprecision::pow(binomial(fp.block_size, fp.active_per_block),
                                    static_cast<unsigned>(fp.active_blocks));
}

BigInt count_tree_supports(const SparsityTree& tree) {
  std::vector<BigInt> p(tree.vertex_count(), BigInt(1));
  for (const auto v : tree.internal_postorder()) {
    // Elementary symmetric polynomial e_s of the children's counts.
    const Index s = tree.budget(v);
    std::vector<BigInt> e(s + 1, BigInt(0));
    e[0] = 1;
    for (const auto c : tree.children(v)) {
      for (Index j = s; j >= 1; --j) e[j] += e[j - 1] * p[c];
    }
    p[v] = e[s];
  }
  return p[SparsityTree::root()];
}

BigInt count_uniform_supports_closed_form(std::span<const Level> levels) {
  check_levels(levels);
  BigInt out = 1;
  BigInt active = 1;
  for (const auto& l : levels) {
    if (active > 1'000'000) throw DomainError("closed-form support count is too large to evaluate");
    out *= boost::multiprecision::pow(binomial(l.children, l.budget), active.convert_to<unsigned>());
    active *= l.budget;
  }
  return out;
}

GuaranteeConstants guarantee_constants(double delta_3s_2sigma, double delta_2s_2sigma) {
  const double d3 = delta_3s_2sigma;
  const double d2 = delta_2s_2sigma;
  if (!(d3 >= 0.0 && d3 < 1.0) || !(d2 >= 0.0 && d2 < 1.0)) {
    throw DomainError("restricted isometry constants must lie in [0, 1)");
  }
  if (d2 > d3) {
    throw DomainError("the (2s, 2sigma) constant cannot exceed the (3s, 2sigma) constant");
  }
  GuaranteeConstants out;
  out.rho = std::sqrt(2.0 * d3 * d3 / (1.0 - d2 * d2));
  out.condition_met = d3 < 1.0 / std::sqrt(3.0);
  out.tau_bound = out.condition_met ? 5.15 / (1.0 - out.rho)
                                    : std::numeric_limits<double>::infinity();
  return out;
}

template <typename Scalar>
double support_deviation(const Matrix<Scalar>& cols) {
  if (cols.cols() == 0) return 0.0;
  const Matrix<Scalar> gram = cols.adjoint() * cols;
  const Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(gram, Eigen::EigenvaluesOnly);
  const auto& lambda = eig.eigenvalues();
  return std::max(std::abs(lambda.minCoeff() - 1.0), std::abs(lambda.maxCoeff() - 1.0));
}

namespace {

void enumerate(const Sparsity& sp, const std::function<void(const SupportSet&)>& visit,
               std::uint64_t cap) {
  if (const auto* fp = std::get_if<FlatSparsity>(&sp)) {
    for_each_support(*fp, visit, cap);
  } else {
    for_each_support(std::get<SparsityTree>(sp), visit, cap);
  }
}

// Deterministic maximum: the earliest support wins ties.
RipEstimate reduce(const std::vector<SupportSet>& supports, const std::vector<double>& devs,
                   RipMethod method) {
  RipEstimate out;
  out.method = method;
  out.supports_checked = supports.size();
  Index best = 0;
  for (Index i = 1; i < devs.size(); ++i) {
    if (devs[i] > devs[best]) best = i;
  }
  if (!devs.empty()) {
    out.delta_lower = devs[best];
    out.worst_support = supports[best];
  }
  return out;
}

}  // namespace

template <typename Scalar>
RipEstimate exhaustive_rip(const DenseOperator<Scalar>& op, const Sparsity& sparsity,
                           std::uint64_t cap) {
  if (dimension(sparsity) != op.cols()) {
    throw DimensionError("sparsity dimension does not match the operator");
  }
  std::vector<SupportSet> supports;
  enumerate(sparsity, [&](const SupportSet& s) { supports.push_back(s); }, cap);
  std::vector<double> devs(supports.size());
  parallel_for(supports.size(),
               [&](Index i) { devs[i] = support_deviation(op.columns(supports[i])); });
  return reduce(supports, devs, RipMethod::exhaustive);
}

template <typename Scalar>
RipEstimate monte_carlo_rip(const LinearOperator<Scalar>& op, const Sparsity& sparsity,
                            std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("monte_carlo_rip needs at least one trial");
  if (dimension(sparsity) != op.cols()) {
    throw DimensionError("sparsity dimension does not match the operator");
  }
  Rng rng(seed);
  std::vector<SupportSet> supports(trials);
  for (auto& s : supports) s = random_support(sparsity, rng);
  std::vector<double> devs(supports.size());
  parallel_for(supports.size(),
               [&](Index i) { devs[i] = support_deviation(op.columns(supports[i])); });
  return reduce(supports, devs, RipMethod::monte_carlo);
}

template double support_deviation(const Matrix<double>&);
template double support_deviation(const Matrix<Complex>&);
template RipEstimate exhaustive_rip(const DenseOperator<double>&, const Sparsity&, std::uint64_t);
template RipEstimate exhaustive_rip(const DenseOperator<Complex>&, const Sparsity&, std::uint64_t);
template RipEstimate monte_carlo_rip(const LinearOperator<double>&, const Sparsity&, std::uint64_t,
                                     std::uint64_t);
template RipEstimate monte_carlo_rip(const LinearOperator<Complex>&, const Sparsity&,
                                     std::uint64_t, std::uint64_t);

}  // namespace hisparse
