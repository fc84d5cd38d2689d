#pragma once

// Restricted isometry constants. The bounds predict how many Gaussian
// measurements suffice; the estimators measure the constants of a given matrix.

#include <cstdint>
#include <span>

#include <boost/multiprecision/cpp_int.hpp>

#include "hisparse/measure.hpp"
#include "hisparse/model.hpp"

namespace hisparse {

using BigInt = boost::multiprecision::cpp_int;

enum class RipMethod { exhaustive, monte_carlo };

struct RipEstimate {
  /// Exact constant for exhaustive estimates, a lower bound otherwise.
  double delta_lower = 0.0;
  RipMethod method = RipMethod::exhaustive;
  std::uint64_t supports_checked = 0;
  /// A support attaining delta_lower.
  SupportSet worst_support;
};

struct GuaranteeConstants {
  double rho = 0.0;
  /// Noise amplification bound; +inf when the condition is not met.
  double tau_bound = 0.0;
  bool condition_met = false;
};

/// Unrounded right-hand side of the Gaussian (s, sigma) sample bound
/// (36 / (7 delta)) (s ln(eN/s) + s sigma ln(en/sigma) + ln(12/delta) + ln(1/eps)).
double gaussian_sample_bound_value(const FlatSparsity& fp, double delta, double epsilon);
/// Smallest integer m satisfying the bound.
Index gaussian_sample_bound(const FlatSparsity& fp, double delta, double epsilon);

/// Unrounded bound for a uniform tree given top-down levels (n_i, s_i).
/// Level i contributes S_i s_i ln(e n_i / s_i), where S_i = s_0 ... s_{i-1}
/// is the number of active vertices at depth i.
double tree_sample_bound_value(std::span<const Level> levels, double delta, double epsilon);
Index tree_sample_bound(std::span<const Level> levels, double delta, double epsilon);

/// Bound for plain k-sparse vectors in dimension d.
double unstructured_sample_bound_value(Index d, Index k, double delta, double epsilon);
Index unstructured_sample_bound(Index d, Index k, double delta, double epsilon);

BigInt binomial(Index n, Index k);

/// C(N, s) * C(n, sigma)^s.
BigInt count_flat_supports(const FlatSparsity& fp);
/// Number of maximal admissible supports, via p(leaf) = 1 and
/// p(v) = sum over s(v)-subsets W of children of prod_{w in W} p(w).
BigInt count_tree_supports(const SparsityTree& tree);
/// prod_i C(n_i, s_i)^{s_0 ... s_{i-1}} for a uniform tree.
BigInt count_uniform_supports_closed_form(std::span<const Level> levels);

/// rho = sqrt(2 delta3^2 / (1 - delta2^2)) and tau <= 5.15 / (1 - rho), where
/// delta3 and delta2 are the (3s, 2sigma) and (2s, 2sigma) constants. The
/// condition is delta3 < 1/sqrt(3). Throws DomainError unless both deltas are
/// in [0, 1) and delta2 <= delta3.
GuaranteeConstants guarantee_constants(double delta_3s_2sigma, double delta_2s_2sigma);

/// max(|lambda_min - 1|, |lambda_max - 1|) of cols^* cols.
template <typename Scalar>
double support_deviation(const Matrix<Scalar>& cols);

inline constexpr std::uint64_t kDefaultRipCap = 100'000;

/// Exact restricted isometry constant over all admissible supports.
/// Throws CapExceededError when more than `cap` maximal supports exist.
template <typename Scalar>
RipEstimate exhaustive_rip(const DenseOperator<Scalar>& op, const Sparsity& sparsity,
                           std::uint64_t cap = kDefaultRipCap);

/// Largest deviation over `trials` random maximal supports.
template <typename Scalar>
RipEstimate monte_carlo_rip(const LinearOperator<Scalar>& op, const Sparsity& sparsity,
                            std::uint64_t trials, std::uint64_t seed);

extern template double support_deviation(const Matrix<double>&);
extern template double support_deviation(const Matrix<Complex>&);
extern template RipEstimate exhaustive_rip(const DenseOperator<double>&, const Sparsity&,
                                           std::uint64_t);
extern template RipEstimate exhaustive_rip(const DenseOperator<Complex>&, const Sparsity&,
                                           std::uint64_t);
extern template RipEstimate monte_carlo_rip(const LinearOperator<double>&, const Sparsity&,
                                            std::uint64_t, std::uint64_t);
extern template RipEstimate monte_carlo_rip(const LinearOperator<Complex>&, const Sparsity&,
                                            std::uint64_t, std::uint64_t);

}  // namespace hisparse
