#pragma once

// Hard Thresholding Pursuit and its hierarchical variant.
//
// Each iteration thresholds the proxy x + A*(y - A x) to pick a support, then
// solves the least-squares problem restricted to it.

#include <optional>
#include <string_view>
#include <vector>

#include "hisparse/measure.hpp"
#include "hisparse/model.hpp"

namespace hisparse {

enum class StopReason { support_stalled, max_iters, residual_tol };

std::string_view to_string(StopReason reason);

struct SolverOptions {
  Index max_iters = 100;
  /// Stop as soon as two consecutive supports coincide.
  bool support_stall_stop = true;
  /// Stop once ||y - A x|| <= residual_tol; 0 disables the test.
  double residual_tol = 0.0;
  /// Relative gradient tolerance of the restricted least-squares step.
  double ls_tol = 1e-12;
  /// Iteration cap of the iterative least-squares fallback.
  Index ls_max_iters = 1000;
  /// Largest support solved by a dense factorization; larger ones use CGLS.
  Index direct_ls_limit = 2048;
  /// Record every iterate x^1, x^2, ... in SolveResult::iterates.
  bool keep_iterates = false;

  /// Throws DomainError on max_iters == 0 or negative tolerances.
  void validate() const;
};

template <typename Scalar>
struct LeastSquaresResult {
  /// Full-length vector supported on the requested index set.
  Vector<Scalar> solution;
  /// y - A * solution.
  Vector<Scalar> residual;
  Index rank = 0;
  bool rank_deficient = false;
};

template <typename Scalar>
struct SolveResult {
  Vector<Scalar> estimate;
  HierarchicalSupport support;
  Index iterations = 0;
  /// ||y - A x^k|| for k = 1..iterations.
  std::vector<double> residual_norms{};
  StopReason stop_reason = StopReason::max_iters;
  /// Some restricted least-squares step was rank deficient.
  bool rank_deficient = false;
  /// Period of the first support cycle longer than one, if one occurred.
  std::optional<Index> cycle_period{};
  /// x^1..x^iterations when SolverOptions::keep_iterates is set.
  std::vector<Vector<Scalar>> iterates{};
};

/// argmin ||y - A z|| over z supported in `support`. Rank-deficient systems
/// return the minimum-norm minimizer.
template <typename Scalar>
LeastSquaresResult<Scalar> restricted_least_squares(const LinearOperator<Scalar>& op,
                                                    const Vector<Scalar>& y,
                                                    const SupportSet& support,
                                                    const SolverOptions& opts = {});

/// x + A*(y - A x).
template <typename Scalar>
Vector<Scalar> proxy_step(const LinearOperator<Scalar>& op, const Vector<Scalar>& y,
                          const Vector<Scalar>& x);

/// Hierarchical HTP for an (s, sigma)- or tree-sparse signal, started at x = 0.
template <typename Scalar>
SolveResult<Scalar> hihtp(const LinearOperator<Scalar>& op, const Vector<Scalar>& y,
                          const Sparsity& sparsity, const SolverOptions& opts = {});

/// As hihtp, started from `initial` instead of zero.
template <typename Scalar>
SolveResult<Scalar> hihtp(const LinearOperator<Scalar>& op, const Vector<Scalar>& y,
                          const Sparsity& sparsity, const SolverOptions& opts,
                          const Vector<Scalar>& initial);

/// Plain HTP with a k-sparse top-k thresholder.
template <typename Scalar>
SolveResult<Scalar> htp(const LinearOperator<Scalar>& op, const Vector<Scalar>& y, Index k,
                        const SolverOptions& opts = {});

#define HISPARSE_SOLVE_EXTERN(S)                                                             \
  extern template LeastSquaresResult<S> restricted_least_squares(                            \
      const LinearOperator<S>&, const Vector<S>&, const SupportSet&, const SolverOptions&);  \
  extern template Vector<S> proxy_step(const LinearOperator<S>&, const Vector<S>&,           \
                                       const Vector<S>&);                                    \
  extern template SolveResult<S> hihtp(const LinearOperator<S>&, const Vector<S>&,           \
                                       const Sparsity&, const SolverOptions&);               \
  extern template SolveResult<S> hihtp(const LinearOperator<S>&, const Vector<S>&,           \
                                       const Sparsity&, const SolverOptions&,                \
                                       const Vector<S>&);                                    \
  extern template SolveResult<S> htp(const LinearOperator<S>&, const Vector<S>&, Index,      \
                                     const SolverOptions&);

HISPARSE_SOLVE_EXTERN(double)
HISPARSE_SOLVE_EXTERN(Complex)
#undef HISPARSE_SOLVE_EXTERN

}  // namespace hisparse
