#include "hisparse/solve.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include <Eigen/QR>

#include "hisparse/threshold.hpp"

namespace hisparse {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::support_stalled:
      return "support_stalled";
    case StopReason::max_iters:
      return "max_iters";
    case StopReason::residual_tol:
      return "residual_tol";
  }
  return "unknown";
}

void SolverOptions::validate() const {
  if (max_iters < 1) throw DomainError("max_iters must be at least 1");
  if (!(residual_tol >= 0.0)) throw DomainError("residual_tol must be nonnegative");
  if (!(ls_tol >= 0.0)) throw DomainError("ls_tol must be nonnegative");
  if (ls_max_iters < 1) throw DomainError("ls_max_iters must be at least 1");
}

namespace {

template <typename Scalar>
Vector<Scalar> gather(const Vector<Scalar>& v, const SupportSet& support) {
  Vector<Scalar> out(static_cast<Eigen::Index>(support.size()));
  for (Index k = 0; k < support.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[static_cast<Eigen::Index>(support[k])];
  return out;
}

template <typename Scalar>
Vector<Scalar> scatter(const Vector<Scalar>& v, const SupportSet& support, Index dim) {
  Vector<Scalar> out = Vector<Scalar>::Zero(static_cast<Eigen::Index>(dim));
  for (Index k = 0; k < support.size(); ++k) out[static_cast<Eigen::Index>(support[k])] = v[static_cast<Eigen::Index>(k)];
  return out;
}

template <typename Scalar>
LeastSquaresResult<Scalar> solve_direct(const LinearOperator<Scalar>& op, const Vector<Scalar>& y,
                                        const SupportSet& support) {
  const Matrix<Scalar> a = op.columns(support);
  const Eigen::CompleteOrthogonalDecomposition<Matrix<Scalar>> cod(a);
  const Vector<Scalar> z = cod.solve(y);
  LeastSquaresResult<Scalar> out;
  out.rank = static_cast<Index>(cod.rank());
  out.rank_deficient = out.rank < support.size();
  out.residual = y - a * z;
  out.solution = scatter(z, support, op.cols());
  return out;
}

// CGLS on the restricted normal equations; from a zero start it converges to
// the minimum-norm least-squares solution.
template <typename Scalar>
LeastSquaresResult<Scalar> solve_iterative(const LinearOperator<Scalar>& op,
                                           const Vector<Scalar>& y, const SupportSet& support,
                                           const SolverOptions& opts) {
  const Index d = op.cols();
  Vector<Scalar> z = Vector<Scalar>::Zero(static_cast<Eigen::Index>(support.size()));
  Vector<Scalar> r = y;
  Vector<Scalar> s = gather(op.adjoint_apply(r), support);
  const double target = opts.ls_tol * s.norm();
  Vector<Scalar> p = s;
  double gamma = s.squaredNorm();
  for (Index it = 0; it < opts.ls_max_iters && std::sqrt(gamma) > target; ++it) {
    const Vector<Scalar> q = op.apply(scatter(p, support, d));
    const double qq = q.squaredNorm();
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    z += alpha * p;
    r -= alpha * q;
    s = gather(op.adjoint_apply(r), support);
    const double gamma_next = s.squaredNorm();
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }
  LeastSquaresResult<Scalar> out;
  out.solution = scatter(z, support, d);
  out.residual = y - op.apply(out.solution);
  out.rank = std::min<Index>(support.size(), op.rows());
  out.rank_deficient = support.size() > op.rows();
  return out;
}

template <typename Scalar>
using Thresholder = std::function<SupportSet(const Vector<Scalar>&)>;

template <typename Scalar>
SolveResult<Scalar> pursue(const LinearOperator<Scalar>& op, const Vector<Scalar>& y,
                           const Thresholder<Scalar>& threshold,
                           std::shared_ptr<const SparsityTree> tree, const SolverOptions& opts,
                           const Vector<Scalar>* initial) {
  opts.validate();
  if (static_cast<Index>(y.size()) != op.rows()) {
    throw DimensionError("measurement vector has length " + std::to_string(y.size()) +
                         ", operator has " + std::to_string(op.rows()) + " rows");
  }
  const Index d = op.cols();
  if (tree->leaf_count() != d) {
    throw DimensionError("sparsity dimension " + std::to_string(tree->leaf_count()) +
                         " does not match operator dimension " + std::to_string(d));
  }

  SolveResult<Scalar> result{.estimate = Vector<Scalar>::Zero(static_cast<Eigen::Index>(d)),
                             .support = HierarchicalSupport::empty(tree)};
  Vector<Scalar> residual = y;
  if (initial != nullptr) {
    if (static_cast<Index>(initial->size()) != d) throw DimensionError("initial guess has wrong length");
    result.estimate = *initial;
    residual = y - op.apply(result.estimate);
  }

  std::vector<SupportSet> history;
  bool stopped = false;
  for (Index k = 1; k <= opts.max_iters; ++k) {
    const Vector<Scalar> proxy = result.estimate + op.adjoint_apply(residual);
    SupportSet next = threshold(proxy);

    if (!history.empty() && next == history.back() && opts.support_stall_stop) {
      // x^{k} = x^{k-1}: the restricted solve would reproduce the same iterate.
      result.iterations = k;
      result.residual_norms.push_back(result.residual_norms.back());
      if (opts.keep_iterates) result.iterates.push_back(result.estimate);
      result.stop_reason = StopReason::support_stalled;
      stopped = true;
      break;
    }
    if (!result.cycle_period && history.size() >= 2) {
      const auto hit = std::find(history.rbegin() + 1, history.rend(), next);
      if (hit != history.rend()) result.cycle_period = static_cast<Index>(hit - history.rbegin()) + 1;
    }

    auto ls = (next.size() <= opts.direct_ls_limit) ? solve_direct(op, y, next)
                                                    : solve_iterative(op, y, next, opts);
    result.rank_deficient = result.rank_deficient || ls.rank_deficient;
    result.estimate = std::move(ls.solution);
    residual = std::move(ls.residual);
    result.iterations = k;
    result.residual_norms.push_back(residual.norm());
    if (opts.keep_iterates) result.iterates.push_back(result.estimate);
    history.push_back(std::move(next));

    if (opts.residual_tol > 0.0 && result.residual_norms.back() <= opts.residual_tol) {
      result.stop_reason = StopReason::residual_tol;
      stopped = true;
      break;
    }
  }
  if (!stopped) result.stop_reason = StopReason::max_iters;
  result.support =
      HierarchicalSupport::from_leaves(std::move(tree), history.empty() ? SupportSet{} : history.back());
  return result;
}

template <typename Scalar>
SolveResult<Scalar> dispatch_hihtp(const LinearOperator<Scalar>& op, const Vector<Scalar>& y,
                                   const Sparsity& sparsity, const SolverOptions& opts,
                                   const Vector<Scalar>* initial) {
  if (const auto* fp = std::get_if<FlatSparsity>(&sparsity)) {
    fp->validate();
    const FlatSparsity flat = *fp;
    auto tree = std::make_shared<const SparsityTree>(SparsityTree::flat(flat));
    return pursue<Scalar>(
        op, y, [flat](const Vector<Scalar>& z) { return threshold_flat_indices(z, flat); },
        std::move(tree), opts, initial);
  }
  auto tree = std::make_shared<const SparsityTree>(std::get<SparsityTree>(sparsity));
  return pursue<Scalar>(
      op, y, [tree](const Vector<Scalar>& z) { return threshold_tree(z, tree).flatten(); }, tree,
      opts, initial);
}

}  // namespace

template <typename Scalar>
LeastSquaresResult<Scalar> restricted_least_squares(const LinearOperator<Scalar>& op,
                                                    const Vector<Scalar>& y,
                                                    const SupportSet& support,
                                                    const SolverOptions& opts) {
  opts.validate();
  if (static_cast<Index>(y.size()) != op.rows()) throw DimensionError("measurement length mismatch");
  check_support(support, op.cols());
  if (support.empty()) {
    return {Vector<Scalar>::Zero(static_cast<Eigen::Index>(op.cols())), y, 0, false};
  }
  return support.size() <= opts.direct_ls_limit ? solve_direct(op, y, support)
                                                : solve_iterative(op, y, support, opts);
}

template <typename Scalar>
Vector<Scalar> proxy_step(const LinearOperator<Scalar>& op, const Vector<Scalar>& y,
                          const Vector<Scalar>& x) {
  return x + op.adjoint_apply(y - op.apply(x));
}

template <typename Scalar>
SolveResult<Scalar> hihtp(const LinearOperator<Scalar>& op, const Vector<Scalar>& y,
                          const Sparsity& sparsity, const SolverOptions& opts) {
  return dispatch_hihtp<Scalar>(op, y, sparsity, opts, nullptr);
}

template <typename Scalar>
SolveResult<Scalar> hihtp(const LinearOperator<Scalar>& op, const Vector<Scalar>& y,
                          const Sparsity& sparsity, const SolverOptions& opts,
                          const Vector<Scalar>& initial) {
  return dispatch_hihtp<Scalar>(op, y, sparsity, opts, &initial);
}

template <typename Scalar>
SolveResult<Scalar> htp(const LinearOperator<Scalar>& op, const Vector<Scalar>& y, Index k,
                        const SolverOptions& opts) {
  const Index d = op.cols();
  if (k < 1 || k > d) throw DomainError("HTP sparsity must satisfy 1 <= k <= d");
  const std::vector<Level> levels{{d, k}};
  auto tree = std::make_shared<const SparsityTree>(SparsityTree::uniform(levels));
  return pursue<Scalar>(
      op, y, [k](const Vector<Scalar>& z) { return select_top_k(z, k); }, std::move(tree), opts,
      nullptr);
}

#define HISPARSE_SOLVE_INSTANTIATE(S)                                                        \
  template LeastSquaresResult<S> restricted_least_squares(                                   \
      const LinearOperator<S>&, const Vector<S>&, const SupportSet&, const SolverOptions&);  \
  template Vector<S> proxy_step(const LinearOperator<S>&, const Vector<S>&, const Vector<S>&); \
  template SolveResult<S> hihtp(const LinearOperator<S>&, const Vector<S>&, const Sparsity&, \
                                const SolverOptions&);                                       \
  template SolveResult<S> hihtp(const LinearOperator<S>&, const Vector<S>&, const Sparsity&, \
                                const SolverOptions&, const Vector<S>&);                     \
  template SolveResult<S> htp(const LinearOperator<S>&, const Vector<S>&, Index,             \
                              const SolverOptions&);

HISPARSE_SOLVE_INSTANTIATE(double)
HISPARSE_SOLVE_INSTANTIATE(Complex)

}  // namespace hisparse
