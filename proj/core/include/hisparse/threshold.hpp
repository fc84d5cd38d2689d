#pragma once

// Projections onto hierarchical sparsity classes, each paired with an
// exhaustive search counterpart used as an oracle.
//
// Ties are broken by the lowest index at every level, so all operators are
// deterministic. Block scores are compared as squared l2 norms.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hisparse/model.hpp"

namespace hisparse {

struct ScoredIndex {
  Index index = 0;
  double score = 0.0;
};

/// Keeps the k best items (higher score first, lower index on ties) and
/// returns their indices sorted ascending. Expected O(items.size()).
/// The order of `items` is unspecified afterwards.
SupportSet select_top_scored(std::vector<ScoredIndex>& items, Index k);

/// Indices of the k entries of largest magnitude.
template <typename Scalar>
SupportSet select_top_k(const Vector<Scalar>& z, Index k);

/// Flattened (s, sigma) thresholding; the solver hot path.
template <typename Scalar>
SupportSet threshold_flat_indices(const Vector<Scalar>& z, const FlatSparsity& fp);

/// Support of the best (s, sigma)-sparse approximation of z. Always
/// selects s blocks with sigma entries each, zero-scored ones included.
template <typename Scalar>
HierarchicalSupport threshold_flat(const Vector<Scalar>& z, const FlatSparsity& fp);

/// Support of the best tree-sparse approximation of z.
template <typename Scalar>
HierarchicalSupport threshold_tree(const Vector<Scalar>& z,
                                   std::shared_ptr<const SparsityTree> tree);
template <typename Scalar>
HierarchicalSupport threshold_tree(const Vector<Scalar>& z, const SparsityTree& tree);

/// Default cap on the number of candidate supports an exhaustive search may visit.
inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Number of maximal admissible supports, saturating at UINT64_MAX.
std::uint64_t count_maximal_supports(const FlatSparsity& fp);
std::uint64_t count_maximal_supports(const SparsityTree& tree);

/// Visits every maximal admissible support (exactly s blocks of exactly
/// sigma entries, or exactly s(v) children at every active vertex).
/// Throws CapExceededError when more than `cap` supports exist.
void for_each_support(const FlatSparsity& fp, const std::function<void(const SupportSet&)>& visit,
                      std::uint64_t cap = kDefaultEnumerationCap);
void for_each_support(const SparsityTree& tree,
                      const std::function<void(const SupportSet&)>& visit,
                      std::uint64_t cap = kDefaultEnumerationCap);

/// Exact maximizer of ||z_Omega|| over admissible supports; ties resolved
/// towards the lexicographically smallest sorted support.
template <typename Scalar>
HierarchicalSupport brute_force_flat(const Vector<Scalar>& z, const FlatSparsity& fp,
                                     std::uint64_t cap = kDefaultEnumerationCap);
template <typename Scalar>
HierarchicalSupport brute_force_tree(const Vector<Scalar>& z,
                                     std::shared_ptr<const SparsityTree> tree,
                                     std::uint64_t cap = kDefaultEnumerationCap);

/// Squared norm of z restricted to a support, summed in index order.
template <typename Scalar>
double restricted_energy(const Vector<Scalar>& z, const SupportSet& support);

#define HISPARSE_THRESHOLD_EXTERN(S)                                                          \
  extern template SupportSet select_top_k(const Vector<S>&, Index);                          \
  extern template SupportSet threshold_flat_indices(const Vector<S>&, const FlatSparsity&);  \
  extern template HierarchicalSupport threshold_flat(const Vector<S>&, const FlatSparsity&); \
  extern template HierarchicalSupport threshold_tree(const Vector<S>&,                       \
                                                     std::shared_ptr<const SparsityTree>);   \
  extern template HierarchicalSupport threshold_tree(const Vector<S>&, const SparsityTree&); \
  extern template HierarchicalSupport brute_force_flat(const Vector<S>&, const FlatSparsity&, \
                                                       std::uint64_t);                        \
  extern template HierarchicalSupport brute_force_tree(                                       \
      const Vector<S>&, std::shared_ptr<const SparsityTree>, std::uint64_t);                  \
  extern template double restricted_energy(const Vector<S>&, const SupportSet&);

HISPARSE_THRESHOLD_EXTERN(double)
HISPARSE_THRESHOLD_EXTERN(Complex)
#undef HISPARSE_THRESHOLD_EXTERN

}  // namespace hisparse
