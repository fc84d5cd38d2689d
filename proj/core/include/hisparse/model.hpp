#pragma once

// Hierarchical sparsity structures and the supports they admit.
//
// All indices are 0-based. A sparsity structure is either the lightweight
// two-level FlatSparsity (N blocks of size n, s active blocks with sigma
// active entries each) or a general rooted, ordered SparsityTree whose
// leaves are the entries of the signal.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "hisparse/error.hpp"

namespace hisparse {

using Index = std::size_t;

/// Sorted, duplicate-free list of entry indices.
using SupportSet = std::vector<Index>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using RealVector = Vector<double>;
using ComplexVector = Vector<Complex>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_complex_v = is_complex<T>::value;

/// (s, sigma)-sparsity on N blocks of n entries each.
struct FlatSparsity {
  Index num_blocks = 0;        // N
  Index block_size = 0;        // n
  Index active_blocks = 0;     // s
  Index active_per_block = 0;  // sigma

  [[nodiscard]] Index dimension() const { return num_blocks * block_size; }
  [[nodiscard]] Index max_support_size() const { return active_blocks * active_per_block; }

  /// Throws DomainError unless 1 <= s <= N and 1 <= sigma <= n.
  void validate() const;

  bool operator==(const FlatSparsity&) const = default;
};

/// Uniform level description: every vertex at this depth has `children`
/// children of which at most `budget` may be active.
struct Level {
  Index children = 0;
  Index budget = 0;
  bool operator==(const Level&) const = default;
};

/// Rooted ordered tree carrying a sparsity budget at every internal vertex.
///
/// Vertices are renumbered breadth-first on construction, so the root is 0
/// and the children of every vertex are contiguous. Leaves are numbered
/// 0..d-1 in depth-first order, which coincides with the ordering inherited
/// from parents at equal depth.
class SparsityTree {
 public:
  using Vertex = Index;
  static constexpr Index npos = static_cast<Index>(-1);

  /// Recursive description; a node without children is a leaf.
  struct Node {
    Index budget = 0;
    std::vector<Node> children;
  };

  SparsityTree();

  static SparsityTree from_nested(const Node& root);
  /// Arbitrary vertex labels; `children[v]` is ordered. Budgets of leaves are ignored.
  static SparsityTree from_adjacency(Vertex root, const std::vector<std::vector<Vertex>>& children,
                                     const std::vector<Index>& budgets);
  static SparsityTree flat(const FlatSparsity& fp);
  static SparsityTree uniform(std::span<const Level> levels);

  [[nodiscard]] Index vertex_count() const { return parent_.size(); }
  [[nodiscard]] static constexpr Vertex root() { return 0; }
  [[nodiscard]] std::span<const Vertex> children(Vertex v) const;
  [[nodiscard]] Index child_count(Vertex v) const { return child_count_[v]; }
  [[nodiscard]] Index budget(Vertex v) const { return budget_[v]; }
  [[nodiscard]] bool is_leaf(Vertex v) const { return child_count_[v] == 0; }
  [[nodiscard]] Vertex parent(Vertex v) const { return parent_[v]; }
  [[nodiscard]] Index depth(Vertex v) const { return depth_[v]; }
  /// Maximum leaf depth.
  [[nodiscard]] Index height() const { return height_; }
  /// True iff every leaf sits at depth height().
  [[nodiscard]] bool is_complete() const;

  [[nodiscard]] Index leaf_count() const { return leaves_.size(); }
  /// Leaves in signal order.
  [[nodiscard]] std::span<const Vertex> leaves() const { return leaves_; }
  /// Position of a leaf in the signal, npos for internal vertices.
  [[nodiscard]] Index leaf_index(Vertex v) const { return leaf_index_[v]; }
  /// Contiguous leaf range [first, last) below v.
  [[nodiscard]] std::pair<Index, Index> leaf_range(Vertex v) const {
    return {leaf_first_[v], leaf_last_[v]};
  }
  /// Internal vertices, bottom-up (children before parents).
  [[nodiscard]] std::vector<Vertex> internal_postorder() const;

  /// Size of the largest admissible support.
  [[nodiscard]] Index max_support_size() const;

  [[nodiscard]] Node to_nested() const;

  bool operator==(const SparsityTree& other) const;

 private:
  void build_from_nested(const Node& root);

  std::vector<Vertex> ids_;  // identity table backing children()
  std::vector<Index> child_begin_;
  std::vector<Index> child_count_;
  std::vector<Index> budget_;
  std::vector<Vertex> parent_;
  std::vector<Index> depth_;
  std::vector<Vertex> leaves_;
  std::vector<Index> leaf_index_;
  std::vector<Index> leaf_first_;
  std::vector<Index> leaf_last_;
  Index height_ = 0;
};

using Sparsity = std::variant<FlatSparsity, SparsityTree>;

/// Signal dimension implied by a sparsity structure.
Index dimension(const Sparsity& sp);

/// Pads shallow leaves with chains of only children (n = s = 1) until all
/// leaves share the same depth. Leaf order and count are preserved.
SparsityTree complete_tree(const SparsityTree& tree);

/// Multiplies every budget by q, clamped to the child count.
SparsityTree scale_budgets(const SparsityTree& tree, Index q);

/// (qs * s, qsigma * sigma) clamped to (N, n).
FlatSparsity scale_budgets(const FlatSparsity& fp, Index q_blocks, Index q_entries);

/// Selected children per internal vertex.
///
/// Construction enforces |selected(v)| <= budget(v) and the chain
/// conditions: a vertex with a nonempty selection is itself selected at its
/// parent, and every selected internal child has a nonempty selection.
class HierarchicalSupport {
 public:
  HierarchicalSupport(std::shared_ptr<const SparsityTree> tree,
                      std::vector<std::vector<Index>> selected);

  /// Canonical hierarchical support whose active leaves are exactly `leaves`.
  /// Throws SupportError if that support exceeds a budget.
  static HierarchicalSupport from_leaves(std::shared_ptr<const SparsityTree> tree,
                                         const SupportSet& leaves);
  static HierarchicalSupport empty(std::shared_ptr<const SparsityTree> tree);

  [[nodiscard]] const SparsityTree& tree() const { return *tree_; }
  [[nodiscard]] const std::shared_ptr<const SparsityTree>& tree_ptr() const { return tree_; }
  /// Sorted child positions (0..child_count-1) selected at v.
  [[nodiscard]] std::span<const Index> selected(SparsityTree::Vertex v) const {
    return selected_[v];
  }
  [[nodiscard]] const std::vector<std::vector<Index>>& selections() const { return selected_; }

  /// Indices of the active leaves.
  [[nodiscard]] SupportSet flatten() const;

  bool operator==(const HierarchicalSupport& other) const {
    return *tree_ == *other.tree_ && selected_ == other.selected_;
  }

 private:
  std::shared_ptr<const SparsityTree> tree_;
  std::vector<std::vector<Index>> selected_;
};

SupportSet flatten_support(const HierarchicalSupport& hs);

/// Throws DimensionError for an out-of-range or unsorted index.
void check_support(const SupportSet& support, Index dim);

/// Whether a set of entry indices is admissible for the sparsity structure.
bool is_admissible(const SupportSet& support, const FlatSparsity& fp);
bool is_admissible(const SupportSet& support, const SparsityTree& tree);
bool is_admissible(const SupportSet& support, const Sparsity& sp);

/// Indices of nonzero entries.
template <typename Scalar>
SupportSet nonzero_support(const Vector<Scalar>& x);

/// x restricted to `support`, zero elsewhere.
template <typename Scalar>
Vector<Scalar> project(const Vector<Scalar>& x, const SupportSet& support);

template <typename Scalar>
bool is_sparse(const Vector<Scalar>& x, const Sparsity& sp);

template <typename Scalar>
bool all_finite(const Vector<Scalar>& x) {
  return x.allFinite();
}

extern template SupportSet nonzero_support(const RealVector&);
extern template SupportSet nonzero_support(const ComplexVector&);
extern template RealVector project(const RealVector&, const SupportSet&);
extern template ComplexVector project(const ComplexVector&, const SupportSet&);
extern template bool is_sparse(const RealVector&, const Sparsity&);
extern template bool is_sparse(const ComplexVector&, const Sparsity&);

}  // namespace hisparse
