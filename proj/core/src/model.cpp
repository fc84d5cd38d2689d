#include "hisparse/model.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <string>

namespace hisparse {

void FlatSparsity::validate() const {
  if (num_blocks == 0 || block_size == 0) {
    throw DomainError("flat sparsity needs at least one block of positive size");
  }
  if (active_blocks < 1 || active_blocks > num_blocks) {
    throw DomainError("block sparsity s must satisfy 1 <= s <= N (s=" +
                      std::to_string(active_blocks) + ", N=" + std::to_string(num_blocks) + ")");
  }
  if (active_per_block < 1 || active_per_block > block_size) {
    throw DomainError("in-block sparsity sigma must satisfy 1 <= sigma <= n (sigma=" +
                      std::to_string(active_per_block) + ", n=" + std::to_string(block_size) +
                      ")");
  }
}

namespace {

// BFS-ordered layout: vertex v has counts[v] children, and the children of
// consecutive vertices are consecutive.
struct BfsLayout {
  std::vector<Index> counts;
  std::vector<Index> budgets;
};

void append_nested(const SparsityTree::Node& root, BfsLayout& out) {
  std::deque<const SparsityTree::Node*> queue{&root};
  while (!queue.empty()) {
    const auto* node = queue.front();
    queue.pop_front();
    out.counts.push_back(node->children.size());
    out.budgets.push_back(node->children.empty() ? 0 : node->budget);
    for (const auto& c : node->children) queue.push_back(&c);
  }
}

}  // namespace

SparsityTree::SparsityTree() {
  // A single leaf: the trivial one-dimensional structure.
  Node leaf;
  build_from_nested(leaf);
}

void SparsityTree::build_from_nested(const Node& root) {
  BfsLayout layout;
  append_nested(root, layout);

  const Index nv = layout.counts.size();
  child_count_ = std::move(layout.counts);
  budget_ = std::move(layout.budgets);
  child_begin_.assign(nv, 0);
  parent_.assign(nv, npos);
  depth_.assign(nv, 0);
  leaf_index_.assign(nv, npos);
  leaf_first_.assign(nv, 0);
  leaf_last_.assign(nv, 0);
  leaves_.clear();
  ids_.resize(nv);
  for (Vertex v = 0; v < nv; ++v) ids_[v] = v;

  Index next = 1;
  for (Vertex v = 0; v < nv; ++v) {
    child_begin_[v] = next;
    if (child_count_[v] > 0 && (budget_[v] < 1 || budget_[v] > child_count_[v])) {
      throw StructureError("vertex budget must satisfy 1 <= s(v) <= n(v) (s=" +
                           std::to_string(budget_[v]) + ", n=" +
                           std::to_string(child_count_[v]) + ")");
    }
    for (Index k = 0; k < child_count_[v]; ++k) {
      parent_[next + k] = v;
      depth_[next + k] = depth_[v] + 1;
    }
    next += child_count_[v];
  }

  // Depth-first leaf numbering.
  std::vector<Vertex> stack{Vertex{0}};
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    if (child_count_[v] == 0) {
      leaf_index_[v] = leaves_.size();
      leaves_.push_back(v);
      continue;
    }
    for (Index k = child_count_[v]; k-- > 0;) stack.push_back(child_begin_[v] + k);
  }

  height_ = 0;
  for (Vertex v = nv; v-- > 0;) {
    if (child_count_[v] == 0) {
      leaf_first_[v] = leaf_index_[v];
      leaf_last_[v] = leaf_index_[v] + 1;
      height_ = std::max(height_, depth_[v]);
    } else {
      leaf_first_[v] = leaf_first_[child_begin_[v]];
      leaf_last_[v] = leaf_last_[child_begin_[v] + child_count_[v] - 1];
    }
  }
}

SparsityTree SparsityTree::from_nested(const Node& root) {
  SparsityTree t;
  t.build_from_nested(root);
  return t;
}

SparsityTree SparsityTree::from_adjacency(Vertex root, const std::vector<std::vector<Vertex>>& children,
                                          const std::vector<Index>& budgets) {
  const Index nv = children.size();
  if (budgets.size() != nv) throw StructureError("budget list length differs from vertex count");
  if (root >= nv) throw StructureError("root vertex out of range");

  std::vector<Index> parents_seen(nv, 0);
  for (Vertex v = 0; v < nv; ++v) {
    for (Vertex c : children[v]) {
      if (c >= nv) throw StructureError("child vertex " + std::to_string(c) + " out of range");
      if (c == root) throw StructureError("root appears as a child (cycle)");
      if (++parents_seen[c] > 1) {
        throw StructureError("vertex " + std::to_string(c) + " has more than one parent");
      }
    }
  }
  // With single parents and a parentless root, every cycle is unreachable
  // from the root, so reachability rules out cycles and stray components.
  std::vector<bool> reached(nv, false);
  std::vector<Vertex> stack{root};
  reached[root] = true;
  Index count = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex c : children[v]) {
      if (!reached[c]) {
        reached[c] = true;
        ++count;
        stack.push_back(c);
      }
    }
  }
  if (count != nv) throw StructureError("tree contains a cycle or unreachable vertices");

  std::function<Node(Vertex)> build = [&](Vertex v) {
    Node node;
    node.budget = budgets[v];
    node.children.reserve(children[v].size());
    for (Vertex c : children[v]) node.children.push_back(build(c));
    return node;
  };
  return from_nested(build(root));
}

SparsityTree SparsityTree::flat(const FlatSparsity& fp) {
  fp.validate();
  const std::vector<Level> levels{{fp.num_blocks, fp.active_blocks},
                                  {fp.block_size, fp.active_per_block}};
  return uniform(levels);
}

SparsityTree SparsityTree::uniform(std::span<const Level> levels) {
  // Build the nested form level by level without materializing recursion
  // depth beyond the number of levels.
  std::function<Node(Index)> build = [&](Index depth) {
    Node node;
    if (depth == levels.size()) return node;
    node.budget = levels[depth].budget;
    if (levels[depth].children == 0) throw StructureError("uniform level with zero children");
    const Node child = build(depth + 1);
    node.children.assign(levels[depth].children, child);
    return node;
  };
  return from_nested(build(0));
}

std::span<const SparsityTree::Vertex> SparsityTree::children(Vertex v) const {
  return {ids_.data() + child_begin_[v], child_count_[v]};
}

bool SparsityTree::is_complete() const {
  return std::all_of(leaves_.begin(), leaves_.end(),
                     [&](Vertex v) { return depth_[v] == height_; });
}

std::vector<SparsityTree::Vertex> SparsityTree::internal_postorder() const {
  // Children always carry larger BFS ids than their parent.
  std::vector<Vertex> order;
  for (Vertex v = vertex_count(); v-- > 0;) {
    if (!is_leaf(v)) order.push_back(v);
  }
  return order;
}

Index SparsityTree::max_support_size() const {
  std::vector<Index> size(vertex_count(), 1);
  std::vector<Index> buf;
  for (Vertex v : internal_postorder()) {
    buf.clear();
    for (Vertex c : children(v)) buf.push_back(size[c]);
    std::sort(buf.begin(), buf.end(), std::greater<>());
    size[v] = 0;
    for (Index k = 0; k < budget_[v]; ++k) size[v] += buf[k];
  }
  return size[root()];
}

SparsityTree::Node SparsityTree::to_nested() const {
  std::function<Node(Vertex)> build = [&](Vertex v) {
    Node node;
    node.budget = budget_[v];
    node.children.reserve(child_count_[v]);
    for (Vertex c : children(v)) node.children.push_back(build(c));
    return node;
  };
  return build(root());
}

bool SparsityTree::operator==(const SparsityTree& other) const {
  return child_count_ == other.child_count_ && budget_ == other.budget_;
}

Index dimension(const Sparsity& sp) {
  return std::visit(
      [](const auto& s) -> Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, FlatSparsity>) {
          return s.dimension();
        } else {
          return s.leaf_count();
        }
      },
      sp);
}

SparsityTree complete_tree(const SparsityTree& tree) {
  if (tree.is_complete()) return tree;
  const Index height = tree.height();
  std::function<void(SparsityTree::Node&, Index)> pad = [&](SparsityTree::Node& node, Index depth) {
    if (node.children.empty()) {
      SparsityTree::Node* tip = &node;
      for (Index d = depth; d < height; ++d) {
        tip->budget = 1;
        tip->children.emplace_back();
        tip = &tip->children.back();
      }
      return;
    }
    for (auto& c : node.children) pad(c, depth + 1);
  };
  auto nested = tree.to_nested();
  pad(nested, 0);
  return SparsityTree::from_nested(nested);
}

SparsityTree scale_budgets(const SparsityTree& tree, Index q) {
  if (q == 0) throw DomainError("budget multiplier must be positive");
  std::function<void(SparsityTree::Node&)> scale = [&](SparsityTree::Node& node) {
    if (node.children.empty()) return;
    node.budget = std::min(q * node.budget, node.children.size());
    for (auto& c : node.children) scale(c);
  };
  auto nested = tree.to_nested();
  scale(nested);
  return SparsityTree::from_nested(nested);
}

FlatSparsity scale_budgets(const FlatSparsity& fp, Index q_blocks, Index q_entries) {
  if (q_blocks == 0 || q_entries == 0) throw DomainError("budget multiplier must be positive");
  FlatSparsity out = fp;
  out.active_blocks = std::min(q_blocks * fp.active_blocks, fp.num_blocks);
  out.active_per_block = std::min(q_entries * fp.active_per_block, fp.block_size);
  return out;
}

// ---------------------------------------------------------------------------
// HierarchicalSupport

HierarchicalSupport::HierarchicalSupport(std::shared_ptr<const SparsityTree> tree,
                                         std::vector<std::vector<Index>> selected)
    : tree_(std::move(tree)), selected_(std::move(selected)) {
  if (!tree_) throw SupportError("hierarchical support without a tree");
  const auto& t = *tree_;
  if (selected_.size() != t.vertex_count()) {
    throw SupportError("selection table has " + std::to_string(selected_.size()) +
                       " entries for " + std::to_string(t.vertex_count()) + " vertices");
  }
  for (SparsityTree::Vertex v = 0; v < t.vertex_count(); ++v) {
    const auto& sel = selected_[v];
    if (sel.empty()) continue;
    const std::string where = "vertex " + std::to_string(v);
    if (t.is_leaf(v)) throw SupportError(where + " is a leaf but has a selection");
    if (sel.size() > t.budget(v)) throw SupportError(where + " exceeds its sparsity budget");
    for (std::size_t k = 0; k < sel.size(); ++k) {
      if (sel[k] >= t.child_count(v)) throw SupportError(where + " selects a missing child");
      if (k > 0 && sel[k] <= sel[k - 1]) throw SupportError(where + " selection not sorted");
      const auto child = t.children(v)[sel[k]];
      if (!t.is_leaf(child) && selected_[child].empty()) {
        throw SupportError(where + " selects child " + std::to_string(child) +
                           " which has no active descendants");
      }
    }
    if (v != t.root()) {
      const auto p = t.parent(v);
      const Index pos = v - t.children(p).front();
      if (!std::binary_search(selected_[p].begin(), selected_[p].end(), pos)) {
        throw SupportError(where + " has a selection but is inactive at its parent");
      }
    }
  }
}

HierarchicalSupport HierarchicalSupport::empty(std::shared_ptr<const SparsityTree> tree) {
  const Index nv = tree->vertex_count();
  return HierarchicalSupport(std::move(tree), std::vector<std::vector<Index>>(nv));
}

HierarchicalSupport HierarchicalSupport::from_leaves(std::shared_ptr<const SparsityTree> tree,
                                                     const SupportSet& leaves) {
  const auto& t = *tree;
  check_support(leaves, t.leaf_count());
  std::vector<bool> active(t.vertex_count(), false);
  for (Index i : leaves) active[t.leaves()[i]] = true;
  std::vector<std::vector<Index>> selected(t.vertex_count());
  for (auto v : t.internal_postorder()) {
    const auto kids = t.children(v);
    for (Index k = 0; k < kids.size(); ++k) {
      if (active[kids[k]]) selected[v].push_back(k);
    }
    active[v] = !selected[v].empty();
    if (selected[v].size() > t.budget(v)) {
      throw SupportError("support exceeds the budget of vertex " + std::to_string(v));
    }
  }
  return HierarchicalSupport(std::move(tree), std::move(selected));
}

SupportSet HierarchicalSupport::flatten() const {
  const auto& t = *tree_;
  SupportSet out;
  std::vector<SparsityTree::Vertex> stack;
  if (t.is_leaf(t.root())) return out;
  stack.push_back(t.root());
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    const auto kids = t.children(v);
    for (Index pos : selected_[v]) {
      const auto c = kids[pos];
      if (t.is_leaf(c)) {
        out.push_back(t.leaf_index(c));
      } else {
        stack.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SupportSet flatten_support(const HierarchicalSupport& hs) { return hs.flatten(); }

void check_support(const SupportSet& support, Index dim) {
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] >= dim) {
      throw DimensionError("support index " + std::to_string(support[k]) +
                           " out of range for dimension " + std::to_string(dim));
    }
    if (k > 0 && support[k] <= support[k - 1]) {
      throw DimensionError("support indices must be strictly increasing");
    }
  }
}

bool is_admissible(const SupportSet& support, const FlatSparsity& fp) {
  std::vector<Index> per_block(fp.num_blocks, 0);
  Index blocks = 0;
  for (Index i : support) {
    if (i >= fp.dimension()) return false;
    auto& c = per_block[i / fp.block_size];
    if (c++ == 0) ++blocks;
    if (c > fp.active_per_block) return false;
  }
  return blocks <= fp.active_blocks;
}

bool is_admissible(const SupportSet& support, const SparsityTree& tree) {
  std::vector<Index> active_children(tree.vertex_count(), 0);
  std::vector<bool> active(tree.vertex_count(), false);
  for (Index i : support) {
    if (i >= tree.leaf_count()) return false;
    active[tree.leaves()[i]] = true;
  }
  for (auto v : tree.internal_postorder()) {
    Index count = 0;
    for (auto c : tree.children(v)) count += active[c] ? 1 : 0;
    if (count > tree.budget(v)) return false;
    active[v] = count > 0;
  }
  return true;
}

bool is_admissible(const SupportSet& support, const Sparsity& sp) {
  return std::visit([&](const auto& s) { return is_admissible(support, s); }, sp);
}

template <typename Scalar>
SupportSet nonzero_support(const Vector<Scalar>& x) {
  SupportSet out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != Scalar(0)) out.push_back(static_cast<Index>(i));
  }
  return out;
}

template <typename Scalar>
Vector<Scalar> project(const Vector<Scalar>& x, const SupportSet& support) {
  Vector<Scalar> out = Vector<Scalar>::Zero(x.size());
  for (Index i : support) {
    if (i >= static_cast<Index>(x.size())) {
      throw DimensionError("projection index " + std::to_string(i) + " out of range for dimension " +
                           std::to_string(x.size()));
    }
    out[i] = x[i];
  }
  return out;
}

template <typename Scalar>
bool is_sparse(const Vector<Scalar>& x, const Sparsity& sp) {
  if (static_cast<Index>(x.size()) != dimension(sp)) {
    throw DimensionError("signal length " + std::to_string(x.size()) +
                         " does not match sparsity dimension " + std::to_string(dimension(sp)));
  }
  return is_admissible(nonzero_support(x), sp);
}

template SupportSet nonzero_support(const RealVector&);
template SupportSet nonzero_support(const ComplexVector&);
template RealVector project(const RealVector&, const SupportSet&);
template ComplexVector project(const ComplexVector&, const SupportSet&);
template bool is_sparse(const RealVector&, const Sparsity&);
template bool is_sparse(const ComplexVector&, const Sparsity&);

}  // namespace hisparse
