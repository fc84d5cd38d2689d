#include "hisparse/threshold.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace hisparse {

namespace {

bool ranks_before(const ScoredIndex& a, const ScoredIndex& b) {
  return a.score > b.score || (a.score == b.score && a.index < b.index);
}

template <typename Scalar>
double magnitude2(const Scalar& v) {
  return std::norm(v);
}

// Advances c to the next k-subset of {0..n-1} in lexicographic order.
bool next_combination(std::vector<Index>& c, Index n) {
  const Index k = c.size();
  for (Index i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (Index j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<Index> first_combination(Index k) {
  std::vector<Index> c(k);
  std::iota(c.begin(), c.end(), Index{0});
  return c;
}

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  return __builtin_mul_overflow(a, b, &r) ? kSaturated : r;
}

std::uint64_t add_sat(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  return __builtin_add_overflow(a, b, &r) ? kSaturated : r;
}

std::uint64_t binomial_sat(Index n, Index k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (Index i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(r);
}

void check_cap(std::uint64_t count, std::uint64_t cap) {
  if (count > cap) {
    throw CapExceededError("exhaustive enumeration of " +
                           (count == kSaturated ? std::string(">2^64") : std::to_string(count)) +
                           " supports exceeds the cap of " + std::to_string(cap));
  }
}

void check_length(Index actual, Index expected) {
  if (actual != expected) {
    throw DimensionError("vector of length " + std::to_string(actual) +
                         " does not match sparsity dimension " + std::to_string(expected));
  }
}

// Lexicographically best support under (energy desc, support asc).
template <typename Scalar>
struct BestSupport {
  const Vector<Scalar>& z;
  SupportSet best;
  double best_energy = -1.0;

  void offer(const SupportSet& candidate) {
    const double e = restricted_energy(z, candidate);
    if (e > best_energy || (e == best_energy && candidate < best)) {
      best_energy = e;
      best = candidate;
    }
  }
};

}  // namespace

SupportSet select_top_scored(std::vector<ScoredIndex>& items, Index k) {
  if (k > items.size()) {
    throw DomainError("cannot select " + std::to_string(k) + " of " +
                      std::to_string(items.size()) + " items");
  }
  if (k < items.size()) {
    std::nth_element(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k), items.end(),
                     ranks_before);
  }
  SupportSet out(k);
  for (Index i = 0; i < k; ++i) out[i] = items[i].index;
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Scalar>
SupportSet select_top_k(const Vector<Scalar>& z, Index k) {
  std::vector<ScoredIndex> items(static_cast<Index>(z.size()));
  for (Index i = 0; i < items.size(); ++i) items[i] = {i, magnitude2(z[i])};
  return select_top_scored(items, k);
}

template <typename Scalar>
SupportSet threshold_flat_indices(const Vector<Scalar>& z, const FlatSparsity& fp) {
  fp.validate();
  check_length(static_cast<Index>(z.size()), fp.dimension());
  const Index n = fp.block_size;
  const Index sigma = fp.active_per_block;

  std::vector<Index> kept(fp.num_blocks * sigma);
  std::vector<ScoredIndex> block_scores(fp.num_blocks);
  std::vector<ScoredIndex> entries(n);
  for (Index b = 0; b < fp.num_blocks; ++b) {
    const Index offset = b * n;
    for (Index i = 0; i < n; ++i) entries[i] = {i, magnitude2(z[offset + i])};
    const auto top = select_top_scored(entries, sigma);
    double energy = 0.0;
    for (Index j = 0; j < sigma; ++j) {
      kept[b * sigma + j] = offset + top[j];
      energy += magnitude2(z[offset + top[j]]);
    }
    block_scores[b] = {b, energy};
  }
  const auto blocks = select_top_scored(block_scores, fp.active_blocks);

  SupportSet out;
  out.reserve(fp.max_support_size());
  for (Index b : blocks) {
    out.insert(out.end(), kept.begin() + static_cast<std::ptrdiff_t>(b * sigma),
               kept.begin() + static_cast<std::ptrdiff_t>((b + 1) * sigma));
  }
  return out;
}

template <typename Scalar>
HierarchicalSupport threshold_flat(const Vector<Scalar>& z, const FlatSparsity& fp) {
  const auto support = threshold_flat_indices(z, fp);
  return HierarchicalSupport::from_leaves(std::make_shared<const SparsityTree>(SparsityTree::flat(fp)),
                                          support);
}

template <typename Scalar>
HierarchicalSupport threshold_tree(const Vector<Scalar>& z,
                                   std::shared_ptr<const SparsityTree> tree) {
  const auto& t = *tree;
  check_length(static_cast<Index>(z.size()), t.leaf_count());

  std::vector<double> score(t.vertex_count(), 0.0);
  for (Index i = 0; i < t.leaf_count(); ++i) score[t.leaves()[i]] = magnitude2(z[i]);

  // Bottom-up: best budget-respecting subtree energy at every vertex.
  std::vector<std::vector<Index>> chosen(t.vertex_count());
  std::vector<ScoredIndex> items;
  for (auto v : t.internal_postorder()) {
    const auto kids = t.children(v);
    items.resize(kids.size());
    for (Index k = 0; k < kids.size(); ++k) items[k] = {k, score[kids[k]]};
    chosen[v] = select_top_scored(items, t.budget(v));
    double energy = 0.0;
    for (Index k : chosen[v]) energy += score[kids[k]];
    score[v] = energy;
  }

  // Top-down: keep only selections on active root-to-leaf chains.
  std::vector<std::vector<Index>> selected(t.vertex_count());
  if (!t.is_leaf(t.root())) {
    std::vector<SparsityTree::Vertex> stack{t.root()};
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      selected[v] = std::move(chosen[v]);
      for (Index k : selected[v]) {
        const auto c = t.children(v)[k];
        if (!t.is_leaf(c)) stack.push_back(c);
      }
    }
  }
  return HierarchicalSupport(std::move(tree), std::move(selected));
}

template <typename Scalar>
HierarchicalSupport threshold_tree(const Vector<Scalar>& z, const SparsityTree& tree) {
  return threshold_tree(z, std::make_shared<const SparsityTree>(tree));
}

std::uint64_t count_maximal_supports(const FlatSparsity& fp) {
  fp.validate();
  std::uint64_t total = binomial_sat(fp.num_blocks, fp.active_blocks);
  const std::uint64_t inner = binomial_sat(fp.block_size, fp.active_per_block);
  for (Index b = 0; b < fp.active_blocks; ++b) total = mul_sat(total, inner);
  return total;
}

std::uint64_t count_maximal_supports(const SparsityTree& tree) {
  std::vector<std::uint64_t> p(tree.vertex_count(), 1);
  for (auto v : tree.internal_postorder()) {
    // Elementary symmetric polynomial of the children's counts.
    const Index s = tree.budget(v);
    std::vector<std::uint64_t> e(s + 1, 0);
    e[0] = 1;
    for (auto c : tree.children(v)) {
      for (Index j = s; j >= 1; --j) e[j] = add_sat(e[j], mul_sat(e[j - 1], p[c]));
    }
    p[v] = e[s];
  }
  return p[tree.root()];
}

void for_each_support(const FlatSparsity& fp, const std::function<void(const SupportSet&)>& visit,
                      std::uint64_t cap) {
  check_cap(count_maximal_supports(fp), cap);
  const Index s = fp.active_blocks;
  const Index sigma = fp.active_per_block;
  SupportSet support(s * sigma);
  auto blocks = first_combination(s);
  do {
    std::vector<std::vector<Index>> inner(s, first_combination(sigma));
    while (true) {
      for (Index j = 0; j < s; ++j) {
        for (Index k = 0; k < sigma; ++k) {
          support[j * sigma + k] = blocks[j] * fp.block_size + inner[j][k];
        }
      }
      visit(support);
      // Odometer over the per-block combinations, last block fastest.
      Index j = s;
      while (j-- > 0) {
        if (next_combination(inner[j], fp.block_size)) break;
        inner[j] = first_combination(sigma);
      }
      if (j == static_cast<Index>(-1)) break;
    }
  } while (next_combination(blocks, fp.num_blocks));
}

namespace {

class TreeEnumerator {
 public:
  TreeEnumerator(const SparsityTree& tree, const std::function<void(const SupportSet&)>& visit)
      : tree_(tree), visit_(visit) {}

  void run() {
    if (tree_.is_leaf(tree_.root())) {
      acc_.push_back(0);
      visit_(acc_);
      return;
    }
    vertex(tree_.root(), [this] { visit_(acc_); });
  }

 private:
  void vertex(SparsityTree::Vertex v, const std::function<void()>& next) {
    if (tree_.is_leaf(v)) {
      acc_.push_back(tree_.leaf_index(v));
      next();
      acc_.pop_back();
      return;
    }
    const auto kids = tree_.children(v);
    auto combo = first_combination(tree_.budget(v));
    do {
      std::vector<SparsityTree::Vertex> picked;
      for (Index k : combo) picked.push_back(kids[k]);
      chain(picked, 0, next);
    } while (next_combination(combo, kids.size()));
  }

  void chain(const std::vector<SparsityTree::Vertex>& picked, Index j,
             const std::function<void()>& next) {
    if (j == picked.size()) {
      next();
      return;
    }
    vertex(picked[j], [&, j] { chain(picked, j + 1, next); });
  }

  const SparsityTree& tree_;
  const std::function<void(const SupportSet&)>& visit_;
  SupportSet acc_;
};

}  // namespace

void for_each_support(const SparsityTree& tree,
                      const std::function<void(const SupportSet&)>& visit, std::uint64_t cap) {
  check_cap(count_maximal_supports(tree), cap);
  TreeEnumerator(tree, visit).run();
}

template <typename Scalar>
HierarchicalSupport brute_force_flat(const Vector<Scalar>& z, const FlatSparsity& fp,
                                     std::uint64_t cap) {
  fp.validate();
  check_length(static_cast<Index>(z.size()), fp.dimension());
  BestSupport<Scalar> best{z, {}, -1.0};
  for_each_support(fp, [&](const SupportSet& c) { best.offer(c); }, cap);
  return HierarchicalSupport::from_leaves(std::make_shared<const SparsityTree>(SparsityTree::flat(fp)),
                                          best.best);
}

template <typename Scalar>
HierarchicalSupport brute_force_tree(const Vector<Scalar>& z,
                                     std::shared_ptr<const SparsityTree> tree, std::uint64_t cap) {
  check_length(static_cast<Index>(z.size()), tree->leaf_count());
  BestSupport<Scalar> best{z, {}, -1.0};
  for_each_support(*tree, [&](const SupportSet& c) { best.offer(c); }, cap);
  return HierarchicalSupport::from_leaves(std::move(tree), best.best);
}

template <typename Scalar>
double restricted_energy(const Vector<Scalar>& z, const SupportSet& support) {
  double e = 0.0;
  for (Index i : support) e += magnitude2(z[static_cast<Eigen::Index>(i)]);
  return e;
}

#define HISPARSE_THRESHOLD_INSTANTIATE(S)                                                    \
  template SupportSet select_top_k(const Vector<S>&, Index);                                \
  template SupportSet threshold_flat_indices(const Vector<S>&, const FlatSparsity&);        \
  template HierarchicalSupport threshold_flat(const Vector<S>&, const FlatSparsity&);       \
  template HierarchicalSupport threshold_tree(const Vector<S>&,                             \
                                              std::shared_ptr<const SparsityTree>);         \
  template HierarchicalSupport threshold_tree(const Vector<S>&, const SparsityTree&);       \
  template HierarchicalSupport brute_force_flat(const Vector<S>&, const FlatSparsity&,      \
                                                std::uint64_t);                             \
  template HierarchicalSupport brute_force_tree(const Vector<S>&,                           \
                                                std::shared_ptr<const SparsityTree>,        \
                                                std::uint64_t);                             \
  template double restricted_energy(const Vector<S>&, const SupportSet&);

HISPARSE_THRESHOLD_INSTANTIATE(double)
HISPARSE_THRESHOLD_INSTANTIATE(Complex)

}  // namespace hisparse
