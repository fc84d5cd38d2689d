#include "hisparse/random.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace hisparse {

Index uniform_index(Rng& rng, Index n) {
  if (n == 0) throw DomainError("cannot draw from an empty range");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;
  std::uint64_t u = 0;
  do {
    u = rng();
  } while (u > limit);
  return static_cast<Index>(u % n);
}

std::vector<Index> sample_without_replacement(Rng& rng, Index n, Index k) {
  if (k > n) throw DomainError("cannot sample more items than available");
  std::vector<Index> pool(n);
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < k; ++i) std::swap(pool[i], pool[i + uniform_index(rng, n - i)]);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

SupportSet random_support(const Sparsity& sp, Rng& rng) {
  SupportSet out;
  if (const auto* fp = std::get_if<FlatSparsity>(&sp)) {
    fp->validate();
    for (Index b : sample_without_replacement(rng, fp->num_blocks, fp->active_blocks)) {
      for (Index i : sample_without_replacement(rng, fp->block_size, fp->active_per_block)) {
        out.push_back(b * fp->block_size + i);
      }
    }
    return out;
  }
  const auto& tree = std::get<SparsityTree>(sp);
  if (tree.is_leaf(tree.root())) return {0};
  std::vector<SparsityTree::Vertex> stack{tree.root()};
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    const auto kids = tree.children(v);
    for (Index k : sample_without_replacement(rng, kids.size(), tree.budget(v))) {
      if (tree.is_leaf(kids[k])) {
        out.push_back(tree.leaf_index(kids[k]));
      } else {
        stack.push_back(kids[k]);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 finalizer applied to each coordinate in turn.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed);
  h = mix(h ^ a);
  h = mix(h ^ b);
  h = mix(h ^ c);
  return h;
}

}  // namespace hisparse
