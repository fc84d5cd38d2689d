#include <cmath>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include <hisparse/measure.hpp>
#include <hisparse/random.hpp>
#include <hisparse/ripcalc.hpp>
#include <hisparse/threshold.hpp>

#include "cli.hpp"

namespace hisparse::cli {

namespace {

FlatSparsity random_flat(Rng& rng, Index max_dim) {
  FlatSparsity fp;
  fp.num_blocks = 1 + uniform_index(rng, max_dim);
  fp.block_size = 1 + uniform_index(rng, max_dim / fp.num_blocks);
  fp.active_blocks = 1 + uniform_index(rng, fp.num_blocks);
  fp.active_per_block = 1 + uniform_index(rng, fp.block_size);
  return fp;
}

SparsityTree::Node random_node(Rng& rng, Index leaves, int depth) {
  SparsityTree::Node node;
  const Index k = 1 + uniform_index(rng, std::min<Index>(4, leaves));
  Index left = leaves;
  for (Index c = 0; c < k; ++c) {
    const Index share = c + 1 == k ? left : 1 + uniform_index(rng, left - (k - c - 1));
    left -= share;
    if (share >= 2 && depth > 1 && uniform_index(rng, 3) != 0) {
      node.children.push_back(random_node(rng, share, depth - 1));
    } else {
      node.children.emplace_back();
    }
  }
  node.budget = 1 + uniform_index(rng, node.children.size());
  return node;
}

SparsityTree random_tree(Rng& rng, Index max_dim) {
  return SparsityTree::from_nested(random_node(rng, 1 + uniform_index(rng, max_dim), 3));
}

RealVector random_signal(Rng& rng, Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool ties = uniform_index(rng, 3) == 0;
  RealVector z(static_cast<Eigen::Index>(d));
  for (auto& v : z) {
    v = ties ? static_cast<double>(uniform_index(rng, 5)) - 2.0 : normal(rng);
  }
  return z;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// A failing case returns a description.
using Case = std::function<std::optional<std::string>(Rng&)>;

struct Suite {
  const char* name;
  Case run;
};

std::vector<Suite> make_suites(const OracleCheckArgs& args) {
  const Index max_dim = std::max<Index>(1, args.max_dim);
  const bool fault = args.inject_fault;
  std::vector<Suite> suites;

  suites.push_back({"threshold_flat", [=](Rng& rng) -> std::optional<std::string> {
    const auto fp = random_flat(rng, max_dim);
    const auto z = random_signal(rng, fp.dimension());
    const auto fast = fault ? threshold_flat_indices(RealVector::Zero(z.size()).eval(), fp)
                            : threshold_flat_indices(z, fp);
    const auto best = brute_force_flat(z, fp).flatten();
    if (!is_admissible(fast, fp)) return "inadmissible support";
    const double a = restricted_energy(z, fast), b = restricted_energy(z, best);
    if (!close(a, b, 1e-12)) return "energy " + std::to_string(a) + " vs optimum " + std::to_string(b);
    return std::nullopt;
  }});

  suites.push_back({"threshold_tree", [=](Rng& rng) -> std::optional<std::string> {
    auto tree = std::make_shared<const SparsityTree>(random_tree(rng, max_dim));
    const auto z = random_signal(rng, tree->leaf_count());
    const auto fast = threshold_tree(z, tree).flatten();
    const auto best = brute_force_tree(z, tree).flatten();
    if (!is_admissible(fast, *tree)) return "inadmissible support";
    const double a = restricted_energy(z, fast), b = restricted_energy(z, best);
    if (!close(a, b, 1e-12)) return "energy " + std::to_string(a) + " vs optimum " + std::to_string(b);
    return std::nullopt;
  }});

  suites.push_back({"flat_tree_agreement", [=](Rng& rng) -> std::optional<std::string> {
    const auto fp = random_flat(rng, max_dim);
    const auto z = random_signal(rng, fp.dimension());
    if (threshold_tree(z, SparsityTree::flat(fp)).flatten() != threshold_flat(z, fp).flatten()) {
      return "tree and flat thresholding disagree";
    }
    return std::nullopt;
  }});

  suites.push_back({"support_counts", [=](Rng& rng) -> std::optional<std::string> {
    const auto fp = random_flat(rng, max_dim);
    const auto tree = random_tree(rng, max_dim);
    std::uint64_t flat_seen = 0, tree_seen = 0;
    for_each_support(fp, [&](const SupportSet&) { ++flat_seen; });
    for_each_support(tree, [&](const SupportSet&) { ++tree_seen; });
    if (count_flat_supports(fp) != flat_seen) return "flat count disagrees with enumeration";
    if (count_tree_supports(tree) != tree_seen) return "tree count disagrees with enumeration";
    return std::nullopt;
  }});

  suites.push_back({"rip_structure", [=](Rng& rng) -> std::optional<std::string> {
    const Index d_cap = std::min<Index>(max_dim, 16);
    FlatSparsity fp = random_flat(rng, d_cap);
    fp.active_blocks = std::max<Index>(1, std::min(fp.active_blocks, fp.num_blocks - 1));
    fp.active_per_block = std::max<Index>(1, std::min(fp.active_per_block, fp.block_size - 1));
    const Index m = 6 + uniform_index(rng, 7);
    const auto op = normalize_columns(gaussian_operator<double>(m, fp.dimension(), rng())).first;
    auto delta = [&](const Sparsity& sp) { return exhaustive_rip(op, sp).delta_lower; };
    const double base = delta(fp);
    const double tol = 1e-12;
    if (fp.active_blocks < fp.num_blocks) {
      auto more = fp;
      ++more.active_blocks;
      if (base > delta(more) + tol) return "not monotone in s";
    }
    if (fp.active_per_block < fp.block_size) {
      auto more = fp;
      ++more.active_per_block;
      if (base > delta(more) + tol) return "not monotone in sigma";
    }
    const FlatSparsity plain{fp.dimension(), 1, fp.max_support_size(), 1};
    if (base > delta(plain) + tol) return "hierarchical constant exceeds the unstructured one";
    return std::nullopt;
  }});

  suites.push_back({"adjoint_rip", [=](Rng& rng) -> std::optional<std::string> {
    const FlatSparsity fp = random_flat(rng, std::min<Index>(max_dim, 16));
    const Index m = 6 + uniform_index(rng, 7);
    const auto op = normalize_columns(gaussian_operator<double>(m, fp.dimension(), rng())).first;
    const double delta = exhaustive_rip(op, fp).delta_lower;
    const auto omega = random_support(fp, rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    RealVector e(static_cast<Eigen::Index>(m));
    for (auto& v : e) v = normal(rng);
    const double lhs = project(op.adjoint_apply(e), omega).norm();
    if (lhs > std::sqrt(1.0 + delta) * e.norm() * (1.0 + 1e-12)) return "adjoint bound violated";
    return std::nullopt;
  }});

  return suites;
}

}  // namespace

int cmd_oracle_check(const OracleCheckArgs& args, std::ostream& out, std::ostream&) {
  if (args.cases < 1) throw FormatError("must be at least 1", "cases");
  const auto suites = make_suites(args);
  std::optional<std::uint64_t> first_failure;
  for (Index s = 0; s < suites.size(); ++s) {
    Index passed = 0;
    Index checked = 0;
    std::optional<std::string> failure;
    std::uint64_t failing_seed = 0;
    for (Index i = 0; i < args.cases && !failure; ++i) {
      const std::uint64_t case_seed = args.seed + i;
      Rng rng(derive_seed(case_seed, s));
      ++checked;
      try {
        failure = suites[s].run(rng);
      } catch (const std::exception& e) {
        failure = std::string("exception: ") + e.what();
      }
      if (failure) {
        failing_seed = case_seed;
      } else {
        ++passed;
      }
    }
    out << std::left << std::setw(22) << suites[s].name << passed << '/' << checked << " passed";
    if (failure) {
      out << "  FAILED at seed " << failing_seed << ": " << *failure;
      if (!first_failure) first_failure = failing_seed;
    }
    out << '\n';
  }
  if (first_failure) {
    out << "reproduce with: hisparse oracle-check --seed " << *first_failure << " --cases 1 --max-dim "
        << args.max_dim << '\n';
    return kPropertyViolation;
  }
  out << "all suites passed\n";
  return kSuccess;
}

}  // namespace hisparse::cli
