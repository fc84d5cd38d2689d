#include "hisparse/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

namespace hisparse {

Json to_json(const FlatSparsity& fp) {
  return {{"N", fp.num_blocks}, {"n", fp.block_size}, {"s", fp.active_blocks},
          {"sigma", fp.active_per_block}};
}

namespace {

Json node_to_json(const SparsityTree& tree, SparsityTree::Vertex v) {
  if (tree.is_leaf(v)) return Json::object();
  const auto kids = tree.children(v);
  Json out = {{"n", kids.size()}, {"s", tree.budget(v)}};
  const bool all_leaves =
      std::all_of(kids.begin(), kids.end(), [&](auto c) { return tree.is_leaf(c); });
  if (!all_leaves) {
    Json children = Json::array();
    for (const auto c : kids) children.push_back(node_to_json(tree, c));
    out["children"] = std::move(children);
  }
  return out;
}

SparsityTree::Node node_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw FormatError("tree node must be an object", path);
  SparsityTree::Node node;
  if (j.empty()) return node;
  node.budget = require<Index>(j, "s");
  if (j.contains("children")) {
    const auto& kids = j.at("children");
    if (!kids.is_array() || kids.empty()) {
      throw FormatError("children must be a nonempty array", path + ".children");
    }
    if (j.contains("n") && require<Index>(j, "n") != kids.size()) {
      throw FormatError("n does not match the number of children", path + ".n");
    }
    for (Index i = 0; i < kids.size(); ++i) {
      node.children.push_back(node_from_json(kids[i], path + ".children[" + std::to_string(i) + "]"));
    }
  } else {
    const auto n = require<Index>(j, "n");
    if (n == 0) throw FormatError("a vertex needs at least one child", path + ".n");
    node.children.resize(n);
  }
  return node;
}

}  // namespace

Json to_json(const SparsityTree& tree) { return node_to_json(tree, SparsityTree::root()); }

Json to_json(const Sparsity& sp) {
  if (const auto* fp = std::get_if<FlatSparsity>(&sp)) return {{"flat", to_json(*fp)}};
  return {{"tree", to_json(std::get<SparsityTree>(sp))}};
}

Json to_json(const HierarchicalSupport& support) {
  return {{"tree", to_json(support.tree())}, {"selected", support.selections()}};
}

FlatSparsity flat_sparsity_from_json(const Json& j) {
  FlatSparsity fp{require<Index>(j, "N"), require<Index>(j, "n"), require<Index>(j, "s"),
                  require<Index>(j, "sigma")};
  try {
    fp.validate();
  } catch (const DomainError& e) {
    throw FormatError(e.what(), "sparsity");
  }
  return fp;
}

SparsityTree tree_from_json(const Json& j) {
  try {
    return SparsityTree::from_nested(node_from_json(j, "tree"));
  } catch (const StructureError& e) {
    throw FormatError(e.what(), "tree");
  }
}

Sparsity sparsity_from_json(const Json& j) {
  if (j.is_object() && j.contains("flat")) return flat_sparsity_from_json(j.at("flat"));
  if (j.is_object() && j.contains("tree")) return tree_from_json(j.at("tree"));
  throw FormatError("expected an object with a \"flat\" or \"tree\" key", "sparsity");
}

HierarchicalSupport support_from_json(const Json& j) {
  auto tree = std::make_shared<const SparsityTree>(tree_from_json(require<Json>(j, "tree")));
  auto selected = require<std::vector<std::vector<Index>>>(j, "selected");
  try {
    return HierarchicalSupport(std::move(tree), std::move(selected));
  } catch (const SupportError& e) {
    throw FormatError(e.what(), "selected");
  }
}

namespace {

Json dense_header(const char* kind, Index rows, Index cols, std::optional<std::uint64_t> seed) {
  Json out = {{"kind", kind}, {"rows", rows}, {"cols", cols}};
  out["seed"] = seed ? Json(*seed) : Json(nullptr);
  return out;
}

void put_double(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    out.push_back(static_cast<char>(bits & 0xffU));
    bits >>= 8;
  }
}

double get_double(std::string_view in, Index offset) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) {
    bits = (bits << 8) | static_cast<unsigned char>(in[offset + static_cast<Index>(b)]);
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

Json operator_header(const DenseOperator<double>& op) {
  return dense_header("dense_real", op.rows(), op.cols(), op.seed());
}

Json operator_header(const DenseOperator<Complex>& op) {
  return dense_header("dense_complex", op.rows(), op.cols(), op.seed());
}

Json operator_header(const SubsampledDftOperator& op) {
  Json out = dense_header("subsampled_dft", op.rows(), op.cols(), op.seed());
  out["sampled_rows"] = op.sampled_rows();
  return out;
}

template <typename Scalar>
std::string matrix_blob(const DenseOperator<Scalar>& op) {
  const auto& a = op.matrix();
  std::string out;
  out.reserve(static_cast<Index>(a.size()) * sizeof(Scalar));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if constexpr (is_complex_v<Scalar>) {
        put_double(out, a(i, j).real());
        put_double(out, a(i, j).imag());
      } else {
        put_double(out, a(i, j));
      }
    }
  }
  return out;
}

template <typename Scalar>
DenseOperator<Scalar> dense_operator_from(const Json& header, std::string_view blob) {
  const auto kind = require<std::string>(header, "kind");
  const char* expected = is_complex_v<Scalar> ? "dense_complex" : "dense_real";
  if (kind != expected) throw FormatError("expected kind " + std::string(expected), "kind");
  const auto rows = require<Index>(header, "rows");
  const auto cols = require<Index>(header, "cols");
  const Index per_entry = is_complex_v<Scalar> ? 16 : 8;
  if (blob.size() != rows * cols * per_entry) {
    throw FormatError("matrix blob has " + std::to_string(blob.size()) + " bytes, expected " +
                      std::to_string(rows * cols * per_entry));
  }
  Matrix<Scalar> a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Index offset = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if constexpr (is_complex_v<Scalar>) {
        a(i, j) = Scalar(get_double(blob, offset), get_double(blob, offset + 8));
      } else {
        a(i, j) = get_double(blob, offset);
      }
      offset += per_entry;
    }
  }
  DenseOperator<Scalar> op(std::move(a));
  if (header.contains("seed") && !header.at("seed").is_null()) {
    op.set_seed(require<std::uint64_t>(header, "seed"));
  }
  return op;
}

SubsampledDftOperator dft_operator_from(const Json& header) {
  if (require<std::string>(header, "kind") != "subsampled_dft") {
    throw FormatError("expected kind subsampled_dft", "kind");
  }
  SubsampledDftOperator op(require<Index>(header, "cols"),
                           require<std::vector<Index>>(header, "sampled_rows"));
  if (op.rows() != require<Index>(header, "rows")) {
    throw FormatError("rows does not match sampled_rows", "rows");
  }
  if (header.contains("seed") && !header.at("seed").is_null()) {
    op.set_seed(require<std::uint64_t>(header, "seed"));
  }
  return op;
}

template <typename Scalar>
Json to_json(const SolveResult<Scalar>& result, bool include_estimate) {
  Json out = {{"iterations", result.iterations},
              {"stop_reason", std::string(to_string(result.stop_reason))},
              {"residual_norms", result.residual_norms},
              {"rank_deficient", result.rank_deficient},
              {"support", result.support.flatten()}};
  out["cycle_period"] = result.cycle_period ? Json(*result.cycle_period) : Json(nullptr);
  if (include_estimate) {
    Json est = Json::array();
    for (Eigen::Index i = 0; i < result.estimate.size(); ++i) {
      if constexpr (is_complex_v<Scalar>) {
        est.push_back({result.estimate[i].real(), result.estimate[i].imag()});
      } else {
        est.push_back(result.estimate[i]);
      }
    }
    out["estimate"] = std::move(est);
  }
  return out;
}

template std::string matrix_blob(const DenseOperator<double>&);
template std::string matrix_blob(const DenseOperator<Complex>&);
template DenseOperator<double> dense_operator_from(const Json&, std::string_view);
template DenseOperator<Complex> dense_operator_from(const Json&, std::string_view);
template Json to_json(const SolveResult<double>&, bool);
template Json to_json(const SolveResult<Complex>&, bool);

}  // namespace hisparse
