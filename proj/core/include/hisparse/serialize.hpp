#pragma once

// JSON encodings of the library's data types. The schemas are described in
// docs/formats.md.

#include <string>
#include <string_view>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "hisparse/measure.hpp"
#include "hisparse/model.hpp"
#include "hisparse/solve.hpp"

namespace hisparse {

using Json = nlohmann::json;

Json to_json(const FlatSparsity& fp);
Json to_json(const SparsityTree& tree);
/// {"flat": {...}} or {"tree": {...}}.
Json to_json(const Sparsity& sp);
Json to_json(const HierarchicalSupport& support);

FlatSparsity flat_sparsity_from_json(const Json& j);
SparsityTree tree_from_json(const Json& j);
Sparsity sparsity_from_json(const Json& j);
HierarchicalSupport support_from_json(const Json& j);

/// Operator header; DFT operators also list their sampled rows.
Json operator_header(const DenseOperator<double>& op);
Json operator_header(const DenseOperator<Complex>& op);
Json operator_header(const SubsampledDftOperator& op);

/// Row-major little-endian float64 matrix entries, complex ones as (re, im) pairs.
template <typename Scalar>
std::string matrix_blob(const DenseOperator<Scalar>& op);

template <typename Scalar>
DenseOperator<Scalar> dense_operator_from(const Json& header, std::string_view blob);
SubsampledDftOperator dft_operator_from(const Json& header);

template <typename Scalar>
Json to_json(const SolveResult<Scalar>& result, bool include_estimate = false);

/// Reads `key` from an object, throwing FormatError naming the key on absence or a type mismatch.
template <typename T>
T require(const Json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError("missing required key", key);
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw FormatError("expected an integer", key);
    if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
      throw FormatError("expected a nonnegative integer", key);
    }
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what(), key);
  }
}

extern template std::string matrix_blob(const DenseOperator<double>&);
extern template std::string matrix_blob(const DenseOperator<Complex>&);
extern template DenseOperator<double> dense_operator_from(const Json&, std::string_view);
extern template DenseOperator<Complex> dense_operator_from(const Json&, std::string_view);
extern template Json to_json(const SolveResult<double>&, bool);
extern template Json to_json(const SolveResult<Complex>&, bool);

}  // namespace hisparse
