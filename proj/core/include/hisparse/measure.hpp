#pragma once

// Linear measurement operators y = A x.
//
// DenseOperator wraps an explicit m x d matrix. SubsampledDftOperator keeps
// m rows of the unitary d-point DFT (kernel exp(-2 pi i j k / d) / sqrt(d))
// and applies them through an FFT in O(d log d).

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "hisparse/model.hpp"

namespace hisparse {

template <typename Scalar>
class LinearOperator {
 public:
  using scalar_type = Scalar;

  virtual ~LinearOperator() = default;

  /// Number of measurements m.
  [[nodiscard]] virtual Index rows() const = 0;
  /// Ambient dimension d.
  [[nodiscard]] virtual Index cols() const = 0;

  [[nodiscard]] virtual Vector<Scalar> apply(const Vector<Scalar>& x) const = 0;
  [[nodiscard]] virtual Vector<Scalar> adjoint_apply(const Vector<Scalar>& y) const = 0;

  /// The m x |support| submatrix A_Omega.
  [[nodiscard]] virtual Matrix<Scalar> columns(const SupportSet& support) const = 0;

  /// Seed the operator was drawn from, if any.
  [[nodiscard]] std::optional<std::uint64_t> seed() const { return seed_; }
  void set_seed(std::optional<std::uint64_t> seed) { seed_ = seed; }

 protected:
  LinearOperator() = default;
  LinearOperator(const LinearOperator&) = default;
  LinearOperator& operator=(const LinearOperator&) = default;
  LinearOperator(LinearOperator&&) noexcept = default;
  LinearOperator& operator=(LinearOperator&&) noexcept = default;

  void check_domain(Index size) const;
  void check_range(Index size) const;

 private:
  std::optional<std::uint64_t> seed_;
};

template <typename Scalar>
class DenseOperator final : public LinearOperator<Scalar> {
 public:
  /// Throws DomainError on non-finite entries or an empty matrix.
  explicit DenseOperator(Matrix<Scalar> matrix);

  [[nodiscard]] Index rows() const override { return static_cast<Index>(matrix_.rows()); }
  [[nodiscard]] Index cols() const override { return static_cast<Index>(matrix_.cols()); }
  [[nodiscard]] Vector<Scalar> apply(const Vector<Scalar>& x) const override;
  [[nodiscard]] Vector<Scalar> adjoint_apply(const Vector<Scalar>& y) const override;
  [[nodiscard]] Matrix<Scalar> columns(const SupportSet& support) const override;

  [[nodiscard]] const Matrix<Scalar>& matrix() const { return matrix_; }

 private:
  Matrix<Scalar> matrix_;
};

class SubsampledDftOperator final : public LinearOperator<Complex> {
 public:
  /// `sampled_rows` must be strictly increasing and below d.
  SubsampledDftOperator(Index d, std::vector<Index> sampled_rows);

  [[nodiscard]] Index rows() const override { return rows_.size(); }
  [[nodiscard]] Index cols() const override { return dim_; }
  [[nodiscard]] Vector<Complex> apply(const Vector<Complex>& x) const override;
  [[nodiscard]] Vector<Complex> adjoint_apply(const Vector<Complex>& y) const override;
  [[nodiscard]] Matrix<Complex> columns(const SupportSet& support) const override;

  /// Real input is promoted to complex.
  [[nodiscard]] Vector<Complex> apply(const RealVector& x) const;

  [[nodiscard]] const std::vector<Index>& sampled_rows() const { return rows_; }

 private:
  struct Plans;

  Index dim_;
  std::vector<Index> rows_;
  std::shared_ptr<const Plans> plans_;
  std::shared_ptr<const std::vector<Complex>> twiddles_;  // exp(-2 pi i k / d) / sqrt(d)
};

enum class RowSelection { uniform_random, lowest };

/// m x d matrix with i.i.d. standard normal entries; complex entries are
/// circular with unit variance. Identical seeds give identical matrices.
template <typename Scalar>
DenseOperator<Scalar> gaussian_operator(Index m, Index d, std::uint64_t seed);

/// Throws DomainError unless 1 <= m <= d.
SubsampledDftOperator subsampled_dft(Index d, Index m, RowSelection mode, std::uint64_t seed = 0);

/// Explicit matrix of the operator.
DenseOperator<Complex> to_dense(const SubsampledDftOperator& op);

struct ColumnScaling {
  std::vector<double> scales;
  bool operator==(const ColumnScaling&) const = default;
};

ColumnScaling identity_scaling(Index d);

/// Scales every column to unit l2 norm. Throws DegenerateInputError on a zero column.
template <typename Scalar>
std::pair<DenseOperator<Scalar>, ColumnScaling> normalize_columns(const DenseOperator<Scalar>& op);

/// Maps a solution of the normalized problem back to the original operator.
template <typename Scalar>
Vector<Scalar> unnormalize_solution(const Vector<Scalar>& x, const ColumnScaling& scaling);

extern template class LinearOperator<double>;
extern template class LinearOperator<Complex>;
extern template class DenseOperator<double>;
extern template class DenseOperator<Complex>;
extern template DenseOperator<double> gaussian_operator(Index, Index, std::uint64_t);
extern template DenseOperator<Complex> gaussian_operator(Index, Index, std::uint64_t);
extern template std::pair<DenseOperator<double>, ColumnScaling> normalize_columns(
    const DenseOperator<double>&);
extern template std::pair<DenseOperator<Complex>, ColumnScaling> normalize_columns(
    const DenseOperator<Complex>&);
extern template RealVector unnormalize_solution(const RealVector&, const ColumnScaling&);
extern template ComplexVector unnormalize_solution(const ComplexVector&, const ColumnScaling&);

}  // namespace hisparse
