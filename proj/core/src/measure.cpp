#include "hisparse/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include <fftw3.h>

#include "hisparse/random.hpp"

namespace hisparse {

template <typename Scalar>
void LinearOperator<Scalar>::check_domain(Index size) const {
  if (size != cols()) {
    throw DimensionError("operator expects input of length " + std::to_string(cols()) + ", got " +
                         std::to_string(size));
  }
}

template <typename Scalar>
void LinearOperator<Scalar>::check_range(Index size) const {
  if (size != rows()) {
    throw DimensionError("operator expects measurements of length " + std::to_string(rows()) +
                         ", got " + std::to_string(size));
  }
}

// ---------------------------------------------------------------------------
// DenseOperator

template <typename Scalar>
DenseOperator<Scalar>::DenseOperator(Matrix<Scalar> matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) throw DomainError("empty measurement matrix");
  if (!matrix_.allFinite()) throw DomainError("measurement matrix has non-finite entries");
}

template <typename Scalar>
Vector<Scalar> DenseOperator<Scalar>::apply(const Vector<Scalar>& x) const {
  this->check_domain(static_cast<Index>(x.size()));
  return matrix_ * x;
}

template <typename Scalar>
Vector<Scalar> DenseOperator<Scalar>::adjoint_apply(const Vector<Scalar>& y) const {
  this->check_range(static_cast<Index>(y.size()));
  return matrix_.adjoint() * y;
}

template <typename Scalar>
Matrix<Scalar> DenseOperator<Scalar>::columns(const SupportSet& support) const {
  Matrix<Scalar> out(matrix_.rows(), static_cast<Eigen::Index>(support.size()));
  for (Index k = 0; k < support.size(); ++k) {
    if (support[k] >= cols()) throw DimensionError("column index out of range");
    out.col(static_cast<Eigen::Index>(k)) = matrix_.col(static_cast<Eigen::Index>(support[k]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// SubsampledDftOperator

namespace {

// The FFTW planner is not reentrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct SubsampledDftOperator::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plans(Index d) {
    std::vector<Complex> in(d), out(d);
    const std::lock_guard lock(planner_mutex());
    const int n = static_cast<int>(d);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_dft_1d(n, as_fftw(in.data()), as_fftw(out.data()), FFTW_FORWARD, flags);
    backward = fftw_plan_dft_1d(n, as_fftw(in.data()), as_fftw(out.data()), FFTW_BACKWARD, flags);
  }
  ~Plans() {
    const std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

SubsampledDftOperator::SubsampledDftOperator(Index d, std::vector<Index> sampled_rows)
    : dim_(d), rows_(std::move(sampled_rows)) {
  if (d == 0) throw DomainError("DFT dimension must be positive");
  if (rows_.empty()) throw DomainError("subsampled DFT needs at least one row");
  for (Index k = 0; k < rows_.size(); ++k) {
    if (rows_[k] >= d) throw DomainError("sampled DFT row out of range");
    if (k > 0 && rows_[k] <= rows_[k - 1]) {
      throw DomainError("sampled DFT rows must be strictly increasing");
    }
  }
  plans_ = std::make_shared<const Plans>(d);
  auto tw = std::make_shared<std::vector<Complex>>(d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Index k = 0; k < d; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d);
    (*tw)[k] = std::polar(scale, angle);
  }
  twiddles_ = std::move(tw);
}

Vector<Complex> SubsampledDftOperator::apply(const Vector<Complex>& x) const {
  check_domain(static_cast<Index>(x.size()));
  std::vector<Complex> in(x.data(), x.data() + x.size());
  std::vector<Complex> out(dim_);
  fftw_execute_dft(plans_->forward, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
  Vector<Complex> y(static_cast<Eigen::Index>(rows_.size()));
  for (Index r = 0; r < rows_.size(); ++r) y[static_cast<Eigen::Index>(r)] = out[rows_[r]] * scale;
  return y;
}

Vector<Complex> SubsampledDftOperator::apply(const RealVector& x) const {
  return apply(Vector<Complex>(x.cast<Complex>()));
}

Vector<Complex> SubsampledDftOperator::adjoint_apply(const Vector<Complex>& y) const {
  check_range(static_cast<Index>(y.size()));
  std::vector<Complex> in(dim_, Complex(0.0, 0.0));
  for (Index r = 0; r < rows_.size(); ++r) in[rows_[r]] = y[static_cast<Eigen::Index>(r)];
  std::vector<Complex> out(dim_);
  fftw_execute_dft(plans_->backward, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
  Vector<Complex> x(static_cast<Eigen::Index>(dim_));
  for (Index j = 0; j < dim_; ++j) x[static_cast<Eigen::Index>(j)] = out[j] * scale;
  return x;
}

Matrix<Complex> SubsampledDftOperator::columns(const SupportSet& support) const {
  Matrix<Complex> out(static_cast<Eigen::Index>(rows_.size()),
                      static_cast<Eigen::Index>(support.size()));
  const auto& tw = *twiddles_;
  for (Index k = 0; k < support.size(); ++k) {
    const Index j = support[k];
    if (j >= dim_) throw DimensionError("column index out of range");
    for (Index r = 0; r < rows_.size(); ++r) {
      const auto phase = static_cast<Index>((static_cast<unsigned __int128>(rows_[r]) * j) % dim_);
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = tw[phase];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Factories

template <typename Scalar>
DenseOperator<Scalar> gaussian_operator(Index m, Index d, std::uint64_t seed) {
  if (m == 0 || d == 0) throw DomainError("gaussian operator needs m, d >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<Scalar> a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  // Column-major fill; the draw order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if constexpr (is_complex_v<Scalar>) {
        const double re = normal(rng);
        const double im = normal(rng);
        a(i, j) = Scalar(re, im) * std::sqrt(0.5);
      } else {
        a(i, j) = normal(rng);
      }
    }
  }
  DenseOperator<Scalar> op(std::move(a));
  op.set_seed(seed);
  return op;
}

SubsampledDftOperator subsampled_dft(Index d, Index m, RowSelection mode, std::uint64_t seed) {
  if (m < 1 || m > d) {
    throw DomainError("subsampled DFT needs 1 <= m <= d (m=" + std::to_string(m) +
                      ", d=" + std::to_string(d) + ")");
  }
  std::vector<Index> rows(m);
  if (mode == RowSelection::lowest) {
    for (Index r = 0; r < m; ++r) rows[r] = r;
  } else {
    Rng rng(seed);
    rows = sample_without_replacement(rng, d, m);
  }
  SubsampledDftOperator op(d, std::move(rows));
  if (mode == RowSelection::uniform_random) op.set_seed(seed);
  return op;
}

DenseOperator<Complex> to_dense(const SubsampledDftOperator& op) {
  SupportSet all(op.cols());
  for (Index j = 0; j < all.size(); ++j) all[j] = j;
  return DenseOperator<Complex>(op.columns(all));
}

ColumnScaling identity_scaling(Index d) { return ColumnScaling{std::vector<double>(d, 1.0)}; }

template <typename Scalar>
std::pair<DenseOperator<Scalar>, ColumnScaling> normalize_columns(const DenseOperator<Scalar>& op) {
  Matrix<Scalar> a = op.matrix();
  ColumnScaling scaling;
  scaling.scales.resize(op.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (norm == 0.0) {
      throw DegenerateInputError("column " + std::to_string(j) + " of the operator is zero");
    }
    scaling.scales[static_cast<Index>(j)] = norm;
    if (norm != 1.0) a.col(j) /= norm;
  }
  DenseOperator<Scalar> out(std::move(a));
  out.set_seed(op.seed());
  return {std::move(out), std::move(scaling)};
}

template <typename Scalar>
Vector<Scalar> unnormalize_solution(const Vector<Scalar>& x, const ColumnScaling& scaling) {
  if (static_cast<Index>(x.size()) != scaling.scales.size()) {
    throw DimensionError("scaling length does not match the solution");
  }
  Vector<Scalar> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = x[i] / scaling.scales[static_cast<Index>(i)];
  }
  return out;
}

template class LinearOperator<double>;
template class LinearOperator<Complex>;
template class DenseOperator<double>;
template class DenseOperator<Complex>;
template DenseOperator<double> gaussian_operator(Index, Index, std::uint64_t);
template DenseOperator<Complex> gaussian_operator(Index, Index, std::uint64_t);
template std::pair<DenseOperator<double>, ColumnScaling> normalize_columns(
    const DenseOperator<double>&);
template std::pair<DenseOperator<Complex>, ColumnScaling> normalize_columns(
    const DenseOperator<Complex>&);
template RealVector unnormalize_solution(const RealVector&, const ColumnScaling&);
template ComplexVector unnormalize_solution(const ComplexVector&, const ColumnScaling&);

}  // namespace hisparse
