#pragma once

// Recovery experiments that sweep the number of measurements over random
// hierarchically sparse signals and score each estimate block by block.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hisparse/model.hpp"
#include "hisparse/serialize.hpp"
#include "hisparse/solve.hpp"

namespace hisparse {

enum class Ensemble { gaussian, fourier_uniform, fourier_lowest };
enum class Field { real, complex };
enum class Algorithm { htp, hihtp };

std::string_view to_string(Ensemble e);
std::string_view to_string(Field f);
std::string_view to_string(Algorithm a);

struct ExperimentConfig {
  Sparsity sparsity = FlatSparsity{};
  Ensemble ensemble = Ensemble::gaussian;
  Field field = Field::real;
  std::vector<Index> m_grid;
  Index trials = 100;
  /// Power ratio ||A x||^2 / ||e||^2; noiseless when absent.
  std::optional<double> snr;
  double recovery_eps = 1e-5;
  double block_eps = 1e-2;
  std::vector<Algorithm> algorithms{Algorithm::htp, Algorithm::hihtp};
  std::uint64_t seed = 0;
  SolverOptions solver;

  /// Throws FormatError naming the offending field.
  void validate() const;
};

Json to_json(const ExperimentConfig& config);
/// Missing keys take their defaults, except sparsity and m_grid.
ExperimentConfig config_from_json(const Json& j);

struct TrialRecord {
  Algorithm algorithm = Algorithm::hihtp;
  Index m = 0;
  Index trial = 0;
  bool signal_recovered = false;
  Index zero_blocks = 0;
  Index nonzero_blocks = 0;
  double mean_block_error = 0.0;
  /// -1 when the trial failed.
  long iterations = 0;
  double wall_time_s = 0.0;
  double signal_error = 0.0;
  /// Empty unless the trial failed.
  std::string error;
};

struct BlockMetrics {
  Index zero_recovered = 0;
  Index nonzero_recovered = 0;
  double mean_block_error = 0.0;
};

/// Block id of every entry. Flat sparsity uses its N blocks; for trees the
/// blocks are the parents of the leaves.
struct BlockPartition {
  std::vector<Index> block_of;
  Index count = 0;
};

BlockPartition block_partition(const Sparsity& sp);

/// Random maximal support with i.i.d. standard normal entries (independent
/// real and imaginary parts for complex scalars).
template <typename Scalar>
std::pair<Vector<Scalar>, HierarchicalSupport> gen_signal(const Sparsity& sp, std::uint64_t seed);

/// y + e with Gaussian e scaled so that ||y||^2 / ||e||^2 == snr.
/// Throws DegenerateInputError for y == 0 and DomainError unless snr > 0.
template <typename Scalar>
Vector<Scalar> add_noise(const Vector<Scalar>& y, double snr, std::uint64_t seed);

/// Blocks are classified as zero or nonzero by the true signal x.
template <typename Scalar>
BlockMetrics block_metrics(const Vector<Scalar>& x_hat, const Vector<Scalar>& x,
                           const BlockPartition& blocks, double block_eps);
template <typename Scalar>
BlockMetrics block_metrics(const Vector<Scalar>& x_hat, const Vector<Scalar>& x,
                           const FlatSparsity& fp, double block_eps);

/// Seeds of one (m, trial) instance; shared by every algorithm.
struct InstanceSeeds {
  std::uint64_t op;
  std::uint64_t signal;
  std::uint64_t noise;
};
InstanceSeeds instance_seeds(std::uint64_t seed, Index m, Index trial);

using ProgressCallback = std::function<void(Index done, Index total)>;

/// Records sorted by (m, trial) with algorithms in configured order.
std::vector<TrialRecord> run_sweep(const ExperimentConfig& config,
                                   const ProgressCallback& progress = {});

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);
/// Sidecar document describing the sweep and its failed trials.
Json sweep_sidecar(const ExperimentConfig& config, const std::vector<TrialRecord>& records);

struct SweepSummary {
  Algorithm algorithm;
  Index m;
  Index trials = 0;
  Index failed = 0;
  Index recovered = 0;
  double recovery_rate = 0.0;
  double mean_zero_blocks = 0.0;
  double mean_nonzero_blocks = 0.0;
  double mean_block_error = 0.0;
  double median_wall_time_s = 0.0;
};

/// Per (algorithm, m) aggregates, in first-appearance order.
std::vector<SweepSummary> summarize(const std::vector<TrialRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<SweepSummary>& summary);

extern template std::pair<RealVector, HierarchicalSupport> gen_signal(const Sparsity&,
                                                                      std::uint64_t);
extern template std::pair<ComplexVector, HierarchicalSupport> gen_signal(const Sparsity&,
                                                                         std::uint64_t);
extern template RealVector add_noise(const RealVector&, double, std::uint64_t);
extern template ComplexVector add_noise(const ComplexVector&, double, std::uint64_t);
extern template BlockMetrics block_metrics(const RealVector&, const RealVector&,
                                           const BlockPartition&, double);
extern template BlockMetrics block_metrics(const ComplexVector&, const ComplexVector&,
                                           const BlockPartition&, double);
extern template BlockMetrics block_metrics(const RealVector&, const RealVector&,
                                           const FlatSparsity&, double);
extern template BlockMetrics block_metrics(const ComplexVector&, const ComplexVector&,
                                           const FlatSparsity&, double);

}  // namespace hisparse
