#include "hisparse/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>

#include "hisparse/measure.hpp"
#include "hisparse/parallel.hpp"
#include "hisparse/random.hpp"

namespace hisparse {

std::string_view to_string(Ensemble e) {
  switch (e) {
    case Ensemble::gaussian:
      return "gaussian";
    case Ensemble::fourier_uniform:
      return "fourier_uniform";
    case Ensemble::fourier_lowest:
      return "fourier_lowest";
  }
  return "unknown";
}

std::string_view to_string(Field f) { return f == Field::real ? "real" : "complex"; }

std::string_view to_string(Algorithm a) { return a == Algorithm::htp ? "htp" : "hihtp"; }

namespace {

template <typename E, std::size_t K>
E parse_enum(const Json& j, const std::string& key, const E (&values)[K]) {
  const auto text = require<std::string>(j, key);
  for (const E v : values) {
    if (to_string(v) == text) return v;
  }
  throw FormatError("unknown value \"" + text + "\"", key);
}

constexpr Ensemble kEnsembles[] = {Ensemble::gaussian, Ensemble::fourier_uniform,
                                   Ensemble::fourier_lowest};
constexpr Field kFields[] = {Field::real, Field::complex};
constexpr Algorithm kAlgorithms[] = {Algorithm::htp, Algorithm::hihtp};

}  // namespace

void ExperimentConfig::validate() const {
  Index d = 0;
  try {
    if (const auto* fp = std::get_if<FlatSparsity>(&sparsity)) fp->validate();
    d = dimension(sparsity);
  } catch (const Error& e) {
    throw FormatError(e.what(), "sparsity");
  }
  if (d == 0) throw FormatError("empty sparsity structure", "sparsity");
  if (m_grid.empty()) throw FormatError("at least one m is required", "m_grid");
  for (const Index m : m_grid) {
    if (m < 1 || m > d) {
      throw FormatError("every m must satisfy 1 <= m <= d = " + std::to_string(d), "m_grid");
    }
  }
  if (trials < 1) throw FormatError("must be at least 1", "trials");
  if (snr && !(*snr > 0.0 && std::isfinite(*snr))) throw FormatError("must be positive", "snr");
  if (!(recovery_eps > 0.0)) throw FormatError("must be positive", "recovery_eps");
  if (!(block_eps > 0.0)) throw FormatError("must be positive", "block_eps");
  if (algorithms.empty()) throw FormatError("at least one algorithm is required", "algorithms");
  try {
    solver.validate();
  } catch (const DomainError& e) {
    throw FormatError(e.what(), "solver");
  }
}

Json to_json(const ExperimentConfig& c) {
  Json algorithms = Json::array();
  for (const auto a : c.algorithms) algorithms.push_back(std::string(to_string(a)));
  Json out = {{"sparsity", to_json(c.sparsity)},
              {"ensemble", std::string(to_string(c.ensemble))},
              {"field", std::string(to_string(c.field))},
              {"m_grid", c.m_grid},
              {"trials", c.trials},
              {"recovery_eps", c.recovery_eps},
              {"block_eps", c.block_eps},
              {"algorithms", algorithms},
              {"seed", c.seed},
              {"solver",
               {{"max_iters", c.solver.max_iters},
                {"support_stall_stop", c.solver.support_stall_stop},
                {"residual_tol", c.solver.residual_tol},
                {"ls_tol", c.solver.ls_tol},
                {"ls_max_iters", c.solver.ls_max_iters},
                {"direct_ls_limit", c.solver.direct_ls_limit}}}};
  out["snr"] = c.snr ? Json(*c.snr) : Json(nullptr);
  return out;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("configuration must be a JSON object");
  ExperimentConfig c;
  c.sparsity = sparsity_from_json(require<Json>(j, "sparsity"));
  c.m_grid = require<std::vector<Index>>(j, "m_grid");
  if (j.contains("ensemble")) c.ensemble = parse_enum(j, "ensemble", kEnsembles);
  if (j.contains("field")) c.field = parse_enum(j, "field", kFields);
  if (j.contains("trials")) c.trials = require<Index>(j, "trials");
  if (j.contains("snr") && !j.at("snr").is_null()) c.snr = require<double>(j, "snr");
  if (j.contains("recovery_eps")) c.recovery_eps = require<double>(j, "recovery_eps");
  if (j.contains("block_eps")) c.block_eps = require<double>(j, "block_eps");
  if (j.contains("seed")) c.seed = require<std::uint64_t>(j, "seed");
  if (j.contains("algorithms")) {
    c.algorithms.clear();
    const auto& list = j.at("algorithms");
    if (!list.is_array()) throw FormatError("must be an array", "algorithms");
    for (const auto& item : list) {
      c.algorithms.push_back(parse_enum(Json{{"algorithms", item}}, "algorithms", kAlgorithms));
    }
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    if (!s.is_object()) throw FormatError("must be an object", "solver");
    auto& o = c.solver;
    if (s.contains("max_iters")) o.max_iters = require<Index>(s, "max_iters");
    if (s.contains("support_stall_stop")) o.support_stall_stop = require<bool>(s, "support_stall_stop");
    if (s.contains("residual_tol")) o.residual_tol = require<double>(s, "residual_tol");
    if (s.contains("ls_tol")) o.ls_tol = require<double>(s, "ls_tol");
    if (s.contains("ls_max_iters")) o.ls_max_iters = require<Index>(s, "ls_max_iters");
    if (s.contains("direct_ls_limit")) o.direct_ls_limit = require<Index>(s, "direct_ls_limit");
  }
  c.validate();
  return c;
}

BlockPartition block_partition(const Sparsity& sp) {
  BlockPartition out;
  if (const auto* fp = std::get_if<FlatSparsity>(&sp)) {
    out.block_of.resize(fp->dimension());
    for (Index i = 0; i < out.block_of.size(); ++i) out.block_of[i] = i / fp->block_size;
    out.count = fp->num_blocks;
    return out;
  }
  const auto& tree = std::get<SparsityTree>(sp);
  if (tree.is_leaf(SparsityTree::root())) return {{0}, 1};
  std::map<SparsityTree::Vertex, Index> ids;
  out.block_of.resize(tree.leaf_count());
  for (Index i = 0; i < tree.leaf_count(); ++i) {
    const auto parent = tree.parent(tree.leaves()[i]);
    const auto [it, inserted] = ids.try_emplace(parent, ids.size());
    out.block_of[i] = it->second;
  }
  out.count = ids.size();
  return out;
}

namespace {

template <typename Scalar>
Scalar standard_normal(Rng& rng, std::normal_distribution<double>& normal) {
  if constexpr (is_complex_v<Scalar>) {
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
  } else {
    return normal(rng);
  }
}

std::shared_ptr<const SparsityTree> tree_of(const Sparsity& sp) {
  if (const auto* fp = std::get_if<FlatSparsity>(&sp)) {
    return std::make_shared<const SparsityTree>(SparsityTree::flat(*fp));
  }
  return std::make_shared<const SparsityTree>(std::get<SparsityTree>(sp));
}

}  // namespace

template <typename Scalar>
std::pair<Vector<Scalar>, HierarchicalSupport> gen_signal(const Sparsity& sp, std::uint64_t seed) {
  Rng rng(seed);
  const SupportSet support = random_support(sp, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<Scalar> x = Vector<Scalar>::Zero(static_cast<Eigen::Index>(dimension(sp)));
  for (const Index i : support) x[static_cast<Eigen::Index>(i)] = standard_normal<Scalar>(rng, normal);
  return {std::move(x), HierarchicalSupport::from_leaves(tree_of(sp), support)};
}

template <typename Scalar>
Vector<Scalar> add_noise(const Vector<Scalar>& y, double snr, std::uint64_t seed) {
  if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("snr must be positive and finite");
  const double y_norm = y.norm();
  if (y_norm == 0.0) throw DegenerateInputError("cannot scale noise to a zero measurement vector");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<Scalar> e(y.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = standard_normal<Scalar>(rng, normal);
  const double e_norm = e.norm();
  if (e_norm == 0.0) throw DegenerateInputError("drew an all-zero noise vector");
  e *= y_norm / (e_norm * std::sqrt(snr));
  return y + e;
}

template <typename Scalar>
BlockMetrics block_metrics(const Vector<Scalar>& x_hat, const Vector<Scalar>& x,
                           const BlockPartition& blocks, double block_eps) {
  if (x_hat.size() != x.size() || static_cast<Index>(x.size()) != blocks.block_of.size()) {
    throw DimensionError("block_metrics: vector lengths do not match the partition");
  }
  std::vector<double> err2(blocks.count, 0.0);
  std::vector<char> nonzero(blocks.count, 0);
  for (Index i = 0; i < blocks.block_of.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const Index b = blocks.block_of[i];
    err2[b] += std::norm(x_hat[k] - x[k]);
    if (x[k] != Scalar(0)) nonzero[b] = 1;
  }
  BlockMetrics out;
  double total = 0.0;
  for (Index b = 0; b < blocks.count; ++b) {
    const double err = std::sqrt(err2[b]);
    total += err;
    if (err < block_eps) ++(nonzero[b] ? out.nonzero_recovered : out.zero_recovered);
  }
  out.mean_block_error = blocks.count ? total / static_cast<double>(blocks.count) : 0.0;
  return out;
}

template <typename Scalar>
BlockMetrics block_metrics(const Vector<Scalar>& x_hat, const Vector<Scalar>& x,
                           const FlatSparsity& fp, double block_eps) {
  return block_metrics(x_hat, x, block_partition(fp), block_eps);
}

InstanceSeeds instance_seeds(std::uint64_t seed, Index m, Index trial) {
  return {derive_seed(seed, m, trial, 1), derive_seed(seed, m, trial, 2),
          derive_seed(seed, m, trial, 3)};
}

namespace {

struct SweepContext {
  const ExperimentConfig& config;
  BlockPartition blocks;
  Index htp_k;
};

TrialRecord failed_record(Algorithm a, Index m, Index trial, const std::string& message) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  TrialRecord r;
  r.algorithm = a;
  r.m = m;
  r.trial = trial;
  r.mean_block_error = nan;
  r.signal_error = nan;
  r.iterations = -1;
  r.error = message.empty() ? "unknown error" : message;
  return r;
}

// Solves one measured instance with every configured algorithm. The signal x
// and the measurements y refer to the original operator; `op` is the one
// handed to the solver and `scaling` maps its solutions back.
template <typename Scalar>
void solve_instance(const SweepContext& ctx, const LinearOperator<Scalar>& op,
                    const ColumnScaling* scaling, const Vector<Scalar>& x,
                    const Vector<Scalar>& y, Index m, Index trial, TrialRecord* out) {
  const auto& cfg = ctx.config;
  for (Index a = 0; a < cfg.algorithms.size(); ++a) {
    const Algorithm alg = cfg.algorithms[a];
    try {
      const auto start = std::chrono::steady_clock::now();
      auto result = alg == Algorithm::hihtp ? hihtp(op, y, cfg.sparsity, cfg.solver)
                                            : htp(op, y, ctx.htp_k, cfg.solver);
      const auto stop = std::chrono::steady_clock::now();
      const Vector<Scalar> x_hat =
          scaling ? unnormalize_solution(result.estimate, *scaling) : result.estimate;
      const auto metrics = block_metrics(x_hat, x, ctx.blocks, cfg.block_eps);
      TrialRecord& r = out[a];
      r.algorithm = alg;
      r.m = m;
      r.trial = trial;
      r.signal_error = (x_hat - x).norm();
      r.signal_recovered = r.signal_error < cfg.recovery_eps;
      r.zero_blocks = metrics.zero_recovered;
      r.nonzero_blocks = metrics.nonzero_recovered;
      r.mean_block_error = metrics.mean_block_error;
      r.iterations = static_cast<long>(result.iterations);
      r.wall_time_s = std::chrono::duration<double>(stop - start).count();
    } catch (const std::exception& e) {
      out[a] = failed_record(alg, m, trial, e.what());
    }
  }
}

template <typename Scalar>
Vector<Scalar> measure(const LinearOperator<Scalar>& op, const Vector<Scalar>& x,
                       const ExperimentConfig& cfg, std::uint64_t noise_seed) {
  Vector<Scalar> y = op.apply(x);
  if (cfg.snr) y = add_noise(y, *cfg.snr, noise_seed);
  return y;
}

template <typename Scalar>
void gaussian_trial(const SweepContext& ctx, Index m, Index trial, const InstanceSeeds& seeds,
                    TrialRecord* out) {
  const Index d = dimension(ctx.config.sparsity);
  const auto original = gaussian_operator<Scalar>(m, d, seeds.op);
  const auto [normalized, scaling] = normalize_columns(original);
  const auto x = gen_signal<Scalar>(ctx.config.sparsity, seeds.signal).first;
  const auto y = measure<Scalar>(original, x, ctx.config, seeds.noise);
  solve_instance<Scalar>(ctx, normalized, &scaling, x, y, m, trial, out);
}

void fourier_trial(const SweepContext& ctx, Index m, Index trial, const InstanceSeeds& seeds,
                   TrialRecord* out) {
  const Index d = dimension(ctx.config.sparsity);
  const auto mode = ctx.config.ensemble == Ensemble::fourier_lowest ? RowSelection::lowest
                                                                    : RowSelection::uniform_random;
  const auto op = subsampled_dft(d, m, mode, seeds.op);
  ComplexVector x;
  if (ctx.config.field == Field::real) {
    x = gen_signal<double>(ctx.config.sparsity, seeds.signal).first.cast<Complex>();
  } else {
    x = gen_signal<Complex>(ctx.config.sparsity, seeds.signal).first;
  }
  const auto y = measure<Complex>(op, x, ctx.config, seeds.noise);
  solve_instance<Complex>(ctx, op, nullptr, x, y, m, trial, out);
}

}  // namespace

std::vector<TrialRecord> run_sweep(const ExperimentConfig& config,
                                   const ProgressCallback& progress) {
  config.validate();
  const SweepContext ctx{config, block_partition(config.sparsity),
                         std::visit([](const auto& s) { return s.max_support_size(); },
                                    config.sparsity)};
  const Index per_task = config.algorithms.size();
  const Index tasks = config.m_grid.size() * config.trials;
  std::vector<TrialRecord> records(tasks * per_task);
  std::atomic<Index> done{0};
  std::mutex progress_mutex;

  parallel_for(tasks, [&](Index t) {
    const Index m = config.m_grid[t / config.trials];
    const Index trial = t % config.trials;
    TrialRecord* out = records.data() + t * per_task;
    const auto seeds = instance_seeds(config.seed, m, trial);
    try {
      if (config.ensemble == Ensemble::gaussian) {
        if (config.field == Field::real) {
          gaussian_trial<double>(ctx, m, trial, seeds, out);
        } else {
          gaussian_trial<Complex>(ctx, m, trial, seeds, out);
        }
      } else {
        fourier_trial(ctx, m, trial, seeds, out);
      }
    } catch (const std::exception& e) {
      for (Index a = 0; a < per_task; ++a) {
        out[a] = failed_record(config.algorithms[a], m, trial, e.what());
      }
    }
    if (progress) {
      const std::lock_guard lock(progress_mutex);
      progress(++done, tasks);
    }
  });
  return records;
}

namespace {

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "algorithm,m,trial,signal_recovered,zero_blocks,nonzero_blocks,mean_block_error,"
         "iterations,wall_time_s\n";
  for (const auto& r : records) {
    out << to_string(r.algorithm) << ',' << r.m << ',' << r.trial << ','
        << (r.signal_recovered ? 1 : 0) << ',' << r.zero_blocks << ',' << r.nonzero_blocks << ','
        << format_double("%.17g", r.mean_block_error) << ',' << r.iterations << ','
        << format_double("%.9f", r.wall_time_s) << '\n';
  }
}

Json sweep_sidecar(const ExperimentConfig& config, const std::vector<TrialRecord>& records) {
  Json errors = Json::array();
  for (const auto& r : records) {
    if (!r.error.empty()) {
      errors.push_back({{"algorithm", std::string(to_string(r.algorithm))},
                        {"m", r.m},
                        {"trial", r.trial},
                        {"message", r.error}});
    }
  }
  return {{"config", to_json(config)},
          {"seed", config.seed},
          {"operator_policy", "fresh operator drawn for every (m, trial); shared by all algorithms"},
          {"column_normalization", config.ensemble == Ensemble::gaussian},
          {"records", records.size()},
          {"failed_trials", errors}};
}

std::vector<SweepSummary> summarize(const std::vector<TrialRecord>& records) {
  std::vector<SweepSummary> out;
  std::vector<std::vector<double>> times;
  for (const auto& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepSummary& s) {
      return s.algorithm == r.algorithm && s.m == r.m;
    });
    if (it == out.end()) {
      out.push_back(SweepSummary{r.algorithm, r.m});
      times.emplace_back();
      it = out.end() - 1;
    }
    auto& s = *it;
    ++s.trials;
    if (!r.error.empty()) {
      ++s.failed;
      continue;
    }
    s.recovered += r.signal_recovered ? 1 : 0;
    s.mean_zero_blocks += static_cast<double>(r.zero_blocks);
    s.mean_nonzero_blocks += static_cast<double>(r.nonzero_blocks);
    s.mean_block_error += r.mean_block_error;
    times[static_cast<Index>(it - out.begin())].push_back(r.wall_time_s);
  }
  for (Index i = 0; i < out.size(); ++i) {
    auto& s = out[i];
    const Index ok = s.trials - s.failed;
    s.recovery_rate = static_cast<double>(s.recovered) / static_cast<double>(s.trials);
    if (ok > 0) {
      s.mean_zero_blocks /= static_cast<double>(ok);
      s.mean_nonzero_blocks /= static_cast<double>(ok);
      s.mean_block_error /= static_cast<double>(ok);
      auto& t = times[i];
      std::sort(t.begin(), t.end());
      s.median_wall_time_s =
          t.size() % 2 ? t[t.size() / 2] : 0.5 * (t[t.size() / 2 - 1] + t[t.size() / 2]);
    }
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SweepSummary>& summary) {
  out << "algorithm,m,trials,failed,recovered,recovery_rate,mean_zero_blocks,"
         "mean_nonzero_blocks,mean_block_error,median_wall_time_s\n";
  for (const auto& s : summary) {
    out << to_string(s.algorithm) << ',' << s.m << ',' << s.trials << ',' << s.failed << ','
        << s.recovered << ',' << format_double("%.6g", s.recovery_rate) << ','
        << format_double("%.6g", s.mean_zero_blocks) << ','
        << format_double("%.6g", s.mean_nonzero_blocks) << ','
        << format_double("%.6g", s.mean_block_error) << ','
        << format_double("%.6g", s.median_wall_time_s) << '\n';
  }
}

template std::pair<RealVector, HierarchicalSupport> gen_signal(const Sparsity&, std::uint64_t);
template std::pair<ComplexVector, HierarchicalSupport> gen_signal(const Sparsity&, std::uint64_t);
template RealVector add_noise(const RealVector&, double, std::uint64_t);
template ComplexVector add_noise(const ComplexVector&, double, std::uint64_t);
template BlockMetrics block_metrics(const RealVector&, const RealVector&, const BlockPartition&,
                                    double);
template BlockMetrics block_metrics(const ComplexVector&, const ComplexVector&,
                                    const BlockPartition&, double);
template BlockMetrics block_metrics(const RealVector&, const RealVector&, const FlatSparsity&,
                                    double);
template BlockMetrics block_metrics(const ComplexVector&, const ComplexVector&,
                                    const FlatSparsity&, double);

}  // namespace hisparse
