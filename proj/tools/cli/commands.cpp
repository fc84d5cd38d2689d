#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <hisparse/measure.hpp>
#include <hisparse/random.hpp>
#include <hisparse/ripcalc.hpp>

#include "cli.hpp"

namespace hisparse::cli {

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableConfig("cannot read config file " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UnreadableConfig("config file " + path + " is not valid JSON: " + e.what());
  }
}

void apply_overrides(Json& config, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw FormatError("expected key=value, got \"" + item + "\"", "overrides");
    }
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    std::string pointer;
    std::stringstream parts(key);
    for (std::string part; std::getline(parts, part, '.');) {
      if (part.empty()) throw FormatError("empty path component in \"" + key + "\"", key);
      pointer += '/' + part;
    }
    Json value;
    try {
      value = Json::parse(text);
    } catch (const Json::parse_error&) {
      value = text;
    }
    try {
      config[Json::json_pointer(pointer)] = std::move(value);
    } catch (const Json::exception& e) {
      throw FormatError(e.what(), key);
    }
  }
}

std::vector<Level> SparsityArgs::level_list() const {
  std::vector<Level> out;
  std::stringstream items(levels);
  for (std::string item; std::getline(items, item, ',');) {
    const auto colon = item.find(':');
    Level l;
    try {
      if (colon == std::string::npos) throw std::invalid_argument(item);
      std::size_t used = 0;
      l.children = std::stoul(item.substr(0, colon), &used);
      l.budget = std::stoul(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw FormatError("expected n:s, got \"" + item + "\"", "levels");
    }
    out.push_back(l);
  }
  if (out.empty()) throw FormatError("no levels given", "levels");
  return out;
}

Sparsity SparsityArgs::resolve() const {
  if (!levels.empty()) {
    const auto list = level_list();
    try {
      return SparsityTree::uniform(list);
    } catch (const StructureError& e) {
      throw FormatError(e.what(), "levels");
    }
  }
  FlatSparsity fp{N, n, s, sigma};
  try {
    fp.validate();
  } catch (const DomainError& e) {
    throw FormatError(std::string(e.what()) + " (pass --N --n --s --sigma or --levels)",
                      "sparsity");
  }
  return fp;
}

namespace {

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + path);
  return out;
}

std::vector<Level> levels_of(const Sparsity& sp) {
  if (const auto* fp = std::get_if<FlatSparsity>(&sp)) {
    return {{fp->num_blocks, fp->active_blocks}, {fp->block_size, fp->active_per_block}};
  }
  const auto& tree = std::get<SparsityTree>(sp);
  std::vector<Level> out;
  for (SparsityTree::Vertex v = SparsityTree::root(); !tree.is_leaf(v); v = tree.children(v)[0]) {
    out.push_back({tree.child_count(v), tree.budget(v)});
  }
  return out;
}

std::string describe(const std::vector<Level>& levels) {
  std::string out;
  for (const auto& l : levels) {
    if (!out.empty()) out += ' ';
    out += "(" + std::to_string(l.children) + "," + std::to_string(l.budget) + ")";
  }
  return out;
}

}  // namespace

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  Json j = load_config_file(args.config_path);
  apply_overrides(j, args.overrides);
  if (args.seed) j["seed"] = *args.seed;
  const ExperimentConfig config = config_from_json(j);

  ProgressCallback progress;
  if (args.progress) {
    progress = [&err](Index done, Index total) {
      err << "trials " << done << '/' << total << '\n';
    };
  }
  const auto records = run_sweep(config, progress);

  const std::filesystem::path dir(args.output);
  std::filesystem::create_directories(dir);
  {
    auto csv = open_output((dir / "sweep.csv").string());
    write_csv(csv, records);
  }
  {
    auto sidecar = open_output((dir / "sweep.json").string());
    sidecar << sweep_sidecar(config, records).dump(2) << '\n';
  }
  const auto summary = summarize(records);
  {
    auto csv = open_output((dir / "summary.csv").string());
    write_summary_csv(csv, summary);
  }

  out << std::left << std::setw(8) << "alg" << std::setw(8) << "m" << std::setw(12) << "recovered"
      << std::setw(14) << "zero_blocks" << std::setw(16) << "nonzero_blocks"
      << "median_time_s\n";
  for (const auto& s : summary) {
    out << std::left << std::setw(8) << to_string(s.algorithm) << std::setw(8) << s.m
        << std::setw(12) << (std::to_string(s.recovered) + "/" + std::to_string(s.trials))
        << std::setw(14) << std::setprecision(4) << s.mean_zero_blocks << std::setw(16)
        << s.mean_nonzero_blocks << s.median_wall_time_s << '\n';
  }
  Index failed = 0;
  for (const auto& r : records) failed += r.error.empty() ? 0 : 1;
  if (failed > 0) out << failed << " trial(s) failed; see sweep.json\n";
  out << "wrote " << records.size() << " records to " << (dir / "sweep.csv").string() << '\n';
  return kSuccess;
}

int cmd_rip_bound(const RipBoundArgs& args, std::ostream& out, std::ostream&) {
  const auto sparsity = args.sparsity.resolve();
  const auto levels = levels_of(sparsity);
  Index d = 1, k = 1;
  for (const auto& l : levels) {
    d *= l.children;
    k *= l.budget;
  }
  const double hier_value = tree_sample_bound_value(levels, args.delta, args.epsilon);
  const Index hier = tree_sample_bound(levels, args.delta, args.epsilon);
  const double flat_value = unstructured_sample_bound_value(d, k, args.delta, args.epsilon);
  const Index flat = unstructured_sample_bound(d, k, args.delta, args.epsilon);

  out << "delta = " << args.delta << ", epsilon = " << args.epsilon << '\n';
  out << std::left << std::setw(16) << "sparsity" << std::setw(28) << "parameters"
      << std::setw(18) << "bound" << "m\n";
  out << std::setw(16) << "hierarchical" << std::setw(28) << describe(levels) << std::setw(18)
      << std::setprecision(10) << hier_value << hier << '\n';
  out << std::setw(16) << "unstructured" << std::setw(28)
      << ("d=" + std::to_string(d) + " k=" + std::to_string(k)) << std::setw(18) << flat_value
      << flat << '\n';
  out << "hierarchical structure saves " << static_cast<long long>(flat) - static_cast<long long>(hier)
      << " measurements\n";

  if (!args.output.empty()) {
    auto csv = open_output(args.output);
    csv << "sparsity,parameters,delta,epsilon,bound,m\n" << std::setprecision(17);
    csv << "hierarchical,\"" << describe(levels) << "\"," << args.delta << ',' << args.epsilon
        << ',' << hier_value << ',' << hier << '\n';
    csv << "unstructured,\"d=" << d << " k=" << k << "\"," << args.delta << ',' << args.epsilon
        << ',' << flat_value << ',' << flat << '\n';
  }
  return kSuccess;
}

int cmd_rip_estimate(const RipEstimateArgs& args, std::ostream& out, std::ostream&) {
  const auto sparsity = args.sparsity.resolve();
  const Index d = dimension(sparsity);
  if (args.m < 1) throw FormatError("must be at least 1", "m");

  RipEstimate estimate;
  auto run = [&](const auto& op) {
    if (args.exhaustive) {
      estimate = exhaustive_rip(op, sparsity, args.cap);
    } else {
      estimate = monte_carlo_rip(op, sparsity, args.trials, derive_seed(args.seed, 1));
    }
  };
  auto gaussian = [&]<typename S>() {
    auto op = gaussian_operator<S>(args.m, d, args.seed);
    if (args.scaling == "columns") {
      run(normalize_columns(op).first);
    } else if (args.scaling == "sqrt_m") {
      run(DenseOperator<S>(op.matrix() / std::sqrt(static_cast<double>(args.m))));
    } else {
      throw FormatError("expected sqrt_m or columns", "scaling");
    }
  };
  if (args.ensemble == "gaussian") {
    if (args.field == "real") {
      gaussian.operator()<double>();
    } else if (args.field == "complex") {
      gaussian.operator()<Complex>();
    } else {
      throw FormatError("expected real or complex", "field");
    }
  } else if (args.ensemble == "fourier_uniform" || args.ensemble == "fourier_lowest") {
    if (args.m > d) throw FormatError("must not exceed d = " + std::to_string(d), "m");
    const auto mode = args.ensemble == "fourier_lowest" ? RowSelection::lowest
                                                        : RowSelection::uniform_random;
    run(to_dense(subsampled_dft(d, args.m, mode, args.seed)));
  } else {
    throw FormatError("unknown ensemble \"" + args.ensemble + "\"", "ensemble");
  }

  const char* method = estimate.method == RipMethod::exhaustive ? "exhaustive" : "monte_carlo";
  out << "ensemble " << args.ensemble << ", m = " << args.m << ", d = " << d << '\n';
  out << "method " << method << ", supports checked " << estimate.supports_checked << '\n';
  out << (estimate.method == RipMethod::exhaustive ? "delta = " : "delta >= ")
      << std::setprecision(10) << estimate.delta_lower << '\n';
  out << "worst support:";
  for (const Index i : estimate.worst_support) out << ' ' << i;
  out << '\n';
  if (!args.output.empty()) {
    auto csv = open_output(args.output);
    csv << "ensemble,m,d,method,supports_checked,delta\n"
        << args.ensemble << ',' << args.m << ',' << d << ',' << method << ','
        << estimate.supports_checked << ',' << std::setprecision(17) << estimate.delta_lower
        << '\n';
  }
  return kSuccess;
}

int cmd_demo(const DemoArgs& args, std::ostream& out, std::ostream&) {
  ExperimentConfig config;
  config.sparsity = args.sparsity.resolve();
  config.m_grid = {args.m};
  config.trials = 1;
  config.snr = args.snr;
  config.seed = args.seed;
  config.ensemble = config_from_json(Json{{"sparsity", to_json(config.sparsity)},
                                          {"m_grid", config.m_grid},
                                          {"ensemble", args.ensemble}})
                        .ensemble;
  if (config.ensemble != Ensemble::gaussian) config.field = Field::complex;
  config.validate();
  const auto records = run_sweep(config);

  const auto seeds = instance_seeds(config.seed, args.m, 0);
  const auto truth = gen_signal<double>(config.sparsity, seeds.signal).second;
  out << "d = " << dimension(config.sparsity) << ", m = " << args.m << ", ensemble "
      << to_string(config.ensemble) << ", seed " << config.seed << '\n';
  out << "true support:";
  for (const Index i : truth.flatten()) out << ' ' << i;
  out << '\n';
  Json report = {{"config", to_json(config)}, {"results", Json::array()}};
  for (const auto& r : records) {
    out << std::left << std::setw(6) << to_string(r.algorithm);
    if (!r.error.empty()) {
      out << "failed: " << r.error << '\n';
    } else {
      out << "error " << std::setprecision(3) << std::scientific << r.signal_error
          << std::defaultfloat << ", " << r.iterations << " iterations, "
          << (r.signal_recovered ? "recovered" : "not recovered") << ", blocks zero/nonzero "
          << r.zero_blocks << '/' << r.nonzero_blocks << '\n';
    }
    report["results"].push_back({{"algorithm", std::string(to_string(r.algorithm))},
                                 {"signal_error", r.signal_error},
                                 {"signal_recovered", r.signal_recovered},
                                 {"iterations", r.iterations},
                                 {"zero_blocks", r.zero_blocks},
                                 {"nonzero_blocks", r.nonzero_blocks},
                                 {"error", r.error}});
  }
  if (!args.output.empty()) {
    auto file = open_output(args.output);
    file << report.dump(2) << '\n';
  }
  return kSuccess;
}

}  // namespace hisparse::cli
