#include "cli.hpp"

#include <ostream>

#include <CLI11.hpp>

namespace hisparse::cli {

namespace {

void add_sparsity_options(CLI::App* sub, SparsityArgs& s) {
  sub->add_option("--N", s.N, "Number of blocks");
  sub->add_option("--n", s.n, "Block size");
  sub->add_option("--s", s.s, "Active blocks");
  sub->add_option("--sigma", s.sigma, "Active entries per block");
  sub->add_option("--levels", s.levels, "Uniform tree levels as n0:s0,n1:s1,...");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical sparse recovery: sweeps, RIP bounds and self-checks", "hisparse"};
  app.require_subcommand(1, 1);

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "Run a recovery sweep over the measurement grid");
  s->add_option("--config", sweep.config_path, "Experiment configuration (JSON)")->required();
  s->add_option("overrides", sweep.overrides, "key=value overrides applied to the config");
  s->add_option("--seed", sweep.seed, "Overrides the configured seed");
  s->add_option("--output", sweep.output, "Output directory")->capture_default_str();
  s->add_flag("--progress", sweep.progress, "Print a trial counter to stderr");

  RipBoundArgs bound;
  auto* b = app.add_subcommand("rip-bound", "Gaussian sample-complexity bounds");
  add_sparsity_options(b, bound.sparsity);
  b->add_option("--delta", bound.delta, "RIP constant")->capture_default_str();
  b->add_option("--epsilon", bound.epsilon, "Failure probability")->capture_default_str();
  b->add_option("--output", bound.output, "Write the table as CSV to this file");

  RipEstimateArgs est;
  auto* e = app.add_subcommand("rip-estimate", "Estimate the RIP constant of a random operator");
  add_sparsity_options(e, est.sparsity);
  e->add_option("--m", est.m, "Number of measurements")->required();
  e->add_option("--ensemble", est.ensemble, "gaussian | fourier_uniform | fourier_lowest")
      ->capture_default_str();
  e->add_option("--field", est.field, "real | complex (gaussian only)")->capture_default_str();
  e->add_option("--scaling", est.scaling, "sqrt_m | columns (gaussian only)")->capture_default_str();
  e->add_option("--trials", est.trials, "Random supports to sample")->capture_default_str();
  e->add_flag("--exhaustive", est.exhaustive, "Enumerate every admissible support");
  e->add_option("--cap", est.cap, "Enumeration cap")->capture_default_str();
  e->add_option("--seed", est.seed, "Random seed")->capture_default_str();
  e->add_option("--output", est.output, "Write the estimate as CSV to this file");

  OracleCheckArgs oracle;
  auto* o = app.add_subcommand("oracle-check", "Compare fast operators against exhaustive oracles");
  o->add_option("--max-dim", oracle.max_dim, "Largest signal dimension")->capture_default_str();
  o->add_option("--cases", oracle.cases, "Cases per suite")->capture_default_str();
  o->add_option("--seed", oracle.seed, "Seed of the first case")->capture_default_str();
  o->add_flag("--inject-fault", oracle.inject_fault)->group("");

  DemoArgs demo;
  auto* d = app.add_subcommand("demo", "Recover one random signal with HTP and HiHTP");
  add_sparsity_options(d, demo.sparsity);
  d->add_option("--m", demo.m, "Number of measurements")->capture_default_str();
  d->add_option("--ensemble", demo.ensemble, "gaussian | fourier_uniform | fourier_lowest")
      ->capture_default_str();
  d->add_option("--snr", demo.snr, "Signal-to-noise power ratio");
  d->add_option("--seed", demo.seed, "Random seed")->capture_default_str();
  d->add_option("--output", demo.output, "Write the results as JSON to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kSuccess : kInvalidParameters;
  }

  try {
    if (*s) return cmd_sweep(sweep, out, err);
    if (*b) return cmd_rip_bound(bound, out, err);
    if (*e) return cmd_rip_estimate(est, out, err);
    if (*o) return cmd_oracle_check(oracle, out, err);
    return cmd_demo(demo, out, err);
  } catch (const UnreadableConfig& ex) {
    err << "error: " << ex.what() << '\n';
    return kUnreadableConfig;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kInvalidParameters;
  }
}

}  // namespace hisparse::cli
