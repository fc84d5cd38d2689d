#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <hisparse/bench.hpp>
#include <hisparse/serialize.hpp>

namespace hisparse::cli {

enum ExitCode : int {
  kSuccess = 0,
  kPropertyViolation = 1,
  kUnreadableConfig = 2,
  kInvalidParameters = 3,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// A config file that could not be read or parsed.
class UnreadableConfig : public Error {
 public:
  using Error::Error;
};

/// Reads a JSON config file. Throws UnreadableConfig.
Json load_config_file(const std::string& path);

/// Applies key=value overrides; dotted keys address nested objects and
/// values are parsed as JSON, falling back to a plain string.
/// Throws FormatError on a malformed override.
void apply_overrides(Json& config, const std::vector<std::string>& overrides);

struct SweepArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string output = ".";
  bool progress = false;
};
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

/// Sparsity given on the command line, either as the four flat parameters or
/// as a level list "n0:s0,n1:s1,...".
struct SparsityArgs {
  Index N = 0, n = 0, s = 0, sigma = 0;
  std::string levels;
  Sparsity resolve() const;
  std::vector<Level> level_list() const;
};

struct RipBoundArgs {
  SparsityArgs sparsity;
  double delta = 0.5;
  double epsilon = 0.01;
  std::string output;
};
int cmd_rip_bound(const RipBoundArgs& args, std::ostream& out, std::ostream& err);

struct RipEstimateArgs {
  SparsityArgs sparsity;
  Index m = 0;
  std::string ensemble = "gaussian";
  std::string field = "real";
  std::string scaling = "sqrt_m";
  std::uint64_t trials = 1000;
  bool exhaustive = false;
  std::uint64_t cap = 100'000;
  std::uint64_t seed = 0;
  std::string output;
};
int cmd_rip_estimate(const RipEstimateArgs& args, std::ostream& out, std::ostream& err);

struct OracleCheckArgs {
  Index max_dim = 12;
  Index cases = 300;
  std::uint64_t seed = 0;
  bool inject_fault = false;
};
int cmd_oracle_check(const OracleCheckArgs& args, std::ostream& out, std::ostream& err);

struct DemoArgs {
  SparsityArgs sparsity{10, 20, 2, 4, {}};
  Index m = 60;
  std::string ensemble = "gaussian";
  std::optional<double> snr;
  std::uint64_t seed = 0;
  std::string output;
};
int cmd_demo(const DemoArgs& args, std::ostream& out, std::ostream& err);

}  // namespace hisparse::cli
