#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ulab::harness {

enum ExitCode { Ok = 0, Usage = 1, ClaimFailed = 2, Precision = 3 };

/// One experiment.  Keys, defaults and ranges:
///
///   kind      cfrac-stats | kg | loglaw | tail | sprindzhuk | ed | siegel | selftest
///   q         2        prime power, 2..64
///   m, n      1        1..4
///   psi       power:1  see PsiSpec::parse
///   N         10000    time horizon, 2..10^7
///   D         16       degree horizon, 1..40
///   L         12       ray depth, 0..40
///   t         12       flow time for tail, 1..64
///   H         64       ed horizon, 4..4096
///   samples   1000     1..10^7
///   seed      1
///   source    haar     tail: haar | flow
///   family    independent  sprindzhuk: independent | duplicated | cusp
///   eps       0.1      error-term exponent slack, (0, 1]
///   out       out      output directory
struct ExperimentConfig {
  std::string kind;
  std::uint32_t q = 2;
  std::uint32_t m = 1, n = 1;
  std::string psi = "power:1";
  std::int64_t N = 10000;
  std::int64_t D = 16;
  std::int64_t L = 12;
  std::int64_t t = 12;
  std::int64_t H = 64;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  std::string source = "haar";
  std::string family = "independent";
  double eps = 0.1;
  std::string out = "out";

  /// Canonical "key = value" lines (without `out`); parse_config(echo())
  /// gives the same config back.
  std::string echo() const;
  /// Throws ParseError on out-of-range values.
  void validate() const;
};

/// Line-oriented `key = value`; '#' starts a comment.  Unknown keys,
/// repeated keys and bad values raise ParseError naming the line.
ExperimentConfig parse_config(std::string_view text);

/// Default text for `--help`.
std::string config_help();

struct RunResult {
  int exit_code = Ok;
  std::vector<std::filesystem::path> files;  // written, report.txt first
  std::string summary;                       // last line of the report
};

/// Runs the experiment and writes report.txt plus CSVs into `out`.  Output
/// bytes depend on the config only, never on `workers`.
RunResult run(const ExperimentConfig& config, const std::filesystem::path& out, int workers = 1);

}  // namespace ulab::harness
