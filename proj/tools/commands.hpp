#pragma once

// Subcommands of the `qdn` tool. Each returns the process exit code:
// 0 on success, 1 on diagnostics (including usage errors), 2 on I/O errors.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qdn::cli {

enum class OutputFormat { Human, Json, Csv };

struct SweepSpec {
  std::string param;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
};

/// Parses `name=start:stop:count`; throws qdn::SyntaxError.
SweepSpec parse_sweep(const std::string& text);

struct RunConfig {
  std::string input;
  std::vector<std::string> bindings;  // name=literal
  OutputFormat format = OutputFormat::Human;
  std::optional<std::uint64_t> seed;
  std::optional<SweepSpec> sweep;
};

struct VerifyConfig {
  unsigned rank = 3;
  /// Replaces the catalog beamsplitter, e.g. "alpha=(1,0) beta=(1,0) ...".
  std::optional<std::string> bs_params;
};

struct DecayConfig {
  std::optional<double> alpha2;
  std::optional<std::string> alpha;  // complex literal
  std::optional<double> gamma_exp;
  std::optional<double> gamma_zeno;
  double tau = 1.0;
  std::optional<std::uint64_t> steps;
  std::optional<double> t;
  bool json = false;
};

struct HorizonConfig {
  double v = 0.0;
  double c = 299792458.0;
  double tprime = 1.0;
  bool json = false;
};

struct FmtConfig {
  std::string input;
  bool in_place = false;
};

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_decay(const DecayConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_horizon(const HorizonConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_fmt(const FmtConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line, argv[0] included.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Probabilities and amplitudes are reported to 10 significant digits.
std::string format_number(double x);

}  // namespace qdn::cli
