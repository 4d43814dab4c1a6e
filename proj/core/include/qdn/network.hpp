#pragma once

// Detector networks: wiring graphs of sources, module instances and
// detectors, compiled into a sequence of local-rule stages.

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qdn/evolution.hpp"
#include "qdn/register.hpp"

namespace qdn {

/// `$name` placeholder in a module parameter, resolved from a binding map.
struct ParamRef {
  std::string name;
  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

using ParamValue = std::variant<double, Amplitude, ParamRef>;
using Bindings = std::map<std::string, ParamValue, std::less<>>;

enum class ParamKind { Real, Complex };

struct ParamSpec {
  std::string key;
  ParamKind kind;
  bool required = true;
};

/// Catalog entry for one module type.
struct ModuleType {
  std::string name;
  std::vector<std::string> in_ports;
  std::vector<std::string> out_ports;
  std::vector<ParamSpec> params;

  int in_port_index(std::string_view port) const;
  int out_port_index(std::string_view port) const;
};

const std::vector<ModuleType>& module_types();
/// nullptr when the type is unknown.
const ModuleType* find_module_type(std::string_view name);

/// Builds the local action of a module from fully resolved parameters.
ModuleAction build_action(const ModuleType& type, const std::map<std::string, ParamValue>& params);

struct Endpoint {
  std::string node;
  std::string port;
  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
  std::string to_string() const { return node + "." + port; }
};

struct Wire {
  Endpoint from;
  Endpoint to;
  friend auto operator<=>(const Wire&, const Wire&) = default;
};

struct ModuleDecl {
  std::string type;
  std::map<std::string, ParamValue> params;
  friend bool operator==(const ModuleDecl&, const ModuleDecl&) = default;
};

inline constexpr const char* kSourcePort = "out";
inline constexpr const char* kDetectorPort = "in";

/// Wiring graph. Node names are unique across sources, modules and detectors.
/// Containers are ordered, so two graphs with the same content compare equal.
class NetworkGraph {
 public:
  void add_source(const std::string& name);
  void add_detector(const std::string& name);
  /// Validates the type, the parameter keys and the literal kinds.
  void add_module(const std::string& name, const std::string& type,
                  std::map<std::string, ParamValue> params);
  /// Validates both endpoints and that neither is already wired.
  void add_wire(const Endpoint& from, const Endpoint& to);

  const std::set<std::string>& sources() const noexcept { return sources_; }
  const std::set<std::string>& detectors() const noexcept { return detectors_; }
  const std::map<std::string, ModuleDecl>& modules() const noexcept { return modules_; }
  const std::set<Wire>& wires() const noexcept { return wires_; }

  bool has_node(std::string_view name) const;
  bool empty() const noexcept {
    return sources_.empty() && detectors_.empty() && modules_.empty() && wires_.empty();
  }

  /// Every `$name` referenced by a module parameter.
  std::set<std::string> parameter_names() const;

  friend bool operator==(const NetworkGraph&, const NetworkGraph&) = default;

 private:
  std::set<std::string> sources_;
  std::set<std::string> detectors_;
  std::map<std::string, ModuleDecl> modules_;
  std::set<Wire> wires_;
};

/// Substitutes every `$name`; throws NameError for names missing from `bindings`.
NetworkGraph bind(const NetworkGraph& g, const Bindings& bindings);

struct QubitLabel {
  std::string owner;
  std::string port;
  friend bool operator==(const QubitLabel&, const QubitLabel&) = default;
};

/// Compiled network: stage t maps the register at time t-1 to time t.
struct Schedule {
  std::vector<StageMap> stages;
  /// registers[t][q-1] names qubit q at time t, for t = 0..stages.size().
  std::vector<std::vector<QubitLabel>> registers;
  /// Final-register qubit order; implicit detectors are named "NODE.PORT".
  std::vector<std::string> detectors;

  Rank initial_rank() const { return static_cast<Rank>(registers.front().size()); }
  Rank final_rank() const { return static_cast<Rank>(registers.back().size()); }

  /// 1-based final-register position of a detector; throws NameError.
  Rank detector_qubit(std::string_view name) const;
  /// Basis index at which exactly the named detectors fire.
  BasisIndex outcome_index(const std::vector<std::string>& fired) const;
  /// Detectors firing in basis state |k), in qubit order.
  std::vector<std::string> fired_detectors(BasisIndex k) const;

  /// Text dump of stages and qubit assignments; equal for equal schedules.
  std::string describe() const;
};

/// Amplitudes below this modulus are dropped from evaluated final states.
inline constexpr double kPruneThreshold = 1e-15;

/// Requires a graph with no unresolved parameters (see bind()).
Schedule compile(const NetworkGraph& g);

/// Fires every source once and applies all stages.
Labstate evaluate(const Schedule& s);

/// Probability that exactly the named detectors fire.
double outcome_probability(const Schedule& s, const Labstate& final_state,
                           const std::vector<std::string>& fired);

/// Outcomes worth reporting for a final state: every single-detector
/// pattern plus every stored basis index, ordered by signal class then index.
std::vector<BasisIndex> reported_outcomes(const Schedule& s, const Labstate& final_state);

struct SweepTable {
  std::string param;
  std::vector<double> values;
  std::vector<std::string> detectors;
  std::vector<BasisIndex> outcomes;           // column keys
  std::vector<std::vector<double>> probabilities;  // [row][column]
};

/// Re-evaluates the network for each value of `param`. The outcome columns
/// are the union of reported outcomes over all rows.
SweepTable sweep(const NetworkGraph& g, const Bindings& fixed, const std::string& param,
                 const std::vector<double>& values);

/// Evenly spaced values from start to stop inclusive; count >= 2.
std::vector<double> linspace(double start, double stop, std::size_t count);

}  // namespace qdn
