#include "qdn/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <tuple>

#include "qdn/errors.hpp"
#include "qdn/optics.hpp"

namespace qdn {

// ---------------------------------------------------------------------------
// Module catalog

int ModuleType::in_port_index(std::string_view port) const {
  auto it = std::find(in_ports.begin(), in_ports.end(), port);
  return it == in_ports.end() ? -1 : static_cast<int>(it - in_ports.begin());
}

int ModuleType::out_port_index(std::string_view port) const {
  auto it = std::find(out_ports.begin(), out_ports.end(), port);
  return it == out_ports.end() ? -1 : static_cast<int>(it - out_ports.begin());
}

const std::vector<ModuleType>& module_types() {
  using K = ParamKind;
  static const std::vector<ModuleType> types = {
      {"beamsplitter", {"a", "b"}, {"c", "d"},
       {{"alpha", K::Complex}, {"beta", K::Complex}, {"gamma", K::Complex}, {"delta", K::Complex},
        {"twosig", K::Complex, false}}},
      {"symmetric_bs", {"a", "b"}, {"c", "d"}, {}},
      {"mirror", {"a"}, {"b"}, {{"phase", K::Real}}},
      {"phase", {"a"}, {"b"}, {{"phase", K::Real}}},
      {"rotator", {"a"}, {"b"}, {}},
      {"wollaston", {"a"}, {"c", "d"},
       {{"theta", K::Real}, {"alphain", K::Complex}, {"betain", K::Complex}}},
      {"brandt_bs", {"a"}, {"c", "d"}, {{"theta", K::Real}}},
      {"pairsource", {"a"}, {"c", "d", "e", "f"}, {{"theta", K::Real}}},
      {"wire", {"a"}, {"b"}, {}},
  };
  return types;
}

const ModuleType* find_module_type(std::string_view name) {
  for (const auto& t : module_types()) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

namespace {

const ParamValue* lookup(const std::map<std::string, ParamValue>& params, const std::string& key) {
  auto it = params.find(key);
  return it == params.end() ? nullptr : &it->second;
}

Amplitude as_complex(const ParamValue& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return {*d, 0.0};
  if (const auto* c = std::get_if<Amplitude>(&v)) return *c;
  throw NameError("parameter '" + key + "' references unbound $" + std::get<ParamRef>(v).name);
}

double as_real(const ParamValue& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (std::holds_alternative<Amplitude>(v)) {
    throw LiteralError("parameter '" + key + "' expects a real literal");
  }
  throw NameError("parameter '" + key + "' references unbound $" + std::get<ParamRef>(v).name);
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace

ModuleAction build_action(const ModuleType& type, const std::map<std::string, ParamValue>& params) {
  auto real = [&](const std::string& key) { return as_real(params.at(key), key); };
  auto cplx = [&](const std::string& key) { return as_complex(params.at(key), key); };

  if (type.name == "beamsplitter") {
    optics::BeamSplitterParams p{cplx("alpha"), cplx("beta"), cplx("gamma"), cplx("delta")};
    if (lookup(params, "twosig")) p.two_signal_phase = cplx("twosig");
    return optics::beamsplitter(p);
  }
  if (type.name == "symmetric_bs") return optics::symmetric_beamsplitter().relabeled("symmetric_bs");
  if (type.name == "mirror") return optics::mirror(real("phase")).relabeled("mirror");
  if (type.name == "phase") return optics::phase_element({real("phase")});
  if (type.name == "rotator") return optics::rotator();
  if (type.name == "wollaston") return optics::wollaston({real("theta"), cplx("alphain"), cplx("betain")});
  if (type.name == "brandt_bs") return optics::brandt_bs1(real("theta"));
  if (type.name == "pairsource") return optics::pair_source({real("theta")});
  if (type.name == "wire") return optics::wire();
  throw UnknownModuleError("unknown module type '" + type.name + "'");
}

// ---------------------------------------------------------------------------
// NetworkGraph

bool NetworkGraph::has_node(std::string_view name) const {
  const std::string key(name);
  return sources_.count(key) || detectors_.count(key) || modules_.count(key);
}

namespace {

void check_new_name(const NetworkGraph& g, const std::string& name) {
  if (!is_identifier(name)) throw NameError("'" + name + "' is not a valid node name");
  if (g.has_node(name)) throw NameError("node '" + name + "' is declared twice");
}

}  // namespace

void NetworkGraph::add_source(const std::string& name) {
  check_new_name(*this, name);
  sources_.insert(name);
}

void NetworkGraph::add_detector(const std::string& name) {
  check_new_name(*this, name);
  detectors_.insert(name);
}

void NetworkGraph::add_module(const std::string& name, const std::string& type,
                              std::map<std::string, ParamValue> params) {
  check_new_name(*this, name);
  const ModuleType* t = find_module_type(type);
  if (!t) throw UnknownModuleError("unknown module type '" + type + "'");

  for (const auto& [key, value] : params) {
    auto spec = std::find_if(t->params.begin(), t->params.end(),
                             [&key](const ParamSpec& p) { return p.key == key; });
    if (spec == t->params.end()) {
      throw ArityError("module '" + name + "' (" + type + ") has no parameter '" + key + "'");
    }
    if (spec->kind == ParamKind::Real && std::holds_alternative<Amplitude>(value)) {
      throw LiteralError("parameter '" + key + "' of module '" + name + "' expects a real literal");
    }
  }
  std::string missing;
  for (const auto& spec : t->params) {
    if (spec.required && !params.count(spec.key)) missing += (missing.empty() ? "" : ", ") + spec.key;
  }
  if (!missing.empty()) {
    throw ArityError("module '" + name + "' (" + type + ") is missing " + missing);
  }
  modules_.emplace(name, ModuleDecl{type, std::move(params)});
}

void NetworkGraph::add_wire(const Endpoint& from, const Endpoint& to) {
  for (const auto* e : {&from, &to}) {
    if (!has_node(e->node)) throw NameError("wire names unknown node '" + e->node + "'");
  }
  bool from_ok = false;
  if (sources_.count(from.node)) {
    from_ok = from.port == kSourcePort;
  } else if (auto it = modules_.find(from.node); it != modules_.end()) {
    from_ok = find_module_type(it->second.type)->out_port_index(from.port) >= 0;
  }
  if (!from_ok) throw WiringError("'" + from.to_string() + "' is not an output port");

  bool to_ok = false;
  if (detectors_.count(to.node)) {
    to_ok = to.port == kDetectorPort;
  } else if (auto it = modules_.find(to.node); it != modules_.end()) {
    to_ok = find_module_type(it->second.type)->in_port_index(to.port) >= 0;
  }
  if (!to_ok) throw WiringError("'" + to.to_string() + "' is not an input port");

  for (const auto& w : wires_) {
    if (w.from == from) throw WiringError("output '" + from.to_string() + "' is wired twice");
    if (w.to == to) throw WiringError("input '" + to.to_string() + "' is wired twice");
  }
  wires_.insert(Wire{from, to});
}

std::set<std::string> NetworkGraph::parameter_names() const {
  std::set<std::string> out;
  for (const auto& [name, decl] : modules_) {
    for (const auto& [key, value] : decl.params) {
      if (const auto* ref = std::get_if<ParamRef>(&value)) out.insert(ref->name);
    }
  }
  return out;
}

NetworkGraph bind(const NetworkGraph& g, const Bindings& bindings) {
  NetworkGraph out;
  for (const auto& s : g.sources()) out.add_source(s);
  for (const auto& d : g.detectors()) out.add_detector(d);
  for (const auto& [name, decl] : g.modules()) {
    auto params = decl.params;
    for (auto& [key, value] : params) {
      const auto* ref = std::get_if<ParamRef>(&value);
      if (!ref) continue;
      auto it = bindings.find(ref->name);
      if (it == bindings.end()) {
        throw NameError("parameter $" + ref->name + " (module '" + name + "', key '" + key +
                        "') has no binding");
      }
      if (std::holds_alternative<ParamRef>(it->second)) {
        throw NameError("binding for $" + ref->name + " must be a literal");
      }
      value = it->second;
    }
    out.add_module(name, decl.type, std::move(params));
  }
  for (const auto& w : g.wires()) out.add_wire(w.from, w.to);
  return out;
}

// ---------------------------------------------------------------------------
// Schedule

Rank Schedule::detector_qubit(std::string_view name) const {
  auto it = std::find(detectors.begin(), detectors.end(), name);
  if (it == detectors.end()) throw NameError("unknown detector '" + std::string(name) + "'");
  return static_cast<Rank>(it - detectors.begin()) + 1;
}

BasisIndex Schedule::outcome_index(const std::vector<std::string>& fired) const {
  BasisIndex k = 0;
  for (const auto& name : fired) k |= BasisIndex{1} << (detector_qubit(name) - 1);
  return k;
}

std::vector<std::string> Schedule::fired_detectors(BasisIndex k) const {
  std::vector<std::string> out;
  for (std::size_t q = 0; q < detectors.size(); ++q) {
    if ((k >> q) & 1u) out.push_back(detectors[q]);
  }
  return out;
}

std::string Schedule::describe() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t t = 0; t < registers.size(); ++t) {
    os << "t=" << t << " rank=" << registers[t].size() << ":";
    for (const auto& q : registers[t]) os << ' ' << q.owner << '.' << q.port;
    os << '\n';
    if (t == 0) continue;
    const auto& stage = stages[t - 1];
    for (const auto& a : stage.actions()) {
      os << "  " << a.label() << " [";
      for (std::size_t j = 0; j < a.in_qubits().size(); ++j) os << (j ? "," : "") << a.in_qubits()[j];
      os << "] -> [";
      for (std::size_t j = 0; j < a.out_qubits().size(); ++j) os << (j ? "," : "") << a.out_qubits()[j];
      os << "]";
      for (const auto& row : a.rows()) {
        os << " {";
        if (row) {
          for (const auto& [k, v] : *row) os << k << ':' << v.real() << ',' << v.imag() << ';';
        }
        os << '}';
      }
      os << '\n';
    }
  }
  return os.str();
}

namespace {

struct PortInfo {
  std::string owner;
  std::string port;
  int port_index = 0;
  int birth = 0;
  int death = 0;
};

struct PortKey {
  std::string owner;
  std::string port;
  friend auto operator<=>(const PortKey&, const PortKey&) = default;
};

}  // namespace

Schedule compile(const NetworkGraph& g) {
  if (auto refs = g.parameter_names(); !refs.empty()) {
    throw NameError("network has unbound parameter $" + *refs.begin());
  }

  // Producer of every wired input, keyed by consumer endpoint.
  std::map<PortKey, Endpoint> producer_of;
  std::map<PortKey, Endpoint> consumer_of;
  for (const auto& w : g.wires()) {
    producer_of.emplace(PortKey{w.to.node, w.to.port}, w.from);
    consumer_of.emplace(PortKey{w.from.node, w.from.port}, w.to);
  }
  for (const auto& d : g.detectors()) {
    if (!producer_of.count(PortKey{d, kDetectorPort})) {
      throw WiringError("detector '" + d + "' has no incoming wire");
    }
  }

  // Kahn's algorithm over modules; sources sit at step 0.
  std::map<std::string, int> step;
  std::map<std::string, int> pending;
  std::map<std::string, std::vector<std::string>> dependents;
  for (const auto& [name, decl] : g.modules()) {
    const ModuleType& type = *find_module_type(decl.type);
    int count = 0;
    for (const auto& port : type.in_ports) {
      auto it = producer_of.find(PortKey{name, port});
      if (it == producer_of.end() || !g.modules().count(it->second.node)) continue;
      dependents[it->second.node].push_back(name);
      ++count;
    }
    pending[name] = count;
  }
  std::set<std::string> ready;
  for (const auto& [name, count] : pending) {
    if (count == 0) ready.insert(name);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    const std::string name = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(name);
    int s = 0;
    const ModuleType& type = *find_module_type(g.modules().at(name).type);
    for (const auto& port : type.in_ports) {
      auto it = producer_of.find(PortKey{name, port});
      if (it == producer_of.end()) continue;
      auto ps = step.find(it->second.node);
      s = std::max(s, ps == step.end() ? 0 : ps->second);
    }
    step[name] = s + 1;
    for (const auto& d : dependents[name]) {
      if (--pending[d] == 0) ready.insert(d);
    }
  }
  if (order.size() != g.modules().size()) {
    std::string stuck;
    for (const auto& [name, count] : pending) {
      if (count > 0) stuck += (stuck.empty() ? "" : ", ") + name;
    }
    throw CycleError("network contains a cycle through: " + stuck);
  }

  int final_step = 1;
  for (const auto& [name, s] : step) final_step = std::max(final_step, s + 1);

  // Lifetimes of every produced port; unconsumed outputs become detectors.
  std::vector<PortInfo> ports;
  std::vector<std::string> implicit_detectors;
  auto add_port = [&](const std::string& owner, const std::string& port, int index, int birth) {
    PortInfo p{owner, port, index, birth, final_step};
    auto it = consumer_of.find(PortKey{owner, port});
    if (it == consumer_of.end()) {
      implicit_detectors.push_back(owner + "." + port);
    } else if (g.modules().count(it->second.node)) {
      p.death = step.at(it->second.node);
    }
    ports.push_back(std::move(p));
  };
  for (const auto& s : g.sources()) add_port(s, kSourcePort, 0, 0);
  for (const auto& [name, decl] : g.modules()) {
    const ModuleType& type = *find_module_type(decl.type);
    for (std::size_t j = 0; j < type.out_ports.size(); ++j) {
      add_port(name, type.out_ports[j], static_cast<int>(j), step.at(name));
    }
  }

  Schedule schedule;
  // Final register: detector qubits in name order.
  std::vector<std::string> final_names(g.detectors().begin(), g.detectors().end());
  final_names.insert(final_names.end(), implicit_detectors.begin(), implicit_detectors.end());
  std::sort(final_names.begin(), final_names.end());
  schedule.detectors = final_names;

  // position[t][port] = 1-based qubit index at time t.
  std::vector<std::map<PortKey, Rank>> position(static_cast<std::size_t>(final_step) + 1);
  schedule.registers.resize(static_cast<std::size_t>(final_step) + 1);
  for (int t = 0; t < final_step; ++t) {
    std::vector<const PortInfo*> live;
    for (const auto& p : ports) {
      if (p.birth <= t && t < p.death) live.push_back(&p);
    }
    std::sort(live.begin(), live.end(), [](const PortInfo* a, const PortInfo* b) {
      return std::tie(a->birth, a->owner, a->port_index) < std::tie(b->birth, b->owner, b->port_index);
    });
    auto& reg = schedule.registers[static_cast<std::size_t>(t)];
    for (const auto* p : live) {
      reg.push_back({p->owner, p->port});
      position[static_cast<std::size_t>(t)][PortKey{p->owner, p->port}] = static_cast<Rank>(reg.size());
    }
  }
  for (const auto& name : final_names) {
    const auto dot = name.find('.');
    const QubitLabel label = dot == std::string::npos
                                 ? QubitLabel{name, kDetectorPort}
                                 : QubitLabel{name.substr(0, dot), name.substr(dot + 1)};
    schedule.registers.back().push_back(label);
  }
  for (std::size_t q = 0; q < final_names.size(); ++q) {
    position.back()[PortKey{"#detector", final_names[q]}] = static_cast<Rank>(q + 1);
  }

  const auto wire_action = optics::wire();
  for (int t = 1; t <= final_step; ++t) {
    const auto& before = position[static_cast<std::size_t>(t - 1)];
    const auto& after = position[static_cast<std::size_t>(t)];
    std::vector<ModuleAction> actions;

    for (const auto& name : order) {
      if (step.at(name) != t) continue;
      const auto& decl = g.modules().at(name);
      const ModuleType& type = *find_module_type(decl.type);
      std::vector<bool> wired;
      std::vector<Rank> in_qubits;
      for (const auto& port : type.in_ports) {
        auto it = producer_of.find(PortKey{name, port});
        wired.push_back(it != producer_of.end());
        if (it != producer_of.end()) in_qubits.push_back(before.at(PortKey{it->second.node, it->second.port}));
      }
      std::vector<Rank> out_qubits;
      for (const auto& port : type.out_ports) out_qubits.push_back(after.at(PortKey{name, port}));
      ModuleAction action = build_action(type, decl.params);
      if (std::find(wired.begin(), wired.end(), false) != wired.end()) action = action.restricted(wired);
      actions.push_back(action.relabeled(name).placed(std::move(in_qubits), std::move(out_qubits)));
    }

    for (const auto& p : ports) {
      if (p.birth <= t - 1 && p.death > t) {
        const PortKey key{p.owner, p.port};
        actions.push_back(wire_action.relabeled("wire:" + p.owner + "." + p.port)
                              .placed({before.at(key)}, {after.at(key)}));
      }
    }

    if (t == final_step) {
      for (const auto& name : final_names) {
        const auto dot = name.find('.');
        Endpoint src;
        if (dot == std::string::npos) {
          src = producer_of.at(PortKey{name, kDetectorPort});
        } else {
          src = Endpoint{name.substr(0, dot), name.substr(dot + 1)};
        }
        actions.push_back(wire_action.relabeled("detect:" + name)
                              .placed({before.at(PortKey{src.node, src.port})},
                                      {after.at(PortKey{"#detector", name})}));
      }
    }

    schedule.stages.push_back(StageMap::local(
        static_cast<Rank>(schedule.registers[static_cast<std::size_t>(t - 1)].size()),
        static_cast<Rank>(schedule.registers[static_cast<std::size_t>(t)].size()), std::move(actions)));
  }
  return schedule;
}

Labstate evaluate(const Schedule& s) {
  const Rank rank = s.initial_rank();
  Labstate initial = Labstate::basis(rank, dimension(rank) - 1);
  Labstate final_state = evolve(s.stages, initial);
  final_state.prune(kPruneThreshold);
  return final_state;
}

double outcome_probability(const Schedule& s, const Labstate& final_state,
                           const std::vector<std::string>& fired) {
  return std::norm(final_state.amplitude(s.outcome_index(fired)));
}

std::vector<BasisIndex> reported_outcomes(const Schedule& s, const Labstate& final_state) {
  std::set<BasisIndex> keys;
  for (Rank q = 1; q <= s.final_rank(); ++q) keys.insert(BasisIndex{1} << (q - 1));
  for (const auto& [k, a] : final_state) keys.insert(k);
  std::vector<BasisIndex> out(keys.begin(), keys.end());
  std::stable_sort(out.begin(), out.end(), [](BasisIndex a, BasisIndex b) {
    return std::make_pair(signal_class(a), a) < std::make_pair(signal_class(b), b);
  });
  return out;
}

SweepTable sweep(const NetworkGraph& g, const Bindings& fixed, const std::string& param,
                 const std::vector<double>& values) {
  if (!g.parameter_names().count(param)) {
    throw NameError("sweep parameter $" + param + " is not referenced by any module");
  }
  SweepTable table;
  table.param = param;
  table.values = values;

  std::vector<Labstate> finals;
  std::set<BasisIndex> columns;
  std::optional<Schedule> last;
  for (double v : values) {
    Bindings b = fixed;
    b[param] = v;
    Schedule sched = compile(qdn::bind(g, b));
    finals.push_back(evaluate(sched));
    for (BasisIndex k : reported_outcomes(sched, finals.back())) columns.insert(k);
    last = std::move(sched);
  }
  if (!last) return table;
  table.detectors = last->detectors;
  table.outcomes.assign(columns.begin(), columns.end());
  std::stable_sort(table.outcomes.begin(), table.outcomes.end(), [](BasisIndex a, BasisIndex b) {
    return std::make_pair(signal_class(a), a) < std::make_pair(signal_class(b), b);
  });
  for (const auto& f : finals) {
    std::vector<double> row;
    row.reserve(table.outcomes.size());
    for (BasisIndex k : table.outcomes) row.push_back(std::norm(f.amplitude(k)));
    table.probabilities.push_back(std::move(row));
  }
  return table;
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  if (count < 2) throw ParamError("linspace: count must be at least 2");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace qdn
