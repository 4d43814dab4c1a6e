#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qdn::testing {
namespace {

BasisIndex local_index(BasisIndex k, const std::vector<Rank>& qubits) {
  BasisIndex out = 0;
  for (std::size_t b = 0; b < qubits.size(); ++b) {
    if (occupancy(k, qubits[b])) out |= BasisIndex{1} << b;
  }
  return out;
}

Amplitude gaussian_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  return {re, n(rng)};
}

}  // namespace

Eigen::MatrixXcd random_isometry(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Eigen::MatrixXcd g(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < rows; ++j) g(i, j) = gaussian_complex(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  const Eigen::MatrixXcd q = qr.householderQ();
  return q.leftCols(cols);
}

Labstate random_state(Rank rank, std::mt19937_64& rng, std::size_t terms) {
  const BasisIndex dim = dimension(rank);
  Labstate s(rank);
  if (terms == 0 || terms >= dim) {
    for (BasisIndex k = 0; k < dim; ++k) s.set(k, gaussian_complex(rng));
  } else {
    std::uniform_int_distribution<BasisIndex> pick(0, dim - 1);
    while (s.size() < terms) s.set(pick(rng), gaussian_complex(rng));
  }
  return normalize(s);
}

Eigen::VectorXcd to_dense(const Labstate& s) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension(s.rank())));
  for (const auto& [k, a] : s) v(static_cast<Eigen::Index>(k)) = a;
  return v;
}

Labstate from_dense(Rank rank, const Eigen::VectorXcd& v, double threshold) {
  Labstate s(rank);
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > threshold) s.set(static_cast<BasisIndex>(k), v(k));
  }
  return s;
}

Amplitude brute_force_entry(const StageMap& stage, BasisIndex out, BasisIndex in) {
  if (stage.is_dense()) {
    return stage.dense_form().matrix(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
  }
  Amplitude product{1.0, 0.0};
  for (const auto& action : stage.actions()) {
    const auto& row = action.row(local_index(in, action.in_qubits()));
    if (!row) return {};
    product *= row->amplitude(local_index(out, action.out_qubits()));
    if (product == Amplitude{}) return product;
  }
  return product;
}

Eigen::MatrixXcd brute_force_matrix(const StageMap& stage) {
  const auto rows = static_cast<Eigen::Index>(dimension(stage.out_rank()));
  const auto cols = static_cast<Eigen::Index>(dimension(stage.in_rank()));
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index i = 0; i < cols; ++i) {
      m(j, i) = brute_force_entry(stage, static_cast<BasisIndex>(j), static_cast<BasisIndex>(i));
    }
  }
  return m;
}

Eigen::VectorXcd brute_force_apply(const StageMap& stage, const Eigen::VectorXcd& v) {
  const auto rows = static_cast<Eigen::Index>(dimension(stage.out_rank()));
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(rows);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) == Amplitude{}) continue;
    for (Eigen::Index j = 0; j < rows; ++j) {
      out(j) += brute_force_entry(stage, static_cast<BasisIndex>(j), static_cast<BasisIndex>(i)) * v(i);
    }
  }
  return out;
}

namespace {

Amplitude path_sum_from(const std::vector<Eigen::MatrixXcd>& stages, const Eigen::VectorXcd& initial,
                        std::size_t depth, Eigen::Index index) {
  if (depth == 0) return initial(index);
  const Eigen::MatrixXcd& u = stages[depth - 1];
  Amplitude sum{};
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    sum += u(index, j) * path_sum_from(stages, initial, depth - 1, j);
  }
  return sum;
}

}  // namespace

Amplitude path_sum(const std::vector<Eigen::MatrixXcd>& stages, const Eigen::VectorXcd& initial,
                   Eigen::Index outcome) {
  return path_sum_from(stages, initial, stages.size(), outcome);
}

std::array<Amplitude, 4> random_beamsplitter(std::mt19937_64& rng) {
  const Eigen::MatrixXcd u = random_isometry(2, 2, rng);
  return {u(0, 0), u(1, 0), u(0, 1), u(1, 1)};
}

NetworkGraph random_network(std::mt19937_64& rng, const RandomNetworkOptions& opt) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(unit(rng) * static_cast<double>(n)) % n; };

  for (;;) {
    NetworkGraph g;
    std::vector<Endpoint> open;
    const std::size_t n_sources = 1 + below(opt.max_sources);
    for (std::size_t s = 0; s < n_sources; ++s) {
      const std::string name = "S" + std::to_string(s);
      g.add_source(name);
      open.push_back({name, kSourcePort});
    }

    const auto& types = module_types();
    const std::size_t n_modules = 1 + below(opt.max_modules);
    for (std::size_t m = 0; m < n_modules; ++m) {
      const ModuleType& type = types[below(types.size())];
      const std::string name = "M" + std::to_string(m);
      std::map<std::string, ParamValue> params;
      if (type.name == "beamsplitter") {
        const auto bs = random_beamsplitter(rng);
        params = {{"alpha", bs[0]}, {"beta", bs[1]}, {"gamma", bs[2]}, {"delta", bs[3]},
                  {"twosig", std::polar(1.0, uniform(0.0, 2 * std::numbers::pi))}};
      } else if (type.name == "mirror" || type.name == "phase") {
        params = {{"phase", uniform(0.0, 2 * std::numbers::pi)}};
      } else if (type.name == "wollaston") {
        const double theta = uniform(0.1, 1.4);
        const double a = uniform(-1.0, 1.0);
        const double b = -a * std::cos(theta) + std::sqrt(1.0 - a * a * std::sin(theta) * std::sin(theta));
        const Amplitude phase = std::polar(1.0, uniform(0.0, 2 * std::numbers::pi));
        params = {{"theta", theta}, {"alphain", a * phase}, {"betain", b * phase}};
      } else if (type.name == "brandt_bs") {
        params = {{"theta", uniform(0.0, std::numbers::pi / 2)}};
      } else if (type.name == "pairsource") {
        params = {{"theta", uniform(0.0, 2 * std::numbers::pi)}};
      }
      g.add_module(name, type.name, params);

      for (const auto& port : type.in_ports) {
        if (open.empty() || unit(rng) < 0.2) continue;
        const std::size_t pick = below(open.size());
        g.add_wire(open[pick], {name, port});
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      for (const auto& port : type.out_ports) open.push_back({name, port});
    }

    std::size_t d = 0;
    for (const auto& e : open) {
      if (unit(rng) < 0.6) {
        const std::string name = "D" + std::to_string(d++);
        g.add_detector(name);
        g.add_wire(e, {name, kDetectorPort});
      }
    }

    const Schedule sched = compile(g);
    bool fits = true;
    for (const auto& reg : sched.registers) fits = fits && reg.size() <= opt.max_rank;
    if (fits) return g;
  }
}

}  // namespace qdn::testing
