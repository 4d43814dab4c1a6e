#include <filesystem>
#include <random>

#include <benchmark/benchmark.h>

#include "qdn/dsl.hpp"
#include "qdn/evolution.hpp"
#include "qdn/network.hpp"
#include "qdn/optics.hpp"
#include "qdn/physics.hpp"

using namespace qdn;

namespace {

const std::filesystem::path kCorpus = QDN_CORPUS_DIR;

// A row of symmetric splitters on qubit pairs (1,2), (3,4), ... at the given rank.
StageMap splitter_row(Rank rank) {
  std::vector<ModuleAction> actions;
  for (Rank q = 1; q + 1 <= rank; q += 2) {
    actions.push_back(optics::symmetric_beamsplitter().placed({q, q + 1}, {q, q + 1}));
  }
  return StageMap::local(rank, rank, std::move(actions));
}

Labstate dense_state(Rank rank) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Labstate s(rank);
  for (BasisIndex k = 0; k < dimension(rank); ++k) s.set(k, {n(rng), n(rng)});
  return normalize(s);
}

void BM_ApplyStageLocal(benchmark::State& state) {
  const auto rank = static_cast<Rank>(state.range(0));
  const StageMap stage = splitter_row(rank);
  const Labstate s = dense_state(rank);
  for (auto _ : state) benchmark::DoNotOptimize(apply_stage(stage, s));
}
BENCHMARK(BM_ApplyStageLocal)->DenseRange(4, 12, 4);

void BM_ApplyStageDense(benchmark::State& state) {
  const auto rank = static_cast<Rank>(state.range(0));
  const StageMap stage = StageMap::dense(materialize(splitter_row(rank)));
  const Labstate s = dense_state(rank);
  for (auto _ : state) benchmark::DoNotOptimize(apply_stage(stage, s));
}
BENCHMARK(BM_ApplyStageDense)->DenseRange(4, 10, 2);

void BM_CompileNestedMZ(benchmark::State& state) {
  const NetworkGraph g = dsl::parse_file(kCorpus / "mz-nested.qdn");
  for (auto _ : state) benchmark::DoNotOptimize(compile(g));
}
BENCHMARK(BM_CompileNestedMZ);

void BM_EvaluateNestedMZ(benchmark::State& state) {
  const Schedule s = compile(dsl::parse_file(kCorpus / "mz-nested.qdn"));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(s));
}
BENCHMARK(BM_EvaluateNestedMZ);

void BM_DecayAmplitudes(benchmark::State& state) {
  const auto m = physics::DecayModel::explicit_alpha(std::sqrt(0.9));
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(physics::decay_amplitudes(m, n));
}
BENCHMARK(BM_DecayAmplitudes)->Range(64, 1 << 16);

}  // namespace

BENCHMARK_MAIN();
