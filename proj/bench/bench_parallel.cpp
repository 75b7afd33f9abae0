// Serial reference against the OpenMP path for the data-parallel kernels.
// Arg 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include "gecqe/metaeval.hpp"
#include "gecqe/random.hpp"
#include "gecqe/scoring.hpp"
#include "gecqe/training.hpp"

namespace {

using namespace gecqe;

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

Vocab words() {
  std::vector<std::string> t{"<unk>"};
  for (int i = 0; i < 200; ++i) t.push_back("w" + std::to_string(i));
  return Vocab(t);
}

Tokens sentence(Rng& rng) {
  Tokens t;
  const std::size_t n = 8 + rng.uniform_index(17);
  for (std::size_t i = 0; i < n; ++i) t.push_back("w" + std::to_string(rng.uniform_index(200)));
  return t;
}

EncoderCheckpoint model() {
  auto ck = EncoderCheckpoint::initialize({64, 2, 1}, words());
  ck.add_ged_head(TaxonomyName::op4);
  ck.add_qe_head();
  return ck;
}

void BM_GedLoss(benchmark::State& state) {
  const auto ck = model();
  Rng rng(1);
  std::vector<LabeledSentence> batch(256);
  for (auto& s : batch) {
    s.taxonomy = TaxonomyName::op4;
    s.tokens = sentence(rng);
    for (std::size_t i = 0; i < s.tokens.size(); ++i) s.labels.push_back(rng.uniform_index(4));
  }
  for (auto _ : state) benchmark::DoNotOptimize(ged_loss(ck, batch, exec_of(state)));
}

void BM_QeLoss(benchmark::State& state) {
  const auto ck = model();
  Rng rng(2);
  std::vector<PairExample> batch(256);
  for (auto& p : batch) {
    p.source = sentence(rng);
    p.s_plus = sentence(rng);
    p.s_minus = sentence(rng);
    p.q_plus = 1.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(qe_loss(ck, batch, exec_of(state)));
}

JudgmentSet judgments(std::size_t sources, std::size_t systems) {
  Rng rng(3);
  JudgmentSet j;
  for (std::size_t s = 0; s < systems; ++s) j.systems.push_back("sys" + std::to_string(s));
  for (std::size_t i = 0; i < sources; ++i) {
    const std::string id = "s" + std::to_string(i);
    j.sources.push_back(Sentence{id, sentence(rng)});
    for (const auto& sys : j.systems) j.hypotheses[{id, sys}] = Sentence{id, sentence(rng)};
    for (int k = 0; k < 6; ++k) {
      const std::size_t a = rng.uniform_index(systems), b = (a + 1 + rng.uniform_index(systems - 1)) % systems;
      j.human_pairwise.push_back({id, j.systems[a], j.systems[b], rng.bernoulli(0.5) ? Verdict::a_better : Verdict::b_better});
    }
  }
  return j;
}

void BM_ScoreCorpus(benchmark::State& state) {
  const auto ck = model();
  const auto j = judgments(200, 12);
  const ScoringSetup setup{&ck, nullptr, ScoreMode::filter_free, 0.9};
  for (auto _ : state) benchmark::DoNotOptimize(score_corpus(setup, j, exec_of(state)));
}

void BM_Bootstrap(benchmark::State& state) {
  const auto j = judgments(1000, 12);
  Rng rng(4);
  ScoreTable a, b;
  for (const auto& [key, hyp] : j.hypotheses) {
    a[key] = rng.uniform01();
    b[key] = rng.uniform01();
  }
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_compare(a, b, j.human_pairwise, 1000, 5, exec_of(state)));
}

BENCHMARK(BM_GedLoss)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QeLoss)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreCorpus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bootstrap)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
