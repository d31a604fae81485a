// Microbenchmarks for the hot paths of the interval loop: featurization,
// prediction, per-annotation updates, error-matrix maintenance, and the decay
// evaluation itself.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "annosim/classifier.hpp"
#include "annosim/decay.hpp"
#include "annosim/drift_stream.hpp"
#include "annosim/error_matrix.hpp"
#include "annosim/features.hpp"
#include "annosim/metrics.hpp"
#include "annosim/oracle.hpp"
#include "annosim/util.hpp"

namespace {

using namespace annosim;

std::vector<StreamInstance> bench_stream(int segments, int per_segment) {
  return generate_drift_stream(default_drift_spec(segments, per_segment), 7);
}

OnlineClassifier bench_model(const Featurizer& featurize,
                             const std::vector<StreamInstance>& data) {
  OnlineClassifier model(4, featurize.dim(), {}, 11);
  std::vector<std::pair<FeatureVector, int>> pool;
  for (int i = 0; i < 80 && i < static_cast<int>(data.size()); ++i) {
    pool.emplace_back(featurize(data[static_cast<std::size_t>(i)].text),
                      data[static_cast<std::size_t>(i)].true_class);
  }
  model.fit_warmup(pool);
  return model;
}

void BM_FeaturizeHashed(benchmark::State& state) {
  const auto data = bench_stream(4, 50);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(featurize_hashed(data[i % data.size()].text, 256, 1));
    ++i;
  }
}
BENCHMARK(BM_FeaturizeHashed);

void BM_PredictProba(benchmark::State& state) {
  const auto data = bench_stream(4, 50);
  const Featurizer featurize = Featurizer::hashed(256, 1);
  const OnlineClassifier model = bench_model(featurize, data);
  std::vector<FeatureVector> vecs;
  for (const auto& inst : data) vecs.push_back(featurize(inst.text));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict_proba(vecs[i % vecs.size()]));
    ++i;
  }
}
BENCHMARK(BM_PredictProba);

void BM_PartialUpdate(benchmark::State& state) {
  const auto data = bench_stream(4, 50);
  const Featurizer featurize = Featurizer::hashed(256, 1);
  OnlineClassifier model = bench_model(featurize, data);
  std::vector<FeatureVector> vecs;
  for (const auto& inst : data) vecs.push_back(featurize(inst.text));
  std::size_t i = 0;
  for (auto _ : state) {
    model.partial_update(vecs[i % vecs.size()],
                         data[i % data.size()].true_class);
    ++i;
  }
}
BENCHMARK(BM_PartialUpdate);

void BM_ErrorMatrixAdd(benchmark::State& state) {
  const auto data = bench_stream(4, 50);
  const Featurizer featurize = Featurizer::hashed(256, 1);
  const OnlineClassifier model = bench_model(featurize, data);
  std::size_t i = 0;
  ErrorMatrix matrix(4);
  int interval = 1;
  matrix.begin_interval(interval);
  for (auto _ : state) {
    if (i > 0 && i % 36 == 0) matrix.begin_interval(++interval);
    const auto& inst = data[i % data.size()];
    matrix.add_annotation(inst, inst.true_class, model, featurize);
    ++i;
  }
}
BENCHMARK(BM_ErrorMatrixAdd);

void BM_DecayScore(benchmark::State& state) {
  const DecayParams params = decay_preset(DecayPreset::kSlow);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decaying_score(params, t));
    t += 1.0;
    if (t > 500.0) t = 0.0;
  }
}
BENCHMARK(BM_DecayScore);

void BM_Evaluate(benchmark::State& state) {
  const auto data = bench_stream(4, 60);
  const Featurizer featurize = Featurizer::hashed(256, 1);
  const OnlineClassifier model = bench_model(featurize, data);
  const std::vector<StreamInstance> test(data.begin(), data.begin() + 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(model, test, featurize, 4));
  }
}
BENCHMARK(BM_Evaluate);

}  // namespace

BENCHMARK_MAIN();
