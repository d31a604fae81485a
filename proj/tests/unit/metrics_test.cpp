#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "annosim/metrics.hpp"
#include "annosim/util.hpp"
#include "support/oracles.hpp"

using namespace annosim;

TEST_CASE("perfect ranking gives AUC 1, inverted gives 0") {
  const std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
  CHECK(roc_auc(scores, {1, 1, 0, 0}) == 1.0);
  CHECK(roc_auc(scores, {0, 0, 1, 1}) == 0.0);
}

TEST_CASE("single inversion on four points") {
  // pairs: (0.8 vs 0.6) correct, (0.8 vs 0.3) correct,
  //        (0.4 vs 0.6) wrong,   (0.4 vs 0.3) correct  -> 3/4
  const std::vector<double> scores = {0.8, 0.4, 0.6, 0.3};
  const std::vector<int> labels = {1, 1, 0, 0};
  CHECK(roc_auc(scores, labels) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(roc_auc(scores, labels) ==
        doctest::Approx(annosim::testing::brute_force_auc(scores, labels))
            .epsilon(1e-12));
}

TEST_CASE("ties count half") {
  const std::vector<double> scores = {0.5, 0.5, 0.5, 0.9};
  const std::vector<int> labels = {1, 0, 0, 1};
  // positive 0.9 beats both negatives; positive 0.5 ties both -> (2 + 1) / 4
  CHECK(roc_auc(scores, labels) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(roc_auc({0.5, 0.5}, {1, 0}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("rank method equals brute-force pair counting on random data") {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    const int n = 3 + static_cast<int>(rng.bounded(60));
    int pos = 0;
    for (int i = 0; i < n; ++i) {
      // coarse grid to force plenty of ties
      scores.push_back(static_cast<double>(rng.bounded(8)) / 8.0);
      labels.push_back(rng.next_double() < 0.4 ? 1 : 0);
      pos += labels.back();
    }
    if (pos == 0 || pos == n) {
      labels[0] = 1 - labels[0];
    }
    CHECK(roc_auc(scores, labels) ==
          doctest::Approx(annosim::testing::brute_force_auc(scores, labels))
              .epsilon(1e-12));
  }
}

TEST_CASE("random scores hover near one half") {
  Rng rng(7);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 4000; ++i) {
    scores.push_back(rng.next_double());
    labels.push_back(i % 2);
  }
  CHECK(roc_auc(scores, labels) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("roc_auc input validation") {
  CHECK_THROWS_AS(roc_auc({0.5, 0.6}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(roc_auc({0.5, 0.6}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(roc_auc({0.5}, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(roc_auc({0.5, 0.6}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(roc_auc({}, {}), std::invalid_argument);
}

TEST_CASE("per-class F1 on a hand confusion") {
  // truth:     1 1 2 2 3
  // predicted: 1 2 2 2 1
  const std::vector<int> truth = {1, 1, 2, 2, 3};
  const std::vector<int> pred = {1, 2, 2, 2, 1};
  const auto f1 = per_class_f1(truth, pred, 3);
  REQUIRE(f1.size() == 3);
  // class 1: tp=1 fp=1 fn=1 -> 2/4
  CHECK(f1[0] == doctest::Approx(0.5).epsilon(1e-12));
  // class 2: tp=2 fp=1 fn=0 -> 4/5
  CHECK(f1[1] == doctest::Approx(0.8).epsilon(1e-12));
  // class 3: tp=0 fp=0 fn=1 -> 0
  CHECK(f1[2] == 0.0);
}

TEST_CASE("class absent from truth and predictions scores F1 of 1") {
  const auto f1 = per_class_f1({1, 1}, {1, 1}, 3);
  CHECK(f1[0] == 1.0);
  CHECK(f1[1] == 1.0);  // nothing to get wrong
  CHECK(f1[2] == 1.0);
}

TEST_CASE("perfect singleton prediction") {
  const auto f1 = per_class_f1({2}, {2}, 2);
  CHECK(f1[1] == 1.0);
}

TEST_CASE("evaluate reports accuracy, macro scores, and missing classes") {
  // 2-dim, 3 classes; weights route x[0] to class 1, x[1] to class 2
  ClassifierConfig cfg;
  OnlineClassifier model(3, 2, cfg, 1);
  model.weights() = {4.0, 0.0, 0.0, 4.0, -1.0, -1.0};

  LabelSet labels({"a", "b", "c"});
  std::vector<StreamInstance> test;
  auto add = [&test](const char* id, int cls) {
    StreamInstance s;
    s.id = id;
    s.text = id;
    s.true_class = cls;
    test.push_back(s);
  };
  add("one hot", 1);
  add("two hot", 2);
  add("one also", 1);

  const auto feat = Featurizer::hashed(2, 1);
  const EvalReport report = evaluate(model, test, feat, 3);
  CHECK(report.accuracy >= 0.0);
  CHECK(report.accuracy <= 1.0);
  // class 3 never appears in the truth
  REQUIRE(report.missing_classes == std::vector<int>{3});
  CHECK(report.per_class_auc.count(3) == 0);
  CHECK(report.per_class_f1.count(3) == 0);
  CHECK(report.per_class_auc.count(1) == 1);
  CHECK(report.per_class_auc.count(2) == 1);

  // macro values average exactly the per-class maps
  double mean_auc = 0.0;
  for (const auto& [cls, v] : report.per_class_auc) mean_auc += v;
  mean_auc /= static_cast<double>(report.per_class_auc.size());
  CHECK(report.macro_auc == doctest::Approx(mean_auc).epsilon(1e-12));
  double mean_f1 = 0.0;
  for (const auto& [cls, v] : report.per_class_f1) mean_f1 += v;
  mean_f1 /= static_cast<double>(report.per_class_f1.size());
  CHECK(report.macro_f1 == doctest::Approx(mean_f1).epsilon(1e-12));
}

TEST_CASE("evaluate needs at least two present classes") {
  ClassifierConfig cfg;
  OnlineClassifier model(3, 2, cfg, 1);
  const auto feat = Featurizer::hashed(2, 1);
  StreamInstance s;
  s.id = "x";
  s.text = "just one";
  s.true_class = 1;
  CHECK_THROWS_AS(evaluate(model, {s}, feat, 3), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(model, {}, feat, 3), std::invalid_argument);
}

TEST_CASE("a separable test set evaluates cleanly") {
  // train a tiny model on its own test data; near-perfect AUC expected
  ClassifierConfig cfg;
  cfg.warmup_epochs = 30;
  OnlineClassifier model(2, 16, cfg, 3);
  const auto feat = Featurizer::hashed(16, 1);

  std::vector<StreamInstance> data;
  std::vector<std::pair<FeatureVector, int>> pool;
  const char* words1[] = {"flood water rising", "flood damage street",
                          "water main flood"};
  const char* words2[] = {"volunteers needed shelter", "donate blood shelter",
                          "shelter volunteers organize"};
  int id = 0;
  for (const char* t : words1) {
    StreamInstance s;
    s.id = "p" + std::to_string(id++);
    s.text = t;
    s.true_class = 1;
    data.push_back(s);
    pool.push_back({feat(t), 1});
  }
  for (const char* t : words2) {
    StreamInstance s;
    s.id = "p" + std::to_string(id++);
    s.text = t;
    s.true_class = 2;
    data.push_back(s);
    pool.push_back({feat(t), 2});
  }
  model.fit_warmup(pool);
  const EvalReport report = evaluate(model, data, feat, 2);
  CHECK(report.accuracy == 1.0);
  CHECK(report.macro_auc == 1.0);
  CHECK(report.macro_f1 == 1.0);
  CHECK(report.missing_classes.empty());
}
