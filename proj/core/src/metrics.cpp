#include "annosim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include "annosim/util.hpp"

namespace annosim {

double roc_auc(const std::vector<double>& scores,
               const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("scores and labels differ in length");
  }
  std::size_t pos = 0;
  std::size_t neg = 0;
  for (int y : labels) {
    if (y == 1) {
      ++pos;
    } else if (y == 0) {
      ++neg;
    } else {
      throw std::invalid_argument("labels must be 0 or 1");
    }
  }
  if (pos == 0 || neg == 0) {
    throw std::invalid_argument("AUC needs at least one positive and one negative");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Midpoint ranks for tied scores (1-based), then the Mann-Whitney identity.
  std::vector<double> rank(scores.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double rank_sum = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] == 1) rank_sum += rank[k];
  }
  const double p = static_cast<double>(pos);
  const double n = static_cast<double>(neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

std::vector<double> per_class_f1(const std::vector<int>& truth,
                                 const std::vector<int>& predicted,
                                 int num_classes) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("truth and predictions differ in length");
  }
  std::vector<long> tp(static_cast<std::size_t>(num_classes), 0);
  std::vector<long> fp(static_cast<std::size_t>(num_classes), 0);
  std::vector<long> fn(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    if (t < 1 || t > num_classes || p < 1 || p > num_classes) {
      throw std::invalid_argument("class index out of range");
    }
    if (t == p) {
      ++tp[static_cast<std::size_t>(t - 1)];
    } else {
      ++fn[static_cast<std::size_t>(t - 1)];
      ++fp[static_cast<std::size_t>(p - 1)];
    }
  }
  std::vector<double> f1(static_cast<std::size_t>(num_classes), 0.0);
  for (int c = 0; c < num_classes; ++c) {
    const auto i = static_cast<std::size_t>(c);
    if (tp[i] == 0 && fp[i] == 0 && fn[i] == 0) {
      f1[i] = 1.0;  // class never appears on either side
      continue;
    }
    const double denom = 2.0 * tp[i] + fp[i] + fn[i];
    f1[i] = denom > 0.0 ? 2.0 * tp[i] / denom : 0.0;
  }
  return f1;
}

EvalReport evaluate(const OnlineClassifier& model,
                    const std::vector<StreamInstance>& test,
                    const Featurizer& featurize, int num_classes) {
  if (test.empty()) throw std::invalid_argument("test set is empty");
  std::set<int> present;
  for (const auto& inst : test) present.insert(inst.true_class);
  if (present.size() < 2) {
    throw std::invalid_argument("test set must cover at least two classes");
  }

  std::vector<int> truth;
  std::vector<int> predicted;
  std::vector<std::vector<double>> probas;
  truth.reserve(test.size());
  predicted.reserve(test.size());
  probas.reserve(test.size());
  for (const auto& inst : test) {
    const FeatureVector x = featurize(inst.text);
    probas.push_back(model.predict_proba(x));
    predicted.push_back(model.predict(x));
    truth.push_back(inst.true_class);
  }

  EvalReport report;
  long correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i]) ++correct;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

  const std::vector<double> f1 = per_class_f1(truth, predicted, num_classes);
  for (int c = 1; c <= num_classes; ++c) {
    if (!present.count(c)) {
      report.missing_classes.push_back(c);
      std::fprintf(stderr,
                   "warning: class %d absent from test set; excluded from macro averages\n",
                   c);
      continue;
    }
    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(truth.size());
    labels.reserve(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      scores.push_back(probas[i][static_cast<std::size_t>(c - 1)]);
      labels.push_back(truth[i] == c ? 1 : 0);
    }
    report.per_class_auc[c] = roc_auc(scores, labels);
    report.per_class_f1[c] = f1[static_cast<std::size_t>(c - 1)];
  }

  double auc_sum = 0.0;
  double f1_sum = 0.0;
  for (const auto& [c, v] : report.per_class_auc) auc_sum += v;
  for (const auto& [c, v] : report.per_class_f1) f1_sum += v;
  report.macro_auc = auc_sum / static_cast<double>(report.per_class_auc.size());
  report.macro_f1 = f1_sum / static_cast<double>(report.per_class_f1.size());
  return report;
}

}  // namespace annosim
