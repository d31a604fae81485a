#include "annosim/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "annosim/util.hpp"

namespace annosim {

OnlineClassifier::OnlineClassifier(int num_classes, int dim,
                                   const ClassifierConfig& config,
                                   std::uint64_t seed)
    : k_(num_classes), dim_(dim), config_(config), seed_(seed) {
  if (num_classes < 2) throw std::invalid_argument("need at least two classes");
  if (dim < 1) throw std::invalid_argument("feature dim must be positive");
  if (config.learning_rate < 0.0) {
    throw std::invalid_argument("learning_rate must be non-negative");
  }
  if (config.l2 < 0.0) throw std::invalid_argument("l2 must be non-negative");
  if (config.passes_per_update < 1) {
    throw std::invalid_argument("passes_per_update must be >= 1");
  }
  if (config.warmup_epochs < 1) {
    throw std::invalid_argument("warmup_epochs must be >= 1");
  }
  weights_.assign(static_cast<std::size_t>(k_) * dim_, 0.0);
  biases_.assign(static_cast<std::size_t>(k_), 0.0);
}

std::vector<double> OnlineClassifier::scores(const FeatureVector& x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("feature vector dimension mismatch");
  }
  std::vector<double> s(static_cast<std::size_t>(k_));
  for (int c = 0; c < k_; ++c) {
    const double* w = weights_.data() + static_cast<std::size_t>(c) * dim_;
    double dot = biases_[static_cast<std::size_t>(c)];
    for (int j = 0; j < dim_; ++j) dot += w[j] * x[static_cast<std::size_t>(j)];
    s[static_cast<std::size_t>(c)] = dot;
  }
  return s;
}

std::vector<double> OnlineClassifier::predict_proba(const FeatureVector& x) const {
  std::vector<double> s = scores(x);
  const double m = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double& v : s) {
    v = std::exp(v - m);
    z += v;
  }
  for (double& v : s) v /= z;
  return s;
}

int OnlineClassifier::predict(const FeatureVector& x) const {
  const std::vector<double> s = scores(x);
  int best = 0;
  for (int c = 1; c < k_; ++c) {
    if (s[static_cast<std::size_t>(c)] > s[static_cast<std::size_t>(best)]) best = c;
  }
  return best + 1;
}

double OnlineClassifier::loss(const FeatureVector& x, int label) const {
  if (label < 1 || label > k_) throw std::invalid_argument("label out of range");
  const std::vector<double> p = predict_proba(x);
  const double eps = 1e-12;
  double l = -std::log(std::max(p[static_cast<std::size_t>(label - 1)], eps));
  double reg = 0.0;
  for (double w : weights_) reg += w * w;
  return l + 0.5 * config_.l2 * reg;
}

Gradient OnlineClassifier::gradient(const FeatureVector& x, int label) const {
  if (label < 1 || label > k_) throw std::invalid_argument("label out of range");
  const std::vector<double> p = predict_proba(x);
  Gradient g;
  g.weights.assign(weights_.size(), 0.0);
  g.biases.assign(biases_.size(), 0.0);
  for (int c = 0; c < k_; ++c) {
    const double err = p[static_cast<std::size_t>(c)] - (c == label - 1 ? 1.0 : 0.0);
    double* gw = g.weights.data() + static_cast<std::size_t>(c) * dim_;
    const double* w = weights_.data() + static_cast<std::size_t>(c) * dim_;
    for (int j = 0; j < dim_; ++j) {
      gw[j] = err * x[static_cast<std::size_t>(j)] + config_.l2 * w[j];
    }
    g.biases[static_cast<std::size_t>(c)] = err;
  }
  return g;
}

void OnlineClassifier::sgd_step(const FeatureVector& x, int label) {
  const Gradient g = gradient(x, label);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    weights_[i] -= config_.learning_rate * g.weights[i];
  }
  for (std::size_t i = 0; i < biases_.size(); ++i) {
    biases_[i] -= config_.learning_rate * g.biases[i];
  }
}

void OnlineClassifier::fit_warmup(
    const std::vector<std::pair<FeatureVector, int>>& pool) {
  if (pool.empty()) throw std::invalid_argument("warm-up pool is empty");
  std::set<int> classes;
  for (const auto& [x, y] : pool) {
    if (y < 1 || y > k_) throw std::invalid_argument("label out of range");
    classes.insert(y);
  }
  if (classes.size() < 2) {
    throw std::invalid_argument("warm-up pool must cover at least two classes");
  }
  Rng rng(seed_);
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < config_.warmup_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) sgd_step(pool[i].first, pool[i].second);
  }
  ++update_count_;
}

void OnlineClassifier::partial_update(const FeatureVector& x, int label) {
  if (label < 1 || label > k_) throw std::invalid_argument("label out of range");
  for (int pass = 0; pass < config_.passes_per_update; ++pass) sgd_step(x, label);
  ++update_count_;
}

}  // namespace annosim
