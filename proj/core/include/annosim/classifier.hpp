#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "annosim/features.hpp"

namespace annosim {

struct ClassifierConfig {
  double learning_rate = 0.1;
  double l2 = 1e-4;          // applied to weights, not biases
  int passes_per_update = 5;
  int warmup_epochs = 50;
};

struct Gradient {
  std::vector<double> weights;  // K x dim, row-major
  std::vector<double> biases;   // K
};

/// Multinomial logistic regression trained by seeded SGD. The probability
/// outputs feed the uncertainty band test, so the model is natively
/// probabilistic rather than hinge-loss based.
class OnlineClassifier {
 public:
  OnlineClassifier(int num_classes, int dim, const ClassifierConfig& config,
                   std::uint64_t seed);

  /// Softmax over linear scores; sums to 1.
  std::vector<double> predict_proba(const FeatureVector& x) const;

  /// Argmax class (1-based); ties go to the lowest index.
  int predict(const FeatureVector& x) const;

  /// Trains warmup_epochs shuffled epochs over the pool. The pool must cover
  /// at least two classes. Deterministic per construction seed.
  void fit_warmup(const std::vector<std::pair<FeatureVector, int>>& pool);

  /// passes_per_update gradient steps on one labeled example.
  void partial_update(const FeatureVector& x, int label);

  /// Cross-entropy plus the L2 term; the quantity the SGD steps descend.
  double loss(const FeatureVector& x, int label) const;
  Gradient gradient(const FeatureVector& x, int label) const;

  int num_classes() const { return k_; }
  int dim() const { return dim_; }
  long update_count() const { return update_count_; }
  const ClassifierConfig& config() const { return config_; }

  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& biases() { return biases_; }
  const std::vector<double>& biases() const { return biases_; }

 private:
  void sgd_step(const FeatureVector& x, int label);
  std::vector<double> scores(const FeatureVector& x) const;

  int k_;
  int dim_;
  ClassifierConfig config_;
  std::uint64_t seed_;
  std::vector<double> weights_;  // K x dim, row-major
  std::vector<double> biases_;
  long update_count_ = 0;
};

}  // namespace annosim
