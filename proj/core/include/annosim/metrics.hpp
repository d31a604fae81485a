#pragma once

#include <map>
#include <string>
#include <vector>

#include "annosim/classifier.hpp"
#include "annosim/types.hpp"

namespace annosim {

/// Test-set evaluation summary. Macro values average the per-class maps;
/// classes absent from the truth are excluded and listed in missing_classes.
struct EvalReport {
  std::map<int, double> per_class_auc;
  double macro_auc = 0.0;
  double accuracy = 0.0;
  std::map<int, double> per_class_f1;
  double macro_f1 = 0.0;
  std::vector<int> missing_classes;
};

/// One-vs-rest ROC AUC from scores, rank-based with midpoint tie handling.
/// labels are 0/1; requires at least one positive and one negative.
double roc_auc(const std::vector<double>& scores,
               const std::vector<int>& labels);

/// Per-class F1 from a multiclass confusion; truth and predictions are
/// 1-based class indices. Classes with no truth and no predictions get 1.
std::vector<double> per_class_f1(const std::vector<int>& truth,
                                 const std::vector<int>& predicted,
                                 int num_classes);

/// Scores the model on a fixed test set: per-class one-vs-rest AUC from
/// predicted probabilities, accuracy from argmax, per-class F1.
EvalReport evaluate(const OnlineClassifier& model,
                    const std::vector<StreamInstance>& test,
                    const Featurizer& featurize, int num_classes);

}  // namespace annosim
