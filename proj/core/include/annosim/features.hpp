#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace annosim {

using FeatureVector = std::vector<double>;

/// Seeded signed feature hashing over lowercase whitespace tokens,
/// L2-normalized unless the text has no tokens.
FeatureVector featurize_hashed(const std::string& text, int dim,
                               std::uint64_t seed);

/// Word -> vector table loaded from a text file (one word plus `dim` numbers
/// per line, whitespace-separated).
class WordVectorTable {
 public:
  static WordVectorTable load(const std::string& path);

  int dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }
  const FeatureVector* find(const std::string& word) const;
  void insert(const std::string& word, FeatureVector vec);

 private:
  int dim_ = 0;
  std::unordered_map<std::string, FeatureVector> table_;
};

/// Mean of the vectors of in-vocabulary tokens; zero vector if none.
FeatureVector featurize_pretrained(const std::string& text,
                                   const WordVectorTable& table);

enum class FeaturizerKind { kHashed, kPretrained };

/// Uniform callable used by the classifier, samplers, and simulation loop.
class Featurizer {
 public:
  static Featurizer hashed(int dim, std::uint64_t seed);
  static Featurizer pretrained(WordVectorTable table);

  FeatureVector operator()(const std::string& text) const;
  int dim() const { return dim_; }
  FeaturizerKind kind() const { return kind_; }

 private:
  Featurizer() = default;
  FeaturizerKind kind_ = FeaturizerKind::kHashed;
  int dim_ = 0;
  std::uint64_t seed_ = 0;
  WordVectorTable table_;
};

}  // namespace annosim
