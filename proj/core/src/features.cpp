#include "annosim/features.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "annosim/util.hpp"

namespace annosim {

FeatureVector featurize_hashed(const std::string& text, int dim,
                               std::uint64_t seed) {
  if (dim <= 0) throw std::invalid_argument("feature dim must be positive");
  FeatureVector vec(static_cast<std::size_t>(dim), 0.0);
  const auto tokens = tokenize(text);
  if (tokens.empty()) return vec;
  for (const auto& tok : tokens) {
    const std::uint64_t h = fnv1a64(tok, seed);
    // Low bits pick the bucket, bit 63 picks the sign. Independent enough
    // for a 64-bit avalanching hash.
    const std::size_t bucket = h % static_cast<std::uint64_t>(dim);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    vec[bucket] += sign;
  }
  double norm = 0.0;
  for (double v : vec) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& v : vec) v /= norm;
  }
  return vec;
}

WordVectorTable WordVectorTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word vector file: " + path);
  WordVectorTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    FeatureVector vec;
    double value = 0.0;
    while (ss >> value) vec.push_back(value);
    if (vec.empty()) {
      throw IoError(strf("word vector file %s line %zu has no values",
                         path.c_str(), line_no));
    }
    if (table.dim_ == 0) {
      table.dim_ = static_cast<int>(vec.size());
    } else if (static_cast<int>(vec.size()) != table.dim_) {
      throw IoError(strf("word vector file %s line %zu has %zu values, expected %d",
                         path.c_str(), line_no, vec.size(), table.dim_));
    }
    table.table_[lowercase(word)] = std::move(vec);
  }
  if (table.table_.empty()) {
    throw IoError("word vector file is empty: " + path);
  }
  return table;
}

const FeatureVector* WordVectorTable::find(const std::string& word) const {
  auto it = table_.find(word);
  return it == table_.end() ? nullptr : &it->second;
}

void WordVectorTable::insert(const std::string& word, FeatureVector vec) {
  if (dim_ == 0) dim_ = static_cast<int>(vec.size());
  if (static_cast<int>(vec.size()) != dim_) {
    throw std::invalid_argument("word vector dimension mismatch");
  }
  table_[lowercase(word)] = std::move(vec);
}

FeatureVector featurize_pretrained(const std::string& text,
                                   const WordVectorTable& table) {
  FeatureVector vec(static_cast<std::size_t>(table.dim()), 0.0);
  int hits = 0;
  for (const auto& tok : tokenize(text)) {
    if (const FeatureVector* wv = table.find(tok)) {
      for (std::size_t i = 0; i < vec.size(); ++i) vec[i] += (*wv)[i];
      ++hits;
    }
  }
  if (hits > 0) {
    for (double& v : vec) v /= hits;
  }
  return vec;
}

Featurizer Featurizer::hashed(int dim, std::uint64_t seed) {
  if (dim <= 0) throw std::invalid_argument("feature dim must be positive");
  Featurizer f;
  f.kind_ = FeaturizerKind::kHashed;
  f.dim_ = dim;
  f.seed_ = seed;
  return f;
}

Featurizer Featurizer::pretrained(WordVectorTable table) {
  Featurizer f;
  f.kind_ = FeaturizerKind::kPretrained;
  f.dim_ = table.dim();
  f.table_ = std::move(table);
  return f;
}

FeatureVector Featurizer::operator()(const std::string& text) const {
  if (kind_ == FeaturizerKind::kHashed) {
    return featurize_hashed(text, dim_, seed_);
  }
  return featurize_pretrained(text, table_);
}

}  // namespace annosim
