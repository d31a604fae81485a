#include "annosim/types.hpp"

#include <set>
#include <stdexcept>

#include "annosim/util.hpp"

namespace annosim {

LabelSet::LabelSet(std::vector<std::string> names) {
  if (names.size() < 2) {
    throw std::invalid_argument("LabelSet requires at least 2 classes");
  }
  std::set<std::string> seen;
  int index = 1;
  for (auto& name : names) {
    if (!seen.insert(name).second) {
      throw std::invalid_argument("duplicate class name: " + name);
    }
    labels_.push_back({index++, std::move(name)});
  }
}

const ClassLabel& LabelSet::at(int index) const {
  if (index < 1 || index > size()) {
    throw std::out_of_range(strf("class index %d out of range [1, %d]", index,
                                 size()));
  }
  return labels_[static_cast<std::size_t>(index - 1)];
}

int LabelSet::index_of(std::string_view name) const {
  for (const auto& label : labels_) {
    if (label.name == name) return label.index;
  }
  // "cN" shorthand and bare numeric indices
  std::string s(name);
  if (!s.empty() && (s[0] == 'c' || s[0] == 'C')) s = s.substr(1);
  try {
    std::size_t pos = 0;
    int idx = std::stoi(s, &pos);
    if (pos == s.size() && idx >= 1 && idx <= size()) return idx;
  } catch (const std::exception&) {
  }
  return 0;
}

std::string LabelSet::valid_names() const {
  std::string out;
  for (const auto& label : labels_) {
    if (!out.empty()) out += ", ";
    out += label.name;
  }
  return out;
}

}  // namespace annosim
