#include "dialeval/scale.hpp"

#include <set>

#include "dialeval/errors.hpp"

namespace dialeval {

ScoreScale::ScoreScale(std::string name, std::vector<std::string> labels,
                       std::vector<double> values)
    : name_(std::move(name)), labels_(std::move(labels)), values_(std::move(values)) {
  if (name_.empty()) throw SchemaError("scale name is empty");
  if (labels_.empty()) throw SchemaError("scale '" + name_ + "' has no labels");
  if (labels_.size() != values_.size()) {
    throw SchemaError("scale '" + name_ + "' has " + std::to_string(labels_.size()) +
                      " labels but " + std::to_string(values_.size()) + " values");
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw SchemaError("scale '" + name_ + "' has an empty label");
    if (!seen.insert(l).second) {
      throw SchemaError("scale '" + name_ + "' repeats label '" + l + "'");
    }
  }
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (!(values_[i] > values_[i - 1])) {
      throw SchemaError("scale '" + name_ + "' values are not strictly increasing");
    }
  }
}

ScoreScale ScoreScale::ordinal(std::string name, std::vector<std::string> labels) {
  std::vector<double> values;
  for (std::size_t i = 0; i < labels.size(); ++i) values.push_back(static_cast<double>(i + 1));
  return ScoreScale(std::move(name), std::move(labels), std::move(values));
}

std::optional<std::size_t> ScoreScale::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

std::optional<std::string> ScoreScale::label_for(double value) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == value) return labels_[i];
  }
  return std::nullopt;
}

ScoreScale ScoreScale::rescaled(double a, double b) const {
  if (!(a > 0)) throw SchemaError("rescale factor must be positive");
  std::vector<double> v;
  v.reserve(values_.size());
  for (double x : values_) v.push_back(a * x + b);
  return ScoreScale(name_, labels_, std::move(v));
}

const ScoreScale& ieval_scale() {
  static const ScoreScale scale = ScoreScale::ordinal("ieval-3", {"Bad", "Okay", "Good"});
  return scale;
}

const ScoreScale& fed_scale() {
  static const ScoreScale scale =
      ScoreScale::ordinal("fed-5", {"Very bad", "Bad", "Neutral", "Good", "Very good"});
  return scale;
}

}  // namespace dialeval
