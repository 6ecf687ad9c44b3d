#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace dialeval {

// Ordered rating labels (worst to best) with their numeric values.
// The label -> value map is injective and values strictly increase.
class ScoreScale {
 public:
  ScoreScale() = default;
  // Throws SchemaError when the invariants do not hold.
  ScoreScale(std::string name, std::vector<std::string> labels, std::vector<double> values);

  // Values default to the ordinal indices 1..n.
  static ScoreScale ordinal(std::string name, std::vector<std::string> labels);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return labels_.size(); }

  std::optional<std::size_t> index_of(const std::string& label) const;
  bool contains(const std::string& label) const { return index_of(label).has_value(); }
  // Inverse map; nullopt when the value is not one of the scale values.
  std::optional<std::string> label_for(double value) const;

  double min_value() const { return values_.front(); }
  double max_value() const { return values_.back(); }

  // v' = a*v + b; requires a > 0 so ordering is kept.
  ScoreScale rescaled(double a, double b) const;

  friend bool operator==(const ScoreScale&, const ScoreScale&) = default;

 private:
  std::string name_;
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

// Three-point overall scale: Bad, Okay, Good -> 1, 2, 3.
const ScoreScale& ieval_scale();
// Five-point overall scale from Very bad to Very good -> 1..5.
const ScoreScale& fed_scale();

}  // namespace dialeval
