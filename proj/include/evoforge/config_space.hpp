#pragma once

// Hyperparameter spaces of controllable modules. Operator-selector parameters
// live in [0,1] and are quantized into a sub-operator index by equal-width
// bins at execution time.

#include <stdexcept>
#include <string>
#include <vector>

namespace evoforge {

inline constexpr int kMaxConfigSize = 12;  // N_max

enum class ParamRole { Continuous, OperatorSelector };

struct ParamSpec {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  double default_value = 0.5;
  ParamRole role = ParamRole::Continuous;
  // When true the default controller redraws this parameter uniformly each
  // generation ("random selection in default").
  bool random_default = false;
};

class ConfigSpace {
 public:
  ConfigSpace() = default;
  explicit ConfigSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
    validate();
  }

  int size() const { return static_cast<int>(params_.size()); }
  bool empty() const { return params_.empty(); }
  const ParamSpec& operator[](int i) const { return params_[static_cast<size_t>(i)]; }
  const std::vector<ParamSpec>& params() const { return params_; }

  std::vector<double> defaults() const {
    std::vector<double> v;
    v.reserve(params_.size());
    for (const auto& p : params_) v.push_back(p.default_value);
    return v;
  }

 private:
  void validate() const {
    if (params_.size() > static_cast<size_t>(kMaxConfigSize))
      throw std::invalid_argument("config space exceeds N_max");
    int selectors = 0;
    for (const auto& p : params_) {
      if (!(p.lower < p.upper))
        throw std::invalid_argument("config bounds must satisfy lower < upper: " + p.name);
      if (p.default_value < p.lower || p.default_value > p.upper)
        throw std::invalid_argument("config default outside bounds: " + p.name);
      if (p.role == ParamRole::OperatorSelector) ++selectors;
    }
    if (selectors > 1)
      throw std::invalid_argument("at most one operator-selector parameter");
  }

  std::vector<ParamSpec> params_;
};

// Equal-width binning of a selector value in [0,1] into {0, ..., n_ops-1}.
inline int quantize_selector(double v, int n_ops) {
  if (n_ops <= 0) throw std::invalid_argument("quantize_selector: n_ops <= 0");
  if (v <= 0.0) return 0;
  if (v >= 1.0) return n_ops - 1;
  int idx = static_cast<int>(v * n_ops);
  return idx >= n_ops ? n_ops - 1 : idx;
}

}  // namespace evoforge
