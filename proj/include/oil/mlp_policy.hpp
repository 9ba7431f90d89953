#pragma once

#include <optional>
#include <string>

#include "oil/mlp.hpp"
#include "oil/policy.hpp"

namespace oil {

// Wraps a network as a policy. Holds a non-owning pointer: the net must outlive
// the policy and its clones. With `fixed_throttle` the net drives only the
// steering channel of the car and the throttle is held constant.
class MlpPolicy final : public Policy {
 public:
  MlpPolicy(const Mlp& net, std::string name, std::optional<double> fixed_throttle = std::nullopt)
      : net_(&net), name_(std::move(name)), fixed_throttle_(fixed_throttle) {}

  ControlVector act(const Observation& obs, const SimConfig& cfg) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<MlpPolicy>(*this); }
  std::string name() const override { return name_; }

  const Mlp& net() const { return *net_; }

 private:
  const Mlp* net_;
  std::string name_;
  std::optional<double> fixed_throttle_;
};

// Raw network outputs mapped onto controls (unclamped).
ControlVector controls_from_output(std::span<const double> out, VehicleKind kind,
                                   std::optional<double> fixed_throttle = std::nullopt);

}  // namespace oil
