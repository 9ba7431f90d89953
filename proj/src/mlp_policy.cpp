#include "oil/mlp_policy.hpp"

#include "oil/errors.hpp"

namespace oil {

ControlVector controls_from_output(std::span<const double> out, VehicleKind kind, std::optional<double> fixed_throttle) {
  ControlVector u;
  if (fixed_throttle) {
    if (kind != VehicleKind::car || out.size() != 1)
      throw ContractError("a fixed throttle needs a car policy with a single steering output");
    u.ch = {*fixed_throttle, out[0], 0.0};
    return u;
  }
  if (out.size() != action_dim(kind)) throw ContractError("network output width does not match the vehicle");
  for (std::size_t i = 0; i < out.size(); ++i) u.ch[i] = out[i];
  return u;
}

ControlVector MlpPolicy::act(const Observation& obs, const SimConfig& cfg) {
  const auto features = state_features(obs, cfg);
  return controls_from_output(net_->forward(features), cfg.kind, fixed_throttle_);
}

}  // namespace oil
