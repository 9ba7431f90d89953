#pragma once

#include <memory>
#include <string>

#include "oil/sim.hpp"

namespace oil {

// Anything that maps an observation to controls. Teachers carry PID memory, so
// every rollout works on its own clone and calls reset() at the start.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual void reset() {}
  virtual ControlVector act(const Observation& obs, const SimConfig& cfg) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;
  virtual std::string name() const = 0;
};

// Emits the same controls everywhere. Handy as a toy teacher.
class ConstantPolicy final : public Policy {
 public:
  explicit ConstantPolicy(ControlVector u, std::string label = "constant")
      : u_(u), label_(std::move(label)) {}

  ControlVector act(const Observation&, const SimConfig&) override { return u_; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<ConstantPolicy>(*this); }
  std::string name() const override { return label_; }

 private:
  ControlVector u_;
  std::string label_;
};

}  // namespace oil
