#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace oil {

// Fully connected network: tanh on hidden layers, identity on the output.
// All parameters live in one flat vector, layer by layer, each layer as a
// row-major (out x in) weight block followed by its bias.
class Mlp {
 public:
  Mlp() = default;
  // Zero-initialised parameters. Throws ContractError on fewer than two dims
  // or a zero-width layer.
  explicit Mlp(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_dim() const { return dims_.front(); }
  std::size_t output_dim() const { return dims_.back(); }
  std::size_t layer_count() const { return dims_.size() - 1; }
  std::size_t param_count() const { return params_.size(); }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + dims_[layer] * dims_[layer + 1];
  }

  // Inference pass, no dropout. Throws ContractError on a size mismatch.
  std::vector<double> forward(std::span<const double> x) const;

  bool all_finite() const;
  bool operator==(const Mlp&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// [input, 64, 32, 16, output]
std::vector<std::size_t> control_net_dims(std::size_t input_dim, std::size_t output_dim);

// Weights ~ U(-sqrt(3/fan_in), sqrt(3/fan_in)) (unit-variance inputs give
// unit-order pre-activations); biases zero.
Mlp init_weights(std::vector<std::size_t> dims, std::uint64_t seed);

// Per-sample activations recorded for backpropagation.
struct Tape {
  std::vector<std::vector<double>> act;   // act[0] = input, act[l+1] = output of layer l (post mask)
  std::vector<std::vector<double>> mask;  // per layer; empty when no dropout was applied
};

// Index of the hidden layer that receives dropout: the second one.
constexpr std::size_t kDropoutLayer = 1;

// Training forward pass. dropout_rate > 0 applies an inverted-dropout mask to
// the output of the second hidden layer (if the net has one).
Tape forward_tape(const Mlp& net, std::span<const double> x, double dropout_rate, std::mt19937_64* rng);

// Backpropagates d(loss)/d(output). Accumulates into `grad` (param_count) and,
// when non-empty, writes d(loss)/d(input) into `dinput`.
void backward(const Mlp& net, const Tape& tape, std::span<const double> dout, std::span<double> grad,
              std::span<double> dinput = {});

// Sum of squared differences.
double l2_loss(std::span<const double> pred, std::span<const double> target);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_net(const Mlp& net, double lr = 1e-4);
  bool operator==(const AdamState&) const = default;
};

void adam_update(std::span<double> params, AdamState& adam, std::span<const double> grad);

// Row-major batch of input/target pairs.
struct Batch {
  std::size_t input_dim = 0;
  std::size_t target_dim = 0;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return input_dim == 0 ? 0 : x.size() / input_dim; }
  std::span<const double> input(std::size_t i) const { return {x.data() + i * input_dim, input_dim}; }
  std::span<const double> target(std::size_t i) const { return {y.data() + i * target_dim, target_dim}; }
  void add(std::span<const double> in, std::span<const double> tgt);
};

// Mean over the batch of l2_loss, and its gradient w.r.t. the parameters.
double loss_and_gradient(const Mlp& net, const Batch& batch, double dropout_rate, std::mt19937_64& rng,
                         std::vector<double>& grad);

// One Adam step on the batch. Returns the pre-step loss. Throws
// DivergenceError on a non-finite loss and ContractError on an empty batch.
double train_minibatch(Mlp& net, AdamState& adam, const Batch& batch, double dropout_rate, std::mt19937_64& rng);

// Append-only store of (features, target action) pairs. Each pair is tagged
// with the index of the policy that produced the label and the round it was
// added in.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t input_dim, std::size_t target_dim, std::size_t capacity = 0)
      : input_dim_(input_dim), target_dim_(target_dim), capacity_(capacity) {}

  void add(std::span<const double> input, std::span<const double> target, int source, int round);

  std::size_t size() const { return source_.size(); }
  bool empty() const { return source_.empty(); }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t target_dim() const { return target_dim_; }

  std::span<const double> input(std::size_t i) const;
  std::span<const double> target(std::size_t i) const;
  int source(std::size_t i) const { return source_[(head_ + i) % source_.size()]; }
  int round(std::size_t i) const { return round_[(head_ + i) % round_.size()]; }

  // Uniform with replacement over the current contents.
  Batch sample(std::size_t batch_size, std::mt19937_64& rng) const;

 private:
  std::size_t slot(std::size_t i) const { return (head_ + i) % source_.size(); }

  std::size_t input_dim_ = 0;
  std::size_t target_dim_ = 0;
  std::size_t capacity_ = 0;  // 0 = unbounded; otherwise FIFO eviction
  std::size_t head_ = 0;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<int> source_;
  std::vector<int> round_;
};

}  // namespace oil
