#include "oil/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oil/errors.hpp"

namespace oil {

Mlp::Mlp(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw ContractError("an Mlp needs at least input and output dims");
  for (std::size_t d : dims_)
    if (d == 0) throw ContractError("Mlp layer widths must be positive");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(total);
    total += dims_[l] * dims_[l + 1] + dims_[l + 1];
  }
  params_.assign(total, 0.0);
}

namespace {

// out = W x + b for one layer.
void affine(const Mlp& net, std::size_t l, std::span<const double> x, std::vector<double>& out) {
  const std::size_t in = net.dims()[l];
  const std::size_t n_out = net.dims()[l + 1];
  const double* w = net.params().data() + net.weight_offset(l);
  const double* b = net.params().data() + net.bias_offset(l);
  out.resize(n_out);
  for (std::size_t o = 0; o < n_out; ++o) {
    const double* row = w + o * in;
    double acc = b[o];
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
    out[o] = acc;
  }
}

void check_input(const Mlp& net, std::span<const double> x) {
  if (x.size() != net.input_dim())
    throw ContractError("Mlp input has " + std::to_string(x.size()) + " values, expected " +
                        std::to_string(net.input_dim()));
}

}  // namespace

std::vector<double> Mlp::forward(std::span<const double> x) const {
  check_input(*this, x);
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    affine(*this, l, cur, next);
    if (l + 1 < layer_count())
      for (double& v : next) v = std::tanh(v);
    cur.swap(next);
  }
  return cur;
}

bool Mlp::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<std::size_t> control_net_dims(std::size_t input_dim, std::size_t output_dim) {
  return {input_dim, 64, 32, 16, output_dim};
}

Mlp init_weights(std::vector<std::size_t> dims, std::uint64_t seed) {
  Mlp net(std::move(dims));
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const double a = std::sqrt(3.0 / static_cast<double>(net.dims()[l]));
    std::uniform_real_distribution<double> u(-a, a);
    auto p = net.params();
    for (std::size_t i = net.weight_offset(l); i < net.bias_offset(l); ++i) p[i] = u(rng);
  }
  return net;
}

Tape forward_tape(const Mlp& net, std::span<const double> x, double dropout_rate, std::mt19937_64* rng) {
  check_input(net, x);
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ContractError("dropout rate must lie in [0, 1)");
  Tape tape;
  const std::size_t L = net.layer_count();
  tape.act.resize(L + 1);
  tape.mask.resize(L);
  tape.act[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < L; ++l) {
    affine(net, l, tape.act[l], tape.act[l + 1]);
    if (l + 1 == L) break;
    auto& a = tape.act[l + 1];
    for (double& v : a) v = std::tanh(v);
    if (l == kDropoutLayer && dropout_rate > 0.0 && L > kDropoutLayer + 1) {
      if (!rng) throw ContractError("dropout needs an rng");
      const double keep = 1.0 - dropout_rate;
      std::bernoulli_distribution draw(keep);
      auto& m = tape.mask[l];
      m.resize(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        m[i] = draw(*rng) ? 1.0 / keep : 0.0;
        a[i] *= m[i];
      }
    }
  }
  return tape;
}

void backward(const Mlp& net, const Tape& tape, std::span<const double> dout, std::span<double> grad,
              std::span<double> dinput) {
  const std::size_t L = net.layer_count();
  std::vector<double> delta(dout.begin(), dout.end());  // d loss / d pre-activation of layer l
  std::vector<double> dprev;
  const double* params = net.params().data();
  for (std::size_t l = L; l-- > 0;) {
    const std::size_t in = net.dims()[l];
    const std::size_t n_out = net.dims()[l + 1];
    const double* w = params + net.weight_offset(l);
    double* gw = grad.data() + net.weight_offset(l);
    double* gb = grad.data() + net.bias_offset(l);
    const auto& x = tape.act[l];

    dprev.assign(in, 0.0);
    for (std::size_t o = 0; o < n_out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      double* grow = gw + o * in;
      const double* wrow = w + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        grow[i] += d * x[i];
        dprev[i] += wrow[i] * d;
      }
    }
    if (l == 0) {
      if (!dinput.empty()) std::copy(dprev.begin(), dprev.end(), dinput.begin());
      break;
    }
    // Back through the mask and tanh of layer l-1's output. act stores the
    // masked value a*m, and tanh' = 1 - tanh^2 needs the unmasked one.
    const auto& mask = tape.mask[l - 1];
    for (std::size_t i = 0; i < in; ++i) {
      double a = x[i];
      double g = dprev[i];
      if (!mask.empty()) {
        if (mask[i] == 0.0) {
          dprev[i] = 0.0;
          continue;
        }
        a /= mask[i];
        g *= mask[i];
      }
      dprev[i] = g * (1.0 - a * a);
    }
    delta.swap(dprev);
  }
}

double l2_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw ContractError("l2_loss size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    s += d * d;
  }
  return s;
}

AdamState AdamState::for_net(const Mlp& net, double lr) {
  AdamState a;
  a.m.assign(net.param_count(), 0.0);
  a.v.assign(net.param_count(), 0.0);
  a.lr = lr;
  return a;
}

void adam_update(std::span<double> params, AdamState& adam, std::span<const double> grad) {
  if (adam.m.size() != params.size() || adam.v.size() != params.size() || grad.size() != params.size())
    throw ContractError("Adam state does not match the parameter count");
  ++adam.step;
  const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step));
  const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    adam.m[i] = adam.beta1 * adam.m[i] + (1.0 - adam.beta1) * grad[i];
    adam.v[i] = adam.beta2 * adam.v[i] + (1.0 - adam.beta2) * grad[i] * grad[i];
    const double mhat = adam.m[i] / c1;
    const double vhat = adam.v[i] / c2;
    params[i] -= adam.lr * mhat / (std::sqrt(vhat) + adam.eps);
  }
}

void Batch::add(std::span<const double> in, std::span<const double> tgt) {
  if (input_dim == 0 && target_dim == 0) {
    input_dim = in.size();
    target_dim = tgt.size();
  }
  if (in.size() != input_dim || tgt.size() != target_dim) throw ContractError("batch row size mismatch");
  x.insert(x.end(), in.begin(), in.end());
  y.insert(y.end(), tgt.begin(), tgt.end());
}

double loss_and_gradient(const Mlp& net, const Batch& batch, double dropout_rate, std::mt19937_64& rng,
                         std::vector<double>& grad) {
  const std::size_t n = batch.size();
  if (n == 0) throw ContractError("empty training batch");
  if (batch.target_dim != net.output_dim()) throw ContractError("batch target width does not match the net");
  grad.assign(net.param_count(), 0.0);
  double loss = 0.0;
  std::vector<double> dout(net.output_dim());
  const double scale = 2.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Tape tape = forward_tape(net, batch.input(k), dropout_rate, &rng);
    const auto& pred = tape.act.back();
    const auto tgt = batch.target(k);
    for (std::size_t j = 0; j < pred.size(); ++j) dout[j] = scale * (pred[j] - tgt[j]);
    loss += l2_loss(pred, tgt);
    backward(net, tape, dout, grad);
  }
  return loss / static_cast<double>(n);
}

double train_minibatch(Mlp& net, AdamState& adam, const Batch& batch, double dropout_rate, std::mt19937_64& rng) {
  std::vector<double> grad;
  const double loss = loss_and_gradient(net, batch, dropout_rate, rng, grad);
  if (!std::isfinite(loss)) throw DivergenceError("training loss is not finite");
  adam_update(net.params(), adam, grad);
  if (!net.all_finite()) throw DivergenceError("network parameters became non-finite");
  return loss;
}

void Dataset::add(std::span<const double> input, std::span<const double> target, int source, int round) {
  if (input.size() != input_dim_ || target.size() != target_dim_) throw ContractError("dataset row size mismatch");
  if (capacity_ == 0 || source_.size() < capacity_) {
    x_.insert(x_.end(), input.begin(), input.end());
    y_.insert(y_.end(), target.begin(), target.end());
    source_.push_back(source);
    round_.push_back(round);
    return;
  }
  const std::size_t s = head_;
  std::copy(input.begin(), input.end(), x_.begin() + static_cast<long>(s * input_dim_));
  std::copy(target.begin(), target.end(), y_.begin() + static_cast<long>(s * target_dim_));
  source_[s] = source;
  round_[s] = round;
  head_ = (head_ + 1) % capacity_;
}

std::span<const double> Dataset::input(std::size_t i) const { return {x_.data() + slot(i) * input_dim_, input_dim_}; }

std::span<const double> Dataset::target(std::size_t i) const {
  return {y_.data() + slot(i) * target_dim_, target_dim_};
}

Batch Dataset::sample(std::size_t batch_size, std::mt19937_64& rng) const {
  if (empty()) throw ContractError("cannot sample from an empty dataset");
  Batch b;
  b.input_dim = input_dim_;
  b.target_dim = target_dim_;
  b.x.reserve(batch_size * input_dim_);
  b.y.reserve(batch_size * target_dim_);
  std::uniform_int_distribution<std::size_t> pick(0, size() - 1);
  for (std::size_t k = 0; k < batch_size; ++k) {
    const std::size_t i = pick(rng);
    b.add(input(i), target(i));
  }
  return b;
}

}  // namespace oil
