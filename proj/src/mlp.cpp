#include "uavswarm/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "uavswarm/kernels.hpp"

namespace uavswarm {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("network needs an input and an output layer");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw std::invalid_argument("layer sizes must be >= 1");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l]) * static_cast<std::size_t>(sizes_[l + 1]) +
             static_cast<std::size_t>(sizes_[l + 1]);
  }
  params_.assign(total, 0.0);
}

void Mlp::init_random(std::mt19937_64& rng, double output_gain) {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const double bound = (l + 1 == layer_count() ? output_gain : 1.0) / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    double* w = params_.data() + offsets_[l];
    for (std::size_t i = 0; i < in * out; ++i) w[i] = dist(rng);
    for (std::size_t i = 0; i < out; ++i) w[in * out + i] = 0.0;
  }
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  Tape tape;
  forward(input, tape);
  return std::move(tape.acts.back());
}

void Mlp::forward(std::span<const double> input, Tape& tape) const {
  if (static_cast<int>(input.size()) != input_size()) {
    throw std::invalid_argument("network input dimension mismatch");
  }
  const auto& k = kernels::active();
  tape.acts.resize(sizes_.size());
  tape.acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const double* w = params_.data() + offsets_[l];
    const auto& x = tape.acts[l];
    auto& y = tape.acts[l + 1];
    y.assign(w + in * out, w + in * out + out);
    for (std::size_t j = 0; j < in; ++j) {
      if (x[j] != 0.0) k.axpy(x[j], w + j * out, y.data(), out);
    }
    if (l + 1 < layer_count()) {
      for (auto& v : y) v = std::tanh(v);
    }
  }
}

void Mlp::backward(const Tape& tape, std::span<const double> grad_output, std::span<double> grad) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("gradient buffer size mismatch");
  if (static_cast<int>(grad_output.size()) != output_size()) {
    throw std::invalid_argument("output gradient dimension mismatch");
  }
  const auto& k = kernels::active();
  std::vector<double> delta(grad_output.begin(), grad_output.end());
  std::vector<double> prev;
  for (std::size_t l = layer_count(); l-- > 0;) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const double* w = params_.data() + offsets_[l];
    double* gw = grad.data() + offsets_[l];
    const auto& x = tape.acts[l];
    k.add(delta.data(), gw + in * out, out);
    if (l > 0) prev.assign(in, 0.0);
    for (std::size_t j = 0; j < in; ++j) {
      if (x[j] != 0.0) k.axpy(x[j], delta.data(), gw + j * out, out);
      // tanh'(z) = 1 - tanh(z)^2, and x holds tanh(z) for hidden layers.
      if (l > 0) prev[j] = k.dot(w + j * out, delta.data(), out) * (1.0 - x[j] * x[j]);
    }
    if (l > 0) delta.swap(prev);
  }
}

}  // namespace uavswarm
