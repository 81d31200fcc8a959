#pragma once

// Fully connected tanh network stored as one flat parameter vector.
//
// Layer l maps in_l -> out_l with weights laid out input-major
// (W[j * out_l + k] connects input j to output k) followed by out_l biases,
// so a forward pass is a sum of axpy's over the non-zero inputs and the
// backward pass is one dot product per input.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace uavswarm {

class Mlp {
 public:
  Mlp() = default;
  /// sizes = {input, hidden..., output}; hidden layers use tanh, the output
  /// layer is linear. Parameters start at zero.
  explicit Mlp(std::vector<int> sizes);

  /// Uniform(+-1/sqrt(fan_in)) weights, zero biases; output layer scaled by
  /// output_gain.
  void init_random(std::mt19937_64& rng, double output_gain = 1.0);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.empty() ? 0 : sizes_.front(); }
  int output_size() const { return sizes_.empty() ? 0 : sizes_.back(); }
  std::size_t layer_count() const { return sizes_.empty() ? 0 : sizes_.size() - 1; }
  std::size_t param_count() const { return params_.size(); }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  bool same_shape(const Mlp& other) const { return sizes_ == other.sizes_; }

  /// Activations of every layer, kept for backprop.
  struct Tape {
    std::vector<std::vector<double>> acts;  // acts[0] = input, acts.back() = output
  };

  std::vector<double> forward(std::span<const double> input) const;
  void forward(std::span<const double> input, Tape& tape) const;

  /// Adds d(output . grad_output)/d(params) into grad (param_count entries).
  void backward(const Tape& tape, std::span<const double> grad_output, std::span<double> grad) const;

  bool operator==(const Mlp& other) const = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace uavswarm
