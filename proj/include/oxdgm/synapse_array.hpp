#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oxdgm/rng.hpp"

namespace oxdgm {

/// Offset-binary weight quantization: code 0 maps to w_min, the maximum code
/// to w_max, one LSB per code step.
struct QuantConfig {
  int bits = 8;
  double w_min = -1.0;
  double w_max = 1.0;

  double lsb() const { return (w_max - w_min) / static_cast<double>(max_code()); }
  std::uint32_t max_code() const { return (1u << bits) - 1u; }

  /// Throws std::invalid_argument unless bits in {4, 8, 16} and w_min < w_max.
  void validate() const;
};

/// Round-half-to-even quantizer; input is clamped to [w_min, w_max].
std::uint32_t encode_weight(double w, const QuantConfig& q);

/// Inverse mapping w_min + code * lsb. Throws std::out_of_range for codes
/// above max_code().
double decode_weight(std::uint32_t code, const QuantConfig& q);

/// n_visible x n_hidden grid of quantized weights. Every weight is a B-bit
/// code held by B binary devices; each code change counts the flipped bit
/// positions into per-device counters. The devices in the synaptic path are
/// digital storage, so only flip bookkeeping is modeled, not resistance.
class SynapseArray {
 public:
  SynapseArray(int n_visible, int n_hidden, const QuantConfig& quant);

  /// Initialize codes from encode(N(0, stddev)) draws. Counters stay zero.
  void init_random(double stddev, Rng& rng);

  int n_visible() const { return n_v_; }
  int n_hidden() const { return n_h_; }
  const QuantConfig& quant() const { return quant_; }

  std::uint32_t code(int i, int j) const { return codes_[idx(i, j)]; }
  double weight(int i, int j) const { return weights_[idx(i, j)]; }

  /// new_code = clamp(code + delta_code, 0, max); one flip-count increment
  /// per bit position that differs between old and new code.
  void apply_delta(int i, int j, int delta_code);

  /// out[j] = h_bias[j] + sum_i weight(i, j) * v[i]
  void hidden_preactivation(std::span<const double> v, std::span<const double> h_bias,
                            std::span<double> out) const;

  /// out[i] = v_bias[i] + sum_j weight(i, j) * h[j]  (transpose direction)
  void visible_preactivation(std::span<const double> h, std::span<const double> v_bias,
                             std::span<double> out) const;

  std::uint64_t bit_flips(int i, int j, int bit) const {
    return flips_[idx(i, j) * static_cast<std::size_t>(quant_.bits) + bit];
  }
  std::uint64_t max_bit_flips() const;
  std::uint64_t total_bit_flips() const;

  /// Additive counter merge for parallel workers; codes are not touched.
  void merge_flip_counters(const SynapseArray& other);

  // Checkpoint access. Restoring codes refreshes the decoded cache.
  std::span<const std::uint32_t> codes() const { return codes_; }
  std::span<const std::uint32_t> flip_counters() const { return flips_; }
  void restore(std::span<const std::uint32_t> codes, std::span<const std::uint32_t> flips);

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_h_) +
           static_cast<std::size_t>(j);
  }

  int n_v_;
  int n_h_;
  QuantConfig quant_;
  std::vector<std::uint32_t> codes_;
  std::vector<double> weights_;  // decoded cache, always equal to decode(code)
  std::vector<std::uint32_t> flips_;
};

}  // namespace oxdgm
