#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oxdgm/matrix.hpp"
#include "oxdgm/neuron.hpp"
#include "oxdgm/rng.hpp"
#include "oxdgm/synapse_array.hpp"

namespace oxdgm {

struct RbmConfig {
  double epsilon = 0.1;
  int epochs = 200;
  int batch_size = 100;
  double momentum = 0.5;
  double weight_decay = 2e-4;
  bool use_bias = true;

  // Denoising variant: fraction of presented pixels replaced by fresh
  // salt-and-pepper values on every presentation. Zero keeps the plain
  // Bernoulli encoding and consumes no extra random draws.
  double input_corruption = 0.0;

  void validate() const;
};

struct BatchStats {
  double recon_error = 0.0;  // sum|v0 - v1| / (batch * n_visible)
};

struct EpochStats {
  int epoch = 0;
  double recon_error = 0.0;
  std::uint64_t max_weight_flips = 0;
  std::uint64_t max_neuron_switches = 0;
};

/// Per-synapse ternary drive (v_i AND h_j) - (v1_i AND h1_j), the two-AND-gate
/// comparator output. Values are in {-1, 0, +1}, row-major n_v x n_h.
std::vector<std::int8_t> ternary_update(std::span<const std::uint8_t> v,
                                        std::span<const std::uint8_t> h,
                                        std::span<const std::uint8_t> v1,
                                        std::span<const std::uint8_t> h1);

/// One RBM: a quantized synapse array between two stochastic layers, trained
/// by CD-1 with per-sample ternary votes accumulated digitally and a single
/// physical weight write per batch.
class RbmBlock {
 public:
  RbmBlock(const QuantConfig& quant, const NeuronLayerConfig& visible_cfg,
           const NeuronLayerConfig& hidden_cfg, const RbmConfig& train_cfg, Rng& init_rng);

  int n_visible() const { return visible_.size(); }
  int n_hidden() const { return hidden_.size(); }

  /// h0_j ~ sample(sigmoid(gain * preact(v0)_j)); v0 is latched into the
  /// visible state memory as the clamped data phase.
  void positive_phase(std::span<const std::uint8_t> v0, std::span<std::uint8_t> h0,
                      Rng& rng);

  /// v1 ~ sample from h0, then h1 ~ sample from v1 (one Gibbs step).
  void negative_phase(std::span<const std::uint8_t> h0, std::span<std::uint8_t> v1,
                      std::span<std::uint8_t> h1, Rng& rng);

  /// CD-1 over a batch of binary visible vectors (row-major batch x n_v).
  /// Accumulates ternary votes per sample, applies the quantized weight
  /// delta once at batch end, updates float biases, commits neuron state
  /// memory, and returns the batch reconstruction error.
  BatchStats cd_batch_step(std::span<const std::uint8_t> batch_bits, int batch, Rng& rng);

  /// Full training loop: per-presentation Bernoulli binarization of the
  /// dataset rows, fixed batch order, one weight write per batch.
  std::vector<EpochStats> train(const Matrix& data, Rng& rng);

  /// Associative-memory variant for the class layer: during the positive
  /// phase the hidden states are clamped to the one-hot label instead of
  /// being sampled.
  std::vector<EpochStats> train_supervised(const Matrix& features,
                                           std::span<const int> labels, Rng& rng);

  // Deterministic probability passes (no sampling, no device events).
  void hidden_probabilities(std::span<const double> v, std::span<double> p) const;
  void visible_probabilities(std::span<const double> h, std::span<double> p) const;

  const SynapseArray& weights() const { return weights_; }
  SynapseArray& weights() { return weights_; }
  const NeuronLayer& visible() const { return visible_; }
  NeuronLayer& visible() { return visible_; }
  const NeuronLayer& hidden() const { return hidden_; }
  NeuronLayer& hidden() { return hidden_; }
  const RbmConfig& train_config() const { return cfg_; }

  std::span<const double> v_bias() const { return v_bias_; }
  std::span<const double> h_bias() const { return h_bias_; }
  void restore_biases(std::span<const double> v_bias, std::span<const double> h_bias);

  // Endurance bookkeeping (exact event counts performed by this block).
  std::uint64_t batches_done() const { return batches_done_; }       // weight writes
  std::uint64_t visible_draws() const { return visible_draws_; }     // per-unit ref cycles
  std::uint64_t hidden_draws() const { return hidden_draws_; }
  std::uint64_t visible_commits() const { return visible_commits_; } // per-unit state writes
  std::uint64_t hidden_commits() const { return hidden_commits_; }
  std::uint64_t epochs_done() const { return epochs_done_; }
  std::uint64_t samples_per_epoch() const { return samples_per_epoch_; }
  std::uint64_t batches_per_epoch() const { return batches_per_epoch_; }
  void restore_bookkeeping(std::span<const std::uint64_t> counters);
  std::vector<std::uint64_t> bookkeeping() const;

 private:
  void sample_layer(NeuronLayer& layer, std::span<const double> pre,
                    std::span<std::uint8_t> out, Rng& rng);
  BatchStats cd_batch_impl(std::span<const std::uint8_t> batch_bits, int batch,
                           const int* labels, Rng& rng);
  std::vector<EpochStats> train_impl(const Matrix& data, const int* labels, Rng& rng);

  QuantConfig quant_;
  RbmConfig cfg_;
  SynapseArray weights_;
  NeuronLayer visible_;
  NeuronLayer hidden_;
  std::vector<double> v_bias_;
  std::vector<double> h_bias_;
  std::vector<double> velocity_;

  std::uint64_t batches_done_ = 0;
  std::uint64_t visible_draws_ = 0;
  std::uint64_t hidden_draws_ = 0;
  std::uint64_t visible_commits_ = 0;
  std::uint64_t hidden_commits_ = 0;
  std::uint64_t epochs_done_ = 0;
  std::uint64_t samples_per_epoch_ = 0;
  std::uint64_t batches_per_epoch_ = 0;

  // scratch buffers (single training context)
  std::vector<double> vd_, hd_, pre_v_, pre_h_;
  std::vector<std::int32_t> votes_;
  std::vector<double> vb_acc_, hb_acc_;
};

}  // namespace oxdgm
