#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "oxdgm/device.hpp"
#include "oxdgm/rng.hpp"

namespace oxdgm {

/// Logistic function 1 / (1 + exp(-x)).
double sigmoid(double x);

enum class RefMode { kIdealUniform, kDeviceDerived };

/// When the layer's OxRAM state memory is physically programmed. Sampled bits
/// always land in a CMOS latch first; kPerBatch programs the devices once per
/// batch at the training loop's commit point, kPerDraw programs on every
/// sampled activation.
enum class StateCommit { kPerBatch, kPerDraw };

struct NeuronLayerConfig {
  int size = 1;
  double gain = 1.0;  // amplifier gain applied to the pre-activation
  RefMode ref_mode = RefMode::kIdealUniform;
  StateCommit state_commit = StateCommit::kPerBatch;
  DeviceParams device;

  void validate() const;
};

/// Layer of stochastic sigmoid units. Each unit owns one state-storage device
/// (LRS = 1, HRS = 0) and one reference device that is cycled per draw in
/// device-derived mode to turn C2C variability into the comparator reference.
class NeuronLayer {
 public:
  NeuronLayer(const NeuronLayerConfig& config, Rng& init_rng);

  int size() const { return cfg_.size; }
  const NeuronLayerConfig& config() const { return cfg_; }

  /// Fire with probability sigmoid(gain * pre_act) against the reference:
  /// uniform in [0,1) in ideal mode, normalized divider voltage of a freshly
  /// cycled device otherwise. The bit lands in the latch, and is written
  /// through to the state device immediately under kPerDraw.
  int sample_activation(double pre_act, int index, Rng& rng);

  /// Expected firing rate of this layer's comparator for a given
  /// pre-activation: the exact mean of sample_activation over its reference
  /// draws. Ideal mode gives sigmoid(gain * x); device-derived mode composes
  /// the reference-voltage distribution with the sigmoid, which steepens and
  /// reshapes the effective transfer curve. Used for mean-field inference so
  /// deterministic evaluation matches the stochastic circuit it models.
  double firing_probability(double pre_act) const;

  /// Program one state device; switching is counted only on change.
  void store_state(int index, int bit, Rng& rng);

  /// Program every state device to its latched bit (batch-commit point).
  void commit_states(Rng& rng);

  /// Load externally imposed bits (clamped data) into the latch.
  void latch_bits(std::span<const std::uint8_t> bits);

  int latched(int index) const { return latch_[index]; }
  int stored_state(int index) const {
    return state_devices_[index].state == DeviceState::kLrs ? 1 : 0;
  }

  std::uint64_t state_switches(int index) const { return state_devices_[index].switch_count; }
  std::uint64_t ref_switches(int index) const { return ref_devices_[index].switch_count; }
  std::uint64_t max_state_switches() const;
  std::uint64_t max_ref_switches() const;
  std::uint64_t total_state_switches() const;
  std::uint64_t total_ref_switches() const;

  /// Additive per-device counter merge for parallel workers.
  void merge_counters(const NeuronLayer& other);

  void restore_counters(std::span<const std::uint64_t> state_counts,
                        std::span<const std::uint64_t> ref_counts);

 private:
  NeuronLayerConfig cfg_;
  std::vector<OxRamDevice> state_devices_;
  std::vector<OxRamDevice> ref_devices_;
  std::vector<std::uint8_t> latch_;
};

/// Behavioral inter-layer normalization stage: gain and bias are looked up
/// from the programmed SET resistance by piecewise-linear interpolation over
/// tabulated calibration points.
struct NormalizerConfig {
  std::vector<std::pair<double, double>> gain_levels;  // (resistance, gain)
  std::vector<std::pair<double, double>> bias_levels;  // (resistance, bias)
  double selected_level = 0.0;

  static NormalizerConfig identity();

  void validate() const;
  double gain() const;
  double bias() const;
};

/// out = clamp(gain * in + bias, 0, 1) elementwise.
void normalize(std::span<const double> in, const NormalizerConfig& cfg, std::span<double> out);

}  // namespace oxdgm
