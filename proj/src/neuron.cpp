#include "oxdgm/neuron.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oxdgm {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void NeuronLayerConfig::validate() const {
  if (size < 1) throw std::invalid_argument("neuron layer: size must be >= 1");
  if (!(gain > 0.0)) throw std::invalid_argument("neuron layer: gain must be > 0");
  device.validate();
}

NeuronLayer::NeuronLayer(const NeuronLayerConfig& config, Rng& init_rng) : cfg_(config) {
  cfg_.validate();
  state_devices_.reserve(cfg_.size);
  ref_devices_.reserve(cfg_.size);
  for (int i = 0; i < cfg_.size; ++i) {
    state_devices_.push_back(init_device(cfg_.device, DeviceState::kHrs, init_rng));
    ref_devices_.push_back(init_device(cfg_.device, DeviceState::kHrs, init_rng));
  }
  latch_.assign(cfg_.size, 0);
}

int NeuronLayer::sample_activation(double pre_act, int index, Rng& rng) {
  const double p = sigmoid(cfg_.gain * pre_act);
  double v_ref;
  if (cfg_.ref_mode == RefMode::kIdealUniform) {
    v_ref = rng.uniform01();
  } else {
    cycle(ref_devices_[index], DeviceState::kHrs, cfg_.device, rng);
    v_ref = std::clamp(
        read_reference_voltage(ref_devices_[index], cfg_.device) / cfg_.device.v_read, 0.0,
        1.0);
  }
  const int bit = p > v_ref ? 1 : 0;
  latch_[index] = static_cast<std::uint8_t>(bit);
  if (cfg_.state_commit == StateCommit::kPerDraw) store_state(index, bit, rng);
  return bit;
}

double NeuronLayer::firing_probability(double pre_act) const {
  const double p = sigmoid(cfg_.gain * pre_act);
  if (cfg_.ref_mode == RefMode::kIdealUniform) return p;

  // The comparator fires when p exceeds the divider voltage of a freshly
  // cycled HRS reference device: p > R/(R + r_series), i.e. the reference
  // resistance draw falls below p * r_series / (1 - p).
  const DeviceParams& d = cfg_.device;
  if (d.r_series <= 0.0) return 0.0;  // divider pinned at v_read; p < 1 never wins
  const double one_minus_p = 1.0 - p;
  if (one_minus_p <= 0.0) return 1.0;
  const double threshold = p * d.r_series / one_minus_p;
  const double floor_r = d.mu_off / 100.0;  // resistance draws clip here
  if (threshold <= floor_r) return 0.0;
  if (d.sigma_off == 0.0) return threshold > d.mu_off ? 1.0 : 0.0;

  double z;
  if (d.dist == ResistanceDist::kNormal) {
    z = (threshold - d.mu_off) / d.sigma_off;
  } else {
    const double s2 = std::log(1.0 + (d.sigma_off * d.sigma_off) / (d.mu_off * d.mu_off));
    const double m = std::log(d.mu_off) - 0.5 * s2;
    z = (std::log(threshold) - m) / std::sqrt(s2);
  }
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

void NeuronLayer::store_state(int index, int bit, Rng& rng) {
  program(state_devices_[index], bit ? DeviceState::kLrs : DeviceState::kHrs, cfg_.device,
          rng);
}

void NeuronLayer::commit_states(Rng& rng) {
  for (int i = 0; i < cfg_.size; ++i) store_state(i, latch_[i], rng);
}

void NeuronLayer::latch_bits(std::span<const std::uint8_t> bits) {
  if (bits.size() != latch_.size())
    throw std::invalid_argument("latch_bits: size mismatch");
  std::copy(bits.begin(), bits.end(), latch_.begin());
}

std::uint64_t NeuronLayer::max_state_switches() const {
  std::uint64_t m = 0;
  for (const auto& d : state_devices_) m = std::max(m, d.switch_count);
  return m;
}

std::uint64_t NeuronLayer::max_ref_switches() const {
  std::uint64_t m = 0;
  for (const auto& d : ref_devices_) m = std::max(m, d.switch_count);
  return m;
}

std::uint64_t NeuronLayer::total_state_switches() const {
  std::uint64_t t = 0;
  for (const auto& d : state_devices_) t += d.switch_count;
  return t;
}

std::uint64_t NeuronLayer::total_ref_switches() const {
  std::uint64_t t = 0;
  for (const auto& d : ref_devices_) t += d.switch_count;
  return t;
}

void NeuronLayer::merge_counters(const NeuronLayer& other) {
  if (other.cfg_.size != cfg_.size)
    throw std::invalid_argument("merge_counters: size mismatch");
  for (int i = 0; i < cfg_.size; ++i) {
    state_devices_[i].switch_count += other.state_devices_[i].switch_count;
    ref_devices_[i].switch_count += other.ref_devices_[i].switch_count;
  }
}

void NeuronLayer::restore_counters(std::span<const std::uint64_t> state_counts,
                                   std::span<const std::uint64_t> ref_counts) {
  if (state_counts.size() != state_devices_.size() ||
      ref_counts.size() != ref_devices_.size())
    throw std::invalid_argument("restore_counters: size mismatch");
  for (int i = 0; i < cfg_.size; ++i) {
    state_devices_[i].switch_count = state_counts[i];
    ref_devices_[i].switch_count = ref_counts[i];
  }
}

NormalizerConfig NormalizerConfig::identity() {
  NormalizerConfig cfg;
  cfg.gain_levels = {{1.0, 1.0}, {1e9, 1.0}};
  cfg.bias_levels = {{1.0, 0.0}, {1e9, 0.0}};
  cfg.selected_level = 1.0;
  return cfg;
}

namespace {

double interpolate(const std::vector<std::pair<double, double>>& table, double level) {
  if (level <= table.front().first) return table.front().second;
  if (level >= table.back().first) return table.back().second;
  for (std::size_t k = 1; k < table.size(); ++k) {
    if (level <= table[k].first) {
      const auto& [r0, y0] = table[k - 1];
      const auto& [r1, y1] = table[k];
      const double t = (level - r0) / (r1 - r0);
      return y0 + t * (y1 - y0);
    }
  }
  return table.back().second;
}

void check_table(const std::vector<std::pair<double, double>>& table, const char* what) {
  if (table.size() < 2)
    throw std::invalid_argument(std::string("normalizer: need >= 2 ") + what + " levels");
  bool up = true, down = true;
  for (std::size_t k = 1; k < table.size(); ++k) {
    if (!(table[k].first > table[k - 1].first))
      throw std::invalid_argument("normalizer: resistance levels must be ascending");
    if (!std::isfinite(table[k].second))
      throw std::invalid_argument("normalizer: values must be finite");
    up = up && table[k].second >= table[k - 1].second;
    down = down && table[k].second <= table[k - 1].second;
  }
  if (!up && !down)
    throw std::invalid_argument(std::string("normalizer: ") + what +
                                " must be monotone in resistance");
}

}  // namespace

void NormalizerConfig::validate() const {
  check_table(gain_levels, "gain");
  check_table(bias_levels, "bias");
  const double lo = std::min(gain_levels.front().first, bias_levels.front().first);
  const double hi = std::max(gain_levels.back().first, bias_levels.back().first);
  if (selected_level < lo || selected_level > hi)
    throw std::invalid_argument("normalizer: selected_level outside tabulated range");
}

double NormalizerConfig::gain() const { return interpolate(gain_levels, selected_level); }

double NormalizerConfig::bias() const { return interpolate(bias_levels, selected_level); }

void normalize(std::span<const double> in, const NormalizerConfig& cfg,
               std::span<double> out) {
  cfg.validate();
  if (in.size() != out.size()) throw std::invalid_argument("normalize: size mismatch");
  const double g = cfg.gain();
  const double b = cfg.bias();
  for (std::size_t k = 0; k < in.size(); ++k)
    out[k] = std::clamp(g * in[k] + b, 0.0, 1.0);
}

}  // namespace oxdgm
