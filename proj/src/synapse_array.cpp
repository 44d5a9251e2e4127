#include "oxdgm/synapse_array.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <stdexcept>

namespace oxdgm {

void QuantConfig::validate() const {
  if (bits != 4 && bits != 8 && bits != 16)
    throw std::invalid_argument("quant: bits must be 4, 8 or 16");
  if (!(w_min < w_max)) throw std::invalid_argument("quant: w_min must be < w_max");
}

std::uint32_t encode_weight(double w, const QuantConfig& q) {
  const double clamped = std::clamp(w, q.w_min, q.w_max);
  // nearbyint under the default FE_TONEAREST mode rounds half to even.
  const double code = std::nearbyint((clamped - q.w_min) / q.lsb());
  return static_cast<std::uint32_t>(code);
}

double decode_weight(std::uint32_t code, const QuantConfig& q) {
  if (code > q.max_code()) throw std::out_of_range("decode_weight: code out of range");
  return q.w_min + static_cast<double>(code) * q.lsb();
}

SynapseArray::SynapseArray(int n_visible, int n_hidden, const QuantConfig& quant)
    : n_v_(n_visible), n_h_(n_hidden), quant_(quant) {
  quant_.validate();
  if (n_visible < 1 || n_hidden < 1)
    throw std::invalid_argument("synapse array: dimensions must be >= 1");
  const std::size_t n = static_cast<std::size_t>(n_v_) * n_h_;
  codes_.assign(n, encode_weight(0.0, quant_));
  weights_.assign(n, decode_weight(codes_[0], quant_));
  flips_.assign(n * static_cast<std::size_t>(quant_.bits), 0);
}

void SynapseArray::init_random(double stddev, Rng& rng) {
  for (std::size_t k = 0; k < codes_.size(); ++k) {
    codes_[k] = encode_weight(rng.normal(0.0, stddev), quant_);
    weights_[k] = decode_weight(codes_[k], quant_);
  }
}

void SynapseArray::apply_delta(int i, int j, int delta_code) {
  const std::size_t k = idx(i, j);
  const std::int64_t raw = static_cast<std::int64_t>(codes_[k]) + delta_code;
  const std::uint32_t next = static_cast<std::uint32_t>(
      std::clamp<std::int64_t>(raw, 0, static_cast<std::int64_t>(quant_.max_code())));
  std::uint32_t changed = codes_[k] ^ next;
  if (changed == 0) return;
  std::uint32_t* counters = &flips_[k * static_cast<std::size_t>(quant_.bits)];
  for (int b = 0; changed != 0; ++b, changed >>= 1) {
    if (changed & 1u) ++counters[b];
  }
  codes_[k] = next;
  weights_[k] = decode_weight(next, quant_);
}

void SynapseArray::hidden_preactivation(std::span<const double> v,
                                        std::span<const double> h_bias,
                                        std::span<double> out) const {
  if (v.size() != static_cast<std::size_t>(n_v_) ||
      h_bias.size() != static_cast<std::size_t>(n_h_) ||
      out.size() != static_cast<std::size_t>(n_h_))
    throw std::invalid_argument("hidden_preactivation: dimension mismatch");
  std::copy(h_bias.begin(), h_bias.end(), out.begin());
  for (int i = 0; i < n_v_; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const double* row = &weights_[idx(i, 0)];
    for (int j = 0; j < n_h_; ++j) out[j] += row[j] * vi;
  }
}

void SynapseArray::visible_preactivation(std::span<const double> h,
                                         std::span<const double> v_bias,
                                         std::span<double> out) const {
  if (h.size() != static_cast<std::size_t>(n_h_) ||
      v_bias.size() != static_cast<std::size_t>(n_v_) ||
      out.size() != static_cast<std::size_t>(n_v_))
    throw std::invalid_argument("visible_preactivation: dimension mismatch");
  for (int i = 0; i < n_v_; ++i) {
    const double* row = &weights_[idx(i, 0)];
    double acc = v_bias[i];
    for (int j = 0; j < n_h_; ++j) acc += row[j] * h[j];
    out[i] = acc;
  }
}

std::uint64_t SynapseArray::max_bit_flips() const {
  std::uint32_t m = 0;
  for (std::uint32_t f : flips_) m = std::max(m, f);
  return m;
}

std::uint64_t SynapseArray::total_bit_flips() const {
  std::uint64_t t = 0;
  for (std::uint32_t f : flips_) t += f;
  return t;
}

void SynapseArray::merge_flip_counters(const SynapseArray& other) {
  if (other.flips_.size() != flips_.size())
    throw std::invalid_argument("merge_flip_counters: shape mismatch");
  for (std::size_t k = 0; k < flips_.size(); ++k) flips_[k] += other.flips_[k];
}

void SynapseArray::restore(std::span<const std::uint32_t> codes,
                           std::span<const std::uint32_t> flips) {
  if (codes.size() != codes_.size() || flips.size() != flips_.size())
    throw std::invalid_argument("restore: shape mismatch");
  std::copy(codes.begin(), codes.end(), codes_.begin());
  std::copy(flips.begin(), flips.end(), flips_.begin());
  for (std::size_t k = 0; k < codes_.size(); ++k)
    weights_[k] = decode_weight(codes_[k], quant_);
}

}  // namespace oxdgm
