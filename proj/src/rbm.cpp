#include "oxdgm/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oxdgm {

void RbmConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("rbm: epsilon must be > 0");
  if (epochs < 1) throw std::invalid_argument("rbm: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("rbm: batch_size must be >= 1");
  if (momentum < 0.0 || momentum >= 1.0)
    throw std::invalid_argument("rbm: momentum must be in [0, 1)");
  if (weight_decay < 0.0) throw std::invalid_argument("rbm: weight_decay must be >= 0");
}

std::vector<std::int8_t> ternary_update(std::span<const std::uint8_t> v,
                                        std::span<const std::uint8_t> h,
                                        std::span<const std::uint8_t> v1,
                                        std::span<const std::uint8_t> h1) {
  if (v.size() != v1.size() || h.size() != h1.size())
    throw std::invalid_argument("ternary_update: dimension mismatch");
  std::vector<std::int8_t> grid(v.size() * h.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      const int pos = (v[i] & h[j]) ? 1 : 0;
      const int neg = (v1[i] & h1[j]) ? 1 : 0;
      grid[i * h.size() + j] = static_cast<std::int8_t>(pos - neg);
    }
  }
  return grid;
}

RbmBlock::RbmBlock(const QuantConfig& quant, const NeuronLayerConfig& visible_cfg,
                   const NeuronLayerConfig& hidden_cfg, const RbmConfig& train_cfg,
                   Rng& init_rng)
    : quant_(quant),
      cfg_(train_cfg),
      weights_(visible_cfg.size, hidden_cfg.size, quant),
      visible_(visible_cfg, init_rng),
      hidden_(hidden_cfg, init_rng) {
  if (!(cfg_.epsilon > 0.0)) throw std::invalid_argument("rbm: epsilon must be > 0");
  if (cfg_.batch_size < 1) throw std::invalid_argument("rbm: batch_size must be >= 1");
  if (cfg_.momentum < 0.0 || cfg_.momentum >= 1.0)
    throw std::invalid_argument("rbm: momentum must be in [0, 1)");
  if (cfg_.weight_decay < 0.0) throw std::invalid_argument("rbm: weight_decay must be >= 0");
  if (cfg_.epochs < 0) throw std::invalid_argument("rbm: epochs must be >= 0");
  if (cfg_.input_corruption < 0.0 || cfg_.input_corruption >= 1.0)
    throw std::invalid_argument("rbm: input_corruption must be in [0, 1)");

  const int nv = visible_cfg.size;
  const int nh = hidden_cfg.size;
  weights_.init_random(0.01, init_rng);
  v_bias_.assign(nv, 0.0);
  h_bias_.assign(nh, 0.0);
  velocity_.assign(static_cast<std::size_t>(nv) * nh, 0.0);
  vd_.assign(nv, 0.0);
  hd_.assign(nh, 0.0);
  pre_v_.assign(nv, 0.0);
  pre_h_.assign(nh, 0.0);
  votes_.assign(static_cast<std::size_t>(nv) * nh, 0);
  vb_acc_.assign(nv, 0.0);
  hb_acc_.assign(nh, 0.0);
}

void RbmBlock::sample_layer(NeuronLayer& layer, std::span<const double> pre,
                            std::span<std::uint8_t> out, Rng& rng) {
  for (int k = 0; k < layer.size(); ++k)
    out[k] = static_cast<std::uint8_t>(layer.sample_activation(pre[k], k, rng));
  if (&layer == &visible_)
    ++visible_draws_;
  else
    ++hidden_draws_;
  if (layer.config().state_commit == StateCommit::kPerDraw) {
    if (&layer == &visible_)
      ++visible_commits_;
    else
      ++hidden_commits_;
  }
}

void RbmBlock::positive_phase(std::span<const std::uint8_t> v0, std::span<std::uint8_t> h0,
                              Rng& rng) {
  if (v0.size() != static_cast<std::size_t>(n_visible()) ||
      h0.size() != static_cast<std::size_t>(n_hidden()))
    throw std::invalid_argument("positive_phase: dimension mismatch");
  visible_.latch_bits(v0);
  for (int i = 0; i < n_visible(); ++i) vd_[i] = static_cast<double>(v0[i]);
  weights_.hidden_preactivation(vd_, h_bias_, pre_h_);
  sample_layer(hidden_, pre_h_, h0, rng);
}

void RbmBlock::negative_phase(std::span<const std::uint8_t> h0, std::span<std::uint8_t> v1,
                              std::span<std::uint8_t> h1, Rng& rng) {
  if (h0.size() != static_cast<std::size_t>(n_hidden()))
    throw std::invalid_argument("negative_phase: dimension mismatch");
  for (int j = 0; j < n_hidden(); ++j) hd_[j] = static_cast<double>(h0[j]);
  weights_.visible_preactivation(hd_, v_bias_, pre_v_);
  sample_layer(visible_, pre_v_, v1, rng);
  for (int i = 0; i < n_visible(); ++i) vd_[i] = static_cast<double>(v1[i]);
  weights_.hidden_preactivation(vd_, h_bias_, pre_h_);
  sample_layer(hidden_, pre_h_, h1, rng);
}

BatchStats RbmBlock::cd_batch_step(std::span<const std::uint8_t> batch_bits, int batch,
                                   Rng& rng) {
  return cd_batch_impl(batch_bits, batch, nullptr, rng);
}

BatchStats RbmBlock::cd_batch_impl(std::span<const std::uint8_t> batch_bits, int batch,
                                   const int* labels, Rng& rng) {
  const int nv = n_visible();
  const int nh = n_hidden();
  if (batch < 1) throw std::invalid_argument("cd_batch_step: empty batch");
  if (batch_bits.size() != static_cast<std::size_t>(batch) * nv)
    throw std::invalid_argument("cd_batch_step: batch shape mismatch");

  std::fill(votes_.begin(), votes_.end(), 0);
  std::fill(vb_acc_.begin(), vb_acc_.end(), 0.0);
  std::fill(hb_acc_.begin(), hb_acc_.end(), 0.0);
  std::vector<std::uint8_t> h0(nh), v1(nv), h1(nh);
  std::vector<int> v_on, h_on;
  v_on.reserve(nv);
  h_on.reserve(nh);
  std::uint64_t mismatch = 0;

  for (int s = 0; s < batch; ++s) {
    const std::uint8_t* v0 = batch_bits.data() + static_cast<std::size_t>(s) * nv;

    const std::uint8_t* vneg = v1.data();
    if (labels == nullptr) {
      positive_phase({v0, static_cast<std::size_t>(nv)}, h0, rng);
      negative_phase(h0, v1, h1, rng);
    } else {
      // Supervised step: output states forced to the one-hot label in the
      // positive phase, and the input stays clamped to the data in the
      // negative phase, so only the output layer is resampled.  The vote
      // then reduces to v0 * (h0 - h1): an error-driven alignment of each
      // output unit with its class, computed by the same two-AND-gate
      // ternary unit as the unsupervised case.
      visible_.latch_bits({v0, static_cast<std::size_t>(nv)});
      std::fill(h0.begin(), h0.end(), 0);
      h0[labels[s]] = 1;
      hidden_.latch_bits(h0);
      for (int i = 0; i < nv; ++i) vd_[i] = v0[i];
      weights_.hidden_preactivation(vd_, h_bias_, pre_h_);
      sample_layer(hidden_, pre_h_, h1, rng);
      vneg = v0;
    }

    v_on.clear();
    h_on.clear();
    for (int i = 0; i < nv; ++i)
      if (v0[i]) v_on.push_back(i);
    for (int j = 0; j < nh; ++j)
      if (h0[j]) h_on.push_back(j);
    for (int i : v_on) {
      std::int32_t* row = &votes_[static_cast<std::size_t>(i) * nh];
      for (int j : h_on) ++row[j];
    }
    v_on.clear();
    h_on.clear();
    for (int i = 0; i < nv; ++i)
      if (vneg[i]) v_on.push_back(i);
    for (int j = 0; j < nh; ++j)
      if (h1[j]) h_on.push_back(j);
    for (int i : v_on) {
      std::int32_t* row = &votes_[static_cast<std::size_t>(i) * nh];
      for (int j : h_on) --row[j];
    }

    if (labels == nullptr) {
      for (int i = 0; i < nv; ++i) mismatch += v0[i] != v1[i] ? 1u : 0u;
    } else {
      for (int j = 0; j < nh; ++j) mismatch += h0[j] != h1[j] ? 1u : 0u;
    }
    if (cfg_.use_bias) {
      if (labels == nullptr)
        for (int i = 0; i < nv; ++i) vb_acc_[i] += static_cast<double>(v0[i]) - v1[i];
      for (int j = 0; j < nh; ++j) hb_acc_[j] += static_cast<double>(h0[j]) - h1[j];
    }
  }

  // One physical weight write per batch: quantized mean of the ternary votes.
  const double inv_b = 1.0 / static_cast<double>(batch);
  const double lsb = quant_.lsb();
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nh; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * nh + j;
      const double mean = static_cast<double>(votes_[k]) * inv_b;
      const double vel = cfg_.momentum * velocity_[k] + cfg_.epsilon * mean -
                         cfg_.weight_decay * weights_.weight(i, j);
      velocity_[k] = vel;
      const int dcode = static_cast<int>(std::nearbyint(vel / lsb));
      if (dcode != 0) weights_.apply_delta(i, j, dcode);
    }
  }
  ++batches_done_;

  if (cfg_.use_bias) {
    for (int i = 0; i < nv; ++i) v_bias_[i] += cfg_.epsilon * vb_acc_[i] * inv_b;
    for (int j = 0; j < nh; ++j) h_bias_[j] += cfg_.epsilon * hb_acc_[j] * inv_b;
  }

  if (visible_.config().state_commit == StateCommit::kPerBatch) {
    visible_.commit_states(rng);
    ++visible_commits_;
  }
  if (hidden_.config().state_commit == StateCommit::kPerBatch) {
    hidden_.commit_states(rng);
    ++hidden_commits_;
  }

  BatchStats stats;
  // Unsupervised: fraction of input bits mis-reconstructed.  Supervised:
  // fraction of output units disagreeing with the clamped label pattern.
  stats.recon_error = static_cast<double>(mismatch) /
                      (static_cast<double>(batch) * (labels == nullptr ? nv : nh));
  return stats;
}

std::vector<EpochStats> RbmBlock::train(const Matrix& data, Rng& rng) {
  return train_impl(data, nullptr, rng);
}

std::vector<EpochStats> RbmBlock::train_supervised(const Matrix& features,
                                                   std::span<const int> labels, Rng& rng) {
  if (labels.size() != features.rows)
    throw std::invalid_argument("train_supervised: label/feature count mismatch");
  for (int label : labels)
    if (label < 0 || label >= n_hidden())
      throw std::invalid_argument("train_supervised: label out of range");
  return train_impl(features, labels.data(), rng);
}

std::vector<EpochStats> RbmBlock::train_impl(const Matrix& data, const int* labels,
                                             Rng& rng) {
  const int nv = n_visible();
  if (data.rows == 0) throw std::invalid_argument("train: empty dataset");
  if (data.cols != static_cast<std::size_t>(nv))
    throw std::invalid_argument("train: data width must equal n_visible");

  const std::size_t n = data.rows;
  const std::size_t bsz = static_cast<std::size_t>(cfg_.batch_size);
  samples_per_epoch_ = n;
  batches_per_epoch_ = (n + bsz - 1) / bsz;

  std::vector<EpochStats> stats;
  stats.reserve(cfg_.epochs);
  std::vector<std::uint8_t> bits(bsz * nv);

  for (int e = 0; e < cfg_.epochs; ++e) {
    double mismatch_sum = 0.0;
    for (std::size_t start = 0; start < n; start += bsz) {
      const int nb = static_cast<int>(std::min(bsz, n - start));
      for (int s = 0; s < nb; ++s) {
        const auto row = data.row(start + s);
        std::uint8_t* out = bits.data() + static_cast<std::size_t>(s) * nv;
        if (cfg_.input_corruption == 0.0) {
          for (int i = 0; i < nv; ++i) out[i] = rng.bernoulli(row[i]) ? 1 : 0;
        } else {
          for (int i = 0; i < nv; ++i) {
            if (rng.uniform01() < cfg_.input_corruption)
              out[i] = rng.uniform01() < 0.5 ? 1 : 0;
            else
              out[i] = rng.bernoulli(row[i]) ? 1 : 0;
          }
        }
      }
      const BatchStats bs = cd_batch_impl(
          {bits.data(), static_cast<std::size_t>(nb) * nv}, nb,
          labels == nullptr ? nullptr : labels + start, rng);
      mismatch_sum += bs.recon_error * nb * nv;
    }
    ++epochs_done_;
    EpochStats es;
    es.epoch = e + 1;
    es.recon_error = mismatch_sum / (static_cast<double>(n) * nv);
    es.max_weight_flips = weights_.max_bit_flips();
    es.max_neuron_switches =
        std::max(std::max(visible_.max_state_switches(), visible_.max_ref_switches()),
                 std::max(hidden_.max_state_switches(), hidden_.max_ref_switches()));
    stats.push_back(es);
  }
  return stats;
}

void RbmBlock::hidden_probabilities(std::span<const double> v, std::span<double> p) const {
  std::vector<double> pre(n_hidden());
  weights_.hidden_preactivation(v, h_bias_, pre);
  for (int j = 0; j < n_hidden(); ++j) p[j] = hidden_.firing_probability(pre[j]);
}

void RbmBlock::visible_probabilities(std::span<const double> h, std::span<double> p) const {
  std::vector<double> pre(n_visible());
  weights_.visible_preactivation(h, v_bias_, pre);
  for (int i = 0; i < n_visible(); ++i) p[i] = visible_.firing_probability(pre[i]);
}

void RbmBlock::restore_biases(std::span<const double> v_bias, std::span<const double> h_bias) {
  if (v_bias.size() != v_bias_.size() || h_bias.size() != h_bias_.size())
    throw std::invalid_argument("restore_biases: size mismatch");
  std::copy(v_bias.begin(), v_bias.end(), v_bias_.begin());
  std::copy(h_bias.begin(), h_bias.end(), h_bias_.begin());
}

std::vector<std::uint64_t> RbmBlock::bookkeeping() const {
  return {batches_done_,    visible_draws_,  hidden_draws_,      visible_commits_,
          hidden_commits_,  epochs_done_,    samples_per_epoch_, batches_per_epoch_};
}

void RbmBlock::restore_bookkeeping(std::span<const std::uint64_t> counters) {
  if (counters.size() != 8)
    throw std::invalid_argument("restore_bookkeeping: expected 8 counters");
  batches_done_ = counters[0];
  visible_draws_ = counters[1];
  hidden_draws_ = counters[2];
  visible_commits_ = counters[3];
  hidden_commits_ = counters[4];
  epochs_done_ = counters[5];
  samples_per_epoch_ = counters[6];
  batches_per_epoch_ = counters[7];
}

}  // namespace oxdgm
