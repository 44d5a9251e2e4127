#include "oxdgm/dgm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace oxdgm {

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("network: need at least 2 layers");
  for (int s : layer_sizes)
    if (s < 1) throw std::invalid_argument("network: layer sizes must be >= 1");
  if (kind == ModelKind::kDbn && layer_sizes.back() != 10)
    throw std::invalid_argument("network: classification stack must end in 10 class units");
  if (layer_cfgs.size() != layer_sizes.size())
    throw std::invalid_argument("network: one layer config per layer required");
  for (std::size_t n = 0; n < layer_cfgs.size(); ++n) {
    if (layer_cfgs[n].size != layer_sizes[n])
      throw std::invalid_argument("network: layer config size mismatch");
    layer_cfgs[n].validate();
  }
  if (block_cfgs.size() != n_blocks())
    throw std::invalid_argument("network: one training config per block required");
  for (const auto& c : block_cfgs) c.validate();
  if (normalizers.size() + 1 != n_blocks() && !(n_blocks() == 1 && normalizers.empty()))
    throw std::invalid_argument("network: one normalizer per inter-block interface required");
  for (const auto& n : normalizers) n.validate();
  quant.validate();
}

DgmModel::DgmModel(const NetworkSpec& spec, Rng& init_rng) : spec_(spec) {
  spec_.validate();
  blocks_.reserve(spec_.n_blocks());
  for (std::size_t l = 0; l < spec_.n_blocks(); ++l) {
    blocks_.push_back(std::make_unique<RbmBlock>(spec_.quant, spec_.layer_cfgs[l],
                                                 spec_.layer_cfgs[l + 1],
                                                 spec_.block_cfgs[l], init_rng));
  }
}

Matrix DgmModel::propagate(const Matrix& data, std::size_t n_blocks_up) const {
  const std::size_t n_up = std::min(n_blocks_up, blocks_.size());
  Matrix cur = data;
  for (std::size_t l = 0; l < n_up; ++l) {
    const RbmBlock& blk = *blocks_[l];
    if (cur.cols != static_cast<std::size_t>(blk.n_visible()))
      throw std::invalid_argument("propagate: width mismatch at block " + std::to_string(l));
    Matrix next(cur.rows, blk.n_hidden());
    for (std::size_t k = 0; k < cur.rows; ++k) {
      auto out = next.row(k);
      blk.hidden_probabilities(cur.row(k), out);
      if (l + 1 < blocks_.size()) normalize(out, spec_.normalizers[l], out);
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<std::vector<EpochStats>> DgmModel::train_greedy(const Matrix& data, Rng& rng) {
  if (data.cols != static_cast<std::size_t>(spec_.layer_sizes[0]))
    throw std::invalid_argument("train_greedy: data width must match the input layer");
  const std::size_t n_unsup =
      spec_.kind == ModelKind::kDbn ? blocks_.size() - 1 : blocks_.size();

  std::vector<std::vector<EpochStats>> stats;
  stats.reserve(n_unsup);
  Matrix cur = data;
  for (std::size_t l = 0; l < n_unsup; ++l) {
    RbmBlock& blk = *blocks_[l];
    stats.push_back(blk.train(cur, rng));
    if (l + 1 < n_unsup) {
      // Next block trains on this block's normalized firing probabilities.
      Matrix next(cur.rows, blk.n_hidden());
      for (std::size_t k = 0; k < cur.rows; ++k) {
        auto out = next.row(k);
        blk.hidden_probabilities(cur.row(k), out);
        normalize(out, spec_.normalizers[l], out);
      }
      cur = std::move(next);
    }
  }
  return stats;
}

std::vector<EpochStats> DgmModel::train_dbn_top(const Matrix& data,
                                                std::span<const int> labels, Rng& rng) {
  if (spec_.kind != ModelKind::kDbn)
    throw std::invalid_argument("train_dbn_top: not a classification stack");
  if (labels.size() != data.rows)
    throw std::invalid_argument("train_dbn_top: label/feature count mismatch");
  const Matrix features = propagate(data, blocks_.size() - 1);
  return blocks_.back()->train_supervised(features, labels, rng);
}

void DgmModel::encode_up(std::span<const double> x, std::size_t n_up,
                         std::vector<double>& buf) const {
  buf.assign(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < n_up; ++l) {
    const RbmBlock& blk = *blocks_[l];
    if (buf.size() != static_cast<std::size_t>(blk.n_visible()))
      throw std::invalid_argument("encode: input width mismatch");
    next.resize(blk.n_hidden());
    blk.hidden_probabilities(buf, next);
    if (l + 1 < blocks_.size()) normalize(next, spec_.normalizers[l], next);
    buf.swap(next);
  }
}

std::vector<std::pair<int, double>> DgmModel::classify(std::span<const double> x) const {
  if (spec_.kind != ModelKind::kDbn)
    throw std::invalid_argument("classify: not a classification stack");
  std::vector<double> scores;
  encode_up(x, blocks_.size(), scores);
  std::vector<std::pair<int, double>> ranked(scores.size());
  for (std::size_t c = 0; c < scores.size(); ++c) ranked[c] = {static_cast<int>(c), scores[c]};
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

std::vector<double> DgmModel::denoise(std::span<const double> x) const {
  if (spec_.kind != ModelKind::kSda)
    throw std::invalid_argument("denoise: not an autoencoder stack");
  std::vector<double> h;
  encode_up(x, blocks_.size(), h);
  // Decode through the tied transposed weights, top block back to pixels.
  std::vector<double> next;
  for (std::size_t l = blocks_.size(); l-- > 0;) {
    const RbmBlock& blk = *blocks_[l];
    next.resize(blk.n_visible());
    blk.visible_probabilities(h, next);
    h.swap(next);
  }
  return h;
}

namespace {

/// Deterministic parallel map over sample indices: results land in per-index
/// slots, so the reduction order is independent of thread scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t k = t; k < n; k += nt) fn(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

ClassificationMetrics evaluate_classifier(const DgmModel& model, const ImageSet& test,
                                          int threads) {
  if (test.size() == 0) throw std::invalid_argument("evaluate: empty test set");
  const std::size_t n = test.size();
  std::vector<int> rank_of_true(n, 0);
  parallel_for(n, threads, [&](std::size_t k) {
    const auto ranked = model.classify(test.images.row(k));
    int rank = static_cast<int>(ranked.size());
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      if (ranked[r].first == test.labels[k]) {
        rank = static_cast<int>(r);
        break;
      }
    }
    rank_of_true[k] = rank;
  });
  std::size_t hit1 = 0, hit3 = 0, hit5 = 0;
  for (int r : rank_of_true) {
    if (r < 1) ++hit1;
    if (r < 3) ++hit3;
    if (r < 5) ++hit5;
  }
  ClassificationMetrics m;
  m.n = n;
  m.top1 = 100.0 * static_cast<double>(hit1) / static_cast<double>(n);
  m.top3 = 100.0 * static_cast<double>(hit3) / static_cast<double>(n);
  m.top5 = 100.0 * static_cast<double>(hit5) / static_cast<double>(n);
  return m;
}

double evaluate_denoiser(const DgmModel& model, const Matrix& clean, const Matrix& noisy,
                         int threads) {
  if (clean.rows == 0) throw std::invalid_argument("evaluate: empty test set");
  if (clean.rows != noisy.rows || clean.cols != noisy.cols)
    throw std::invalid_argument("evaluate: clean/noisy shape mismatch");
  std::vector<double> se(clean.rows, 0.0);
  parallel_for(clean.rows, threads, [&](std::size_t k) {
    const auto xhat = model.denoise(noisy.row(k));
    const auto x = clean.row(k);
    double s = 0.0;
    for (std::size_t i = 0; i < clean.cols; ++i) {
      const double d = xhat[i] - x[i];
      s += d * d;
    }
    se[k] = s;
  });
  double total = 0.0;
  for (double s : se) total += s;
  return total / (static_cast<double>(clean.rows) * static_cast<double>(clean.cols));
}

}  // namespace oxdgm
