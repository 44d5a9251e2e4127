#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oxdgm/data_io.hpp"
#include "oxdgm/matrix.hpp"
#include "oxdgm/neuron.hpp"
#include "oxdgm/rbm.hpp"
#include "oxdgm/rng.hpp"

namespace oxdgm {

enum class ModelKind { kDbn, kSda };

/// Declarative description of a stacked model. layer_sizes lists every layer
/// node (DBN includes the 10-way class layer; SDA lists the encoder only —
/// the decoder mirrors it through tied weights). One RBM block per adjacent
/// pair; one normalizer per inter-block interface.
struct NetworkSpec {
  ModelKind kind = ModelKind::kDbn;
  std::vector<int> layer_sizes;
  QuantConfig quant;
  std::vector<NeuronLayerConfig> layer_cfgs;      // one per node in layer_sizes
  std::vector<RbmConfig> block_cfgs;              // one per block (= sizes-1)
  std::vector<NormalizerConfig> normalizers;      // one per interface (= blocks-1)
  std::string name;

  std::size_t n_blocks() const { return layer_sizes.empty() ? 0 : layer_sizes.size() - 1; }
  void validate() const;
};

/// Stack of RBM blocks trained greedily layer by layer. Serves both model
/// families: classification (top block supervised on one-hot labels, upward
/// probability pass as the class readout) and denoising autoencoding
/// (encoder stack plus a tied-weight transposed decoder).
class DgmModel {
 public:
  DgmModel(const NetworkSpec& spec, Rng& init_rng);

  const NetworkSpec& spec() const { return spec_; }
  std::size_t n_blocks() const { return blocks_.size(); }
  const RbmBlock& block(std::size_t l) const { return *blocks_[l]; }
  RbmBlock& block(std::size_t l) { return *blocks_[l]; }

  /// Greedy unsupervised pretraining: block 0 on the raw data, block l on
  /// the normalized firing probabilities of block l-1. For a classification
  /// stack the top (label) block is left untrained here. Never touches the
  /// weights of already-trained lower blocks.
  std::vector<std::vector<EpochStats>> train_greedy(const Matrix& data, Rng& rng);

  /// Supervised pass for the top block of a classification stack: positive
  /// phase clamps the class units to the one-hot label.
  std::vector<EpochStats> train_dbn_top(const Matrix& data, std::span<const int> labels,
                                        Rng& rng);

  /// Deterministic upward probability pass through l blocks (l = all blocks
  /// if npos); normalization applied at each inter-block interface.
  Matrix propagate(const Matrix& data, std::size_t n_blocks_up) const;

  /// Class scores sorted descending, ties broken toward the lower class
  /// index. Classification stacks only.
  std::vector<std::pair<int, double>> classify(std::span<const double> x) const;

  /// Probability-mode encode through every block, then decode through the
  /// tied transposed weights. Result is in [0,1]^input.
  std::vector<double> denoise(std::span<const double> x) const;

 private:
  void encode_up(std::span<const double> x, std::size_t n_up, std::vector<double>& buf) const;

  NetworkSpec spec_;
  std::vector<std::unique_ptr<RbmBlock>> blocks_;
};

struct ClassificationMetrics {
  double top1 = 0.0;  // percentages in [0, 100]
  double top3 = 0.0;
  double top5 = 0.0;
  std::size_t n = 0;
};

/// Top-k accuracy of the upward probability pass over a labeled test set.
ClassificationMetrics evaluate_classifier(const DgmModel& model, const ImageSet& test,
                                          int threads = 1);

/// Mean squared error per pixel between denoise(noisy) and the clean images.
double evaluate_denoiser(const DgmModel& model, const Matrix& clean, const Matrix& noisy,
                         int threads = 1);

}  // namespace oxdgm
