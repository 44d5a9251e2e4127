#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "oxdgm/dgm.hpp"

namespace oxdgm {

/// Dataset location and reduced-subset sizes. File names follow the standard
/// IDX container naming; `dir` may be overridden by the OXDGM_DATA_DIR
/// environment variable at run time.
struct DataConfig {
  std::string dir = "data";
  std::string train_images = "train-images-idx3-ubyte.gz";
  std::string train_labels = "train-labels-idx1-ubyte.gz";
  std::string test_images = "t10k-images-idx3-ubyte.gz";
  std::string test_labels = "t10k-labels-idx1-ubyte.gz";
  std::uint64_t n_train = 5000;
  std::uint64_t n_test = 1000;
  // Threshold pixels to {0,1} at load time. The denoiser experiments run on
  // binary images (binary visible units, thresholded encoding); the
  // classifier experiments keep analog pixels and present them to the visible
  // layer as per-epoch Bernoulli samples instead.
  bool binarize = false;
};

/// Declarative experiment description parsed from a JSON .cfg file. Unknown
/// keys are rejected at every nesting level so typos cannot silently fall
/// back to defaults.
struct ExperimentConfig {
  std::string name;
  ModelKind kind = ModelKind::kDbn;
  std::vector<int> layer_sizes;
  std::uint64_t seed = 1;
  int threads = 1;

  // Training hyper-parameters; epsilon and epochs are resolved to one entry
  // per block (a scalar in the config file applies to every block).
  std::vector<double> epsilon;
  std::vector<int> epochs;
  int batch_size = 100;
  double momentum = 0.5;
  double weight_decay = 2e-4;
  bool use_bias = true;

  // Denoising option for the first (pixel-facing) block: each presented
  // training sample has this fraction of its pixels replaced by fresh
  // salt-and-pepper values, re-drawn every epoch. Zero presents the plain
  // Bernoulli encoding of the pixel and draws nothing extra.
  double input_corruption = 0.0;

  QuantConfig quant;
  DeviceParams device;

  RefMode ref_mode = RefMode::kIdealUniform;
  StateCommit state_commit = StateCommit::kPerBatch;
  std::vector<double> gains;  // sigmoid amplifier gain, one per layer node

  // Inter-block normalization stage; identity short-circuits the tables.
  bool normalizer_identity = true;
  std::vector<std::pair<double, double>> norm_gain_levels;
  std::vector<std::pair<double, double>> norm_bias_levels;
  std::vector<double> norm_selected;  // one programmed level per interface

  DataConfig data;
  double noise_density = 0.1;  // salt-and-pepper density for denoiser tests

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  void validate() const;
  NetworkSpec to_network_spec() const;
};

}  // namespace oxdgm
