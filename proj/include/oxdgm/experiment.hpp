#pragma once

#include <memory>
#include <string>
#include <vector>

#include "oxdgm/checkpoint.hpp"
#include "oxdgm/config.hpp"
#include "oxdgm/dgm.hpp"
#include "oxdgm/endurance.hpp"

namespace oxdgm {

/// Everything a finished training run produced, for callers that want the
/// numbers without re-reading the emitted CSV files.
struct RunResult {
  std::unique_ptr<DgmModel> model;
  ClassificationMetrics classification;  // classification stacks
  double mse = 0.0;                      // autoencoder stacks: noisy-input MSE
  double mse_clean = 0.0;                // autoencoder stacks: clean-input MSE
  std::vector<std::vector<EpochStats>> layer_stats;
  std::vector<EnduranceRow> endurance;
  std::string checkpoint_path;
};

/// Resolve the dataset directory: OXDGM_DATA_DIR environment variable wins
/// over the config value.
std::string resolve_data_dir(const ExperimentConfig& cfg);

/// Load the IDX files and build the class-balanced reduced train/test split
/// with the run's data substream.
void load_reduced_dataset(const ExperimentConfig& cfg, std::uint64_t seed, ImageSet& train,
                          ImageSet& test);

/// Train per config, evaluate, and write checkpoint + epochs/metrics/endurance
/// CSVs into out_dir. Deterministic for a fixed (config, seed) pair.
RunResult run_train(const ExperimentConfig& cfg, std::uint64_t seed,
                    const std::string& out_dir);

/// Re-evaluate a checkpoint on the config's test split and rewrite the
/// metrics CSV in out_dir.
RunResult run_eval(const std::string& checkpoint_path, const ExperimentConfig& cfg,
                   std::uint64_t seed, const std::string& out_dir);

/// Corrupt test images, reconstruct them through an autoencoder checkpoint,
/// write a PGM mosaic of corrupted/reconstructed pairs, and return the MSE.
double run_denoise(const std::string& checkpoint_path, const ExperimentConfig& cfg,
                   std::uint64_t seed, double density, std::size_t n_tiles,
                   const std::string& out_dir);

/// Write the switching-activity report of a checkpoint to endurance.csv in
/// out_dir and return the rows.
std::vector<EnduranceRow> run_endurance(const std::string& checkpoint_path,
                                        const std::string& out_dir);

/// CSV emission helpers shared by the commands above.
void write_epoch_csv(const std::string& path,
                     const std::vector<std::vector<EpochStats>>& layer_stats);
void write_metrics_csv(const std::string& path, const ExperimentConfig& cfg,
                       const RunResult& result);
void write_endurance_csv(const std::string& path, const std::vector<EnduranceRow>& rows);

}  // namespace oxdgm
