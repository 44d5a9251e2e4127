#include "oxdgm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "oxdgm/csv.hpp"
#include "oxdgm/data_io.hpp"

namespace oxdgm {
namespace {

// Substream ids carving independent RNG streams out of one run seed.
constexpr std::uint64_t kStreamData = 1;
constexpr std::uint64_t kStreamInit = 2;
constexpr std::uint64_t kStreamTrain = 3;
constexpr std::uint64_t kStreamNoise = 4;

std::string join(const std::string& dir, const std::string& file) {
  if (dir.empty()) return file;
  return dir.back() == '/' ? dir + file : dir + "/" + file;
}

std::string mode_label(const ExperimentConfig& cfg) {
  return cfg.ref_mode == RefMode::kIdealUniform ? "software" : "hybrid";
}

void write_pgm_mosaic(const std::string& path, const Matrix& left, const Matrix& right,
                      std::size_t n_tiles) {
  const std::size_t side = static_cast<std::size_t>(std::lround(std::sqrt(
      static_cast<double>(left.cols))));
  if (side * side != left.cols)
    throw std::invalid_argument("mosaic: images are not square");
  const std::size_t n = std::min({n_tiles, left.rows, right.rows});
  const std::size_t grid = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n))));
  const std::size_t tile_w = 2 * side;  // corrupted | reconstructed
  const std::size_t width = grid * tile_w;
  const std::size_t height = grid * side;

  std::vector<unsigned char> canvas(width * height, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t ty = (k / grid) * side;
    const std::size_t tx = (k % grid) * tile_w;
    const auto l = left.row(k);
    const auto r = right.row(k);
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x) {
        const double lv = std::clamp(l[y * side + x], 0.0, 1.0);
        const double rv = std::clamp(r[y * side + x], 0.0, 1.0);
        canvas[(ty + y) * width + tx + x] = static_cast<unsigned char>(lv * 255.0 + 0.5);
        canvas[(ty + y) * width + tx + side + x] =
            static_cast<unsigned char>(rv * 255.0 + 0.5);
      }
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(canvas.data()),
            static_cast<std::streamsize>(canvas.size()));
  if (!out) throw std::runtime_error("mosaic write failed: " + path);
}

void evaluate_into(const ExperimentConfig& cfg, std::uint64_t seed, const ImageSet& test,
                   RunResult& result) {
  if (cfg.kind == ModelKind::kDbn) {
    result.classification = evaluate_classifier(*result.model, test, cfg.threads);
  } else {
    Rng noise = Rng::for_stream(seed, kStreamNoise);
    const Matrix noisy = salt_and_pepper(test.images, cfg.noise_density, noise);
    result.mse = evaluate_denoiser(*result.model, test.images, noisy, cfg.threads);
    result.mse_clean =
        evaluate_denoiser(*result.model, test.images, test.images, cfg.threads);
  }
}

}  // namespace

std::string resolve_data_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("OXDGM_DATA_DIR"); env != nullptr && env[0] != '\0')
    return env;
  return cfg.data.dir;
}

void load_reduced_dataset(const ExperimentConfig& cfg, std::uint64_t seed, ImageSet& train,
                          ImageSet& test) {
  const std::string dir = resolve_data_dir(cfg);
  const ImageSet train_src =
      load_idx(join(dir, cfg.data.train_images), join(dir, cfg.data.train_labels));
  const ImageSet test_src =
      load_idx(join(dir, cfg.data.test_images), join(dir, cfg.data.test_labels));
  Rng data_rng = Rng::for_stream(seed, kStreamData);
  // Train pool and held-out pool are separate source files; the reduced
  // subsets are drawn class-balanced from each.
  auto [tr, tr_rest] = reduced_subset(train_src, cfg.data.n_train, 0, data_rng);
  auto [te, te_rest] = reduced_subset(test_src, cfg.data.n_test, 0, data_rng);
  (void)tr_rest;
  (void)te_rest;
  train = std::move(tr);
  test = std::move(te);
  if (cfg.data.binarize) {
    for (double& px : train.images.data) px = px >= 0.5 ? 1.0 : 0.0;
    for (double& px : test.images.data) px = px >= 0.5 ? 1.0 : 0.0;
  }
}

void write_epoch_csv(const std::string& path,
                     const std::vector<std::vector<EpochStats>>& layer_stats) {
  CsvWriter csv(path);
  csv.row({"block", "epoch", "recon_error", "max_weight_flips", "max_neuron_switches"});
  for (std::size_t l = 0; l < layer_stats.size(); ++l) {
    for (const auto& e : layer_stats[l]) {
      csv.row({csv_u64(l + 1), csv_u64(static_cast<std::uint64_t>(e.epoch)),
               csv_double(e.recon_error), csv_u64(e.max_weight_flips),
               csv_u64(e.max_neuron_switches)});
    }
  }
  csv.close();
}

void write_metrics_csv(const std::string& path, const ExperimentConfig& cfg,
                       const RunResult& result) {
  CsvWriter csv(path);
  if (cfg.kind == ModelKind::kDbn) {
    csv.row({"name", "mode", "n_test", "top1_percent", "top3_percent", "top5_percent"});
    csv.row({cfg.name, mode_label(cfg), csv_u64(result.classification.n),
             csv_double(result.classification.top1), csv_double(result.classification.top3),
             csv_double(result.classification.top5)});
  } else {
    csv.row({"name", "mode", "n_test", "noise_density", "mse", "mse_clean"});
    csv.row({cfg.name, mode_label(cfg), csv_u64(cfg.data.n_test),
             csv_double(cfg.noise_density), csv_double(result.mse),
             csv_double(result.mse_clean)});
  }
  csv.close();
}

void write_endurance_csv(const std::string& path, const std::vector<EnduranceRow>& rows) {
  CsvWriter csv(path);
  csv.row({"group", "max_events", "bound", "total_events"});
  for (const auto& r : rows)
    csv.row({r.group, csv_u64(r.max_events), csv_u64(r.bound), csv_u64(r.total_events)});
  csv.close();
}

RunResult run_train(const ExperimentConfig& cfg, std::uint64_t seed,
                    const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ImageSet train, test;
  load_reduced_dataset(cfg, seed, train, test);

  const NetworkSpec spec = cfg.to_network_spec();
  Rng init_rng = Rng::for_stream(seed, kStreamInit);
  RunResult result;
  result.model = std::make_unique<DgmModel>(spec, init_rng);

  Rng train_rng = Rng::for_stream(seed, kStreamTrain);
  result.layer_stats = result.model->train_greedy(train.images, train_rng);
  if (cfg.kind == ModelKind::kDbn) {
    result.layer_stats.push_back(
        result.model->train_dbn_top(train.images, train.labels, train_rng));
  }

  evaluate_into(cfg, seed, test, result);
  result.endurance = endurance_report(*result.model);

  result.checkpoint_path = join(out_dir, cfg.name + ".ckpt");
  save_checkpoint(*result.model, result.checkpoint_path);
  write_epoch_csv(join(out_dir, cfg.name + "-epochs.csv"), result.layer_stats);
  write_metrics_csv(join(out_dir, cfg.name + "-metrics.csv"), cfg, result);
  write_endurance_csv(join(out_dir, cfg.name + "-endurance.csv"), result.endurance);
  return result;
}

RunResult run_eval(const std::string& checkpoint_path, const ExperimentConfig& cfg,
                   std::uint64_t seed, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  RunResult result;
  result.model = load_checkpoint(checkpoint_path);
  if (result.model->spec().kind != cfg.kind)
    throw std::invalid_argument("eval: checkpoint and config disagree on model kind");
  ImageSet train, test;
  load_reduced_dataset(cfg, seed, train, test);
  evaluate_into(cfg, seed, test, result);
  result.endurance = endurance_report(*result.model);
  result.checkpoint_path = checkpoint_path;
  write_metrics_csv(join(out_dir, cfg.name + "-metrics.csv"), cfg, result);
  return result;
}

double run_denoise(const std::string& checkpoint_path, const ExperimentConfig& cfg,
                   std::uint64_t seed, double density, std::size_t n_tiles,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto model = load_checkpoint(checkpoint_path);
  if (model->spec().kind != ModelKind::kSda)
    throw std::invalid_argument("denoise: checkpoint is not an autoencoder model");

  ImageSet train, test;
  load_reduced_dataset(cfg, seed, train, test);
  Rng noise = Rng::for_stream(seed, kStreamNoise);
  const Matrix noisy = salt_and_pepper(test.images, density, noise);

  const std::size_t n = std::min<std::size_t>(n_tiles, test.images.rows);
  Matrix recon(test.images.rows, test.images.cols);
  for (std::size_t k = 0; k < test.images.rows; ++k) {
    const auto xhat = model->denoise(noisy.row(k));
    std::copy(xhat.begin(), xhat.end(), recon.row(k).begin());
  }
  double se = 0.0;
  for (std::size_t k = 0; k < test.images.rows; ++k) {
    const auto x = test.images.row(k);
    const auto r = recon.row(k);
    for (std::size_t i = 0; i < test.images.cols; ++i) se += (r[i] - x[i]) * (r[i] - x[i]);
  }
  const double mse =
      se / (static_cast<double>(test.images.rows) * static_cast<double>(test.images.cols));

  write_pgm_mosaic(join(out_dir, model->spec().name + "-denoise.pgm"), noisy, recon, n);
  return mse;
}

std::vector<EnduranceRow> run_endurance(const std::string& checkpoint_path,
                                        const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto model = load_checkpoint(checkpoint_path);
  auto rows = endurance_report(*model);
  write_endurance_csv(join(out_dir, model->spec().name + "-endurance.csv"), rows);
  return rows;
}

}  // namespace oxdgm
