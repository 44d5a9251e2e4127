#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "oxdgm/experiment.hpp"

namespace {

using namespace oxdgm;

std::uint64_t pick_seed(const ExperimentConfig& cfg, bool seed_given, std::uint64_t seed) {
  return seed_given ? seed : cfg.seed;
}

void print_result(const ExperimentConfig& cfg, const RunResult& result) {
  if (cfg.kind == ModelKind::kDbn) {
    std::printf("%s: top-1 %.2f%%  top-3 %.2f%%  top-5 %.2f%%  (%zu test images)\n",
                cfg.name.c_str(), result.classification.top1, result.classification.top3,
                result.classification.top5, result.classification.n);
  } else {
    std::printf("%s: MSE %.6f (density %.2f)  clean-input MSE %.6f\n", cfg.name.c_str(),
                result.mse, cfg.noise_density, result.mse_clean);
  }
}

void print_endurance(const std::vector<EnduranceRow>& rows) {
  std::printf("%-18s %14s %14s %16s\n", "group", "max_events", "bound", "total_events");
  for (const auto& r : rows) {
    std::printf("%-18s %14llu %14llu %16llu\n", r.group.c_str(),
                static_cast<unsigned long long>(r.max_events),
                static_cast<unsigned long long>(r.bound),
                static_cast<unsigned long long>(r.total_events));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Behavioral simulator of OxRAM-based deep generative models: stacked "
      "binary RBMs with quantized synapses, stochastic device-derived neuron "
      "activation, and per-device switching-endurance accounting."};
  app.require_subcommand(1);

  std::string cfg_path, ckpt_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double density = -1.0;
  std::size_t tiles = 100;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Override the config's RNG seed")
        ->each([&](const std::string&) { seed_given = true; });
  };

  CLI::App* train = app.add_subcommand("train", "Train a model from a config file");
  train->add_option("config", cfg_path, "Experiment config (.cfg, JSON)")->required();
  train->add_option("--out-dir", out_dir, "Output directory (default runs/<name>)");
  add_seed(train);

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  eval->add_option("checkpoint", ckpt_path, "Model checkpoint")->required();
  eval->add_option("config", cfg_path, "Experiment config (.cfg, JSON)")->required();
  eval->add_option("--out-dir", out_dir, "Output directory (default runs/<name>)");
  add_seed(eval);

  CLI::App* denoise =
      app.add_subcommand("denoise", "Reconstruct corrupted test images with an autoencoder");
  denoise->add_option("checkpoint", ckpt_path, "Autoencoder checkpoint")->required();
  denoise->add_option("config", cfg_path, "Experiment config (.cfg, JSON)")->required();
  denoise->add_option("--density", density, "Salt-and-pepper density (default from config)");
  denoise->add_option("--tiles", tiles, "Images in the output mosaic (default 100)");
  denoise->add_option("--out-dir", out_dir, "Output directory (default runs/<name>)");
  add_seed(denoise);

  CLI::App* endurance =
      app.add_subcommand("endurance", "Print the switching-activity report of a checkpoint");
  endurance->add_option("checkpoint", ckpt_path, "Model checkpoint")->required();
  endurance->add_option("--out-dir", out_dir, "Directory for endurance.csv (default runs)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const auto cfg = ExperimentConfig::from_file(cfg_path);
      const std::uint64_t s = pick_seed(cfg, seed_given, seed);
      const std::string dir = out_dir.empty() ? "runs/" + cfg.name : out_dir;
      const RunResult result = run_train(cfg, s, dir);
      print_result(cfg, result);
      std::printf("checkpoint: %s\n", result.checkpoint_path.c_str());
    } else if (eval->parsed()) {
      const auto cfg = ExperimentConfig::from_file(cfg_path);
      const std::uint64_t s = pick_seed(cfg, seed_given, seed);
      const std::string dir = out_dir.empty() ? "runs/" + cfg.name : out_dir;
      const RunResult result = run_eval(ckpt_path, cfg, s, dir);
      print_result(cfg, result);
    } else if (denoise->parsed()) {
      const auto cfg = ExperimentConfig::from_file(cfg_path);
      const std::uint64_t s = pick_seed(cfg, seed_given, seed);
      const std::string dir = out_dir.empty() ? "runs/" + cfg.name : out_dir;
      const double d = density < 0.0 ? cfg.noise_density : density;
      const double mse = run_denoise(ckpt_path, cfg, s, d, tiles, dir);
      std::printf("MSE %.6f at density %.2f (mosaic in %s)\n", mse, d, dir.c_str());
    } else if (endurance->parsed()) {
      const std::string dir = out_dir.empty() ? "runs" : out_dir;
      const auto rows = run_endurance(ckpt_path, dir);
      print_endurance(rows);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
