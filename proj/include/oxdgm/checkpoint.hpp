#pragma once

#include <memory>
#include <string>

#include "oxdgm/dgm.hpp"

namespace oxdgm {

/// Serialize a model (spec, quantized weight codes, biases, every endurance
/// counter) to a deterministic little-endian binary file. Momentum velocity
/// is not stored: a checkpoint supports evaluation, denoising, and endurance
/// reporting, not resuming an interrupted training run.
void save_checkpoint(const DgmModel& model, const std::string& path);

/// Rebuild a model from a checkpoint written by save_checkpoint. Throws
/// std::runtime_error on unreadable, mis-tagged, or truncated files.
std::unique_ptr<DgmModel> load_checkpoint(const std::string& path);

}  // namespace oxdgm
