#pragma once

#include <cstdint>

#include "oxdgm/rng.hpp"

namespace oxdgm {

enum class ResistanceDist { kNormal, kLogNormal };

/// Cycle-to-cycle resistance statistics of a binary filamentary OxRAM device
/// plus the read-path divider electricals. Resistances in ohms, voltages in
/// volts.
struct DeviceParams {
  double mu_on = 10e3;
  double sigma_on = 2e3;
  double mu_off = 100e3;
  double sigma_off = 30e3;
  ResistanceDist dist = ResistanceDist::kNormal;
  double v_read = 1.0;
  double r_series = 100e3;

  /// Throws std::invalid_argument when a field violates its range.
  void validate() const;
};

enum class DeviceState : std::uint8_t { kHrs = 0, kLrs = 1 };

/// One binary-switching device. Resistance is resampled on every program to
/// model C2C variability; switch_count is pure endurance bookkeeping.
struct OxRamDevice {
  DeviceState state = DeviceState::kHrs;
  double resistance = 1.0;
  std::uint64_t switch_count = 0;
};

/// Fresh device programmed to `state` with a sampled resistance and a zeroed
/// counter (initial forming is not counted).
OxRamDevice init_device(const DeviceParams& params, DeviceState state, Rng& rng);

/// Draw a post-program resistance for the target state. Truncated below at
/// mu/100 so draws stay physical. With sigma == 0 returns exactly mu.
/// LogNormal is parameterized by the same (mu, sigma) moments.
double sample_resistance(const DeviceParams& params, DeviceState target, Rng& rng);

/// Program to `target`: always resamples resistance, increments switch_count
/// only when the state actually changes.
void program(OxRamDevice& device, DeviceState target, const DeviceParams& params, Rng& rng);

/// Full SET/RESET cycle ending in `target`: resamples resistance and counts
/// exactly one switching event regardless of the prior state. Used by the
/// stochastic-reference path where each draw cycles the device once.
void cycle(OxRamDevice& device, DeviceState target, const DeviceParams& params, Rng& rng);

/// Voltage across the device in the read divider: v_read * R / (R + r_series).
double read_reference_voltage(const OxRamDevice& device, const DeviceParams& params);

}  // namespace oxdgm
