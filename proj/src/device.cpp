#include "oxdgm/device.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oxdgm {

void DeviceParams::validate() const {
  if (!(mu_on > 0.0)) throw std::invalid_argument("device: mu_on must be > 0");
  if (!(mu_off > mu_on)) throw std::invalid_argument("device: mu_off must be > mu_on");
  if (sigma_on < 0.0 || sigma_off < 0.0)
    throw std::invalid_argument("device: sigma must be >= 0");
  if (r_series < 0.0) throw std::invalid_argument("device: r_series must be >= 0");
  if (!(v_read > 0.0)) throw std::invalid_argument("device: v_read must be > 0");
}

OxRamDevice init_device(const DeviceParams& params, DeviceState state, Rng& rng) {
  OxRamDevice d;
  d.state = state;
  d.resistance = sample_resistance(params, state, rng);
  d.switch_count = 0;
  return d;
}

double sample_resistance(const DeviceParams& params, DeviceState target, Rng& rng) {
  const bool on = target == DeviceState::kLrs;
  const double mu = on ? params.mu_on : params.mu_off;
  const double sigma = on ? params.sigma_on : params.sigma_off;
  if (sigma == 0.0) return mu;

  double r;
  if (params.dist == ResistanceDist::kNormal) {
    r = rng.normal(mu, sigma);
  } else {
    // Moment-matched lognormal: draws have mean mu and stddev sigma.
    const double s2 = std::log(1.0 + (sigma * sigma) / (mu * mu));
    const double m = std::log(mu) - 0.5 * s2;
    r = std::exp(rng.normal(m, std::sqrt(s2)));
  }
  return std::max(r, mu / 100.0);
}

void program(OxRamDevice& device, DeviceState target, const DeviceParams& params, Rng& rng) {
  if (device.state != target) ++device.switch_count;
  device.state = target;
  device.resistance = sample_resistance(params, target, rng);
}

void cycle(OxRamDevice& device, DeviceState target, const DeviceParams& params, Rng& rng) {
  ++device.switch_count;
  device.state = target;
  device.resistance = sample_resistance(params, target, rng);
}

double read_reference_voltage(const OxRamDevice& device, const DeviceParams& params) {
  const double r = device.resistance;
  return params.v_read * r / (r + params.r_series);
}

}  // namespace oxdgm
