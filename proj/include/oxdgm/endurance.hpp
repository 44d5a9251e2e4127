#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oxdgm/dgm.hpp"

namespace oxdgm {

/// One device group of the switching-activity report: a neuron layer's state
/// or reference devices, or one weight matrix's bit devices.
struct EnduranceRow {
  std::string group;             // "L1-784-state", "L1-784-ref", "W1", ...
  std::uint64_t max_events = 0;  // worst single device in the group
  std::uint64_t bound = 0;       // analytic worst-case for the group
  std::uint64_t total_events = 0;
};

/// Switching-activity table over all device groups of a model. Adjacent
/// blocks share a physical layer (the hidden memory of block l is the
/// visible memory of block l+1), so per-unit counters of the two roles are
/// merged additively into one row per layer node.
///
/// Bounds: weight devices flip at most once per batch write, so the bound is
/// the number of batch updates. Reference devices cycle exactly once per
/// stochastic draw, so the bound is the number of sampling rounds the layer
/// participated in. State devices are programmed once per commit round.
std::vector<EnduranceRow> endurance_report(const DgmModel& model);

/// Largest max_events over every row (the paper-style headline number).
std::uint64_t max_switching_events(const std::vector<EnduranceRow>& report);

}  // namespace oxdgm
