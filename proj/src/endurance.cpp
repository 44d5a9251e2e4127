#include "oxdgm/endurance.hpp"

#include <algorithm>
#include <cstdio>

namespace oxdgm {

std::vector<EnduranceRow> endurance_report(const DgmModel& model) {
  const auto& sizes = model.spec().layer_sizes;
  const std::size_t n_blocks = model.n_blocks();
  std::vector<EnduranceRow> rows;
  rows.reserve(2 * sizes.size() + n_blocks);

  for (std::size_t n = 0; n < sizes.size(); ++n) {
    const int sz = sizes[n];
    EnduranceRow state_row, ref_row;
    char label[64];
    std::snprintf(label, sizeof label, "L%zu-%d-state", n + 1, sz);
    state_row.group = label;
    std::snprintf(label, sizeof label, "L%zu-%d-ref", n + 1, sz);
    ref_row.group = label;

    // Roles adjacent to layer node n: hidden side of block n-1, visible side
    // of block n. Both touch the same physical devices.
    for (int k = 0; k < sz; ++k) {
      std::uint64_t state_events = 0, ref_events = 0;
      if (n >= 1) {
        const RbmBlock& below = model.block(n - 1);
        state_events += below.hidden().state_switches(k);
        ref_events += below.hidden().ref_switches(k);
      }
      if (n < n_blocks) {
        const RbmBlock& above = model.block(n);
        state_events += above.visible().state_switches(k);
        ref_events += above.visible().ref_switches(k);
      }
      state_row.max_events = std::max(state_row.max_events, state_events);
      ref_row.max_events = std::max(ref_row.max_events, ref_events);
      state_row.total_events += state_events;
      ref_row.total_events += ref_events;
    }
    if (n >= 1) {
      state_row.bound += model.block(n - 1).hidden_commits();
      ref_row.bound += model.block(n - 1).hidden_draws();
    }
    if (n < n_blocks) {
      state_row.bound += model.block(n).visible_commits();
      ref_row.bound += model.block(n).visible_draws();
    }
    rows.push_back(state_row);
    rows.push_back(ref_row);
  }

  for (std::size_t b = 0; b < n_blocks; ++b) {
    const RbmBlock& blk = model.block(b);
    EnduranceRow row;
    char label[32];
    std::snprintf(label, sizeof label, "W%zu", b + 1);
    row.group = label;
    row.max_events = blk.weights().max_bit_flips();
    row.bound = blk.batches_done();
    row.total_events = blk.weights().total_bit_flips();
    rows.push_back(row);
  }
  return rows;
}

std::uint64_t max_switching_events(const std::vector<EnduranceRow>& report) {
  std::uint64_t m = 0;
  for (const auto& row : report) m = std::max(m, row.max_events);
  return m;
}

}  // namespace oxdgm
