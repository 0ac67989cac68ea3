#ifndef MTOBS_PLACEMENT_HPP
#define MTOBS_PLACEMENT_HPP

#include <vector>

namespace mtobs {

/// Which global state indices each CAV measures. A CAV's output matrix C_i is
/// one canonical selection row per measured index; CAVs may measure nothing.
struct SensorPlacement {
  int cav_count = 0;
  std::vector<std::vector<int>> measured;  // size cav_count, global indices

  /// Throws if sizes are inconsistent or an index falls outside
  /// [0, state_dim).
  void validate(int state_dim) const;

  /// Union of measured indices over all CAVs, sorted, deduplicated.
  std::vector<int> all_measured() const;
};

}  // namespace mtobs

#endif
