#ifndef MTOBS_FAULT_HPP
#define MTOBS_FAULT_HPP

namespace mtobs {

enum class FaultKind { remove_link, remove_node };

/// Scheduled isolation event. Link removals are directed: an undirected
/// channel failure is written as two events. The transition into
/// trigger_step already uses the post-fault network.
struct FaultEvent {
  int trigger_step = 0;
  FaultKind kind = FaultKind::remove_link;
  int node = 0;  // source node for remove_link, the node for remove_node
  int target = 0;  // target node for remove_link, unused otherwise
  bool redesign_gain = false;

  friend bool operator==(const FaultEvent&, const FaultEvent&) = default;
};

}  // namespace mtobs

#endif
