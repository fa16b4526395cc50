#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace rsel {

using ActionMask = std::uint64_t;  // bit e: element e of the instance is selected
using RelayMask = std::uint32_t;   // bit k-1: local relay k is observed

struct FactoredBelief {
  std::vector<Eigen::VectorXd> per_relay;
  int relays() const { return static_cast<int>(per_relay.size()); }
};

inline int popcount(std::uint64_t m) { return __builtin_popcountll(m); }

}  // namespace rsel
