#pragma once

namespace lbm {

// PDF storage order: AoS keeps one node's populations consecutive, SoA keeps
// one direction's populations consecutive.
enum class Layout { AoS, SoA };

inline const char* to_string(Layout l) {
  return l == Layout::AoS ? "aos" : "soa";
}

}  // namespace lbm
