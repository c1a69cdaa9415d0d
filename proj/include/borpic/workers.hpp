#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace borpic {

// BORPIC_WORKERS overrides the hardware thread count.
inline int worker_count() {
  if (const char* env = std::getenv("BORPIC_WORKERS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace borpic
