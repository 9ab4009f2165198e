#include "tilewalsh/parallel.hpp"

#include <cstdlib>
#include <string>

namespace tilewalsh {

int thread_count() {
  if (const char* env = std::getenv("TILEWALSH_THREADS"); env && *env) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return std::min(n, 256);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace tilewalsh
