#include "multcorr/parallel.hpp"

#include <cstdlib>
#include <string>

namespace multcorr {

namespace {
int g_threads = 0;  // 0 = auto

int resolve_auto() {
  if (const char* env = std::getenv("MULTCORR_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
      // fall through to hardware concurrency
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}
}  // namespace

void set_thread_count(int n) { g_threads = n < 0 ? 0 : n; }

int thread_count() { return g_threads > 0 ? g_threads : resolve_auto(); }

}  // namespace multcorr
