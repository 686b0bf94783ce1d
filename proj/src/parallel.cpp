#include "maghelm/parallel.hpp"

namespace maghelm {

namespace {
std::atomic<int> g_workers{1};
}

void set_worker_count(int n) {
  if (n <= 0) n = (int)std::max(1u, std::thread::hardware_concurrency());
  g_workers = n;
}

int worker_count() { return g_workers; }

}  // namespace maghelm
