#include "spin7/parallel.hpp"

#include <atomic>

namespace spin7::par {

namespace {
std::atomic<bool> g_parallel{true};
}

void setParallel(bool enabled) { g_parallel.store(enabled); }

bool parallelEnabled() { return g_parallel.load(); }

int threadCount()
{
#ifdef _OPENMP
    return parallelEnabled() ? omp_get_max_threads() : 1;
#else
    return 1;
#endif
}

} // namespace spin7::par
