#pragma once

#include <cstddef>

#if defined(__unix__) || defined(__APPLE__)
#include <sys/resource.h>
#endif

namespace cdf {

/// Deep call-depth budgets need a matching native stack; the evaluator
/// recurses a handful of frames per interpreted call. Call once at process
/// start, before any evaluation.
inline void raise_stack_limit(std::size_t bytes = 256ull << 20) {
#if defined(__unix__) || defined(__APPLE__)
  struct rlimit rl;
  if (getrlimit(RLIMIT_STACK, &rl) != 0) return;
  if (rl.rlim_cur != RLIM_INFINITY && rl.rlim_cur < bytes) {
    rl.rlim_cur = rl.rlim_max == RLIM_INFINITY
                      ? bytes
                      : (rl.rlim_max < bytes ? rl.rlim_max : bytes);
    setrlimit(RLIMIT_STACK, &rl);
  }
#else
  (void)bytes;
#endif
}

}  // namespace cdf
