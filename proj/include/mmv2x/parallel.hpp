#pragma once

#include <cstdlib>
#include <string>

#ifdef MMV2X_HAVE_OPENMP
#include <omp.h>
#endif

namespace mmv2x {

/// Kernel execution mode. Serial is the reference; Parallel must produce
/// bit-identical results.
enum class Exec { Serial, Parallel };

inline bool openmp_enabled() {
#ifdef MMV2X_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

inline int max_threads() {
#ifdef MMV2X_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef MMV2X_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

/// Applies MMV2X_THREADS if set; returns the resulting cap.
inline int apply_thread_env() {
  if (const char* s = std::getenv("MMV2X_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) set_threads(n);
  }
  return max_threads();
}

}  // namespace mmv2x
