// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cyclosense {

// Number of worker threads for parallel regions. CYCLOSENSE_WORKERS
// overrides; otherwise one worker per available core (whatever the OpenMP
// runtime reports, so omp_set_num_threads() is respected).
inline int worker_count() {
  if (const char* env = std::getenv("CYCLOSENSE_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline bool in_parallel_region() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

}  // namespace cyclosense
