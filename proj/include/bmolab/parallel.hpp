#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bmo {

#ifdef _OPENMP
inline int worker_count() { return omp_get_max_threads(); }
inline void set_workers(int n) {
  if (n > 0) omp_set_num_threads(n);
}
#else
inline int worker_count() { return 1; }
inline void set_workers(int) {}
#endif

}  // namespace bmo
