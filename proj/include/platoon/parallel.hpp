#ifndef PLATOON_PARALLEL_HPP_
#define PLATOON_PARALLEL_HPP_

// OpenMP shim: serial fallbacks so the library builds without OpenMP.
#ifdef _OPENMP
#include <omp.h>
#else
inline int omp_get_max_threads() { return 1; }
inline int omp_get_thread_num() { return 0; }
#endif

#endif  // PLATOON_PARALLEL_HPP_
