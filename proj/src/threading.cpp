#include "biym/threading.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace biym {

void init_threads_from_env() {
#ifdef _OPENMP
  const char* env = std::getenv("BIYM_THREADS");
  if (env == nullptr) return;
  int k = std::atoi(env);
  if (k > 0) omp_set_num_threads(k);
#endif
}

int num_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace biym
