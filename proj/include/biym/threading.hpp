#pragma once

namespace biym {

// Applies the BIYM_THREADS cap (unset or 0 = runtime default).
void init_threads_from_env();
int num_threads();

// Site counts below this are not worth forking a team for.
inline constexpr long kParallelGrain = 512;

}  // namespace biym
