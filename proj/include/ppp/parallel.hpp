#pragma once

namespace ppp {

enum class Exec { Serial, Parallel };

// Worker count for Exec::Parallel regions. PPP_THREADS, when set, caps it.
int max_threads();

// Re-read PPP_THREADS and apply it to the OpenMP runtime.
void configure_threads_from_env();

}  // namespace ppp
