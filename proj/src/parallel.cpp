#include "ppp/parallel.hpp"

#include <cstdlib>
#include <omp.h>

namespace ppp {

int max_threads() {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("PPP_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0 && cap < n) n = cap;
    }
    return n < 1 ? 1 : n;
}

void configure_threads_from_env() {
    omp_set_num_threads(max_threads());
}

}  // namespace ppp
