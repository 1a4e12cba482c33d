#include "assouadlab/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace assouadlab {

namespace {

int default_threads() {
    if (const char* env = std::getenv("ASSOUADLAB_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) {
                return n;
            }
        } catch (const std::exception&) {
        }
    }
    return omp_get_max_threads();
}

std::atomic<int>& override_slot() {
    static std::atomic<int> slot{0};
    return slot;
}

} // namespace

int thread_count() {
    int o = override_slot().load();
    return o > 0 ? o : default_threads();
}

void set_thread_count(int threads) { override_slot().store(threads > 0 ? threads : 0); }

} // namespace assouadlab
