#pragma once

namespace assouadlab {

/// Number of threads the OpenMP kernels use. Starts at the ASSOUADLAB_THREADS environment
/// variable when set (and positive), otherwise the OpenMP default.
int thread_count();

/// Overrides the thread cap for subsequent kernel calls. Values < 1 reset to the default.
void set_thread_count(int threads);

} // namespace assouadlab
