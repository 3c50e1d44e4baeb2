#pragma once

namespace rdregion {

// serial: the generic JointPMF evaluation path, one triple at a time (reference).
// parallel: OpenMP kernels; results are merged in grid order so both paths agree.
enum class Execution { serial, parallel };

void set_thread_count(int threads);
int thread_count();

}  // namespace rdregion
