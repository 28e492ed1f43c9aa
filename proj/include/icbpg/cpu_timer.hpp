#pragma once

#include <ctime>

namespace icbpg {

/// CPU time consumed by the calling thread, in seconds.
///
/// The solve loop is single-threaded, so this equals the process CPU time of a
/// solve while staying correct when several solves share a process.
inline double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

class CpuStopwatch {
 public:
  CpuStopwatch() : start_(thread_cpu_seconds()) {}
  double elapsed() const { return thread_cpu_seconds() - start_; }
  void restart() { start_ = thread_cpu_seconds(); }

 private:
  double start_;
};

}  // namespace icbpg
