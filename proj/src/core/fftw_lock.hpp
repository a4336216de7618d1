#pragma once

#include <mutex>

namespace fatigue::detail {

// FFTW's planner is not re-entrant; every plan create/destroy takes this lock.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace fatigue::detail
