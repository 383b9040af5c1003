#pragma once

#include <mutex>

namespace homoglab {

// FFTW's planner is a process-wide singleton and not thread-safe; every
// plan creation/destruction in the library goes through this lock.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace homoglab
