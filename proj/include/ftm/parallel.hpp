#pragma once

#include <cstddef>
#include <functional>

namespace ftm {

// 0 means "use all hardware threads".
unsigned resolve_workers(unsigned requested) noexcept;

// Calls body(task) for every task in [0, tasks) using up to `workers`
// threads. Tasks are claimed dynamically; callers keep results
// deterministic by writing into slots indexed by task. The first exception
// thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t tasks, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace ftm
