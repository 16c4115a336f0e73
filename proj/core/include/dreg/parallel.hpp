#pragma once

#include <cstddef>
#include <functional>

namespace dreg {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work items
/// must write only to their own slot; the first exception by index is
/// rethrown after all workers finish, so failures are scheduling-independent.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace dreg
