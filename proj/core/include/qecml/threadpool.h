#pragma once

#include <functional>

namespace qecml {

// Runs fn(0..n-1) across up to `jobs` worker threads pulling indices from a
// shared counter. Blocks until every index completes; the first exception
// thrown by any job is rethrown on the caller. jobs <= 1 runs inline.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

// Hardware thread count, at least 1.
int default_jobs();

}  // namespace qecml
