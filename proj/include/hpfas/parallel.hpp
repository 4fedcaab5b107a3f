// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_PARALLEL_HPP
#define HPFAS_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace hpfas::parallel {

/// Worker count used when a call does not name one: the value set by
/// set_default_workers, else HPFAS_THREADS, else the hardware concurrency.
int default_workers();

/// Overrides the default worker count; n <= 0 restores the automatic choice.
void set_default_workers(int n);

/// Calls body(i) for i in [0, n). Iterations are handed out dynamically, so
/// callers must write results into per-index slots and reduce them afterwards.
/// A call made from inside a worker runs serially. The first exception thrown
/// by any iteration is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers = 0);

} // namespace hpfas::parallel

#endif // HPFAS_PARALLEL_HPP
