#pragma once

#include <cstddef>
#include <functional>

namespace tgk {

// Execution policy for the data-parallel loops (alpha-grid scan, POD grid,
// correlation-matrix assembly, batch prediction). Serial is the reference
// path; Parallel runs the same per-index work items under OpenMP. Work items
// write only to their own output slots and draw from per-index substreams,
// so the two policies produce identical results; the test suite checks this.
enum class Exec { Serial, Parallel };

// Thread count used by the Parallel policy. 0 restores the OpenMP default.
void set_threads(int n);
int max_threads();

// Runs body(i) for i in [0, count). Exceptions thrown by work items are
// captured and the first one rethrown after the loop completes.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  Exec mode = Exec::Parallel);

}  // namespace tgk
