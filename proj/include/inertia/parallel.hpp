#pragma once

namespace inertia {

/// Selects between the OpenMP kernels and their serial reference versions.
/// Both paths produce bit-identical results; the serial one exists for tests
/// and for benchmarking the parallel speed-up.
enum class Execution { Serial, Parallel };

/// Number of OpenMP threads that a Parallel kernel would use.
int max_threads();
void set_threads(int n);

}  // namespace inertia
