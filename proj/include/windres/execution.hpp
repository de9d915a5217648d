#pragma once

namespace windres
{

/// Selects the OpenMP kernel or the serial reference loop. Both produce
/// bit-identical results; the serial path exists for testing and baselines.
enum class Execution
{
    serial,
    parallel,
};

/// Sets the OpenMP thread count; 0 leaves the runtime default.
void set_thread_count(int threads);

} // namespace windres
