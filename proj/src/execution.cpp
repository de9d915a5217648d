#include "windres/execution.hpp"

#include <omp.h>

namespace windres
{

void set_thread_count(int threads)
{
    if (threads > 0)
        omp_set_num_threads(threads);
}

} // namespace windres
