#include "windres/stats.hpp"

#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace windres
{

double student_t_critical(double confidence, double dof)
{
    if (!(confidence > 0.0 && confidence < 1.0) || !(dof > 0.0))
        throw std::invalid_argument{"student_t_critical: bad arguments"};
    boost::math::students_t const dist{dof};
    return boost::math::quantile(dist, 0.5 + 0.5 * confidence);
}

} // namespace windres
