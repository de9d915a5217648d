#pragma once

#include <cstddef>

namespace windres
{

/// Two-sided Student-t critical value: the (1 + confidence)/2 quantile with
/// `dof` degrees of freedom. confidence = 0.99 gives t_{0.005, dof}.
double student_t_critical(double confidence, double dof);

} // namespace windres
