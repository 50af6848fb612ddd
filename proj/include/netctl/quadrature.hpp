#pragma once

#include <span>

namespace netctl {

/// Composite Simpson on a uniform grid; an odd interval count closes with
/// the 3/8 rule over the last three intervals. Two samples fall back to the
/// trapezoid.
double simpson(std::span<const double> values, double h);

}  // namespace netctl
