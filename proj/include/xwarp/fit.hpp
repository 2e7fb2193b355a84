#pragma once

#include <span>

namespace xwarp {

// Ordinary least-squares line y = slope * x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;  // coefficient of determination, clamped into [0, 1]
};

/// Requires xs.size() == ys.size() >= 2 and at least two distinct xs;
/// throws std::invalid_argument otherwise. A perfectly constant ys yields
/// r_squared = 1.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

}  // namespace xwarp
