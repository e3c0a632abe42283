#pragma once

#include <span>

namespace sinesteer::metrics {

enum class DiffScheme {
    /// Central differences at interior points, one-sided at both ends; the
    /// mean runs over all |D| points. Default, used by the evaluation suite.
    Central,
    /// Forward differences; the mean runs over the |D|-1 terms present.
    Forward,
};

/// sqrt( (1/|D|) sum (G_i - P_i)^2 ), both series in degrees.
double rmse(std::span<const double> ground, std::span<const double> predicted);

/// Mean squared discrete time derivative of the series (deg^2/s^2); lower
/// values mean smoother predicted steering. Needs length >= 3.
double whiteness(std::span<const double> predicted, double dt_seconds,
                 DiffScheme scheme = DiffScheme::Central);

}  // namespace sinesteer::metrics
