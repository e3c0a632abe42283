#include "sinesteer/metrics.hpp"

#include <cmath>
#include <string>

#include "sinesteer/errors.hpp"

namespace sinesteer::metrics {

double rmse(std::span<const double> ground, std::span<const double> predicted) {
    if (ground.size() != predicted.size())
        raise(ErrorCode::LengthMismatch, "series lengths " + std::to_string(ground.size()) + " and " +
                                             std::to_string(predicted.size()) + " differ");
    if (ground.empty()) raise(ErrorCode::SeriesTooShort, "rmse needs length >= 1");
    double sq = 0.0;
    for (std::size_t i = 0; i < ground.size(); ++i) {
        const double d = ground[i] - predicted[i];
        sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(ground.size()));
}

double whiteness(std::span<const double> predicted, double dt_seconds, DiffScheme scheme) {
    if (predicted.size() < 3)
        raise(ErrorCode::SeriesTooShort, "whiteness needs length >= 3, got " + std::to_string(predicted.size()));
    if (!(dt_seconds > 0.0)) raise(ErrorCode::InvalidRate, "dt must be > 0");
    const std::size_t n = predicted.size();
    double sq = 0.0;
    if (scheme == DiffScheme::Central) {
        double d = (predicted[1] - predicted[0]) / dt_seconds;
        sq += d * d;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            d = (predicted[i + 1] - predicted[i - 1]) / (2.0 * dt_seconds);
            sq += d * d;
        }
        d = (predicted[n - 1] - predicted[n - 2]) / dt_seconds;
        sq += d * d;
        return sq / static_cast<double>(n);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = (predicted[i + 1] - predicted[i]) / dt_seconds;
        sq += d * d;
    }
    return sq / static_cast<double>(n - 1);
}

}  // namespace sinesteer::metrics
