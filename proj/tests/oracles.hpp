#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check: the decoder oracle recovers phase by exhaustive search instead of
// normal equations, rmse_loop re-sums naively, and solve_ols fits linear
// estimators through plain Gaussian elimination.

#include <cmath>
#include <span>
#include <vector>

#include "sinesteer/angle_codec.hpp"

namespace oracles {

inline std::vector<double> sine_template(double angle_deg, int n, double phi_max) {
    std::vector<double> t(static_cast<std::size_t>(n));
    const double psi = angle_deg * M_PI / (2.0 * phi_max);
    for (int i = 0; i < n; ++i)
        t[static_cast<std::size_t>(i)] = std::sin(2.0 * M_PI * i / (n - 1) - psi);
    return t;
}

// RMS misfit between the wave and the best-amplitude template at this angle.
inline double template_misfit(std::span<const double> wave, double angle_deg, int n, double phi_max) {
    const auto t = sine_template(angle_deg, n, phi_max);
    double wt = 0.0, tt = 0.0;
    for (int i = 0; i < n; ++i) {
        wt += wave[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i)];
        tt += t[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i)];
    }
    const double amp = std::max(0.0, wt / tt);
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = wave[static_cast<std::size_t>(i)] - amp * t[static_cast<std::size_t>(i)];
        sq += d * d;
    }
    return std::sqrt(sq / n);
}

// Exhaustive single-stage grid search at the given step.
inline double grid_decode_full(std::span<const double> wave, const sinesteer::codec::CodecConfig& cfg,
                               double step = 0.01) {
    double best_angle = -cfg.phi_max;
    double best = HUGE_VAL;
    for (double a = -cfg.phi_max; a <= cfg.phi_max + 1e-12; a += step) {
        const double m = template_misfit(wave, a, cfg.n_neurons, cfg.phi_max);
        if (m < best) {
            best = m;
            best_angle = a;
        }
    }
    return best_angle;
}

// Coarse 0.5 deg sweep followed by an exhaustive 0.01 deg pass around the
// coarse minimum; equivalent to the full sweep (the profiled misfit is a
// smooth single-basin function of the phase) but fast enough for 1000 waves.
inline double grid_decode(std::span<const double> wave, const sinesteer::codec::CodecConfig& cfg) {
    double coarse_best = -cfg.phi_max;
    double best = HUGE_VAL;
    for (double a = -cfg.phi_max; a <= cfg.phi_max + 1e-12; a += 0.5) {
        const double m = template_misfit(wave, a, cfg.n_neurons, cfg.phi_max);
        if (m < best) {
            best = m;
            coarse_best = a;
        }
    }
    const double lo = std::max(-cfg.phi_max, coarse_best - 1.5);
    const double hi = std::min(cfg.phi_max, coarse_best + 1.5);
    double fine_best = coarse_best;
    best = HUGE_VAL;
    for (double a = lo; a <= hi + 1e-12; a += 0.01) {
        const double m = template_misfit(wave, a, cfg.n_neurons, cfg.phi_max);
        if (m < best) {
            best = m;
            fine_best = a;
        }
    }
    return fine_best;
}

inline double rmse_loop(std::span<const double> a, std::span<const double> b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sq / static_cast<double>(a.size()));
}

// Gaussian elimination with partial pivoting; A is n x n row-major.
inline std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        const double diag = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / diag;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t row = n; row-- > 0;) {
        double acc = b[row];
        for (std::size_t c = row + 1; c < n; ++c) acc -= a[row * n + c] * x[c];
        x[row] = acc / a[row * n + row];
    }
    return x;
}

// Ordinary least squares with intercept: rows of X against y. Returns the
// in-sample residual RMSE.
inline double ols_residual_rmse(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
    const std::size_t d = x.front().size() + 1;  // + intercept
    std::vector<double> xtx(d * d, 0.0);
    std::vector<double> xty(d, 0.0);
    auto augmented = [&](const std::vector<double>& row, std::size_t j) {
        return j < row.size() ? row[j] : 1.0;
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double xj = augmented(x[i], j);
            xty[j] += xj * y[i];
            for (std::size_t k = 0; k < d; ++k) xtx[j * d + k] += xj * augmented(x[i], k);
        }
    }
    const auto beta = solve_linear(std::move(xtx), std::move(xty), d);
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double pred = 0.0;
        for (std::size_t j = 0; j < d; ++j) pred += beta[j] * augmented(x[i], j);
        sq += (pred - y[i]) * (pred - y[i]);
    }
    return std::sqrt(sq / static_cast<double>(x.size()));
}

}  // namespace oracles
