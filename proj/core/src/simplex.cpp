#include "proactive/simplex.hpp"

#include "proactive/error.hpp"

#include <cmath>
#include <limits>

namespace proactive {

FeasibilityResult phase_one(const Matrix& a, std::span<const double> b, double tolerance) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (b.size() != m) throw DataError("phase_one: right-hand side length mismatch");
    for (double v : a.data()) {
        if (!std::isfinite(v)) throw DataError("phase_one: non-finite constraint matrix");
    }
    for (double v : b) {
        if (!std::isfinite(v)) throw DataError("phase_one: non-finite right-hand side");
    }

    constexpr double kPivotTol = 1e-12;
    const std::size_t cols = n + m; // originals, then one artificial per row
    Matrix tab(m, cols + 1);        // last column: right-hand side
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tab(i, j) = sign * a(i, j);
        tab(i, n + i) = 1.0;
        tab(i, cols) = sign * b[i];
        basis[i] = n + i;
    }

    // Reduced costs of the phase-1 objective (minimize the artificial sum).
    std::vector<double> cost(cols + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) cost[j] -= tab(i, j);
        cost[cols] -= tab(i, cols);
    }

    FeasibilityResult result;
    const std::size_t max_pivots = 1000 * (m + n) + 1000;
    while (true) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j) {
            if (cost[j] < -kPivotTol) {
                enter = j;
                break;
            }
        }
        if (enter == cols) break;

        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            const double coef = tab(i, enter);
            if (coef <= kPivotTol) continue;
            const double ratio = tab(i, cols) / coef;
            if (ratio < best - kPivotTol || (ratio <= best + kPivotTol && leave < m && basis[i] < basis[leave])) {
                best = std::min(best, ratio);
                leave = i;
            }
        }
        // The phase-1 objective is bounded below by zero, so a ray cannot occur
        // unless numerical noise produced it.
        if (leave == m) throw NumericError("phase_one: unbounded direction in a bounded problem");

        const double pivot = tab(leave, enter);
        for (std::size_t j = 0; j <= cols; ++j) tab(leave, j) /= pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave) continue;
            const double factor = tab(i, enter);
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) tab(i, j) -= factor * tab(leave, j);
        }
        const double factor = cost[enter];
        for (std::size_t j = 0; j <= cols; ++j) cost[j] -= factor * tab(leave, j);
        basis[leave] = enter;

        if (++result.pivots > max_pivots) throw NumericError("phase_one: pivot limit exceeded");
    }

    result.infeasibility = -cost[cols];
    result.feasible = result.infeasibility <= tolerance;
    result.solution.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) result.solution[basis[i]] = tab(i, cols);
    }
    return result;
}

} // namespace proactive
