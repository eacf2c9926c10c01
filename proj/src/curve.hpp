#pragma once

// small shared helpers for sampled-curve analysis; internal to the library

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace spdckit::curve {

inline std::vector<double> trapezoid_weights(std::size_t n, double step) {
    std::vector<double> w(n, step);
    if (n >= 2) {
        w.front() = 0.5 * step;
        w.back() = 0.5 * step;
    }
    return w;
}

struct LevelCrossings {
    double lo = std::numeric_limits<double>::quiet_NaN();
    double hi = std::numeric_limits<double>::quiet_NaN();
    bool found = false;
    bool lo_truncated = false;  // curve already above the level at the edge
    bool hi_truncated = false;
};

// outermost crossings of y(x) with a horizontal level, linearly interpolated
inline LevelCrossings outer_level_crossings(const std::vector<double>& x,
                                            const std::vector<double>& y, double level) {
    LevelCrossings c;
    const std::size_t n = y.size();
    std::size_t first = n, last = n;
    for (std::size_t i = 0; i < n; ++i)
        if (y[i] >= level) {
            first = i;
            break;
        }
    if (first == n) return c;
    for (std::size_t i = n; i-- > 0;)
        if (y[i] >= level) {
            last = i;
            break;
        }
    c.found = true;
    if (first == 0) {
        c.lo = x.front();
        c.lo_truncated = true;
    } else {
        const double t = (level - y[first - 1]) / (y[first] - y[first - 1]);
        c.lo = x[first - 1] + t * (x[first] - x[first - 1]);
    }
    if (last == n - 1) {
        c.hi = x.back();
        c.hi_truncated = true;
    } else {
        const double t = (level - y[last + 1]) / (y[last] - y[last + 1]);
        c.hi = x[last + 1] + t * (x[last] - x[last + 1]);
    }
    return c;
}

inline int count_local_maxima(const std::vector<double>& y, double threshold) {
    int count = 0;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > threshold && y[i] > y[i - 1] && y[i] >= y[i + 1]) ++count;
    return count;
}

inline double total_variation(const std::vector<double>& y) {
    double tv = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) tv += std::abs(y[i] - y[i - 1]);
    return tv;
}

}  // namespace spdckit::curve
