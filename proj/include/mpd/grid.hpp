#ifndef MPD_GRID_HPP
#define MPD_GRID_HPP

#include <cmath>

#include "mpd/errors.hpp"

namespace mpd {

// Regular sub-step grid over one observation interval. The integer sub-step
// count is authoritative; the spacing is derived on demand so repeated
// addition never drifts the endpoint.
struct BridgeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    int n_substeps = 1;

    double delta() const { return (t_end - t_start) / n_substeps; }
    double node(int j) const {
        return t_start + (t_end - t_start) * static_cast<double>(j) / n_substeps;
    }
};

inline BridgeGrid make_grid(double t0, double t1, int n_substeps) {
    if (!(t1 > t0)) throw GridError("grid requires t1 > t0");
    if (n_substeps < 1) throw GridError("grid requires at least one sub-step");
    return BridgeGrid{t0, t1, n_substeps};
}

// Dyadic form: spacing 2^-level. The level must divide the interval into a
// whole number of sub-steps.
inline BridgeGrid make_grid_level(double t0, double t1, int level) {
    if (!(t1 > t0)) throw GridError("grid requires t1 > t0");
    if (level < 0) throw GridError("negative dyadic level");
    double raw = std::ldexp(t1 - t0, level);  // (t1-t0) * 2^level
    double rounded = std::round(raw);
    if (rounded < 1.0 || std::abs(raw - rounded) > 1e-9 * std::max(1.0, raw))
        throw GridError("dyadic level does not divide the interval evenly");
    return BridgeGrid{t0, t1, static_cast<int>(rounded)};
}

}  // namespace mpd

#endif
