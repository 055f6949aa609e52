#ifndef MPD_KDE_HPP
#define MPD_KDE_HPP

#include <vector>

namespace mpd {

struct KdeCurve {
    std::vector<double> x;
    std::vector<double> density;
    double bandwidth = 0.0;
};

// Silverman's rule of thumb: 0.9 min(sd, iqr/1.34) n^{-1/5}.
double silverman_bandwidth(const std::vector<double>& samples);

// Gaussian-kernel density on the given grid. bandwidth <= 0 selects
// Silverman's rule. Throws PreconditionError for fewer than two samples and
// DegenerateSample when the sample has zero spread.
KdeCurve kde(const std::vector<double>& samples, double bandwidth,
             const std::vector<double>& grid);

// mean +- 4 sd, n_points equally spaced.
std::vector<double> kde_auto_grid(const std::vector<double>& samples, int n_points);

}  // namespace mpd

#endif
