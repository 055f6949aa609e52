#include "mpd/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mpd/errors.hpp"

namespace mpd {

namespace {

double sample_sd(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile(std::vector<double> sorted, double q) {
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

double silverman_bandwidth(const std::vector<double>& samples) {
    if (samples.size() < 2) throw PreconditionError("bandwidth needs at least two samples");
    double sd = sample_sd(samples);
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    if (!(spread > 0.0)) throw DegenerateSample("sample has zero spread");
    return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

KdeCurve kde(const std::vector<double>& samples, double bandwidth,
             const std::vector<double>& grid) {
    if (samples.size() < 2) throw PreconditionError("kde needs at least two samples");
    double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(samples);
    KdeCurve out;
    out.bandwidth = h;
    out.x = grid;
    out.density.resize(grid.size());
    const double norm = 1.0 / (static_cast<double>(samples.size()) * h *
                               std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        for (double s : samples) {
            double z = (grid[g] - s) / h;
            acc += std::exp(-0.5 * z * z);
        }
        out.density[g] = acc * norm;
    }
    return out;
}

std::vector<double> kde_auto_grid(const std::vector<double>& samples, int n_points) {
    if (samples.size() < 2) throw PreconditionError("kde needs at least two samples");
    if (n_points < 2) throw PreconditionError("grid needs at least two points");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(samples.size());
    double sd = sample_sd(samples);
    if (!(sd > 0.0)) throw DegenerateSample("sample has zero spread");
    double lo = mean - 4.0 * sd, hi = mean + 4.0 * sd;
    std::vector<double> grid(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
        grid[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    return grid;
}

}  // namespace mpd
