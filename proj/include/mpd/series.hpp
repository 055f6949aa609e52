#ifndef MPD_SERIES_HPP
#define MPD_SERIES_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace mpd {

// Timestamped observations with generation metadata. Dimension is runtime
// here; the templated engine converts on entry.
struct ObservationSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    int dim = 1;

    std::string model_id;
    std::vector<double> theta_true;  // empty when unknown (real data)
    std::uint64_t seed = 0;
    int fine_factor = 1;
    int generation_retries = 0;

    std::size_t size() const { return times.size(); }
    void validate() const;  // throws InvariantError
};

// CSV with "# key=value" metadata comments, 17 significant digits.
void save_series(const ObservationSeries& s, const std::string& path);
ObservationSeries load_series(const std::string& path);

struct GenerateSpec {
    std::string model_id = "ou";
    std::vector<double> theta_true;
    std::vector<double> x0;
    int n_obs = 100;
    double gap = 0.2;
    int substeps = 16;
    int fine_factor = 10;
    std::uint64_t seed = 1;
    // fixed model constants
    double ou_mean = 10.0;
    double ou_sigma = 0.5;
    double slv_sigma1 = 0.2;
    double slv_sigma2 = 0.15;
    int max_retries = 100;
};

// Simulate on the refined grid (spacing gap / (substeps * fine_factor)) and
// subsample at the observation times. Positivity failures restart the whole
// series from a derived seed, up to the retry cap.
ObservationSeries generate_data(const GenerateSpec& spec);

}  // namespace mpd

#endif
