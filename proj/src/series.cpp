#include "mpd/series.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mpd/errors.hpp"
#include "mpd/grid.hpp"
#include "mpd/models/ou.hpp"
#include "mpd/models/slv.hpp"
#include "mpd/rng.hpp"
#include "mpd/sde.hpp"

namespace mpd {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_double_list(const std::string& s, long line) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + item + "'", line);
        }
    }
    return out;
}

}  // namespace

void ObservationSeries::validate() const {
    if (times.size() != states.size())
        throw InvariantError("times and states have different lengths");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw InvariantError("non-finite time");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw InvariantError("times not strictly increasing");
        if (static_cast<int>(states[i].size()) != dim)
            throw InvariantError("state row has wrong dimension");
        for (double v : states[i])
            if (!std::isfinite(v)) throw InvariantError("non-finite state entry");
    }
}

void save_series(const ObservationSeries& s, const std::string& path) {
    s.validate();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "# model=" << s.model_id << "\n";
    if (!s.theta_true.empty()) {
        f << "# theta_true=";
        for (std::size_t j = 0; j < s.theta_true.size(); ++j)
            f << (j ? "," : "") << fmt17(s.theta_true[j]);
        f << "\n";
    }
    f << "# seed=" << s.seed << "\n";
    f << "# fine_factor=" << s.fine_factor << "\n";
    f << "# generation_retries=" << s.generation_retries << "\n";
    f << "time";
    for (int j = 1; j <= s.dim; ++j) f << ",x" << j;
    f << "\n";
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        f << fmt17(s.times[i]);
        for (double v : s.states[i]) f << "," << fmt17(v);
        f << "\n";
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

ObservationSeries load_series(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    ObservationSeries s;
    std::string line;
    long lineno = 0;
    bool header_seen = false;
    int n_cols = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            std::string key = body.substr(0, eq);
            std::string val = body.substr(eq + 1);
            while (!key.empty() && key.front() == ' ') key.erase(key.begin());
            while (!key.empty() && key.back() == ' ') key.pop_back();
            if (key == "model") s.model_id = val;
            else if (key == "theta_true") s.theta_true = parse_double_list(val, lineno);
            else if (key == "seed") s.seed = std::stoull(val);
            else if (key == "fine_factor") s.fine_factor = std::stoi(val);
            else if (key == "generation_retries") s.generation_retries = std::stoi(val);
            continue;
        }
        if (!header_seen) {
            std::stringstream ss(line);
            std::string col;
            std::vector<std::string> cols;
            while (std::getline(ss, col, ',')) cols.push_back(col);
            if (cols.empty() || cols[0] != "time")
                throw SchemaError("missing column 'time' in " + path);
            for (std::size_t j = 1; j < cols.size(); ++j) {
                std::string want = "x" + std::to_string(j);
                if (cols[j] != want) throw SchemaError("missing column '" + want + "' in " + path);
            }
            if (cols.size() < 2) throw SchemaError("missing column 'x1' in " + path);
            n_cols = static_cast<int>(cols.size());
            s.dim = n_cols - 1;
            header_seen = true;
            continue;
        }
        auto vals = parse_double_list(line, lineno);
        if (static_cast<int>(vals.size()) != n_cols)
            throw SchemaError("row with " + std::to_string(vals.size()) + " fields, expected " +
                              std::to_string(n_cols) + " in " + path);
        s.times.push_back(vals[0]);
        s.states.emplace_back(vals.begin() + 1, vals.end());
    }
    if (!header_seen) throw SchemaError("empty series file: " + path);
    s.validate();
    return s;
}

namespace {

template <class M>
ObservationSeries generate_with(const M& model, const GenerateSpec& spec) {
    constexpr int D = M::dim;
    constexpr int P = M::n_params;
    if (static_cast<int>(spec.theta_true.size()) != P)
        throw ConfigError("theta_true needs " + std::to_string(P) + " entries");
    if (static_cast<int>(spec.x0.size()) != D)
        throw ConfigError("x0 needs " + std::to_string(D) + " entries");
    if (spec.fine_factor < 1) throw PreconditionError("fine_factor must be >= 1");
    if (spec.n_obs < 1) throw PreconditionError("n_obs must be >= 1");

    Params<P> theta;
    for (int j = 0; j < P; ++j) theta[j] = spec.theta_true[static_cast<std::size_t>(j)];
    Vec<double, D> x0;
    for (int i = 0; i < D; ++i) x0[i] = spec.x0[static_cast<std::size_t>(i)];

    const int fine_steps = spec.substeps * spec.fine_factor;
    for (int attempt = 0;; ++attempt) {
        if (attempt > spec.max_retries)
            throw DomainExit("data generation exhausted retries", spec.max_retries);
        RngStream rng = RngStream(spec.seed).child(0xda7aull, static_cast<std::uint64_t>(attempt));
        try {
            ObservationSeries s;
            s.dim = D;
            s.model_id = spec.model_id;
            s.theta_true = spec.theta_true;
            s.seed = spec.seed;
            s.fine_factor = spec.fine_factor;
            s.generation_retries = attempt;
            s.times.push_back(0.0);
            s.states.emplace_back(x0.e.begin(), x0.e.end());
            Vec<double, D> x = x0;
            for (int k = 1; k <= spec.n_obs; ++k) {
                auto grid = make_grid((k - 1) * spec.gap, k * spec.gap, fine_steps);
                auto path = simulate_path(model, theta, x, grid, rng);
                x = path.back();
                s.times.push_back(k * spec.gap);
                s.states.emplace_back(x.e.begin(), x.e.end());
            }
            s.validate();
            return s;
        } catch (const DomainExit&) {
            continue;  // retry with a derived seed
        }
    }
}

}  // namespace

ObservationSeries generate_data(const GenerateSpec& spec) {
    if (spec.model_id == "ou") {
        OuModel m{spec.ou_mean, spec.ou_sigma};
        return generate_with(m, spec);
    }
    if (spec.model_id == "slv") {
        SlvModel m{spec.slv_sigma1, spec.slv_sigma2};
        return generate_with(m, spec);
    }
    throw ConfigError("unknown model id '" + spec.model_id + "'");
}

}  // namespace mpd
