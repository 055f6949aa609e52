#ifndef MPD_MODELS_OU_HPP
#define MPD_MODELS_OU_HPP

#include <cmath>
#include <numbers>

#include "mpd/dual.hpp"
#include "mpd/errors.hpp"
#include "mpd/linalg.hpp"
#include "mpd/rng.hpp"

namespace mpd {

// dX = theta (mean - X) dt + sigma dW.  theta is the single estimated
// parameter; mean and sigma are fixed constants of the experiment.
struct OuModel {
    static constexpr int dim = 1;
    static constexpr int n_params = 1;
    static constexpr bool positive_domain = false;

    double mean = 10.0;
    double sigma = 0.5;

    template <class S>
    Vec<S, 1> drift(const Vec<S, 1>& theta, const Vec<S, 1>& x) const {
        Vec<S, 1> r;
        r[0] = theta[0] * (mean - x[0]);
        return r;
    }

    template <class S>
    Mat<S, 1> diffusion(const Vec<S, 1>&, const Vec<S, 1>&) const {
        Mat<S, 1> m;
        m(0, 0) = S(sigma);
        return m;
    }
};

// Exact OU transition moments over horizon dt: the oracle every OU test
// leans on.
struct OuMoments {
    double mean;
    double variance;
};

inline OuMoments ou_exact_transition(double theta, double mean, double sigma, double dt,
                                     double x) {
    if (theta == 0.0) throw DomainError("degenerate mean-reversion rate");
    if (!(dt > 0.0)) throw DomainError("non-positive horizon");
    double b = std::exp(-theta * dt);
    return {mean + (x - mean) * b, sigma * sigma * (1.0 - b * b) / (2.0 * theta)};
}

inline double ou_exact_log_density(double theta, double mean, double sigma, double dt, double x,
                                   double xp) {
    auto m = ou_exact_transition(theta, mean, sigma, dt, x);
    double r = xp - m.mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * m.variance) - 0.5 * r * r / m.variance;
}

// d/dtheta of the exact log transition density.
inline double ou_exact_score(double theta, double mean, double sigma, double dt, double x,
                             double xp) {
    if (theta == 0.0) throw DomainError("degenerate mean-reversion rate");
    double b = std::exp(-theta * dt);
    double m = mean + (x - mean) * b;
    double v = sigma * sigma * (1.0 - b * b) / (2.0 * theta);
    double dm = -(x - mean) * dt * b;
    double dv = sigma * sigma * (2.0 * theta * dt * b * b - (1.0 - b * b)) / (2.0 * theta * theta);
    double r = xp - m;
    return -0.5 * dv / v + r * dm / v + 0.5 * r * r * dv / (v * v);
}

// Marginal of the exact OU bridge from (0, x) to (horizon, xp) at interior
// time t. Used as a distributional oracle for the guided sampler.
inline OuMoments ou_exact_bridge_marginal(double theta, double mean, double sigma, double horizon,
                                          double t, double x, double xp) {
    auto fwd = ou_exact_transition(theta, mean, sigma, t, x);
    double tau = horizon - t;
    double b = std::exp(-theta * tau);
    double v2 = sigma * sigma * (1.0 - b * b) / (2.0 * theta);
    double prec = 1.0 / fwd.variance + b * b / v2;
    double lin = (fwd.mean - mean) / fwd.variance + b * (xp - mean) / v2;
    return {mean + lin / prec, 1.0 / prec};
}

// Auxiliary OU process with the rate pinned at a reference value. With
// track_theta set the rate follows the live parameter instead (including its
// tangent), which makes the guided proposal coincide with the model itself.
struct OuAuxiliary {
    double theta_aux = 5.0;
    bool track_theta = false;
    double mean = 10.0;
    double sigma = 0.5;

    struct Bound;

    Bound bind(const Vec<double, 1>& x_left, const Vec<double, 1>& x_right, double t0,
               double t1) const;
};

// Per-interval view. The OU auxiliary carries no endpoint anchors; binding
// just fixes the interval clock.
struct OuAuxiliary::Bound {
    const OuAuxiliary* aux;
    double t0, t1;

    template <class S>
    auto rate(const Vec<S, 1>& theta) const {
        return aux->track_theta ? theta[0] : S(aux->theta_aux);
    }

    template <class S>
    Vec<S, 1> drift(const Vec<S, 1>& theta, double, const Vec<S, 1>& x) const {
        Vec<S, 1> r;
        r[0] = rate(theta) * (aux->mean - x[0]);
        return r;
    }

    template <class S>
    Mat<S, 1> sigma_mat(const Vec<S, 1>&, double, const Vec<S, 1>&) const {
        Mat<S, 1> m;
        m(0, 0) = S(aux->sigma);
        return m;
    }

    // Conditional N(m, v) of X(t1) given X(t) = x under the auxiliary.
    template <class S>
    void moments(const Vec<S, 1>& theta, double t, const Vec<S, 1>& x, S& m, S& v) const {
        S th = rate(theta);
        double tau = t1 - t;
        S b = exp(-th * tau);
        m = aux->mean + (x[0] - aux->mean) * b;
        v = (aux->sigma * aux->sigma) * (1.0 - b * b) / (2.0 * th);
    }

    // log ftilde_{theta,t,t1}(xp | x)
    template <class S>
    S log_density(const Vec<S, 1>& theta, double t, const Vec<S, 1>& x,
                  const Vec<double, 1>& xp) const {
        S m, v;
        moments(theta, t, x, m, v);
        S r = xp[0] - m;
        return S(-0.5) * log(2.0 * std::numbers::pi * v) - S(0.5) * r * r / v;
    }

    template <class S>
    Vec<S, 1> grad_x_log_density(const Vec<S, 1>& theta, double t, const Vec<S, 1>& x,
                                 const Vec<double, 1>& xp) const {
        S m, v;
        moments(theta, t, x, m, v);
        S b = exp(-rate(theta) * (t1 - t));
        Vec<S, 1> g;
        g[0] = (xp[0] - m) * b / v;
        return g;
    }

    template <class S>
    Mat<S, 1> hess_x_log_density(const Vec<S, 1>& theta, double t, const Vec<S, 1>& x,
                                 const Vec<double, 1>& xp) const {
        S m, v;
        moments(theta, t, x, m, v);
        S b = exp(-rate(theta) * (t1 - t));
        Mat<S, 1> h;
        h(0, 0) = -b * b / v;
        (void)xp;
        return h;
    }

    // Transition density of the interval endpoint from x_left, and its exact
    // sampler. For the OU auxiliary this is anchor-free, so the same pair
    // serves as proposal and target factor in joint draws.
    template <class S>
    S endpoint_log_density(const Vec<S, 1>& theta, const Vec<double, 1>& x_left,
                           const Vec<double, 1>& u) const {
        Vec<S, 1> xl;
        xl[0] = S(x_left[0]);
        return log_density(theta, t0, xl, u);
    }

    Vec<double, 1> sample_endpoint(const Vec<double, 1>& theta, const Vec<double, 1>& x_left,
                                   RngStream& rng) const {
        double m, v;
        Vec<double, 1> xl = x_left;
        moments(theta, t0, xl, m, v);
        Vec<double, 1> u;
        u[0] = m + std::sqrt(v) * rng.next_gaussian();
        return u;
    }
};

inline OuAuxiliary::Bound OuAuxiliary::bind(const Vec<double, 1>&, const Vec<double, 1>&,
                                            double t0, double t1) const {
    return Bound{this, t0, t1};
}

}  // namespace mpd

#endif
