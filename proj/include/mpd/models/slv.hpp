#ifndef MPD_MODELS_SLV_HPP
#define MPD_MODELS_SLV_HPP

#include <cmath>
#include <numbers>

#include "mpd/dual.hpp"
#include "mpd/errors.hpp"
#include "mpd/linalg.hpp"
#include "mpd/rng.hpp"

namespace mpd {

// Stochastic Lotka-Volterra with multiplicative noise:
//   dX1 = X1 (alpha - beta X2) dt + sigma1 X1 dW1
//   dX2 = X2 (zeta X1 - gamma) dt + sigma2 X2 dW2
// theta = (alpha, beta, zeta, gamma); sigma1, sigma2 known. State lives in
// the open positive quadrant.
struct SlvModel {
    static constexpr int dim = 2;
    static constexpr int n_params = 4;
    static constexpr bool positive_domain = true;

    double sigma1 = 0.2;
    double sigma2 = 0.15;

    template <class S>
    Vec<S, 2> drift(const Vec<S, 4>& theta, const Vec<S, 2>& x) const {
        Vec<S, 2> r;
        r[0] = x[0] * (theta[0] - theta[1] * x[1]);
        r[1] = x[1] * (theta[2] * x[0] - theta[3]);
        return r;
    }

    template <class S>
    Mat<S, 2> diffusion(const Vec<S, 4>&, const Vec<S, 2>& x) const {
        Mat<S, 2> m;
        m(0, 0) = x[0] * sigma1;
        m(1, 1) = x[1] * sigma2;
        m(0, 1) = S(0.0);
        m(1, 0) = S(0.0);
        return m;
    }
};

// Geometric auxiliary whose per-component growth rate interpolates linearly
// between the rates implied by the interval's two endpoint anchors:
//   r1(t) = alpha - beta  * p2(t),   p2 linear from x2_left to x2_right
//   r2(t) = zeta  * p1(t) - gamma,   p1 linear from x1_left to x1_right
// Log-state transitions are Gaussian with the exact integral of the linear
// rate, so the density pack is closed form.
struct SlvAuxiliary {
    double sigma1 = 0.2;
    double sigma2 = 0.15;

    struct Bound;

    Bound bind(const Vec<double, 2>& x_left, const Vec<double, 2>& x_right, double t0,
               double t1) const;
};

struct SlvAuxiliary::Bound {
    const SlvAuxiliary* aux;
    double t0, t1;
    Vec<double, 2> anchor_left;
    Vec<double, 2> anchor_right;

    double sigma_of(int i) const { return i == 0 ? aux->sigma1 : aux->sigma2; }

    // Linear interpolation of the cross-coordinate anchor at time t.
    double cross_anchor(int i, double t) const {
        double s = (t - t0) / (t1 - t0);
        int other = 1 - i;
        return anchor_left[other] * (1.0 - s) + anchor_right[other] * s;
    }

    template <class S>
    S rate(const Vec<S, 4>& theta, int i, double t) const {
        if (i == 0) return theta[0] - theta[1] * cross_anchor(0, t);
        return theta[2] * cross_anchor(1, t) - theta[3];
    }

    // Exact integral of rate_i over [t, t1]: trapezoid of a linear function.
    template <class S>
    S rate_integral(const Vec<S, 4>& theta, int i, double t) const {
        double tau = t1 - t;
        return (rate(theta, i, t) + rate(theta, i, t1)) * S(0.5 * tau);
    }

    template <class S>
    Vec<S, 2> drift(const Vec<S, 4>& theta, double t, const Vec<S, 2>& x) const {
        Vec<S, 2> r;
        r[0] = x[0] * rate(theta, 0, t);
        r[1] = x[1] * rate(theta, 1, t);
        return r;
    }

    template <class S>
    Mat<S, 2> sigma_mat(const Vec<S, 4>&, double, const Vec<S, 2>& x) const {
        Mat<S, 2> m;
        m(0, 0) = x[0] * aux->sigma1;
        m(1, 1) = x[1] * aux->sigma2;
        m(0, 1) = S(0.0);
        m(1, 0) = S(0.0);
        return m;
    }

    // Per component i: log X(t1) | X(t)=x is Gaussian with
    //   mean log x_i + I_i(t) - sigma_i^2 (t1-t)/2,  variance sigma_i^2 (t1-t).
    template <class S>
    S log_density(const Vec<S, 4>& theta, double t, const Vec<S, 2>& x,
                  const Vec<double, 2>& xp) const {
        double tau = t1 - t;
        S total(0.0);
        for (int i = 0; i < 2; ++i) {
            if (!(xp[i] > 0.0)) throw DomainError("auxiliary density at non-positive state");
            if (!(value_of(x[i]) > 0.0))
                throw DomainError("auxiliary density from non-positive state");
            double s2 = sigma_of(i) * sigma_of(i);
            double v = s2 * tau;
            S mu = log(x[i]) + rate_integral(theta, i, t) - 0.5 * s2 * tau;
            S r = std::log(xp[i]) - mu;
            total = total + S(-std::log(xp[i])) - 0.5 * std::log(2.0 * std::numbers::pi * v) -
                    S(0.5) * r * r / v;
        }
        return total;
    }

    template <class S>
    Vec<S, 2> grad_x_log_density(const Vec<S, 4>& theta, double t, const Vec<S, 2>& x,
                                 const Vec<double, 2>& xp) const {
        double tau = t1 - t;
        Vec<S, 2> g;
        for (int i = 0; i < 2; ++i) {
            double s2 = sigma_of(i) * sigma_of(i);
            double v = s2 * tau;
            S mu = log(x[i]) + rate_integral(theta, i, t) - 0.5 * s2 * tau;
            S r = std::log(xp[i]) - mu;
            g[i] = r / (v * x[i]);
        }
        return g;
    }

    template <class S>
    Mat<S, 2> hess_x_log_density(const Vec<S, 4>& theta, double t, const Vec<S, 2>& x,
                                 const Vec<double, 2>& xp) const {
        double tau = t1 - t;
        Mat<S, 2> h;
        h(0, 1) = S(0.0);
        h(1, 0) = S(0.0);
        for (int i = 0; i < 2; ++i) {
            double s2 = sigma_of(i) * sigma_of(i);
            double v = s2 * tau;
            S mu = log(x[i]) + rate_integral(theta, i, t) - 0.5 * s2 * tau;
            S r = std::log(xp[i]) - mu;
            h(i, i) = (S(-1.0) - r) / (v * x[i] * x[i]);
        }
        return h;
    }

    template <class S>
    S endpoint_log_density(const Vec<S, 4>& theta, const Vec<double, 2>& x_left,
                           const Vec<double, 2>& u) const {
        Vec<S, 2> xl;
        xl[0] = S(x_left[0]);
        xl[1] = S(x_left[1]);
        return log_density(theta, t0, xl, u);
    }

    Vec<double, 2> sample_endpoint(const Vec<double, 4>& theta, const Vec<double, 2>& x_left,
                                   RngStream& rng) const {
        double tau = t1 - t0;
        Vec<double, 2> u;
        for (int i = 0; i < 2; ++i) {
            double s2 = sigma_of(i) * sigma_of(i);
            double mu = std::log(x_left[i]) + rate_integral(theta, i, t0) - 0.5 * s2 * tau;
            u[i] = std::exp(mu + sigma_of(i) * std::sqrt(tau) * rng.next_gaussian());
        }
        return u;
    }
};

inline SlvAuxiliary::Bound SlvAuxiliary::bind(const Vec<double, 2>& x_left,
                                              const Vec<double, 2>& x_right, double t0,
                                              double t1) const {
    return Bound{this, t0, t1, x_left, x_right};
}

}  // namespace mpd

#endif
