#ifndef MPD_BRIDGE_HPP
#define MPD_BRIDGE_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mpd/dual.hpp"
#include "mpd/errors.hpp"
#include "mpd/grid.hpp"
#include "mpd/linalg.hpp"
#include "mpd/rng.hpp"
#include "mpd/sde.hpp"

namespace mpd {

// Guided-proposal machinery. A bound auxiliary B (model-specific, one
// interval) supplies the tractable transition density ftilde toward the
// conditioned endpoint together with its state gradient and Hessian; the
// guided process adds Sigma * grad_x log ftilde to the model drift so paths
// are pulled onto the endpoint.

template <class S, class M, class B>
Vec<S, M::dim> guided_drift(const M& model, const B& aux, const Vec<S, M::n_params>& theta,
                            double t, const Vec<S, M::dim>& x, const Vec<double, M::dim>& xp) {
    auto sig = model.diffusion(theta, x);
    auto big_sigma = matmul(sig, transpose(sig));
    return model.drift(theta, x) + matvec(big_sigma, aux.grad_x_log_density(theta, t, x, xp));
}

// Integrand of the exponent part of the Radon-Nikodym weight:
//   (mu - mu_tilde)^T grad - 1/2 Tr{ (Sigma - Sigma_tilde) [ -Hess - grad grad^T ] }.
template <class S, class M, class B>
S l_functional(const M& model, const B& aux, const Vec<S, M::n_params>& theta, double t,
               const Vec<S, M::dim>& x, const Vec<double, M::dim>& xp) {
    auto grad = aux.grad_x_log_density(theta, t, x, xp);
    auto drift_gap = model.drift(theta, x) - aux.drift(theta, t, x);
    S value = dot(drift_gap, grad);

    auto sig = model.diffusion(theta, x);
    auto sig_tilde = aux.sigma_mat(theta, t, x);
    auto sigma_gap = matmul(sig, transpose(sig)) - matmul(sig_tilde, transpose(sig_tilde));
    auto hess = aux.hess_x_log_density(theta, t, x, xp);
    auto curvature = (hess + outer(grad, grad)) * S(-1.0);
    return value - S(0.5) * trace_product(sigma_gap, curvature);
}

// Discretized guided path on the grid. Interior nodes follow guided
// Euler-Maruyama; the final node is the conditioned endpoint itself (data,
// not noise). States inherit the scalar type of theta, so tangents propagate
// through the whole recursion when S is a Dual.
template <class S, class M, class B>
std::vector<Vec<S, M::dim>> bridge_path(const M& model, const B& aux,
                                        const Vec<S, M::n_params>& theta,
                                        const Vec<double, M::dim>& x,
                                        const Vec<double, M::dim>& xp,
                                        const WienerIncrements<M::dim>& noise,
                                        const BridgeGrid& grid) {
    if (noise.size() != grid.n_substeps)
        throw GridError("noise length does not match grid sub-step count");
    constexpr int D = M::dim;
    std::vector<Vec<S, D>> path;
    path.reserve(static_cast<std::size_t>(grid.n_substeps) + 1);

    Vec<S, D> cur;
    for (int i = 0; i < D; ++i) cur[i] = S(x[i]);
    path.push_back(cur);
    double delta = grid.delta();
    for (int j = 0; j + 1 < grid.n_substeps; ++j) {
        double t = grid.node(j);
        auto mu = guided_drift(model, aux, theta, t, cur, xp);
        auto sig = model.diffusion(theta, cur);
        cur = em_step(cur, mu, sig, noise.dw[static_cast<std::size_t>(j)], delta, j);
        if constexpr (M::positive_domain) {
            for (int i = 0; i < D; ++i)
                if (!(value_of(cur[i]) > 0.0))
                    throw DomainExit("bridge state left the positive domain", j + 1);
        }
        path.push_back(cur);
    }
    Vec<S, D> last;
    for (int i = 0; i < D; ++i) last[i] = S(xp[i]);
    path.push_back(last);
    return path;
}

// log R^l and, when S is a Dual, its theta-gradient.
struct ScoredWeight {
    double log_weight = 0.0;
    std::vector<double> score;  // d/dtheta of log_weight, length n_params
    double exponent_sum = 0.0;  // endpoint-density-free part, sum of L * delta
};

template <class S, class M, class B>
S weight_exponent(const M& model, const B& aux, const Vec<S, M::n_params>& theta,
                  const std::vector<Vec<S, M::dim>>& path, const Vec<double, M::dim>& xp,
                  const BridgeGrid& grid) {
    double delta = grid.delta();
    S acc(0.0);
    for (int j = 0; j < grid.n_substeps; ++j) {
        double t = grid.node(j);
        acc = acc + l_functional(model, aux, theta, t, path[static_cast<std::size_t>(j)], xp) *
                        S(delta);
    }
    if (!is_finite(acc)) throw NumericalBlowup("non-finite weight exponent", grid.n_substeps);
    return acc;
}

template <class M, class B>
ScoredWeight log_weight_scored(const M& model, const B& aux,
                               const Vec<Dual<M::n_params>, M::n_params>& theta,
                               const std::vector<Vec<Dual<M::n_params>, M::dim>>& path,
                               const Vec<double, M::dim>& x, const Vec<double, M::dim>& xp,
                               const BridgeGrid& grid) {
    auto expo = weight_exponent(model, aux, theta, path, xp, grid);
    auto lw = expo + aux.endpoint_log_density(theta, x, xp);
    if (!is_finite(lw)) throw NumericalBlowup("non-finite log weight", grid.n_substeps);
    ScoredWeight out;
    out.log_weight = lw.v;
    out.score.assign(lw.t.begin(), lw.t.end());
    out.exponent_sum = expo.v;
    return out;
}

// Convenience: full dual pipeline from stored noise. Used after a proposal
// has been accepted on the plain-double path.
template <class M, class B>
ScoredWeight score_bridge(const M& model, const B& aux, const Params<M::n_params>& theta,
                          const Vec<double, M::dim>& x, const Vec<double, M::dim>& xp,
                          const WienerIncrements<M::dim>& noise, const BridgeGrid& grid) {
    auto lifted = lift(theta);
    auto path = bridge_path(model, aux, lifted, x, xp, noise, grid);
    return log_weight_scored(model, aux, lifted, path, x, xp, grid);
}

// --- naive transition-score estimator ---------------------------------------
//
// Self-normalized importance estimate of the score of the Euler product
// density, proposing the interior from a Brownian bridge. Exists to exhibit
// the weight degeneracy that the guided construction avoids: its reported
// variance grows with the grid resolution.
template <int P>
struct NaiveScoreEstimate {
    Params<P> score{};
    Params<P> variance{};
    double ess = 0.0;
};

template <class M>
NaiveScoreEstimate<M::n_params> naive_score_estimator(const M& model,
                                                      const Params<M::n_params>& theta,
                                                      const Vec<double, M::dim>& x,
                                                      const Vec<double, M::dim>& xp,
                                                      const BridgeGrid& grid, int n_samples,
                                                      RngStream rng) {
    if (n_samples < 2) throw PreconditionError("naive estimator needs n_samples >= 2");
    constexpr int D = M::dim;
    constexpr int P = M::n_params;
    const int n = grid.n_substeps;
    const double delta = grid.delta();
    const double horizon = grid.t_end - grid.t_start;

    auto euler_log_density = [&](const auto& th, const auto& a, const Vec<double, D>& b) {
        using S = std::decay_t<decltype(th[0])>;
        auto mu = model.drift(th, a);
        auto sig = model.diffusion(th, a);
        auto cov = matmul(sig, transpose(sig)) * S(delta);
        // models here are diagonal; treat the covariance as such
        S acc(0.0);
        for (int i = 0; i < D; ++i) {
            S m = a[i] + mu[i] * S(delta);
            S r = b[i] - m;
            acc = acc + S(-0.5) * log(2.0 * std::numbers::pi * cov(i, i)) -
                  S(0.5) * r * r / cov(i, i);
        }
        return acc;
    };

    std::vector<Params<P>> scores(static_cast<std::size_t>(n_samples));
    std::vector<double> log_w(static_cast<std::size_t>(n_samples));
    auto lifted = lift(theta);

    for (int s = 0; s < n_samples; ++s) {
        RngStream draw = rng.child(static_cast<std::uint64_t>(s));
        // Brownian-bridge interior proposal, using the model diffusion at the
        // left endpoint as its scale.
        std::vector<Vec<double, D>> nodes(static_cast<std::size_t>(n) + 1);
        nodes[0] = x;
        nodes[static_cast<std::size_t>(n)] = xp;
        double log_q = 0.0;
        auto sig0 = model.diffusion(theta, x);
        for (int j = 1; j < n; ++j) {
            double remaining = horizon - (j - 1) * delta;
            double frac = delta / remaining;
            double shrink = (remaining - delta) / remaining;
            for (int i = 0; i < D; ++i) {
                double m = nodes[static_cast<std::size_t>(j - 1)][i] +
                           frac * (xp[i] - nodes[static_cast<std::size_t>(j - 1)][i]);
                double v = sig0(i, i) * sig0(i, i) * delta * shrink;
                double z = draw.next_gaussian();
                nodes[static_cast<std::size_t>(j)][i] = m + std::sqrt(v) * z;
                log_q += -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * z * z;
            }
        }
        // target: Euler product along the proposed path, with theta tangents
        Dual<P> log_target(0.0);
        bool ok = true;
        for (int j = 0; j < n && ok; ++j) {
            Vec<Dual<P>, D> a;
            for (int i = 0; i < D; ++i) a[i] = Dual<P>(nodes[static_cast<std::size_t>(j)][i]);
            if (M::positive_domain) {
                for (int i = 0; i < D; ++i)
                    if (!(nodes[static_cast<std::size_t>(j)][i] > 0.0)) ok = false;
                if (!ok) break;
            }
            log_target =
                log_target + euler_log_density(lifted, a, nodes[static_cast<std::size_t>(j) + 1]);
        }
        if (!ok || !is_finite(log_target)) {
            log_w[static_cast<std::size_t>(s)] = -std::numeric_limits<double>::infinity();
            continue;
        }
        log_w[static_cast<std::size_t>(s)] = log_target.v - log_q;
        for (int p = 0; p < P; ++p)
            scores[static_cast<std::size_t>(s)][p] = log_target.t[static_cast<std::size_t>(p)];
    }

    double max_lw = -std::numeric_limits<double>::infinity();
    for (double lw : log_w) max_lw = std::max(max_lw, lw);
    if (!std::isfinite(max_lw)) throw DegenerateWeights(0.0);

    double wsum = 0.0, w2sum = 0.0;
    std::vector<double> w(log_w.size());
    for (std::size_t s = 0; s < log_w.size(); ++s) {
        w[s] = std::exp(log_w[s] - max_lw);
        wsum += w[s];
        w2sum += w[s] * w[s];
    }
    double ess = wsum * wsum / w2sum;
    if (ess < 2.0) throw DegenerateWeights(ess);

    NaiveScoreEstimate<P> out;
    out.ess = ess;
    for (int p = 0; p < P; ++p) {
        double mean = 0.0;
        for (std::size_t s = 0; s < w.size(); ++s) mean += w[s] * scores[s][p];
        mean /= wsum;
        double var = 0.0;
        for (std::size_t s = 0; s < w.size(); ++s) {
            double wb = w[s] / wsum;
            double dev = scores[s][p] - mean;
            var += wb * wb * dev * dev;
        }
        out.score[p] = mean;
        out.variance[p] = var;
    }
    return out;
}

}  // namespace mpd

#endif
