#ifndef MPD_SAMPLER_HPP
#define MPD_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mpd/bridge.hpp"
#include "mpd/dual.hpp"
#include "mpd/errors.hpp"
#include "mpd/grid.hpp"
#include "mpd/rng.hpp"
#include "mpd/sde.hpp"

namespace mpd {

struct SamplerSettings {
    int n_pilot = 32;
    double safety_log = 0.6931471805599453;  // log 2
    long max_proposals = 100000;
    double trust_radius = 0.5;  // max-norm theta drift before an envelope goes stale
};

// Sub-stream tags inside one draw site.
namespace rng_tag {
constexpr std::uint64_t endpoint = 1;
constexpr std::uint64_t noise = 2;
constexpr std::uint64_t accept = 3;
constexpr std::uint64_t pilot = 4;
}  // namespace rng_tag

// How proposal increments are produced. fine_per_step > 1 draws that many
// fine increments per sub-step and sums them, so runs at different grid
// resolutions sharing a stream consume identical fine noise (coarse
// increments are sums of fine ones).
struct NoiseSpec {
    int fine_per_step = 1;
};

template <int D>
WienerIncrements<D> draw_proposal_increments(const BridgeGrid& grid, const NoiseSpec& spec,
                                             RngStream& rng) {
    if (spec.fine_per_step <= 1) return draw_increments<D>(grid, rng);
    WienerIncrements<D> w;
    w.dw.resize(static_cast<std::size_t>(grid.n_substeps));
    double fine_sd = std::sqrt(grid.delta() / spec.fine_per_step);
    for (auto& v : w.dw) {
        for (int i = 0; i < D; ++i) v[i] = 0.0;
        for (int f = 0; f < spec.fine_per_step; ++f)
            for (int i = 0; i < D; ++i) v[i] += fine_sd * rng.next_gaussian();
    }
    return w;
}

// Empirical upper bound on the rejection exponent: max over pilot proposals
// plus a safety margin. Violations at sampling time inflate the bound and are
// counted, so a too-tight pilot bound self-heals.
template <int P>
struct Envelope {
    double log_m = 0.0;
    Params<P> theta_cal{};
    int n_pilot = 0;
    double safety_log = 0.0;
    long violation_count = 0;
    double max_exceedance = 0.0;
    long pilot_domain_exits = 0;

    bool stale_for(const Params<P>& theta, double trust_radius) const {
        double d = 0.0;
        for (int j = 0; j < P; ++j) d = std::max(d, std::abs(theta[j] - theta_cal[j]));
        return d > trust_radius;
    }
};

// Counters accumulated over one replication.
struct DrawStats {
    long proposals = 0;
    long accepted = 0;
    long domain_exits = 0;
    long envelope_violations = 0;
    double max_exceedance = 0.0;
    long pilot_paths = 0;

    double acceptance_rate() const {
        return proposals > 0 ? static_cast<double>(accepted) / static_cast<double>(proposals)
                             : 0.0;
    }

    void merge(const DrawStats& o) {
        proposals += o.proposals;
        accepted += o.accepted;
        domain_exits += o.domain_exits;
        envelope_violations += o.envelope_violations;
        max_exceedance = std::max(max_exceedance, o.max_exceedance);
        pilot_paths += o.pilot_paths;
    }
};

// An accepted draw with its weight, score and bookkeeping.
template <class M>
struct ScoredDraw {
    WienerIncrements<M::dim> noise;
    std::vector<Vec<double, M::dim>> path;  // plain values on the grid nodes
    Vec<double, M::dim> endpoint;
    ScoredWeight weight;
    long n_proposals = 1;
};

namespace detail {

// Exponent of one conditioned proposal (plain doubles).
template <class M, class B>
double proposal_exponent(const M& model, const B& aux, const Params<M::n_params>& theta,
                         const Vec<double, M::dim>& x, const Vec<double, M::dim>& xp,
                         const WienerIncrements<M::dim>& noise, const BridgeGrid& grid,
                         std::vector<Vec<double, M::dim>>* path_out) {
    auto path = bridge_path(model, aux, theta, x, xp, noise, grid);
    double expo = weight_exponent(model, aux, theta, path, xp, grid);
    if (path_out) *path_out = std::move(path);
    return expo;
}

}  // namespace detail

// Pilot-based envelope. With an endpoint the pilots are conditioned
// proposals; without one they are joint (endpoint, noise) proposals and the
// exponent includes the anchored-vs-proposal density ratio.
template <class M, class A>
Envelope<M::n_params> calibrate_envelope(const M& model, const A& aux_family,
                                         const Params<M::n_params>& theta,
                                         const Vec<double, M::dim>& x,
                                         const std::optional<Vec<double, M::dim>>& xp,
                                         const BridgeGrid& grid, RngStream rng,
                                         const SamplerSettings& cfg,
                                         const NoiseSpec& noise_spec = {},
                                         DrawStats* stats = nullptr) {
    if (cfg.n_pilot < 16) throw PreconditionError("envelope calibration needs n_pilot >= 16");
    Envelope<M::n_params> env;
    env.theta_cal = theta;
    env.n_pilot = cfg.n_pilot;
    env.safety_log = cfg.safety_log;

    auto prop = aux_family.bind(x, x, grid.t_start, grid.t_end);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.n_pilot; ++i) {
        RngStream s = rng.child(rng_tag::pilot, static_cast<std::uint64_t>(i));
        if (stats) ++stats->pilot_paths;
        try {
            double h;
            if (xp) {
                auto bound = aux_family.bind(x, *xp, grid.t_start, grid.t_end);
                RngStream ns = s.child(rng_tag::noise);
                auto noise = draw_proposal_increments<M::dim>(grid, noise_spec, ns);
                h = detail::proposal_exponent(model, bound, theta, x, *xp, noise, grid, nullptr);
            } else {
                RngStream us = s.child(rng_tag::endpoint);
                auto u = prop.sample_endpoint(theta, x, us);
                auto bound = aux_family.bind(x, u, grid.t_start, grid.t_end);
                RngStream ns = s.child(rng_tag::noise);
                auto noise = draw_proposal_increments<M::dim>(grid, noise_spec, ns);
                h = detail::proposal_exponent(model, bound, theta, x, u, noise, grid, nullptr);
                h += value_of(bound.endpoint_log_density(theta, x, u)) -
                     value_of(prop.endpoint_log_density(theta, x, u));
            }
            best = std::max(best, h);
        } catch (const DomainExit&) {
            ++env.pilot_domain_exits;
            if (stats) ++stats->domain_exits;
        }
    }
    env.log_m = (std::isfinite(best) ? best : 0.0) + cfg.safety_log;
    return env;
}

// Recalibrate when theta has drifted outside the envelope's trust radius.
template <class M, class A>
void ensure_envelope(std::optional<Envelope<M::n_params>>& env, const M& model,
                     const A& aux_family, const Params<M::n_params>& theta,
                     const Vec<double, M::dim>& x,
                     const std::optional<Vec<double, M::dim>>& xp, const BridgeGrid& grid,
                     const RngStream& rng, const SamplerSettings& cfg,
                     const NoiseSpec& noise_spec = {}, DrawStats* stats = nullptr) {
    if (!env || env->stale_for(theta, cfg.trust_radius))
        env = calibrate_envelope(model, aux_family, theta, x, xp, grid, rng, cfg, noise_spec,
                                 stats);
}

// Exact draw from the conditioned-noise law pi^l(dw | x, x'). Proposals are
// plain Wiener increments; acceptance uses only the exponent part (the
// endpoint density is constant here and cancels). The accepted draw is
// re-run with tangents to produce its score.
template <class M, class A>
ScoredDraw<M> sample_conditioned_noise(const M& model, const A& aux_family,
                                       const Params<M::n_params>& theta,
                                       const Vec<double, M::dim>& x,
                                       const Vec<double, M::dim>& xp, const BridgeGrid& grid,
                                       RngStream site, Envelope<M::n_params>& env,
                                       const SamplerSettings& cfg,
                                       const NoiseSpec& noise_spec = {},
                                       DrawStats* stats = nullptr) {
    auto bound = aux_family.bind(x, xp, grid.t_start, grid.t_end);
    long total = 0;
    for (std::uint64_t epoch = 0;; ++epoch) {
        bool restart = false;
        for (std::uint64_t p = 0; !restart; ++p) {
            if (++total > cfg.max_proposals) throw MaxProposalsExceeded(cfg.max_proposals);
            if (stats) ++stats->proposals;
            RngStream s = site.child(epoch, p);
            RngStream ns = s.child(rng_tag::noise);
            auto noise = draw_proposal_increments<M::dim>(grid, noise_spec, ns);
            double expo;
            std::vector<Vec<double, M::dim>> path;
            try {
                expo = detail::proposal_exponent(model, bound, theta, x, xp, noise, grid, &path);
            } catch (const DomainExit&) {
                if (stats) ++stats->domain_exits;
                continue;
            }
            if (expo > env.log_m) {
                double exceed = expo - env.log_m;
                ++env.violation_count;
                env.max_exceedance = std::max(env.max_exceedance, exceed);
                if (stats) {
                    ++stats->envelope_violations;
                    stats->max_exceedance = std::max(stats->max_exceedance, exceed);
                }
                env.log_m = expo + env.safety_log;
                restart = true;
                break;
            }
            RngStream as = s.child(rng_tag::accept);
            if (std::log(as.next_double_pos()) <= expo - env.log_m) {
                if (stats) ++stats->accepted;
                ScoredDraw<M> out;
                out.noise = std::move(noise);
                out.path = std::move(path);
                out.endpoint = xp;
                out.weight = score_bridge(model, bound, theta, x, xp, out.noise, grid);
                out.n_proposals = total;
                return out;
            }
        }
    }
}

// Exact draw from the joint law pi^l(dv, du | x): endpoint u from the
// auxiliary's own transition density anchored at x, noise from the Wiener
// law, accepted against the anchored target. For anchor-free auxiliaries the
// density ratio is identically zero and the acceptance exponent reduces to
// the L-sum.
template <class M, class A>
ScoredDraw<M> sample_joint_endpoint(const M& model, const A& aux_family,
                                    const Params<M::n_params>& theta,
                                    const Vec<double, M::dim>& x, const BridgeGrid& grid,
                                    RngStream site, Envelope<M::n_params>& env,
                                    const SamplerSettings& cfg, const NoiseSpec& noise_spec = {},
                                    DrawStats* stats = nullptr) {
    auto prop = aux_family.bind(x, x, grid.t_start, grid.t_end);
    long total = 0;
    for (std::uint64_t epoch = 0;; ++epoch) {
        bool restart = false;
        for (std::uint64_t p = 0; !restart; ++p) {
            if (++total > cfg.max_proposals) throw MaxProposalsExceeded(cfg.max_proposals);
            if (stats) ++stats->proposals;
            RngStream s = site.child(epoch, p);
            RngStream us = s.child(rng_tag::endpoint);
            auto u = prop.sample_endpoint(theta, x, us);
            auto bound = aux_family.bind(x, u, grid.t_start, grid.t_end);
            RngStream ns = s.child(rng_tag::noise);
            auto noise = draw_proposal_increments<M::dim>(grid, noise_spec, ns);
            double h;
            std::vector<Vec<double, M::dim>> path;
            try {
                h = detail::proposal_exponent(model, bound, theta, x, u, noise, grid, &path);
                h += value_of(bound.endpoint_log_density(theta, x, u)) -
                     value_of(prop.endpoint_log_density(theta, x, u));
            } catch (const DomainExit&) {
                if (stats) ++stats->domain_exits;
                continue;
            }
            if (h > env.log_m) {
                double exceed = h - env.log_m;
                ++env.violation_count;
                env.max_exceedance = std::max(env.max_exceedance, exceed);
                if (stats) {
                    ++stats->envelope_violations;
                    stats->max_exceedance = std::max(stats->max_exceedance, exceed);
                }
                env.log_m = h + env.safety_log;
                restart = true;
                break;
            }
            RngStream as = s.child(rng_tag::accept);
            if (std::log(as.next_double_pos()) <= h - env.log_m) {
                if (stats) ++stats->accepted;
                ScoredDraw<M> out;
                out.noise = std::move(noise);
                out.path = std::move(path);
                out.endpoint = u;
                out.weight = score_bridge(model, bound, theta, x, u, out.noise, grid);
                out.n_proposals = total;
                return out;
            }
        }
    }
}

// Generative next state: the endpoint of a joint draw.
template <class M, class A>
Vec<double, M::dim> sample_next_state(const M& model, const A& aux_family,
                                      const Params<M::n_params>& theta,
                                      const Vec<double, M::dim>& x, const BridgeGrid& grid,
                                      RngStream site, Envelope<M::n_params>& env,
                                      const SamplerSettings& cfg, const NoiseSpec& noise_spec = {},
                                      DrawStats* stats = nullptr) {
    return sample_joint_endpoint(model, aux_family, theta, x, grid, site, env, cfg, noise_spec,
                                 stats)
        .endpoint;
}

}  // namespace mpd

#endif
