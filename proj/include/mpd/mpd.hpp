#ifndef MPD_MPD_HPP
#define MPD_MPD_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mpd/dual.hpp"
#include "mpd/errors.hpp"
#include "mpd/grid.hpp"
#include "mpd/rng.hpp"
#include "mpd/sampler.hpp"

namespace mpd {

// gamma_k = eta / (k + offset). Positive eta and offset give a divergent sum
// with summable squares by construction.
struct StepSchedule {
    double eta = 30.0;
    double offset = 50.0;

    StepSchedule() = default;
    StepSchedule(double eta_, double offset_) : eta(eta_), offset(offset_) {
        if (!(eta > 0.0) || !(offset > 0.0))
            throw PreconditionError("step schedule needs eta > 0 and offset > 0");
    }

    double at(long k) const {
        if (k < 1) throw PreconditionError("step schedule index starts at 1");
        return eta / (static_cast<double>(k) + offset);
    }
};

template <int P>
struct MpdIterate {
    long k = 0;
    Params<P> theta{};
    int phase = 1;
};

template <int P>
struct MpdTrajectory {
    std::vector<MpdIterate<P>> iterates;
    std::size_t phase1_end = 0;  // index of the k = T iterate

    const Params<P>& terminal() const { return iterates.back().theta; }
    const Params<P>& phase1_terminal() const { return iterates[phase1_end].theta; }
};

// The martingale-corrected score: difference of the two draw scores.
template <int P>
Params<P> score_increment(const std::vector<double>& w_score,
                          const std::vector<double>& v_score) {
    Params<P> inc;
    for (int j = 0; j < P; ++j) inc[j] = w_score[static_cast<std::size_t>(j)] -
                                         v_score[static_cast<std::size_t>(j)];
    return inc;
}

// Everything a single recursion run needs besides data and randomness.
template <class M, class A>
struct MpdProblem {
    M model;
    A aux;
    StepSchedule schedule;
    Params<M::n_params> theta0{};
    int substeps = 16;
    SamplerSettings sampler;
    NoiseSpec noise;
};

namespace site_tag {
constexpr std::uint64_t cond_draw = 0;
constexpr std::uint64_t joint_draw = 1;
constexpr std::uint64_t state_draw = 2;
constexpr std::uint64_t cond_env = 3;
constexpr std::uint64_t joint_env = 4;
}  // namespace site_tag

// Data-driven pass: one update per observed interval.
template <class M, class A>
MpdTrajectory<M::n_params> phase1_run(const MpdProblem<M, A>& prob,
                                      const std::vector<double>& times,
                                      const std::vector<Vec<double, M::dim>>& states,
                                      RngStream rng, DrawStats* stats = nullptr) {
    if (times.size() != states.size())
        throw PreconditionError("times and states must have equal length");
    if (states.size() < 2) throw PreconditionError("phase 1 needs at least two observations");

    MpdTrajectory<M::n_params> traj;
    traj.iterates.push_back({0, prob.theta0, 1});
    Params<M::n_params> theta = prob.theta0;

    const long T = static_cast<long>(states.size()) - 1;
    for (long k = 1; k <= T; ++k) {
        auto grid = make_grid(times[static_cast<std::size_t>(k - 1)],
                              times[static_cast<std::size_t>(k)], prob.substeps);
        const auto& x = states[static_cast<std::size_t>(k - 1)];
        const auto& xp = states[static_cast<std::size_t>(k)];
        RngStream site = rng.child(static_cast<std::uint64_t>(k));

        auto env_cond =
            calibrate_envelope(prob.model, prob.aux, theta, x, std::optional{xp}, grid,
                               site.child(site_tag::cond_env), prob.sampler, prob.noise, stats);
        auto env_joint = calibrate_envelope(prob.model, prob.aux, theta, x, std::nullopt, grid,
                                            site.child(site_tag::joint_env), prob.sampler,
                                            prob.noise, stats);
        auto w = sample_conditioned_noise(prob.model, prob.aux, theta, x, xp, grid,
                                          site.child(site_tag::cond_draw), env_cond, prob.sampler,
                                          prob.noise, stats);
        auto v = sample_joint_endpoint(prob.model, prob.aux, theta, x, grid,
                                       site.child(site_tag::joint_draw), env_joint, prob.sampler,
                                       prob.noise, stats);
        auto inc = score_increment<M::n_params>(w.weight.score, v.weight.score);
        theta += inc * prob.schedule.at(k);
        traj.iterates.push_back({k, theta, 1});
    }
    traj.phase1_end = traj.iterates.size() - 1;
    return traj;
}

// Generative continuation from (theta_T, x_T): sample the next state at the
// current parameter, then update exactly as in phase 1. The iteration counter
// and the step schedule keep running.
template <class M, class A>
MpdTrajectory<M::n_params> phase2_run(const MpdProblem<M, A>& prob,
                                      const Params<M::n_params>& theta_start,
                                      const Vec<double, M::dim>& x_start, long k_start,
                                      double t_start, double gap, long n_steps, RngStream rng,
                                      DrawStats* stats = nullptr) {
    if (n_steps < 0) throw PreconditionError("negative phase-2 length");
    MpdTrajectory<M::n_params> traj;
    traj.iterates.push_back({k_start, theta_start, 2});
    traj.phase1_end = 0;

    Params<M::n_params> theta = theta_start;
    Vec<double, M::dim> x = x_start;
    for (long step = 1; step <= n_steps; ++step) {
        long k = k_start + step;
        double t0 = t_start + gap * static_cast<double>(step - 1);
        auto grid = make_grid(t0, t0 + gap, prob.substeps);
        RngStream site = rng.child(static_cast<std::uint64_t>(k));

        auto env_joint = calibrate_envelope(prob.model, prob.aux, theta, x, std::nullopt, grid,
                                            site.child(site_tag::joint_env), prob.sampler,
                                            prob.noise, stats);
        auto xp = sample_next_state(prob.model, prob.aux, theta, x, grid,
                                    site.child(site_tag::state_draw), env_joint, prob.sampler,
                                    prob.noise, stats);
        auto env_cond =
            calibrate_envelope(prob.model, prob.aux, theta, x, std::optional{xp}, grid,
                               site.child(site_tag::cond_env), prob.sampler, prob.noise, stats);
        auto w = sample_conditioned_noise(prob.model, prob.aux, theta, x, xp, grid,
                                          site.child(site_tag::cond_draw), env_cond, prob.sampler,
                                          prob.noise, stats);
        auto v = sample_joint_endpoint(prob.model, prob.aux, theta, x, grid,
                                       site.child(site_tag::joint_draw), env_joint, prob.sampler,
                                       prob.noise, stats);
        auto inc = score_increment<M::n_params>(w.weight.score, v.weight.score);
        theta += inc * prob.schedule.at(k);
        traj.iterates.push_back({k, theta, 2});
        x = xp;
    }
    return traj;
}

// Both phases stitched; the terminal iterate is one posterior sample.
template <class M, class A>
MpdTrajectory<M::n_params> run_mpd(const MpdProblem<M, A>& prob, const std::vector<double>& times,
                                   const std::vector<Vec<double, M::dim>>& states,
                                   long phase2_steps, RngStream rng, DrawStats* stats = nullptr) {
    auto traj = phase1_run(prob, times, states, rng, stats);
    const long T = traj.iterates.back().k;
    double t_end = times.back();
    double gap = times.size() >= 2 ? times[times.size() - 1] - times[times.size() - 2] : 1.0;
    auto tail = phase2_run(prob, traj.terminal(), states.back(), T, t_end, gap, phase2_steps, rng,
                           stats);
    for (std::size_t i = 1; i < tail.iterates.size(); ++i) traj.iterates.push_back(tail.iterates[i]);
    return traj;
}

}  // namespace mpd

#endif
