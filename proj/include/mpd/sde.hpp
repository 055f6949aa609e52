#ifndef MPD_SDE_HPP
#define MPD_SDE_HPP

#include <cmath>
#include <concepts>
#include <vector>

#include "mpd/dual.hpp"
#include "mpd/errors.hpp"
#include "mpd/grid.hpp"
#include "mpd/linalg.hpp"
#include "mpd/rng.hpp"

namespace mpd {

// A diffusion model M provides:
//   static constexpr int dim, n_params; static constexpr bool positive_domain;
//   drift(theta, x)      -> Vec      (mu)
//   diffusion(theta, x)  -> Mat      (sigma; Sigma = sigma sigma^T)
// with theta/x generic over the scalar (double or Dual<n_params>), so the
// same model code serves plain simulation and tangent propagation.
template <class M>
concept SdeModelType = requires {
    { M::dim } -> std::convertible_to<int>;
    { M::n_params } -> std::convertible_to<int>;
    { M::positive_domain } -> std::convertible_to<bool>;
};

// Driving noise for one interval: n_substeps increments, each N(0, delta I).
template <int D>
struct WienerIncrements {
    std::vector<Vec<double, D>> dw;

    int size() const { return static_cast<int>(dw.size()); }
};

template <int D>
WienerIncrements<D> draw_increments(const BridgeGrid& grid, RngStream& rng) {
    WienerIncrements<D> w;
    w.dw.resize(static_cast<std::size_t>(grid.n_substeps));
    double sd = std::sqrt(grid.delta());
    for (auto& v : w.dw)
        for (int i = 0; i < D; ++i) v[i] = sd * rng.next_gaussian();
    return w;
}

// One Euler-Maruyama step: x + drift*delta + diff*dw.
template <class S, int D>
Vec<S, D> em_step(const Vec<S, D>& x, const Vec<S, D>& drift, const Mat<S, D>& diff,
                  const Vec<double, D>& dw, double delta, long step_index = -1) {
    Vec<S, D> dwp;
    for (int i = 0; i < D; ++i) dwp[i] = S(dw[i]);
    Vec<S, D> next = x + drift * S(delta) + matvec(diff, dwp);
    for (int i = 0; i < D; ++i)
        if (!is_finite(next[i])) throw NumericalBlowup("non-finite Euler-Maruyama step", step_index);
    return next;
}

template <int D>
void check_domain(const Vec<double, D>& x, bool positive_domain, long step_index) {
    if (!positive_domain) return;
    for (int i = 0; i < D; ++i)
        if (!(x[i] > 0.0)) throw DomainExit("state left the positive domain", step_index);
}

// Forward simulation from x0 over the grid with fresh noise. Returns all
// n_substeps+1 nodes including x0.
template <class M>
std::vector<Vec<double, M::dim>> simulate_path(const M& model, const Params<M::n_params>& theta,
                                               const Vec<double, M::dim>& x0,
                                               const BridgeGrid& grid, RngStream& rng) {
    if (grid.n_substeps < 1) throw GridError("empty grid");
    std::vector<Vec<double, M::dim>> path;
    path.reserve(static_cast<std::size_t>(grid.n_substeps) + 1);
    check_domain(x0, M::positive_domain, 0);
    path.push_back(x0);
    double delta = grid.delta();
    double sd = std::sqrt(delta);
    Vec<double, M::dim> x = x0;
    for (int j = 0; j < grid.n_substeps; ++j) {
        Vec<double, M::dim> dw;
        for (int i = 0; i < M::dim; ++i) dw[i] = sd * rng.next_gaussian();
        x = em_step(x, model.drift(theta, x), model.diffusion(theta, x), dw, delta, j);
        check_domain(x, M::positive_domain, j + 1);
        path.push_back(x);
    }
    return path;
}

}  // namespace mpd

#endif
