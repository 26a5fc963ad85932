// SPDX-License-Identifier: Apache-2.0
//
// Independent brute-force re-implementation of the walk evolution, used to
// cross-validate the dynamics module. Deliberately naive: plain std::vector
// loops, beam-splitter action written out elementwise, no code shared with
// the operator builder.

#ifndef LQW_ORACLE_HPP
#define LQW_ORACLE_HPP

#include "lqw/dynamics.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace lqw {

struct OracleResult {
    std::vector<std::complex<double>> amplitudes;
    double survival = 0.0;
};

/// Evolves the config's input mode through step_count layers by explicit
/// elementwise summation of each 2x2 block action.
inline OracleResult oracle_evolve(const WalkConfig<double>& config, int step_count) {
    config.validate();
    const int d = 2 * config.half_width;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double keep = std::sqrt(1.0 - config.leak_transmissivity);

    std::vector<std::complex<double>> psi(static_cast<std::size_t>(d));
    psi[static_cast<std::size_t>(config.input_mode - 1)] = 1.0;

    for (int n = 1; n <= step_count; ++n) {
        const bool full_layer =
            ((n % 2) == 1) == (config.first_layer == LayerParity::Full);
        std::vector<std::complex<double>> next = psi;
        const int first_pair = full_layer ? 0 : 1;
        const int last_pair = full_layer ? d - 2 : d - 3;
        for (int i = first_pair; i <= last_pair; i += 2) {
            const std::complex<double> up = psi[static_cast<std::size_t>(i)];
            const std::complex<double> down = psi[static_cast<std::size_t>(i + 1)];
            next[static_cast<std::size_t>(i)] = inv_sqrt2 * up + inv_sqrt2 * down;
            next[static_cast<std::size_t>(i + 1)] = -inv_sqrt2 * up + inv_sqrt2 * down;
        }
        if (!full_layer) {
            const std::size_t leak_index =
                (config.leak_edge == LeakEdge::Top) ? 0 : static_cast<std::size_t>(d - 1);
            next[leak_index] = keep * psi[leak_index];
            // the opposite edge mode is untouched: total reflection
        }
        psi.swap(next);
    }

    double norm_sq = 0.0;
    for (const auto& a : psi) norm_sq += std::norm(a);
    return {std::move(psi), norm_sq};
}

/// True iff oracle and dynamics amplitudes agree elementwise within tol and
/// the survival probabilities agree within tol.
inline bool oracle_matches_dynamics(const WalkConfig<double>& config, int step_count, double tol) {
    if (!(tol > 0.0)) throw std::domain_error("oracle_matches_dynamics: tol must be > 0");
    WalkConfig<double> cfg = config;
    cfg.steps = step_count;
    const Trajectory<double> traj = run_walk(cfg);
    const OracleResult expected = oracle_evolve(cfg, step_count);

    const auto& rec = traj.records.back();
    if (std::abs(rec.survival - expected.survival) > tol) return false;
    for (int i = 0; i < rec.amplitudes.size(); ++i) {
        if (std::abs(rec.amplitudes[i] - expected.amplitudes[static_cast<std::size_t>(i)]) > tol)
            return false;
    }
    return true;
}

}  // namespace lqw

#endif  // LQW_ORACLE_HPP
