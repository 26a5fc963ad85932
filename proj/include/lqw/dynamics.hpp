// SPDX-License-Identifier: Apache-2.0
//
// State evolution and per-step observables: survival probability,
// renormalized position distribution, mean position and variance.

#ifndef LQW_DYNAMICS_HPP
#define LQW_DYNAMICS_HPP

#include "lqw/walk.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lqw {

/// Thrown by run_walk when the surviving norm underflows (0 < S < 1e-300):
/// the renormalized distribution is no longer meaningful.
class DegenerateRunError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

template <typename Scalar = double>
struct StateVector {
    ComplexVector<Scalar> amplitudes;
    int step = 0;
};

template <typename Scalar = double>
struct Distribution {
    RealVector<Scalar> probabilities;
    RealVector<Scalar> positions;
    bool renormalized = false;
};

/// One row of a trajectory. mean/variance are absent when the surviving
/// population is exactly zero (renormalization undefined).
template <typename Scalar = double>
struct StepRecord {
    int step = 0;
    ComplexVector<Scalar> amplitudes;   // raw, not renormalized
    Scalar survival = Scalar(0);
    Distribution<Scalar> distribution;
    std::optional<Scalar> mean;
    std::optional<Scalar> variance;
};

template <typename Scalar = double>
struct Trajectory {
    WalkConfig<Scalar> config;
    std::vector<StepRecord<Scalar>> records;    // steps 0..N

    std::vector<Scalar> mean_series() const {
        std::vector<Scalar> out;
        out.reserve(records.size());
        for (const auto& rec : records)
            out.push_back(rec.mean ? *rec.mean : std::numeric_limits<Scalar>::quiet_NaN());
        return out;
    }
    std::vector<Scalar> variance_series() const {
        std::vector<Scalar> out;
        out.reserve(records.size());
        for (const auto& rec : records)
            out.push_back(rec.variance ? *rec.variance : std::numeric_limits<Scalar>::quiet_NaN());
        return out;
    }
    std::vector<Scalar> survival_series() const {
        std::vector<Scalar> out;
        out.reserve(records.size());
        for (const auto& rec : records) out.push_back(rec.survival);
        return out;
    }
};

/// Unit amplitude at the configured input mode, step 0.
template <typename Scalar = double>
StateVector<Scalar> initial_state(const WalkConfig<Scalar>& config) {
    config.validate();
    ComplexVector<Scalar> amp = ComplexVector<Scalar>::Zero(config.modes());
    amp[config.input_mode - 1] = std::complex<Scalar>(1);
    return {std::move(amp), 0};
}

/// Applies one step operator: amplitudes <- op * amplitudes, step + 1.
template <typename Scalar = double>
StateVector<Scalar> evolve_step(const StateVector<Scalar>& state, const StepOperator<Scalar>& op) {
    if (op.matrix.cols() != state.amplitudes.size())
        throw std::domain_error("evolve_step: operator is " + std::to_string(op.matrix.rows()) +
                                "x" + std::to_string(op.matrix.cols()) + " but state has " +
                                std::to_string(state.amplitudes.size()) + " modes");
    return {op.matrix * state.amplitudes, state.step + 1};
}

/// Mean position sum(p_i x_i) of a renormalized distribution.
template <typename Scalar = double>
Scalar mean_position(const Distribution<Scalar>& dist) {
    if (!dist.renormalized || std::abs(dist.probabilities.sum() - Scalar(1)) > Scalar(1e-9))
        throw std::domain_error("mean_position: distribution is not renormalized");
    return dist.probabilities.dot(dist.positions);
}

/// Variance sum(p_i x_i^2) - mean^2; clamped at zero against roundoff.
template <typename Scalar = double>
Scalar variance(const Distribution<Scalar>& dist) {
    if (!dist.renormalized || std::abs(dist.probabilities.sum() - Scalar(1)) > Scalar(1e-9))
        throw std::domain_error("variance: distribution is not renormalized");
    const Scalar mu = dist.probabilities.dot(dist.positions);
    const Scalar second = dist.probabilities.dot(dist.positions.cwiseProduct(dist.positions));
    return std::max(Scalar(0), second - mu * mu);
}

namespace detail {

template <typename Scalar>
StepRecord<Scalar> make_record(int step, const ComplexVector<Scalar>& amplitudes,
                               const RealVector<Scalar>& positions, bool renormalize) {
    StepRecord<Scalar> rec;
    rec.step = step;
    rec.amplitudes = amplitudes;
    rec.survival = amplitudes.squaredNorm();

    RealVector<Scalar> raw = amplitudes.cwiseAbs2();
    if (rec.survival == Scalar(0)) {
        // nothing survives: observables are undefined, keep the raw zeros
        rec.distribution = {std::move(raw), positions, false};
        return rec;
    }
    if (rec.survival < Scalar(1e-300))
        throw DegenerateRunError("run_walk: survival underflow (" + std::to_string(rec.survival) +
                                 ") at step " + std::to_string(step));

    Distribution<Scalar> renorm{raw / rec.survival, positions, true};
    rec.mean = mean_position(renorm);
    rec.variance = variance(renorm);
    rec.distribution = renormalize ? std::move(renorm)
                                   : Distribution<Scalar>{std::move(raw), positions, false};
    return rec;
}

}  // namespace detail

/// Evolves the configured input through N steps and records raw amplitudes,
/// survival, the (renormalized) distribution and its moments at every step.
/// Moments are always taken on the surviving population; the `renormalize`
/// flag only selects which distribution is stored.
template <typename Scalar = double>
Trajectory<Scalar> run_walk(const WalkConfig<Scalar>& config) {
    config.validate();
    const RealVector<Scalar> positions = lattice_positions<Scalar>(config.half_width);

    Trajectory<Scalar> traj;
    traj.config = config;
    traj.records.reserve(static_cast<std::size_t>(config.steps) + 1);

    ComplexVector<Scalar> amp = initial_state(config).amplitudes;
    traj.records.push_back(detail::make_record<Scalar>(0, amp, positions, config.renormalize));
    for (int n = 1; n <= config.steps; ++n) {
        apply_step_in_place<Scalar>(amp, n, config);
        traj.records.push_back(detail::make_record<Scalar>(n, amp, positions, config.renormalize));
    }
    return traj;
}

/// Squared norm of the raw amplitudes at step n.
template <typename Scalar = double>
Scalar survival(const Trajectory<Scalar>& traj, int n) {
    if (n < 0 || static_cast<std::size_t>(n) >= traj.records.size())
        throw std::domain_error("survival: step " + std::to_string(n) + " outside trajectory");
    return traj.records[static_cast<std::size_t>(n)].survival;
}

}  // namespace lqw

#endif  // LQW_DYNAMICS_HPP
