// SPDX-License-Identifier: Apache-2.0
//
// Lattice model and per-step evolution operators for a discrete-time quantum
// walk on 2M photonic modes with one hard-reflective edge and one leaky edge.
//
// The walk is a brick-wall cascade of 2x2 beam-splitter blocks. Layers
// alternate between a "full" pairing (1,2),(3,4),...,(2M-1,2M) of M balanced
// blocks and an "offset" pairing (2,3),(4,5),...,(2M-2,2M-1) of M-1 balanced
// blocks. On offset layers the two edge modes are unpaired: the reflective
// edge passes through unchanged, while the leaky edge couples to an external
// (discarded) mode through an unbalanced beam splitter of transmissivity r^2,
// so its surviving amplitude is scaled by sqrt(1 - r^2).

#ifndef LQW_WALK_HPP
#define LQW_WALK_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace lqw {

template <typename Scalar = double>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class LeakEdge { Top, Bottom };            // Top = mode 1, Bottom = mode 2M
enum class LayerParity { Full, Offset };

/// Full description of one walk instance. Mode indices are 1-based.
template <typename Scalar = double>
struct WalkConfig {
    int half_width = 4;                          // M; the lattice has 2M modes
    int steps = 100;                             // N
    int input_mode = 2;                          // m in [1, 2M]
    Scalar leak_transmissivity = Scalar(0);      // r^2 in [0, 1]
    LeakEdge leak_edge = LeakEdge::Top;
    LayerParity first_layer = LayerParity::Full;
    bool renormalize = true;

    int modes() const noexcept { return 2 * half_width; }

    void validate() const {
        if (half_width < 2)
            throw std::domain_error("WalkConfig: half_width must be >= 2, got " +
                                    std::to_string(half_width));
        if (steps < 0)
            throw std::domain_error("WalkConfig: steps must be >= 0, got " +
                                    std::to_string(steps));
        if (input_mode < 1 || input_mode > modes())
            throw std::domain_error("WalkConfig: input_mode must be in [1, " +
                                    std::to_string(modes()) + "], got " +
                                    std::to_string(input_mode));
        if (!(leak_transmissivity >= Scalar(0) && leak_transmissivity <= Scalar(1)))
            throw std::domain_error("WalkConfig: leak_transmissivity must be in [0, 1]");
    }
};

/// Lattice coordinate of mode m: x = -(M - 0.5) + (m - 1), so the lattice
/// spans half-integers -x_max .. +x_max with x_max = M - 0.5.
template <typename Scalar = double>
Scalar mode_to_position(int mode, int half_width) {
    if (half_width < 1 || mode < 1 || mode > 2 * half_width)
        throw std::domain_error("mode_to_position: mode " + std::to_string(mode) +
                                " outside [1, " + std::to_string(2 * half_width) + "]");
    return -(Scalar(half_width) - Scalar(0.5)) + Scalar(mode - 1);
}

/// All 2M lattice coordinates in mode order.
template <typename Scalar = double>
RealVector<Scalar> lattice_positions(int half_width) {
    RealVector<Scalar> x(2 * half_width);
    for (int m = 1; m <= 2 * half_width; ++m) x[m - 1] = mode_to_position<Scalar>(m, half_width);
    return x;
}

/// Beam-splitter block of transmissivity r^2:
///
///     [  sqrt(1-r^2)   r          ]
///     [ -r             sqrt(1-r^2)]
///
/// r^2 = 1/2 is the balanced block implementing the coin toss; r^2 = 0 is the
/// identity and r^2 = 1 the full swap.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, 2, 2> bs_block(Scalar r_sq) {
    if (!(r_sq >= Scalar(0) && r_sq <= Scalar(1)))
        throw std::domain_error("bs_block: transmissivity must be in [0, 1]");
    const Scalar t = std::sqrt(Scalar(1) - r_sq);
    const Scalar r = std::sqrt(r_sq);
    Eigen::Matrix<std::complex<Scalar>, 2, 2> b;
    b << t, r, -r, t;
    return b;
}

/// Parity of the layer applied at 1-based step_index.
template <typename Scalar = double>
LayerParity layer_parity_at(int step_index, const WalkConfig<Scalar>& config) {
    const bool odd = (step_index % 2) == 1;
    const bool first_full = config.first_layer == LayerParity::Full;
    return (odd == first_full) ? LayerParity::Full : LayerParity::Offset;
}

template <typename Scalar = double>
struct StepOperator {
    ComplexMatrix<Scalar> matrix;    // 2M x 2M
    LayerParity layer_parity;
    bool leak_applied;               // offset layer with r^2 > 0
};

/// Dense evolution operator for the given step. Full layers are unitary;
/// offset layers are contractions whenever r^2 > 0.
template <typename Scalar = double>
StepOperator<Scalar> step_operator(int step_index, const WalkConfig<Scalar>& config) {
    config.validate();
    if (step_index < 1)
        throw std::domain_error("step_operator: step_index must be >= 1");

    const int d = config.modes();
    const LayerParity parity = layer_parity_at(step_index, config);
    const auto coin = bs_block<Scalar>(Scalar(0.5));

    ComplexMatrix<Scalar> op = ComplexMatrix<Scalar>::Identity(d, d);
    if (parity == LayerParity::Full) {
        for (int i = 0; i + 1 < d; i += 2) op.template block<2, 2>(i, i) = coin;
    } else {
        for (int i = 1; i + 1 < d - 1; i += 2) op.template block<2, 2>(i, i) = coin;
        const int leak_row = (config.leak_edge == LeakEdge::Top) ? 0 : d - 1;
        op(leak_row, leak_row) = std::sqrt(Scalar(1) - config.leak_transmissivity);
        // the opposite edge keeps its identity row: total reflection
    }
    return {std::move(op), parity, parity == LayerParity::Offset && config.leak_transmissivity > Scalar(0)};
}

/// In-place application of the step's 2x2 blocks; agrees with the dense
/// operator to within 1e-13 elementwise.
template <typename Scalar = double>
void apply_step_in_place(Eigen::Ref<ComplexVector<Scalar>> amplitudes, int step_index,
                         const WalkConfig<Scalar>& config) {
    const int d = config.modes();
    if (amplitudes.size() != d)
        throw std::domain_error("apply_step_in_place: state has " +
                                std::to_string(amplitudes.size()) + " modes, expected " +
                                std::to_string(d));
    const LayerParity parity = layer_parity_at(step_index, config);
    const Scalar c = std::sqrt(Scalar(0.5));

    const int begin = (parity == LayerParity::Full) ? 0 : 1;
    const int end = (parity == LayerParity::Full) ? d - 1 : d - 2;
    for (int i = begin; i < end; i += 2) {
        const std::complex<Scalar> a = amplitudes[i];
        const std::complex<Scalar> b = amplitudes[i + 1];
        amplitudes[i] = c * a + c * b;
        amplitudes[i + 1] = -c * a + c * b;
    }
    if (parity == LayerParity::Offset) {
        const int leak_row = (config.leak_edge == LeakEdge::Top) ? 0 : d - 1;
        amplitudes[leak_row] *= std::sqrt(Scalar(1) - config.leak_transmissivity);
    }
}

}  // namespace lqw

#endif  // LQW_WALK_HPP
