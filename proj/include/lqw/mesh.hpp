// SPDX-License-Identifier: Apache-2.0
//
// Rectangular MZI mesh compiler: factors a d x d unitary into d(d-1)/2
// two-phase Mach-Zehnder settings plus output phases, reconstructs matrices
// from programs, scores agreement with the amplitude fidelity, and embeds
// lossy walk transfer matrices into larger unitaries via ancilla modes.
//
// MZI convention. A setting {mode m, theta, phi} acts on modes (m, m+1) as
//
//     T(theta, phi) = [ e^{i phi} cos(theta)   -sin(theta) ]
//                     [ e^{i phi} sin(theta)    cos(theta) ]
//
// theta in [0, pi/2] sets the splitting ratio (theta = 0 is the bar state),
// phi in [0, 2 pi) is the phase on the first input. A program reconstructs as
//
//     U = diag(e^{i out_k}) * T_1 * T_2 * ... * T_{d(d-1)/2}
//
// i.e. light entering the mesh meets the last listed MZI first.

#ifndef LQW_MESH_HPP
#define LQW_MESH_HPP

#include "lqw/dynamics.hpp"
#include "lqw/walk.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lqw {

template <typename Scalar = double>
struct MziSetting {
    int mode = 0;        // 0-based first mode of the coupled pair (mode, mode+1)
    Scalar theta = 0;
    Scalar phi = 0;
};

template <typename Scalar = double>
struct MeshProgram {
    int dimension = 0;
    std::vector<MziSetting<Scalar>> mzis;
    RealVector<Scalar> output_phases;
};

namespace detail {

template <typename Scalar>
Scalar wrap_two_pi(Scalar angle) {
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    Scalar a = std::fmod(angle, two_pi);
    if (a < Scalar(0)) a += two_pi;
    return a;
}

template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 2, 2> mzi_matrix(Scalar theta, Scalar phi) {
    using C = std::complex<Scalar>;
    const C phase = std::polar(Scalar(1), phi);
    Eigen::Matrix<C, 2, 2> t;
    t << phase * std::cos(theta), C(-std::sin(theta)),
         phase * std::sin(theta), C(std::cos(theta));
    return t;
}

// left-multiplies M by T(m; theta, phi)
template <typename Scalar>
void apply_left(ComplexMatrix<Scalar>& m, int mode, Scalar theta, Scalar phi) {
    const auto t = mzi_matrix(theta, phi);
    m.middleRows(mode, 2) = (t * m.middleRows(mode, 2)).eval();
}

// right-multiplies M by T(m; theta, phi)^dagger
template <typename Scalar>
void apply_right_inverse(ComplexMatrix<Scalar>& m, int mode, Scalar theta, Scalar phi) {
    const auto t = mzi_matrix(theta, phi);
    m.middleCols(mode, 2) = (m.middleCols(mode, 2) * t.adjoint()).eval();
}

}  // namespace detail

/// The 2x2 transfer matrix of one MZI setting (see convention above).
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, 2, 2> mzi_matrix(const MziSetting<Scalar>& s) {
    return detail::mzi_matrix(s.theta, s.phi);
}

/// Product of the program's embedded MZI matrices and output phases.
template <typename Scalar = double>
ComplexMatrix<Scalar> reconstruct(const MeshProgram<Scalar>& program) {
    const int d = program.dimension;
    if (d < 1) throw std::domain_error("reconstruct: program dimension must be >= 1");
    if (program.output_phases.size() != 0 && program.output_phases.size() != d)
        throw std::domain_error("reconstruct: output phase count does not match dimension");
    ComplexMatrix<Scalar> u = ComplexMatrix<Scalar>::Zero(d, d);
    for (int k = 0; k < d; ++k)
        u(k, k) = std::polar(Scalar(1), program.output_phases.size() > 0
                                            ? program.output_phases[k]
                                            : Scalar(0));
    for (const auto& s : program.mzis) {
        if (s.mode < 0 || s.mode + 1 >= d)
            throw std::domain_error("reconstruct: MZI mode pair outside program dimension");
        const auto t = detail::mzi_matrix(s.theta, s.phi);
        u.middleCols(s.mode, 2) = (u.middleCols(s.mode, 2) * t).eval();
    }
    return u;
}

/// Clements-style rectangular decomposition. Nulls one subdiagonal per pass,
/// alternating right-multiplications by inverse MZIs (odd diagonals) and
/// left-multiplications (even diagonals), then commutes the residual left
/// factors through the diagonal so all phases end up at the outputs. Exactly
/// d(d-1)/2 settings, reconstructing U to ~1e-12.
template <typename Scalar = double>
MeshProgram<Scalar> decompose(const ComplexMatrix<Scalar>& u) {
    const int d = static_cast<int>(u.rows());
    if (d < 1 || u.cols() != d) throw std::domain_error("decompose: matrix must be square");
    const Scalar defect =
        (u.adjoint() * u - ComplexMatrix<Scalar>::Identity(d, d)).cwiseAbs().maxCoeff();
    if (!(defect <= Scalar(1e-8))) {
        std::ostringstream msg;
        msg << "decompose: input is not unitary (max |U^dag U - I| = " << defect << ")";
        throw std::domain_error(msg.str());
    }

    struct Plane { int mode; Scalar theta; Scalar phi; };
    std::vector<Plane> left, right;
    ComplexMatrix<Scalar> v = u;
    const Scalar half_pi = std::numbers::pi_v<Scalar> / Scalar(2);
    const Scalar tiny = Scalar(1e-14);

    for (int diag = 1; diag < d; ++diag) {
        if (diag % 2 == 1) {
            for (int j = 0; j < diag; ++j) {
                const int row = d - 1 - j;
                const int col = diag - 1 - j;
                // null v(row, col) by mixing columns (col, col+1)
                const std::complex<Scalar> a = v(row, col);
                const std::complex<Scalar> b = v(row, col + 1);
                Scalar theta, phi;
                if (std::abs(a) < tiny) {
                    theta = 0; phi = 0;
                } else if (std::abs(b) < tiny) {
                    theta = half_pi; phi = 0;
                } else {
                    theta = std::atan(std::abs(a) / std::abs(b));
                    phi = std::arg(a) - std::arg(b);
                }
                detail::apply_right_inverse(v, col, theta, phi);
                right.push_back({col, theta, phi});
            }
        } else {
            for (int j = 1; j <= diag; ++j) {
                const int row = d - diag + j - 1;
                const int col = j - 1;
                // null v(row, col) by mixing rows (row-1, row)
                const std::complex<Scalar> a = v(row, col);
                const std::complex<Scalar> b = v(row - 1, col);
                Scalar theta, phi;
                if (std::abs(a) < tiny) {
                    theta = 0; phi = 0;
                } else if (std::abs(b) < tiny) {
                    theta = half_pi; phi = 0;
                } else {
                    theta = std::atan(std::abs(a) / std::abs(b));
                    phi = std::arg(-a) - std::arg(b);
                }
                detail::apply_left(v, row - 1, theta, phi);
                left.push_back({row - 1, theta, phi});
            }
        }
    }

    // v is now diagonal: U = L_1^dag ... L_p^dag * v * R_q ... R_1.
    // Push each L^dag through the diagonal: T^dag(theta, phi) * diag(a, b) =
    // diag(b e^{-i phi - i pi}, b) * T(theta, a - b + pi) in phase angles.
    RealVector<Scalar> phases(d);
    for (int k = 0; k < d; ++k) phases[k] = std::arg(v(k, k));

    std::vector<MziSetting<Scalar>> mzis;
    mzis.reserve(left.size() + right.size());
    std::vector<MziSetting<Scalar>> folded(left.size());
    for (std::size_t t = left.size(); t-- > 0;) {
        const auto& l = left[t];
        const Scalar alpha = phases[l.mode];
        const Scalar beta = phases[l.mode + 1];
        const Scalar pi = std::numbers::pi_v<Scalar>;
        folded[t] = {l.mode, l.theta, detail::wrap_two_pi(alpha - beta + pi)};
        phases[l.mode] = beta - l.phi - pi;
        // phases[l.mode + 1] stays beta
    }
    for (const auto& s : folded) mzis.push_back(s);
    for (std::size_t t = right.size(); t-- > 0;)
        mzis.push_back({right[t].mode, right[t].theta, detail::wrap_two_pi(right[t].phi)});

    MeshProgram<Scalar> program;
    program.dimension = d;
    program.mzis = std::move(mzis);
    program.output_phases.resize(d);
    for (int k = 0; k < d; ++k) program.output_phases[k] = detail::wrap_two_pi(phases[k]);
    return program;
}

/// Amplitude fidelity F = (1/d) sum_i |col_i(U_th)^dag col_i(U_exp)|, i.e.
/// the normalized trace of |U_th^dag U_exp|.
template <typename DerivedA, typename DerivedB>
auto amplitude_fidelity(const Eigen::MatrixBase<DerivedA>& u_th,
                        const Eigen::MatrixBase<DerivedB>& u_exp) {
    using Scalar = typename Eigen::NumTraits<typename DerivedA::Scalar>::Real;
    if (u_th.rows() != u_exp.rows() || u_th.cols() != u_exp.cols() || u_th.rows() != u_th.cols())
        throw std::domain_error("amplitude_fidelity: matrices must be square and equal-sized");
    Scalar acc = 0;
    for (Eigen::Index i = 0; i < u_th.cols(); ++i)
        acc += std::abs(u_th.col(i).dot(u_exp.col(i)));   // (U_th^dag U_exp)_{ii}
    return acc / Scalar(u_th.cols());
}

/// Unitary embedding of a lossy walk: one fresh ancilla mode per leak event
/// carries the amplitude lost at that offset layer. Lattice modes occupy
/// indices [0, 2M), ancillas [2M, 2M + L) in leak order.
template <typename Scalar = double>
struct DilatedCircuit {
    int lattice_modes = 0;
    ComplexMatrix<Scalar> unitary;
    std::vector<int> ancilla_steps;   // step index at which each ancilla absorbs

    int total_modes() const { return static_cast<int>(unitary.rows()); }
    int ancilla_modes() const { return static_cast<int>(ancilla_steps.size()); }
};

template <typename Scalar = double>
DilatedCircuit<Scalar> dilate_walk(const WalkConfig<Scalar>& config, int steps) {
    config.validate();
    if (steps < 1) throw std::domain_error("dilate_walk: steps must be >= 1");

    const int lattice = config.modes();
    const bool lossy = config.leak_transmissivity > Scalar(0);
    std::vector<int> leak_steps;
    for (int n = 1; n <= steps; ++n)
        if (lossy && layer_parity_at(n, config) == LayerParity::Offset) leak_steps.push_back(n);

    const int total = lattice + static_cast<int>(leak_steps.size());
    const auto leak_bs = bs_block<Scalar>(config.leak_transmissivity);
    const int leak_row = (config.leak_edge == LeakEdge::Top) ? 0 : lattice - 1;

    ComplexMatrix<Scalar> w = ComplexMatrix<Scalar>::Identity(total, total);
    int next_ancilla = lattice;
    for (int n = 1; n <= steps; ++n) {
        ComplexMatrix<Scalar> layer = ComplexMatrix<Scalar>::Identity(total, total);
        WalkConfig<Scalar> lossless = config;
        lossless.leak_transmissivity = Scalar(0);
        layer.topLeftCorner(lattice, lattice) = step_operator(n, lossless).matrix;
        if (lossy && layer_parity_at(n, config) == LayerParity::Offset) {
            const int anc = next_ancilla++;
            layer(leak_row, leak_row) = leak_bs(0, 0);
            layer(leak_row, anc) = leak_bs(0, 1);
            layer(anc, leak_row) = leak_bs(1, 0);
            layer(anc, anc) = leak_bs(1, 1);
        }
        w = (layer * w).eval();
    }

    DilatedCircuit<Scalar> circuit;
    circuit.lattice_modes = lattice;
    circuit.unitary = std::move(w);
    circuit.ancilla_steps = std::move(leak_steps);
    return circuit;
}

/// Mesh program realizing the walk's n-step transfer: decompose the dilated
/// unitary. Restricting the reconstruction to lattice modes reproduces
/// run_walk's raw amplitudes.
template <typename Scalar = double>
MeshProgram<Scalar> compile_walk(const WalkConfig<Scalar>& config, int steps) {
    return decompose(dilate_walk(config, steps).unitary);
}

}  // namespace lqw

#endif  // LQW_MESH_HPP
