#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "entwit/criteria.hpp"

namespace entwit {

// Phase shifter setting for mode b, stored reduced to (-pi, pi].
struct PhaseShift {
    double phi = 0.0;

    static PhaseShift of(double raw) {
        double p = std::remainder(raw, 2.0 * std::numbers::pi);
        if (p <= -std::numbers::pi) p += 2.0 * std::numbers::pi;
        return PhaseShift{p};
    }
};

namespace detail {

// raw diagonal unitary exp(-i phi n_b); the sign is pinned by the rotation
// contract below, not by convention folklore
inline QuantumState apply_phase_shift(const QuantumState& state, double phi) {
    const FockSpace& s = state.space;
    Vector phase(s.cutoff_b);
    for (int nb = 0; nb < s.cutoff_b; ++nb)
        phase(nb) = std::exp(Complex(0.0, -phi * static_cast<double>(nb)));
    if (state.is_pure()) {
        Vector v = state.amplitudes;
        for (int na = 0; na < s.cutoff_a; ++na)
            for (int nb = 0; nb < s.cutoff_b; ++nb) v(na * s.cutoff_b + nb) *= phase(nb);
        return QuantumState{s, std::move(v), Matrix(), state.tail_guard};
    }
    Matrix out = state.rho;
    for (int i = 0; i < s.dim(); ++i)
        for (int j = 0; j < s.dim(); ++j)
            out(i, j) *= phase(i % s.cutoff_b) * std::conj(phase(j % s.cutoff_b));
    return QuantumState{s, Vector(), std::move(out), state.tail_guard};
}

// One-time convention self-test: the shifted state must satisfy
//   <Jx>' = cos(phi) <Jx> + sin(phi) <Jy>
//   <Jy>' = -sin(phi) <Jx> + cos(phi) <Jy>
// Runs once per process on a tiny space; throws std::logic_error on drift.
inline bool phase_convention_verified() {
    const FockSpace s = build_space(3, 3);
    const OperatorSet set = build_operator_set(s);
    const QuantumState psi =
        pure_state(s, {{1, 0, Complex(1.0, 0.0)}, {0, 1, Complex(0.4, 0.9)}}, 1);
    const double phi = 0.7;
    const QuantumState shifted = apply_phase_shift(psi, phi);
    const double jx0 = real_expectation(psi, set.jx);
    const double jy0 = real_expectation(psi, set.jy);
    const double ex = std::cos(phi) * jx0 + std::sin(phi) * jy0;
    const double ey = -std::sin(phi) * jx0 + std::cos(phi) * jy0;
    if (std::abs(real_expectation(shifted, set.jx) - ex) > 1e-12 ||
        std::abs(real_expectation(shifted, set.jy) - ey) > 1e-12)
        throw std::logic_error("phase-shift sign convention self-test failed");
    return true;
}

inline void ensure_phase_convention() {
    static const bool ok = phase_convention_verified();
    (void)ok;
}

} // namespace detail

// Local phase shift on mode b (b -> b e^{-i phi} in the Heisenberg picture).
inline QuantumState phase_shift(const QuantumState& state, double phi) {
    detail::ensure_phase_convention();
    return detail::apply_phase_shift(state, phi);
}

// Closed-form covariance statistics in the rotated frame:
// means rotate, variances transform quadratically, and
//   cov' = (1/2) sin(2 phi) (var_jy - var_jx) + cos(2 phi) cov_xy.
// Exact records only; shot-noise propagation through rotations is out of scope.
inline CovarianceRecord rotate_record(const CovarianceRecord& rec, double phi) {
    if (rec.provenance != Provenance::exact)
        throw ParameterOutOfRange("rotate_record requires an exact record");
    const double c = std::cos(phi), s = std::sin(phi);
    const double c2 = std::cos(2.0 * phi), s2 = std::sin(2.0 * phi);
    CovarianceRecord out;
    out.mean_jx = c * rec.mean_jx + s * rec.mean_jy;
    out.mean_jy = -s * rec.mean_jx + c * rec.mean_jy;
    out.var_jx = c * c * rec.var_jx + 2.0 * c * s * rec.cov_xy + s * s * rec.var_jy;
    out.var_jy = s * s * rec.var_jx - 2.0 * c * s * rec.cov_xy + c * c * rec.var_jy;
    out.cov_xy = 0.5 * s2 * (rec.var_jy - rec.var_jx) + c2 * rec.cov_xy;
    out.mean_n = rec.mean_n;
    out.provenance = Provenance::exact;
    return out;
}

// Phase that nulls the rotated cross covariance, via the two-argument
// arctangent so the var_jx == var_jy branch is well defined (returns 0 when
// the record is already diagonal and degenerate).
inline double nulling_phase(const CovarianceRecord& rec) {
    if (rec.provenance != Provenance::exact)
        throw ParameterOutOfRange("nulling_phase requires an exact record");
    if (rec.cov_xy == 0.0 && rec.var_jx == rec.var_jy) return 0.0;
    return 0.5 * std::atan2(2.0 * rec.cov_xy, rec.var_jx - rec.var_jy);
}

// 50:50 beamsplitter preceded by a phi phase shift on mode b.  Output mode
// operators satisfy
//   U^+ a U = (a + b e^{-i phi})/sqrt(2),  U^+ b U = (-a + b e^{-i phi})/sqrt(2)
// exactly on complete total-excitation sectors.  Built as exp(i (pi/2) Jy)
// composed with the phase diagonal; the exponential uses the self-adjoint
// eigendecomposition, so U is unitary to machine precision.
inline Operator beamsplitter_unitary(const FockSpace& space, double phi) {
    const OperatorSet set = build_operator_set(space);
    Eigen::SelfAdjointEigenSolver<Matrix> es(set.jy.matrix);
    const double theta = 0.5 * std::numbers::pi;
    Vector diag(space.dim());
    for (int k = 0; k < space.dim(); ++k)
        diag(k) = std::exp(Complex(0.0, theta * es.eigenvalues()(k)));
    Matrix u = es.eigenvectors() * diag.asDiagonal() * es.eigenvectors().adjoint();

    if (phi != 0.0) {
        Vector phase(space.dim());
        for (int i = 0; i < space.dim(); ++i)
            phase(i) = std::exp(Complex(0.0, -phi * static_cast<double>(i % space.cutoff_b)));
        u = u * phase.asDiagonal();
    }
    return make_operator(std::move(u), "BS(phi=" + std::to_string(phi) + ")", space);
}

inline QuantumState apply_unitary(const QuantumState& state, const Operator& u) {
    if (state.space != u.space) throw SpaceMismatch("state and unitary spaces differ");
    if (state.is_pure())
        return QuantumState{state.space, u.matrix * state.amplitudes, Matrix(), state.tail_guard};
    Matrix rho = u.matrix * state.rho * u.matrix.adjoint();
    return QuantumState{state.space, Vector(), std::move(rho), state.tail_guard};
}

// Residual of the beamsplitter mode-map contract, evaluated over matrix
// elements whose row and column both live in complete total-excitation
// sectors (n_a + n_b <= min(cutoffs) - 1); incomplete sectors are corrupted
// by truncation no matter how the per-mode guard is chosen.
inline double beamsplitter_mode_map_residual(const FockSpace& space, double phi) {
    const Operator u = beamsplitter_unitary(space, phi);
    const Matrix a = annihilation(space, Mode::a).matrix;
    const Matrix b = annihilation(space, Mode::b).matrix;
    const Complex ephi = std::exp(Complex(0.0, -phi));
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const Matrix res_a = u.matrix.adjoint() * a * u.matrix - inv_sqrt2 * (a + ephi * b);
    const Matrix res_b = u.matrix.adjoint() * b * u.matrix - inv_sqrt2 * (-a + ephi * b);

    const int nmax = std::min(space.cutoff_a, space.cutoff_b) - 1;
    double worst = 0.0;
    for (int i = 0; i < space.dim(); ++i) {
        const auto [ia, ib] = space.levels(i);
        if (ia + ib > nmax) continue;
        for (int j = 0; j < space.dim(); ++j) {
            const auto [ja, jb] = space.levels(j);
            if (ja + jb > nmax) continue;
            worst = std::max({worst, std::abs(res_a(i, j)), std::abs(res_b(i, j))});
        }
    }
    return worst;
}

// Max |W14(shifted) - W14(base)| over the supplied phases.  W14 is the
// rotation-invariant form; the same scan applied to W9 exposes its frame
// dependence.
inline double invariance_scan(const QuantumState& state, const OperatorSet& set,
                              std::span<const double> phases) {
    const double base = witness_w14(covariance_record(state, set));
    double worst = 0.0;
    for (const double phi : phases) {
        const double w = witness_w14(covariance_record(phase_shift(state, phi), set));
        worst = std::max(worst, std::abs(w - base));
    }
    return worst;
}

} // namespace entwit
