#pragma once

#include <algorithm>
#include <optional>
#include <string_view>
#include <vector>

#include "entwit/algebra.hpp"
#include "entwit/fock.hpp"

namespace entwit {

inline constexpr double default_witness_tol = 1e-9;
inline constexpr double default_z_threshold = 3.0;

enum class Provenance { exact, estimated };

// detected / not-detected / boundary.  A witness is sufficient, never
// necessary, so "not-detected" deliberately does not say "separable".
enum class Verdict { detected, not_detected, boundary };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::detected: return "detected";
        case Verdict::not_detected: return "not-detected";
        default: return "boundary";
    }
}

inline Verdict classify(double witness, double tol_abs) {
    if (std::abs(witness) <= tol_abs) return Verdict::boundary;
    return witness < 0.0 ? Verdict::detected : Verdict::not_detected;
}

struct RecordErrors {
    double mean_jx = 0, mean_jy = 0;
    double var_jx = 0, var_jy = 0, cov_xy = 0;
    double mean_n = 0;
};

// Per-phase sufficient statistics of the measurement protocol: estimates of
// <N->, <N-^2>, <N+> at one phase setting plus the covariance matrix of those
// three estimators (zero for exact pmf moments).
struct PhaseMoments {
    FockSpace space;
    double phi = 0.0;
    double mean_nminus = 0.0;
    double mean_nminus_sq = 0.0;
    double mean_nplus = 0.0;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    long long n_shots = 0; // 0 marks exact moments
};

// First/second moments of Jx, Jy plus <N+>: the sufficient statistic for all
// three witnesses.  When estimated, err carries per-field standard errors and
// basis the raw four-phase statistics used for error propagation.
struct CovarianceRecord {
    double mean_jx = 0, mean_jy = 0;
    double var_jx = 0, var_jy = 0, cov_xy = 0;
    double mean_n = 0;
    Provenance provenance = Provenance::exact;
    std::optional<RecordErrors> err;
    std::vector<PhaseMoments> basis;
};

struct GuardStatus {
    bool clean = true;
    double tail_mass = 0.0;
    int guard = default_tail_guard;
};

struct WitnessTriple {
    double w9 = 0, w12 = 0, w14 = 0;
};

struct CriterionReport {
    double w9 = 0, w12 = 0, w14 = 0;
    Verdict verdict_w9 = Verdict::boundary;
    Verdict verdict_w12 = Verdict::boundary;
    Verdict verdict_w14 = Verdict::boundary;
    double tol = default_witness_tol;
    GuardStatus guard;
    Provenance provenance = Provenance::exact;
    std::optional<WitnessTriple> std_errs; // when estimated
    std::optional<WitnessTriple> z_scores; // |W| / stderr(W)
    double z_threshold = default_z_threshold;
};

namespace detail {
inline void require_hermitian_pair(const QuantumState& state, const Operator& a,
                                   const Operator& b) {
    if (state.space != a.space || state.space != b.space)
        throw SpaceMismatch("state/operator spaces differ");
    if (!a.hermitian || !b.hermitian)
        throw NonHermitianInput("covariance requires hermitian-flagged operators");
}

// <AB> for hermitian A, B with a single product against the state:
// pure:    <psi|AB|psi> = <A psi|B psi>
// density: Tr(rho A B) = Tr(B rho A) = sum_ij (B rho)[i,j] A[j,i]
// Re gives <AB + BA>/2 and Im gives <[A,B]>/2i.
inline Complex product_moment(const QuantumState& state, const Matrix& a, const Matrix& b) {
    if (state.is_pure()) {
        const Vector av = a * state.amplitudes;
        const Vector bv = b * state.amplitudes;
        return av.dot(bv);
    }
    const Matrix brho = b * state.rho;
    return (brho.array() * a.transpose().array()).sum();
}
} // namespace detail

// <dA dB>_S = (1/2)<AB + BA> - <A><B>; equals the variance when A = B.
inline double sym_covariance(const QuantumState& state, const Operator& a, const Operator& b) {
    detail::require_hermitian_pair(state, a, b);
    const double cross = detail::product_moment(state, a.matrix, b.matrix).real();
    return cross - real_expectation(state, a) * real_expectation(state, b);
}

// Heisenberg margin <(dA)^2><(dB)^2> - |<[A,B]>|^2/4; >= 0 for valid states.
inline double hur_margin(const QuantumState& state, const Operator& a, const Operator& b) {
    detail::require_hermitian_pair(state, a, b);
    const double ma = real_expectation(state, a);
    const double mb = real_expectation(state, b);
    const Complex ab = detail::product_moment(state, a.matrix, b.matrix);
    const double va = detail::product_moment(state, a.matrix, a.matrix).real() - ma * ma;
    const double vb = detail::product_moment(state, b.matrix, b.matrix).real() - mb * mb;
    return va * vb - ab.imag() * ab.imag(); // |<[A,B]>|^2/4 = Im<AB>^2
}

// Schroedinger-Robertson margin; subtracts the squared symmetric cross
// correlation, so srr_margin <= hur_margin always.
inline double srr_margin(const QuantumState& state, const Operator& a, const Operator& b) {
    const double s = sym_covariance(state, a, b);
    return hur_margin(state, a, b) - s * s;
}

// All five J moments from two applications of Jx, Jy (vectors for pure
// states, one product with rho each for densities); this is the hot path of
// every scan.
inline CovarianceRecord covariance_record(const QuantumState& state, const OperatorSet& set) {
    if (state.space != set.space) throw SpaceMismatch("state and operator set spaces differ");
    CovarianceRecord rec;
    double jx2, jy2, sym;
    if (state.is_pure()) {
        const Vector x = set.jx.matrix * state.amplitudes;
        const Vector y = set.jy.matrix * state.amplitudes;
        rec.mean_jx = state.amplitudes.dot(x).real();
        rec.mean_jy = state.amplitudes.dot(y).real();
        jx2 = x.squaredNorm();
        jy2 = y.squaredNorm();
        sym = x.dot(y).real(); // Re<Jx psi|Jy psi> = <JxJy + JyJx>/2
    } else {
        const Matrix ex = set.jx.matrix * state.rho;
        const Matrix ey = set.jy.matrix * state.rho;
        rec.mean_jx = ex.trace().real();
        rec.mean_jy = ey.trace().real();
        // Tr(rho A B) = sum_ij (A rho)[i,j] B[j,i], cyclically
        jx2 = (ex.array() * set.jx.matrix.transpose().array()).sum().real();
        jy2 = (ey.array() * set.jy.matrix.transpose().array()).sum().real();
        sym = (ey.array() * set.jx.matrix.transpose().array()).sum().real();
    }
    rec.var_jx = jx2 - rec.mean_jx * rec.mean_jx;
    rec.var_jy = jy2 - rec.mean_jy * rec.mean_jy;
    rec.cov_xy = sym - rec.mean_jx * rec.mean_jy;
    rec.mean_n = real_expectation(state, set.n_plus);
    rec.provenance = Provenance::exact;
    return rec;
}

// W9 = (1/4 + <(dJx)^2>)(1/4 + <(dJy)^2>) - (1 + <N+>)^2/16.
// Negative excludes every separable state.
inline double witness_w9(const CovarianceRecord& r) {
    return (0.25 + r.var_jx) * (0.25 + r.var_jy) - (1.0 + r.mean_n) * (1.0 + r.mean_n) / 16.0;
}

// W12 = W9 - <dJx dJy>_S^2; stricter whenever the cross covariance is nonzero.
inline double witness_w12(const CovarianceRecord& r) {
    return witness_w9(r) - r.cov_xy * r.cov_xy;
}

// W14 = Det C + Tr C / 4 - (<N+>^2 + 2<N+>)/16 with C the 2x2 covariance
// matrix of central moments.  Algebraically identical to W12; kept as a
// separate route because it is manifestly invariant under phase rotations.
inline double witness_w14(const CovarianceRecord& r) {
    const double det = r.var_jx * r.var_jy - r.cov_xy * r.cov_xy;
    const double tr = r.var_jx + r.var_jy;
    return det + 0.25 * tr - (r.mean_n * r.mean_n + 2.0 * r.mean_n) / 16.0;
}

// right-hand-side magnitudes, used to scale the boundary tolerance
inline double witness_w9_rhs(const CovarianceRecord& r) {
    return (1.0 + r.mean_n) * (1.0 + r.mean_n) / 16.0;
}
inline double witness_w12_rhs(const CovarianceRecord& r) {
    return witness_w9_rhs(r) + r.cov_xy * r.cov_xy;
}
inline double witness_w14_rhs(const CovarianceRecord& r) {
    return (r.mean_n * r.mean_n + 2.0 * r.mean_n) / 16.0;
}

namespace detail {
// per-mode normal-ordered monomial (x^+)^m x^n on one cutoff
inline Matrix mode_monomial(int cutoff, int m, int n) {
    const Matrix low = lowering_matrix(cutoff);
    const Matrix raise = low.adjoint();
    Matrix out = Matrix::Identity(cutoff, cutoff);
    for (int k = 0; k < n; ++k) out = low * out;
    for (int k = 0; k < m; ++k) out = raise * out;
    return out;
}
} // namespace detail

namespace detail {
// Partial contraction of rho with a mode-b operator:
//   out[ja, ia] = sum_{ib, jb} rho[(ia,ib),(ja,jb)] * mb[jb, ib],
// so that Tr(rho (Ma x Mb)) = sum_{ia,ja} Ma[ja,ia] * out[ja,ia].  Avoids
// materializing the Kronecker product for every monomial.
inline Matrix contract_mode_b(const Matrix& rho, const Matrix& mb, const FockSpace& s) {
    Matrix out = Matrix::Zero(s.cutoff_a, s.cutoff_a);
    for (int ia = 0; ia < s.cutoff_a; ++ia)
        for (int ja = 0; ja < s.cutoff_a; ++ja) {
            Complex acc(0.0, 0.0);
            for (int ib = 0; ib < s.cutoff_b; ++ib)
                for (int jb = 0; jb < s.cutoff_b; ++jb)
                    acc += rho(ia * s.cutoff_b + ib, ja * s.cutoff_b + jb) * mb(jb, ib);
            out(ja, ia) = acc;
        }
    return out;
}
} // namespace detail

// Max residual of <a^+m a^n b^+p b^q>_{rho^PT} = <a^+m a^n b^+q b^p>_rho over
// all normal-ordered monomials of total order <= max_order.  Both sides are
// evaluated literally, the left with the stored partial transpose.
inline double verify_pt_moments(const QuantumState& state, int max_order) {
    if (state.is_pure())
        throw ParameterOutOfRange("verify_pt_moments expects a density matrix");
    if (max_order < 1) throw ParameterOutOfRange("max_order must be >= 1");
    const FockSpace& s = state.space;
    const QuantumState pt = partial_transpose(state);
    const int stride = max_order + 1;

    std::vector<Matrix> amono(stride * stride);
    for (int m = 0; m <= max_order; ++m)
        for (int n = 0; n <= max_order; ++n)
            amono[m * stride + n] = detail::mode_monomial(s.cutoff_a, m, n);

    // per (p,q): contract the mode-b monomial into each state once
    std::vector<Matrix> left(stride * stride), right(stride * stride);
    for (int p = 0; p <= max_order; ++p)
        for (int q = 0; q + p <= max_order; ++q) {
            const Matrix mb = detail::mode_monomial(s.cutoff_b, p, q);
            left[p * stride + q] = detail::contract_mode_b(pt.rho, mb, s);
            right[q * stride + p] = detail::contract_mode_b(state.rho, mb, s); // swapped role
        }

    double worst = 0.0;
    for (int m = 0; m <= max_order; ++m)
        for (int n = 0; n + m <= max_order; ++n)
            for (int p = 0; p + m + n <= max_order; ++p)
                for (int q = 0; q + m + n + p <= max_order; ++q) {
                    const Matrix& ma = amono[m * stride + n];
                    const Complex lhs =
                        (left[p * stride + q].array() * ma.array()).sum();
                    const Complex rhs =
                        (right[p * stride + q].array() * ma.array()).sum();
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
    return worst;
}

// Residuals of the covariance identities that turn the su(1,1) uncertainty
// relation under PT into conditions on su(2) moments of the original state:
//   <dKx dKy>_{S,PT} = <dJx dJy>_S
//   <(dKx)^2>_PT = 1/4 + <(dJx)^2>      (same for y)
//   <Kz>_PT = (1 + <N+>)/2
struct PtBridge {
    double cov_residual = 0;
    double var_x_residual = 0;
    double var_y_residual = 0;
    double kz_residual = 0;
    double max_residual() const {
        return std::max({cov_residual, var_x_residual, var_y_residual, kz_residual});
    }
};

inline PtBridge pt_bridge_check(const QuantumState& state, const OperatorSet& set) {
    if (state.is_pure())
        throw ParameterOutOfRange("pt_bridge_check expects a density matrix");
    if (state.space != set.space) throw SpaceMismatch("state and operator set spaces differ");
    const QuantumState pt = partial_transpose(state);
    PtBridge out;
    out.cov_residual =
        std::abs(sym_covariance(pt, set.kx, set.ky) - sym_covariance(state, set.jx, set.jy));
    out.var_x_residual =
        std::abs(sym_covariance(pt, set.kx, set.kx) - 0.25 - sym_covariance(state, set.jx, set.jx));
    out.var_y_residual =
        std::abs(sym_covariance(pt, set.ky, set.ky) - 0.25 - sym_covariance(state, set.jy, set.jy));
    out.kz_residual = std::abs(real_expectation(pt, set.kz) -
                               0.5 * (1.0 + real_expectation(state, set.n_plus)));
    return out;
}

inline double verify_pt_covariance(const QuantumState& state, const OperatorSet& set) {
    return pt_bridge_check(state, set).max_residual();
}

namespace detail {
inline Verdict classify_scaled(double w, double rhs, double tol) {
    return classify(w, tol * std::max(1.0, std::abs(rhs)));
}
} // namespace detail

// Full evaluation: covariance record, all three witnesses, verdicts with the
// boundary tolerance scaled by max(1, RHS), and the truncation-guard status.
inline CriterionReport evaluate(const QuantumState& state, const OperatorSet& set,
                                double tol = default_witness_tol) {
    if (tol <= 0.0) throw ParameterOutOfRange("tolerance must be positive");
    const CovarianceRecord rec = covariance_record(state, set);
    CriterionReport rep;
    rep.w9 = witness_w9(rec);
    rep.w12 = witness_w12(rec);
    rep.w14 = witness_w14(rec);
    rep.tol = tol;
    rep.verdict_w9 = detail::classify_scaled(rep.w9, witness_w9_rhs(rec), tol);
    rep.verdict_w12 = detail::classify_scaled(rep.w12, witness_w12_rhs(rec), tol);
    rep.verdict_w14 = detail::classify_scaled(rep.w14, witness_w14_rhs(rec), tol);
    rep.guard.guard = state.tail_guard;
    rep.guard.tail_mass = tail_mass(state, state.tail_guard);
    rep.guard.clean = rep.guard.tail_mass <= guard_mass_tol;
    rep.provenance = Provenance::exact;
    return rep;
}

} // namespace entwit
