#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "entwit/errors.hpp"

namespace entwit {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXcd;

// Absolute tolerances.  Double precision over dim <= ~10^3 keeps algebraic
// identities near 1e-15; the slack below absorbs accumulation.
inline constexpr double hermitian_tol     = 1e-12;
inline constexpr double trace_tol         = 1e-12;
inline constexpr double positivity_slack  = 1e-10;
inline constexpr double guard_mass_tol    = 1e-10;
inline constexpr int    default_tail_guard = 4;
inline constexpr long   max_space_dim     = 1000000;

// ---------------------------------------------------------------------------
// FockSpace: two-mode truncated number basis.  Levels run 0..cutoff-1 per
// mode; the flat index is row-major with mode a outer:
//   index(na, nb) = na * cutoff_b + nb.
// ---------------------------------------------------------------------------
struct FockSpace {
    int cutoff_a = 1;
    int cutoff_b = 1;

    int dim() const noexcept { return cutoff_a * cutoff_b; }

    int index(int na, int nb) const {
        if (na < 0 || na >= cutoff_a || nb < 0 || nb >= cutoff_b)
            throw OutOfRangeIndex("Fock level (" + std::to_string(na) + "," + std::to_string(nb) +
                                  ") outside cutoffs (" + std::to_string(cutoff_a) + "," +
                                  std::to_string(cutoff_b) + ")");
        return na * cutoff_b + nb;
    }

    std::pair<int, int> levels(int idx) const {
        if (idx < 0 || idx >= dim())
            throw OutOfRangeIndex("flat index " + std::to_string(idx) + " outside dim " +
                                  std::to_string(dim()));
        return {idx / cutoff_b, idx % cutoff_b};
    }

    bool operator==(const FockSpace&) const = default;
};

inline FockSpace build_space(int cutoff_a, int cutoff_b) {
    if (cutoff_a < 1 || cutoff_b < 1)
        throw ParameterOutOfRange("cutoffs must be >= 1");
    if (static_cast<long>(cutoff_a) * static_cast<long>(cutoff_b) > max_space_dim)
        throw ParameterOutOfRange("dim " + std::to_string(static_cast<long>(cutoff_a) * cutoff_b) +
                                  " exceeds limit " + std::to_string(max_space_dim));
    return FockSpace{cutoff_a, cutoff_b};
}

// ---------------------------------------------------------------------------
// Operator: dense matrix plus label and space reference.  The hermitian flag
// is a validated promise, not a hint.
// ---------------------------------------------------------------------------
struct Operator {
    Matrix matrix;
    std::string label;
    FockSpace space;
    bool hermitian = false;
};

inline Operator make_operator(Matrix m, std::string label, const FockSpace& space,
                              bool hermitian = false) {
    if (m.rows() != space.dim() || m.cols() != space.dim())
        throw SpaceMismatch("operator '" + label + "' is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", space dim is " +
                            std::to_string(space.dim()));
    if (hermitian) {
        const double res = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (res > hermitian_tol)
            throw NonHermitianInput("operator '" + label + "' flagged hermitian but |M - M^+| = " +
                                    std::to_string(res));
    }
    return Operator{std::move(m), std::move(label), space, hermitian};
}

enum class Mode { a, b };

// single-mode lowering matrix, <n-1|a|n> = sqrt(n)
inline Matrix lowering_matrix(int cutoff) {
    Matrix m = Matrix::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return m;
}

// Kronecker product with mode a as the outer factor, matching FockSpace::index.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Operator annihilation(const FockSpace& space, Mode mode) {
    const Matrix ia = Matrix::Identity(space.cutoff_a, space.cutoff_a);
    const Matrix ib = Matrix::Identity(space.cutoff_b, space.cutoff_b);
    if (mode == Mode::a)
        return make_operator(kron(lowering_matrix(space.cutoff_a), ib), "a", space);
    return make_operator(kron(ia, lowering_matrix(space.cutoff_b)), "b", space);
}

inline Operator creation(const FockSpace& space, Mode mode) {
    Operator op = annihilation(space, mode);
    op.matrix = op.matrix.adjoint().eval();
    op.label += "^+";
    return op;
}

// ---------------------------------------------------------------------------
// QuantumState: pure amplitude vector or density matrix; exactly one
// representation is populated.  Immutable by convention after construction.
// tail_guard is the number of top levels per mode whose population must stay
// below guard_mass_tol for truncated-operator moments to be trusted.
// ---------------------------------------------------------------------------
struct QuantumState {
    FockSpace space;
    Vector amplitudes; // size dim when pure, empty otherwise
    Matrix rho;        // dim x dim when density, empty otherwise
    int tail_guard = default_tail_guard;

    bool is_pure() const noexcept { return amplitudes.size() != 0; }
};

struct FockAmplitude {
    int na;
    int nb;
    Complex value;
};

inline QuantumState pure_state(const FockSpace& space, const std::vector<FockAmplitude>& amps,
                               int tail_guard = default_tail_guard) {
    Vector v = Vector::Zero(space.dim());
    for (const auto& a : amps) v(space.index(a.na, a.nb)) += a.value;
    const double norm = v.norm();
    if (norm < 1e-300) throw ZeroNorm("pure state amplitudes have zero norm");
    v /= norm;
    return QuantumState{space, std::move(v), Matrix(), tail_guard};
}

inline QuantumState pure_state_from_vector(const FockSpace& space, Vector v,
                                           int tail_guard = default_tail_guard) {
    if (v.size() != space.dim()) throw SpaceMismatch("amplitude vector length != space dim");
    const double norm = v.norm();
    if (norm < 1e-300) throw ZeroNorm("pure state amplitudes have zero norm");
    v /= norm;
    return QuantumState{space, std::move(v), Matrix(), tail_guard};
}

// Validates Hermiticity and unit trace; positivity is checked on demand only
// (min_eigenvalue below) since partial transposes legitimately fail it.
inline QuantumState density_state(const FockSpace& space, Matrix rho,
                                  int tail_guard = default_tail_guard) {
    if (rho.rows() != space.dim() || rho.cols() != space.dim())
        throw SpaceMismatch("density matrix shape != space dim");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > hermitian_tol)
        throw NonHermitianInput("density matrix |rho - rho^+| = " + std::to_string(herm));
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > trace_tol)
        throw ParameterOutOfRange("density matrix trace " + std::to_string(tr) + " != 1");
    return QuantumState{space, Vector(), std::move(rho), tail_guard};
}

inline QuantumState density_from_pure(const QuantumState& state) {
    if (!state.is_pure())
        throw ParameterOutOfRange("density_from_pure expects a pure state");
    Matrix rho = state.amplitudes * state.amplitudes.adjoint();
    return QuantumState{state.space, Vector(), std::move(rho), state.tail_guard};
}

inline Complex expectation(const QuantumState& state, const Operator& op) {
    if (state.space != op.space)
        throw SpaceMismatch("state and operator '" + op.label + "' live on different spaces");
    if (state.is_pure()) return state.amplitudes.dot(op.matrix * state.amplitudes);
    // Tr(rho M) = sum_ij rho(i,j) M(j,i)
    return (state.rho.array() * op.matrix.transpose().array()).sum();
}

inline double real_expectation(const QuantumState& state, const Operator& op) {
    return expectation(state, op).real();
}

// Transpose on mode-b indices:
//   <na,nb|rho^PT|ma,mb> = <na,mb|rho|ma,nb>.
// A pure permutation of stored entries, so trace and Hermiticity survive
// bitwise and (PT . PT) is the identity.  Positivity is NOT preserved.
inline QuantumState partial_transpose(const QuantumState& state) {
    if (state.is_pure())
        throw ParameterOutOfRange("partial_transpose expects a density matrix; convert with density_from_pure");
    const FockSpace& s = state.space;
    Matrix out(s.dim(), s.dim());
    for (int na = 0; na < s.cutoff_a; ++na)
        for (int nb = 0; nb < s.cutoff_b; ++nb)
            for (int ma = 0; ma < s.cutoff_a; ++ma)
                for (int mb = 0; mb < s.cutoff_b; ++mb)
                    out(na * s.cutoff_b + nb, ma * s.cutoff_b + mb) =
                        state.rho(na * s.cutoff_b + mb, ma * s.cutoff_b + nb);
    return QuantumState{s, Vector(), std::move(out), state.tail_guard};
}

// Population on basis states with n_a >= cutoff_a - k or n_b >= cutoff_b - k.
inline double tail_mass(const QuantumState& state, int k) {
    const FockSpace& s = state.space;
    if (k < 0 || k >= std::min(s.cutoff_a, s.cutoff_b))
        throw ParameterOutOfRange("tail guard k = " + std::to_string(k) +
                                  " out of range for cutoffs (" + std::to_string(s.cutoff_a) +
                                  "," + std::to_string(s.cutoff_b) + ")");
    double mass = 0.0;
    for (int na = 0; na < s.cutoff_a; ++na)
        for (int nb = 0; nb < s.cutoff_b; ++nb) {
            if (na < s.cutoff_a - k && nb < s.cutoff_b - k) continue;
            const int idx = na * s.cutoff_b + nb;
            mass += state.is_pure() ? std::norm(state.amplitudes(idx)) : state.rho(idx, idx).real();
        }
    return mass;
}

inline bool guard_clean(const QuantumState& state) {
    return tail_mass(state, state.tail_guard) <= guard_mass_tol;
}

// On-demand positivity check (eigensolve cost, so not done at construction).
inline double min_eigenvalue(const QuantumState& state) {
    if (state.is_pure()) return state.space.dim() > 1 ? 0.0 : 1.0; // projector spectrum
    Eigen::SelfAdjointEigenSolver<Matrix> es(state.rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace entwit
