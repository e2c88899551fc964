#pragma once

#include <map>
#include <string>

#include "entwit/fock.hpp"

namespace entwit {

// The su(2) operators (Jx, Jy, Jz), the su(1,1) operators (Kx, Ky, Kz) and
// the total excitation number N+ on one truncated space:
//   Jx = (a^+ b + a b^+)/2      Kx = (a^+ b^+ + a b)/2
//   Jy = (a^+ b - a b^+)/2i     Ky = (a^+ b^+ - a b)/2i
//   Jz = (a^+ a - b^+ b)/2      Kz = (a^+ a + b^+ b + 1)/2
// Kz is built from n_plus so that kz == (n_plus + I)/2 holds elementwise.
struct OperatorSet {
    FockSpace space;
    Operator jx, jy, jz;
    Operator kx, ky, kz;
    Operator n_plus;
};

inline OperatorSet build_operator_set(const FockSpace& space) {
    const Matrix a  = annihilation(space, Mode::a).matrix;
    const Matrix b  = annihilation(space, Mode::b).matrix;
    const Matrix ad = a.adjoint();
    const Matrix bd = b.adjoint();
    const Matrix id = Matrix::Identity(space.dim(), space.dim());
    const Complex half_i(0.0, 0.5); // 1/(2i) = -i/2

    // number operators straight from the basis levels, so Jz/Kz/N+ diagonals
    // are exact (sqrt(n)*sqrt(n) products would cost an ulp)
    Matrix num_a = Matrix::Zero(space.dim(), space.dim());
    Matrix num_b = Matrix::Zero(space.dim(), space.dim());
    for (int i = 0; i < space.dim(); ++i) {
        const auto [na, nb] = space.levels(i);
        num_a(i, i) = static_cast<double>(na);
        num_b(i, i) = static_cast<double>(nb);
    }

    Matrix nplus = num_a + num_b;
    Matrix jx = 0.5 * (ad * b + a * bd);
    Matrix jy = -half_i * (ad * b - a * bd);
    Matrix jz = 0.5 * (num_a - num_b);
    Matrix kx = 0.5 * (ad * bd + a * b);
    Matrix ky = -half_i * (ad * bd - a * b);
    Matrix kz = 0.5 * (nplus + id);

    return OperatorSet{
        space,
        make_operator(std::move(jx), "Jx", space, true),
        make_operator(std::move(jy), "Jy", space, true),
        make_operator(std::move(jz), "Jz", space, true),
        make_operator(std::move(kx), "Kx", space, true),
        make_operator(std::move(ky), "Ky", space, true),
        make_operator(std::move(kz), "Kz", space, true),
        make_operator(std::move(nplus), "N+", space, true),
    };
}

// Max |element| of m over the block whose row and column levels both satisfy
// n_a <= cutoff_a-1-guard and n_b <= cutoff_b-1-guard.
inline double guarded_max_abs(const Matrix& m, const FockSpace& space, int guard) {
    if (guard < 0 || guard >= std::min(space.cutoff_a, space.cutoff_b))
        throw ParameterOutOfRange("guard " + std::to_string(guard) + " too large for cutoffs (" +
                                  std::to_string(space.cutoff_a) + "," +
                                  std::to_string(space.cutoff_b) + ")");
    const int amax = space.cutoff_a - guard;
    const int bmax = space.cutoff_b - guard;
    double best = 0.0;
    for (int na = 0; na < amax; ++na)
        for (int nb = 0; nb < bmax; ++nb)
            for (int ma = 0; ma < amax; ++ma)
                for (int mb = 0; mb < bmax; ++mb)
                    best = std::max(best,
                                    std::abs(m(na * space.cutoff_b + nb, ma * space.cutoff_b + mb)));
    return best;
}

// Residuals of the six commutation relations, restricted to the guarded
// subspace.  With guard >= 1 each is an algebraic identity there; guard 0
// includes the corrupted truncation boundary (useful as a diagnosis).
inline std::map<std::string, double> commutator_residual(const OperatorSet& set, int guard) {
    const Complex i(0.0, 1.0);
    auto comm = [](const Operator& x, const Operator& y) -> Matrix {
        return x.matrix * y.matrix - y.matrix * x.matrix;
    };
    std::map<std::string, double> out;
    out["[Jx,Jy]-iJz"] = guarded_max_abs(comm(set.jx, set.jy) - i * set.jz.matrix, set.space, guard);
    out["[Jy,Jz]-iJx"] = guarded_max_abs(comm(set.jy, set.jz) - i * set.jx.matrix, set.space, guard);
    out["[Jz,Jx]-iJy"] = guarded_max_abs(comm(set.jz, set.jx) - i * set.jy.matrix, set.space, guard);
    out["[Kx,Ky]+iKz"] = guarded_max_abs(comm(set.kx, set.ky) + i * set.kz.matrix, set.space, guard);
    out["[Ky,Kz]-iKx"] = guarded_max_abs(comm(set.ky, set.kz) - i * set.kx.matrix, set.space, guard);
    out["[Kz,Kx]-iKy"] = guarded_max_abs(comm(set.kz, set.kx) - i * set.ky.matrix, set.space, guard);
    return out;
}

} // namespace entwit
