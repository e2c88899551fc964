#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "entwit/rng.hpp"
#include "entwit/transforms.hpp"

namespace entwit {

// Joint photon-number distribution at the beamsplitter output for one phase
// setting, with the derived moments of N- = n_c - n_d and N+ = n_c + n_d.
// pmf is flat over (n_c, n_d) with the same row-major map as the input space.
struct OutcomeDistribution {
    FockSpace space;
    double phi = 0.0;
    std::vector<double> pmf;
    double mean_nminus = 0.0;
    double mean_nminus_sq = 0.0;
    double mean_nplus = 0.0;

    PhaseMoments exact_moments() const {
        return PhaseMoments{space, phi, mean_nminus, mean_nminus_sq, mean_nplus,
                            Eigen::Matrix3d::Zero(), 0};
    }
};

// Sends the state through the phase shifter and the 50:50 beamsplitter, then
// reads the joint number distribution off the output diagonal.
inline OutcomeDistribution outcome_distribution(const QuantumState& state, double phi) {
    const Operator u = beamsplitter_unitary(state.space, phi);
    const QuantumState out = apply_unitary(state, u);

    OutcomeDistribution dist;
    dist.space = state.space;
    dist.phi = phi;
    dist.pmf.resize(static_cast<std::size_t>(state.space.dim()));
    double total = 0.0;
    for (int i = 0; i < state.space.dim(); ++i) {
        const double p = out.is_pure() ? std::norm(out.amplitudes(i)) : out.rho(i, i).real();
        if (p < -1e-12)
            throw std::logic_error("outcome probability " + std::to_string(p) + " below -1e-12");
        dist.pmf[static_cast<std::size_t>(i)] = p;
        total += p;
        const auto [nc, nd] = state.space.levels(i);
        const double nm = static_cast<double>(nc - nd);
        dist.mean_nminus += p * nm;
        dist.mean_nminus_sq += p * nm * nm;
        dist.mean_nplus += p * static_cast<double>(nc + nd);
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::logic_error("outcome probabilities sum to " + std::to_string(total));
    return dist;
}

// Discrepancy between the pmf moments of N- and the direct operator route
// <a^+ b e^{-i phi} + a b^+ e^{i phi}> on the input state (first and second
// moment, worst of the two).
inline double exact_moment_check(const QuantumState& state, double phi) {
    const OutcomeDistribution dist = outcome_distribution(state, phi);
    const Matrix a = annihilation(state.space, Mode::a).matrix;
    const Matrix b = annihilation(state.space, Mode::b).matrix;
    const Complex e = std::exp(Complex(0.0, -phi));
    const Matrix nphi = a.adjoint() * b * e + a * b.adjoint() * std::conj(e);
    const Operator op1 = make_operator(nphi, "N-", state.space, true);
    const Operator op2 = make_operator(nphi * nphi, "N-^2", state.space, true);
    return std::max(std::abs(dist.mean_nminus - real_expectation(state, op1)),
                    std::abs(dist.mean_nminus_sq - real_expectation(state, op2)));
}

// Finite-shot record for one phase setting.  counts is aligned with the pmf
// flat index; est_cov is the covariance matrix of the three estimators
// (<N->, <N-^2>, <N+>), i.e. the sample covariance of the per-shot values
// divided by the shot count.
struct ShotRecord {
    FockSpace space;
    double phi = 0.0;
    long long n_shots = 0;
    std::uint64_t seed = 0;
    std::vector<long long> counts;
    double est_nminus = 0.0, est_nminus_sq = 0.0, est_nplus = 0.0;
    double se_nminus = 0.0, se_nminus_sq = 0.0, se_nplus = 0.0;
    Eigen::Matrix3d est_cov = Eigen::Matrix3d::Zero();

    PhaseMoments moments() const {
        return PhaseMoments{space, phi, est_nminus, est_nminus_sq, est_nplus, est_cov, n_shots};
    }
};

// Inverse-CDF sampling with the project generator.  The cdf is accumulated in
// flat-index order, so identical (pmf, n_shots, seed) triples reproduce the
// record bit for bit.
inline ShotRecord sample_shots(const OutcomeDistribution& dist, long long n_shots,
                               std::uint64_t seed) {
    if (n_shots < 1) throw ParameterOutOfRange("n_shots must be >= 1");

    std::vector<double> cdf(dist.pmf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.pmf.size(); ++i) {
        acc += std::max(dist.pmf[i], 0.0);
        cdf[i] = acc;
    }

    ShotRecord rec;
    rec.space = dist.space;
    rec.phi = dist.phi;
    rec.n_shots = n_shots;
    rec.seed = seed;
    rec.counts.assign(dist.pmf.size(), 0);

    SplitMix64 gen(seed);
    for (long long s = 0; s < n_shots; ++s) {
        const double x = gen.next_double() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
        const std::size_t idx =
            it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
        ++rec.counts[idx];
    }

    // moments of (v1, v2, v3) = (N-, N-^2, N+) from the counts
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < rec.counts.size(); ++i) {
        if (rec.counts[i] == 0) continue;
        const auto [nc, nd] = dist.space.levels(static_cast<int>(i));
        const double w = static_cast<double>(rec.counts[i]);
        Eigen::Vector3d v;
        v << static_cast<double>(nc - nd), static_cast<double>((nc - nd) * (nc - nd)),
            static_cast<double>(nc + nd);
        mean += w * v;
        second += w * v * v.transpose();
    }
    const double n = static_cast<double>(n_shots);
    mean /= n;
    rec.est_nminus = mean(0);
    rec.est_nminus_sq = mean(1);
    rec.est_nplus = mean(2);
    if (n_shots > 1) {
        const Eigen::Matrix3d sample_cov =
            (second - n * mean * mean.transpose()) / (n - 1.0);
        rec.est_cov = sample_cov / n;
        rec.se_nminus = std::sqrt(std::max(rec.est_cov(0, 0), 0.0));
        rec.se_nminus_sq = std::sqrt(std::max(rec.est_cov(1, 1), 0.0));
        rec.se_nplus = std::sqrt(std::max(rec.est_cov(2, 2), 0.0));
    }
    return rec;
}

namespace detail {

inline int find_phase(const std::vector<PhaseMoments>& records, double phi) {
    for (std::size_t i = 0; i < records.size(); ++i)
        if (std::abs(records[i].phi - phi) <= 1e-12) return static_cast<int>(i);
    throw MissingPhaseSetting("no record at phase " + std::to_string(phi));
}

// gradient blocks of a derived quantity with respect to the raw per-record
// statistics (m, q, p) = (<N->, <N-^2>, <N+>)
struct RawGradient {
    Eigen::Vector3d g0 = Eigen::Vector3d::Zero(); // phi = 0
    Eigen::Vector3d g1 = Eigen::Vector3d::Zero(); // phi = pi/2
    Eigen::Vector3d g2 = Eigen::Vector3d::Zero(); // phi = pi/4
    Eigen::Vector3d g3 = Eigen::Vector3d::Zero(); // phi = -pi/4
};

inline double propagate(const RawGradient& g, const PhaseMoments& r0, const PhaseMoments& r1,
                        const PhaseMoments& r2, const PhaseMoments& r3) {
    const double var = g.g0.dot(r0.cov * g.g0) + g.g1.dot(r1.cov * g.g1) +
                       g.g2.dot(r2.cov * g.g2) + g.g3.dot(r3.cov * g.g3);
    return std::sqrt(std::max(var, 0.0));
}

} // namespace detail

// Rebuilds the full covariance record from the four phase settings
// {0, pi/2, pi/4, -pi/4}:
//   Jx moments from phi = 0 (N- = 2 Jx), Jy moments from phi = pi/2,
//   <Jx Jy + Jy Jx> = (<N-^2>_{pi/4} - <N-^2>_{-pi/4})/4,
//   <N+> from the phi = 0 record.
// Standard errors come from first-order propagation of the per-record
// estimator covariances; records at different settings are independent.
inline CovarianceRecord reconstruct(const std::vector<PhaseMoments>& records) {
    if (records.size() != 4)
        throw MissingPhaseSetting("reconstruct expects exactly four phase settings, got " +
                                  std::to_string(records.size()));
    const double quarter_pi = 0.25 * std::numbers::pi;
    const PhaseMoments& r0 = records[static_cast<std::size_t>(detail::find_phase(records, 0.0))];
    const PhaseMoments& r1 =
        records[static_cast<std::size_t>(detail::find_phase(records, 2.0 * quarter_pi))];
    const PhaseMoments& r2 =
        records[static_cast<std::size_t>(detail::find_phase(records, quarter_pi))];
    const PhaseMoments& r3 =
        records[static_cast<std::size_t>(detail::find_phase(records, -quarter_pi))];
    if (!(r0.space == r1.space && r0.space == r2.space && r0.space == r3.space))
        throw InconsistentSpace("phase records come from different spaces");

    CovarianceRecord rec;
    rec.mean_jx = 0.5 * r0.mean_nminus;
    rec.mean_jy = 0.5 * r1.mean_nminus;
    rec.var_jx = 0.25 * r0.mean_nminus_sq - rec.mean_jx * rec.mean_jx;
    rec.var_jy = 0.25 * r1.mean_nminus_sq - rec.mean_jy * rec.mean_jy;
    // sym = <JxJy + JyJx>, then subtract the mean product
    const double sym = 0.25 * (r2.mean_nminus_sq - r3.mean_nminus_sq);
    rec.cov_xy = 0.5 * sym - rec.mean_jx * rec.mean_jy;
    rec.mean_n = r0.mean_nplus;
    rec.provenance = Provenance::estimated;

    RecordErrors err;
    {
        using detail::RawGradient;
        RawGradient g;
        g.g0 << 0.5, 0.0, 0.0;
        err.mean_jx = detail::propagate(g, r0, r1, r2, r3);
    }
    {
        detail::RawGradient g;
        g.g1 << 0.5, 0.0, 0.0;
        err.mean_jy = detail::propagate(g, r0, r1, r2, r3);
    }
    {
        detail::RawGradient g;
        g.g0 << -0.5 * r0.mean_nminus, 0.25, 0.0;
        err.var_jx = detail::propagate(g, r0, r1, r2, r3);
    }
    {
        detail::RawGradient g;
        g.g1 << -0.5 * r1.mean_nminus, 0.25, 0.0;
        err.var_jy = detail::propagate(g, r0, r1, r2, r3);
    }
    {
        detail::RawGradient g;
        g.g0 << -0.25 * r1.mean_nminus, 0.0, 0.0;
        g.g1 << -0.25 * r0.mean_nminus, 0.0, 0.0;
        g.g2 << 0.0, 0.125, 0.0;
        g.g3 << 0.0, -0.125, 0.0;
        err.cov_xy = detail::propagate(g, r0, r1, r2, r3);
    }
    {
        detail::RawGradient g;
        g.g0 << 0.0, 0.0, 1.0;
        err.mean_n = detail::propagate(g, r0, r1, r2, r3);
    }
    rec.err = err;
    rec.basis = {r0, r1, r2, r3};
    return rec;
}

// Witness report from an estimated record.  Standard errors are propagated
// from the raw four-phase statistics (W14 shares the W12 polynomial, so they
// get the same error).  Detection demands both a negative witness and a
// z-score at or above the threshold; zero standard error falls back to the
// exact boundary rule, so the infinite-shot limit reproduces `evaluate`.
inline CriterionReport estimated_report(const CovarianceRecord& rec,
                                        double tol = default_witness_tol,
                                        double z_threshold = default_z_threshold) {
    if (rec.provenance != Provenance::estimated)
        throw ParameterOutOfRange("estimated_report requires an estimated record");
    if (rec.basis.size() != 4)
        throw MissingPhaseSetting("estimated record lacks its four-phase basis");
    if (tol <= 0.0 || z_threshold <= 0.0)
        throw ParameterOutOfRange("tolerance and z threshold must be positive");

    const PhaseMoments& r0 = rec.basis[0];
    const PhaseMoments& r1 = rec.basis[1];
    const PhaseMoments& r2 = rec.basis[2];
    const PhaseMoments& r3 = rec.basis[3];

    CriterionReport rep;
    rep.w9 = witness_w9(rec);
    rep.w12 = witness_w12(rec);
    rep.w14 = witness_w14(rec);
    rep.tol = tol;
    rep.provenance = Provenance::estimated;
    rep.z_threshold = z_threshold;

    // gradients of W9 and W12 with respect to the raw statistics
    const double vx = rec.var_jx, vy = rec.var_jy, c = rec.cov_xy, n = rec.mean_n;
    detail::RawGradient g9;
    g9.g0 << (0.25 + vy) * (-0.5 * r0.mean_nminus), (0.25 + vy) * 0.25, -(1.0 + n) / 8.0;
    g9.g1 << (0.25 + vx) * (-0.5 * r1.mean_nminus), (0.25 + vx) * 0.25, 0.0;

    detail::RawGradient g12 = g9;
    g12.g0(0) += -2.0 * c * (-0.25 * r1.mean_nminus);
    g12.g1(0) += -2.0 * c * (-0.25 * r0.mean_nminus);
    g12.g2 << 0.0, -2.0 * c * 0.125, 0.0;
    g12.g3 << 0.0, 2.0 * c * 0.125, 0.0;

    WitnessTriple se;
    se.w9 = detail::propagate(g9, r0, r1, r2, r3);
    se.w12 = detail::propagate(g12, r0, r1, r2, r3);
    se.w14 = se.w12;
    rep.std_errs = se;

    const auto zscore = [](double w, double s) {
        if (s > 0.0) return std::abs(w) / s;
        return w == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    WitnessTriple z;
    z.w9 = zscore(rep.w9, se.w9);
    z.w12 = zscore(rep.w12, se.w12);
    z.w14 = zscore(rep.w14, se.w14);
    rep.z_scores = z;

    const auto verdict = [&](double w, double s, double zv, double rhs) {
        if (s == 0.0) return detail::classify_scaled(w, rhs, tol);
        if (zv < z_threshold) return Verdict::boundary; // inconclusive at this significance
        return w < 0.0 ? Verdict::detected : Verdict::not_detected;
    };
    rep.verdict_w9 = verdict(rep.w9, se.w9, z.w9, witness_w9_rhs(rec));
    rep.verdict_w12 = verdict(rep.w12, se.w12, z.w12, witness_w12_rhs(rec));
    rep.verdict_w14 = verdict(rep.w14, se.w14, z.w14, witness_w14_rhs(rec));
    return rep;
}

} // namespace entwit
