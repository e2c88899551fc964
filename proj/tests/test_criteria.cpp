#include "entwit/criteria.hpp"
#include "entwit/states.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"

using namespace entwit;

namespace {

QuantumState two_photon_theta(const FockSpace& s, double theta) {
    return pure_state(s, {{2, 0, Complex(std::cos(theta), 0.0)},
                          {0, 2, Complex(0.0, std::sin(theta))}});
}

oracle::Ket two_photon_theta_oracle(double theta) {
    return oracle::add(oracle::ket(2, 0, oracle::C(std::cos(theta), 0.0)),
                       oracle::ket(0, 2, oracle::C(0.0, std::sin(theta))));
}

const FockSpace kSpace = build_space(8, 8);

} // namespace

TEST(SymCovariance, VarianceOnFockState) {
    const OperatorSet set = build_operator_set(kSpace);
    const QuantumState fock20 = pure_state(kSpace, {{2, 0, Complex(1.0, 0.0)}});

    // oracle: <Jx^2> on the 2-excitation block
    const oracle::Ket psi = oracle::ket(2, 0);
    const double want = oracle::expect2(psi, oracle::apply_jx, oracle::apply_jx).real() -
                        std::pow(oracle::expect(psi, oracle::apply_jx).real(), 2);
    EXPECT_NEAR(want, 0.5, 1e-15);
    EXPECT_NEAR(sym_covariance(fock20, set.jx, set.jx), want, 1e-12);
}

TEST(SymCovariance, CrossTermOnTwoPhotonFamily) {
    const OperatorSet set = build_operator_set(kSpace);
    for (int k = 1; k < 16; ++k) {
        const double theta = std::numbers::pi * k / 16.0;
        const oracle::Moments m = oracle::moments(oracle::normalized(two_photon_theta_oracle(theta)));
        EXPECT_NEAR(m.cov_xy, 0.5 * std::sin(2.0 * theta), 1e-14);
        EXPECT_NEAR(sym_covariance(two_photon_theta(kSpace, theta), set.jx, set.jy), m.cov_xy,
                    1e-12);
    }
}

TEST(SymCovariance, VanishesOnNumberBasisStates) {
    const OperatorSet set = build_operator_set(kSpace);
    // JxJy + JyJx changes n_a - n_b by +-4, so every diagonal moment vanishes
    for (int na = 0; na < 4; ++na)
        for (int nb = 0; nb < 4; ++nb) {
            const oracle::Ket psi = oracle::ket(na, nb);
            const double sym = (oracle::expect2(psi, oracle::apply_jy, oracle::apply_jx) +
                                oracle::expect2(psi, oracle::apply_jx, oracle::apply_jy))
                                   .real();
            EXPECT_NEAR(sym, 0.0, 1e-15);
            const QuantumState st = pure_state(kSpace, {{na, nb, Complex(1.0, 0.0)}});
            EXPECT_NEAR(sym_covariance(st, set.jx, set.jy), 0.0, 1e-12);
        }
}

TEST(SymCovariance, InputValidation) {
    const OperatorSet set = build_operator_set(kSpace);
    const QuantumState vac = pure_state(kSpace, {{0, 0, Complex(1.0, 0.0)}});
    const Operator a = annihilation(kSpace, Mode::a); // not hermitian
    EXPECT_THROW(sym_covariance(vac, a, set.jx), NonHermitianInput);
    const FockSpace other = build_space(5, 5);
    EXPECT_THROW(sym_covariance(vac, build_operator_set(other).jx, set.jy), SpaceMismatch);
}

TEST(Margins, VacuumSaturatesSu11Heisenberg) {
    const OperatorSet set = build_operator_set(kSpace);
    const QuantumState vac = pure_state(kSpace, {{0, 0, Complex(1.0, 0.0)}});

    // oracle: variances 1/4, <Kz> = 1/2
    const oracle::Ket v = oracle::ket(0, 0);
    EXPECT_NEAR(oracle::expect2(v, oracle::apply_kx, oracle::apply_kx).real(), 0.25, 1e-15);
    EXPECT_NEAR(oracle::expect(v, oracle::apply_kz).real(), 0.5, 1e-15);

    EXPECT_NEAR(sym_covariance(vac, set.kx, set.kx), 0.25, 1e-12);
    EXPECT_NEAR(sym_covariance(vac, set.ky, set.ky), 0.25, 1e-12);
    EXPECT_NEAR(hur_margin(vac, set.kx, set.ky), 0.0, 1e-12);
}

TEST(Margins, EqualOperatorsGiveZeroSrr) {
    const OperatorSet set = build_operator_set(kSpace);
    for (const auto& st : catalog_random_suite(5, 21, kSpace)) {
        EXPECT_NEAR(srr_margin(st, set.jx, set.jx), 0.0, 1e-10);
        EXPECT_NEAR(srr_margin(st, set.kx, set.kx), 0.0, 1e-10);
    }
}

TEST(Margins, PhysicalityAndOrdering) {
    const OperatorSet set = build_operator_set(kSpace);
    const QuantumState psi = two_photon_theta(kSpace, std::numbers::pi / 4);
    EXPECT_GE(srr_margin(psi, set.jx, set.jy), -1e-10);

    for (const auto& st : catalog_random_suite(10, 77, kSpace)) {
        for (const auto [a, b] : {std::pair{&set.jx, &set.jy}, std::pair{&set.kx, &set.ky},
                                  std::pair{&set.jy, &set.jz}}) {
            const double hur = hur_margin(st, *a, *b);
            const double srr = srr_margin(st, *a, *b);
            EXPECT_GE(hur, -1e-10);
            EXPECT_GE(srr, -1e-10);
            EXPECT_LE(srr, hur + 1e-12);
        }
    }
}

TEST(CovarianceRecordOp, KnownStates) {
    const OperatorSet set = build_operator_set(kSpace);

    const CovarianceRecord vac =
        covariance_record(pure_state(kSpace, {{0, 0, Complex(1.0, 0.0)}}), set);
    EXPECT_NEAR(vac.mean_jx, 0.0, 1e-14);
    EXPECT_NEAR(vac.mean_jy, 0.0, 1e-14);
    EXPECT_NEAR(vac.var_jx, 0.0, 1e-14);
    EXPECT_NEAR(vac.var_jy, 0.0, 1e-14);
    EXPECT_NEAR(vac.cov_xy, 0.0, 1e-14);
    EXPECT_NEAR(vac.mean_n, 0.0, 1e-14);

    const CovarianceRecord tp =
        covariance_record(two_photon_theta(kSpace, std::numbers::pi / 4), set);
    const oracle::Moments tpo =
        oracle::moments(oracle::normalized(two_photon_theta_oracle(std::numbers::pi / 4)));
    EXPECT_NEAR(tp.var_jx, tpo.var_jx, 1e-12);
    EXPECT_NEAR(tp.var_jy, tpo.var_jy, 1e-12);
    EXPECT_NEAR(tp.cov_xy, tpo.cov_xy, 1e-12);
    EXPECT_NEAR(tp.var_jx, 0.5, 1e-12);
    EXPECT_NEAR(tp.var_jy, 0.5, 1e-12);
    EXPECT_NEAR(tp.cov_xy, 0.5, 1e-12);
    EXPECT_NEAR(tp.mean_n, 2.0, 1e-12);

    const QuantumState bell =
        pure_state(kSpace, {{1, 0, Complex(1.0, 0.0)}, {0, 1, Complex(1.0, 0.0)}});
    const CovarianceRecord br = covariance_record(bell, set);
    const oracle::Moments bo =
        oracle::moments(oracle::normalized(oracle::add(oracle::ket(1, 0), oracle::ket(0, 1))));
    EXPECT_NEAR(br.mean_jx, bo.mean_jx, 1e-12);
    EXPECT_NEAR(br.mean_jx, 0.5, 1e-12);
    EXPECT_NEAR(br.var_jx, 0.0, 1e-12);
    EXPECT_NEAR(br.var_jy, 0.25, 1e-12);
    EXPECT_NEAR(br.cov_xy, 0.0, 1e-12);
    EXPECT_NEAR(br.mean_n, 1.0, 1e-12);
}

TEST(Witnesses, VacuumSitsOnBoundary) {
    CovarianceRecord vac; // all zeros
    EXPECT_NEAR(witness_w9(vac), 0.0, 1e-15);
    EXPECT_NEAR(witness_w12(vac), 0.0, 1e-15);
    EXPECT_NEAR(witness_w14(vac), 0.0, 1e-15);
}

TEST(Witnesses, SinglePhotonFamilyViolatesW9) {
    const OperatorSet set = build_operator_set(kSpace);
    const QuantumState psi = realize(
        StateSpec{.family = Family::single_photon_theta, .theta = std::numbers::pi / 4}, kSpace);
    const CovarianceRecord rec = covariance_record(psi, set);

    const oracle::Moments m = oracle::moments(oracle::normalized(oracle::add(
        oracle::ket(1, 0, oracle::C(std::cos(std::numbers::pi / 4), 0.0)),
        oracle::ket(0, 1, oracle::C(std::sin(std::numbers::pi / 4), 0.0)))));
    const double want =
        (0.25 + m.var_jx) * (0.25 + m.var_jy) - std::pow(1.0 + m.mean_n, 2) / 16.0;
    EXPECT_NEAR(want, -0.125, 1e-14);
    EXPECT_NEAR(witness_w9(rec), want, 1e-12);
}

TEST(Witnesses, TwoPhotonFamilySaturatesW9AndViolatesW12) {
    const OperatorSet set = build_operator_set(kSpace);
    for (int k = 0; k < 32; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / 32.0;
        const CovarianceRecord rec = covariance_record(two_photon_theta(kSpace, theta), set);
        EXPECT_NEAR(witness_w9(rec), 0.0, 1e-12) << "theta = " << theta;
        const double s2 = std::sin(2.0 * theta);
        EXPECT_NEAR(witness_w12(rec), -0.25 * s2 * s2, 1e-12) << "theta = " << theta;
    }
    // boundary exactly at the product points, detection elsewhere
    const CovarianceRecord quarter =
        covariance_record(two_photon_theta(kSpace, std::numbers::pi / 4), set);
    EXPECT_NEAR(witness_w12(quarter), -0.25, 1e-12);
    EXPECT_NEAR(witness_w14(quarter), -0.25, 1e-12);
}

TEST(Witnesses, W12ReducesToW9WithoutCrossCovariance) {
    CovarianceRecord rec;
    rec.var_jx = 0.3;
    rec.var_jy = 0.7;
    rec.mean_n = 1.4;
    rec.cov_xy = 0.0;
    EXPECT_EQ(witness_w12(rec), witness_w9(rec));
}

TEST(Witnesses, W14BreakdownAtQuarterPi) {
    const OperatorSet set = build_operator_set(kSpace);
    const CovarianceRecord rec =
        covariance_record(two_photon_theta(kSpace, std::numbers::pi / 4), set);
    const double det = rec.var_jx * rec.var_jy - rec.cov_xy * rec.cov_xy;
    const double tr = rec.var_jx + rec.var_jy;
    EXPECT_NEAR(det, 0.0, 1e-12);
    EXPECT_NEAR(0.25 * tr, 0.25, 1e-12);
    EXPECT_NEAR(witness_w14(rec), det + 0.25 * tr - 8.0 / 16.0, 1e-14);
    EXPECT_NEAR(witness_w14(rec), -0.25, 1e-12);
}

TEST(Witnesses, MonotonicityAndIdentityOnRandomStates) {
    const OperatorSet set = build_operator_set(kSpace);
    for (const auto& st : catalog_random_suite(25, 99, kSpace)) {
        const CovarianceRecord rec = covariance_record(st, set);
        EXPECT_LE(witness_w12(rec), witness_w9(rec) + 1e-14);
        EXPECT_NEAR(witness_w14(rec), witness_w12(rec), 1e-10);
        // exact records carry a positive semidefinite covariance matrix
        EXPECT_GE(rec.var_jx, -1e-10);
        EXPECT_GE(rec.var_jy, -1e-10);
        EXPECT_GE(rec.var_jx * rec.var_jy - rec.cov_xy * rec.cov_xy, -1e-10);
    }
}

TEST(Verdicts, ClassificationRule) {
    EXPECT_EQ(classify(-1e-3, 1e-9), Verdict::detected);
    EXPECT_EQ(classify(1e-3, 1e-9), Verdict::not_detected);
    EXPECT_EQ(classify(5e-10, 1e-9), Verdict::boundary);
    EXPECT_EQ(classify(-5e-10, 1e-9), Verdict::boundary);
    EXPECT_EQ(classify(0.0, 1e-9), Verdict::boundary);
}

TEST(PtMoments, VacuumAndRandomStates) {
    const QuantumState vac =
        density_from_pure(pure_state(kSpace, {{0, 0, Complex(1.0, 0.0)}}));
    EXPECT_NEAR(verify_pt_moments(vac, 4), 0.0, 1e-14);

    for (const auto& st : catalog_random_suite(20, 13, kSpace))
        EXPECT_LE(verify_pt_moments(st, 4), 1e-10);

    EXPECT_THROW(verify_pt_moments(pure_state(kSpace, {{0, 0, Complex(1.0, 0.0)}}), 4),
                 ParameterOutOfRange);
}

TEST(PtMoments, QuarticMomentOnTwoPhotonState) {
    // (m,n,p,q) = (2,0,0,2): <a^+2 b^+2>_PT = <a^+2 b^2>_rho, magnitude 1 at theta = pi/4
    const oracle::Ket psi = oracle::normalized(two_photon_theta_oracle(std::numbers::pi / 4));
    const oracle::C rhs = oracle::inner(
        psi, oracle::apply_adag(oracle::apply_adag(oracle::apply_b(oracle::apply_b(psi)))));
    EXPECT_NEAR(std::abs(rhs), 1.0, 1e-14);

    const QuantumState rho =
        density_from_pure(two_photon_theta(kSpace, std::numbers::pi / 4));
    const QuantumState pt = partial_transpose(rho);
    const Matrix a = annihilation(kSpace, Mode::a).matrix;
    const Matrix b = annihilation(kSpace, Mode::b).matrix;
    const Operator lhs_op =
        make_operator(a.adjoint() * a.adjoint() * b.adjoint() * b.adjoint(), "a+2b+2", kSpace);
    const Operator rhs_op = make_operator(a.adjoint() * a.adjoint() * b * b, "a+2b2", kSpace);
    const Complex lhs = expectation(pt, lhs_op);
    EXPECT_NEAR(std::abs(lhs - expectation(rho, rhs_op)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(lhs - Complex(rhs)), 0.0, 1e-12);
}

TEST(PtCovariance, BridgeIdentities) {
    const OperatorSet set = build_operator_set(kSpace);

    const QuantumState vac =
        density_from_pure(pure_state(kSpace, {{0, 0, Complex(1.0, 0.0)}}));
    EXPECT_NEAR(verify_pt_covariance(vac, set), 0.0, 1e-12);

    const QuantumState tp =
        density_from_pure(two_photon_theta(kSpace, std::numbers::pi / 4));
    const QuantumState pt = partial_transpose(tp);
    const double lhs = sym_covariance(pt, set.kx, set.ky);
    const double rhs = sym_covariance(tp, set.jx, set.jy);
    EXPECT_NEAR(lhs, 0.5, 1e-12); // common value at theta = pi/4
    EXPECT_NEAR(rhs, 0.5, 1e-12);
    EXPECT_LE(verify_pt_covariance(tp, set), 1e-10);

    for (const auto& st : catalog_random_suite(20, 55, kSpace)) {
        const PtBridge bridge = pt_bridge_check(st, set);
        EXPECT_LE(bridge.cov_residual, 1e-10);
        EXPECT_LE(bridge.var_x_residual, 1e-10);
        EXPECT_LE(bridge.var_y_residual, 1e-10);
        EXPECT_LE(bridge.kz_residual, 1e-10);
    }
}

TEST(Evaluate, TwoPhotonVerdictPattern) {
    const OperatorSet set = build_operator_set(kSpace);
    const CriterionReport rep =
        evaluate(two_photon_theta(kSpace, std::numbers::pi / 4), set);
    EXPECT_EQ(rep.verdict_w9, Verdict::boundary);
    EXPECT_EQ(rep.verdict_w12, Verdict::detected);
    EXPECT_EQ(rep.verdict_w14, Verdict::detected);
    EXPECT_NEAR(rep.w12, -0.25, 1e-12);
    EXPECT_TRUE(rep.guard.clean);
}

TEST(Evaluate, ProductStateNotDetected) {
    const OperatorSet set = build_operator_set(kSpace);
    const CriterionReport rep = evaluate(pure_state(kSpace, {{2, 0, Complex(1.0, 0.0)}}), set);
    EXPECT_GE(rep.w9, -rep.tol);
    EXPECT_GE(rep.w12, -rep.tol);
    EXPECT_GE(rep.w14, -rep.tol);
    EXPECT_NE(rep.verdict_w9, Verdict::detected);
    EXPECT_NE(rep.verdict_w12, Verdict::detected);
    EXPECT_NE(rep.verdict_w14, Verdict::detected);
}

TEST(Evaluate, SqueezedVacuumClosedForm) {
    const FockSpace s = build_space(16, 16);
    const OperatorSet set = build_operator_set(s);
    const QuantumState tmsv = realize(StateSpec{.family = Family::tmsv, .r = 0.3}, s);
    const CriterionReport rep = evaluate(tmsv, set);
    const double sh = std::sinh(0.3) * std::sinh(0.3);
    const double want = (std::pow(1.0 + 2.0 * sh, 4) - std::pow(1.0 + 2.0 * sh, 2)) / 16.0;
    EXPECT_NEAR(rep.w9, want, 1e-8);
    EXPECT_GT(rep.w9, 0.0);
    EXPECT_EQ(rep.verdict_w9, Verdict::not_detected);
    EXPECT_EQ(rep.verdict_w12, Verdict::not_detected);
    EXPECT_THROW(evaluate(tmsv, set, 0.0), ParameterOutOfRange);
}

TEST(Evaluate, SoundOnSeparableSuite) {
    const OperatorSet set = build_operator_set(kSpace);
    for (const auto& st : catalog_separable_suite(50, 7, kSpace)) {
        const CovarianceRecord rec = covariance_record(st, set);
        EXPECT_GE(witness_w9(rec), -1e-9);
        EXPECT_GE(witness_w12(rec), -1e-9);
        EXPECT_GE(witness_w14(rec), -1e-9);
    }
}
