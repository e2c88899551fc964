#include "entwit/measurement.hpp"
#include "entwit/states.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace entwit;

namespace {

const FockSpace kSpace = build_space(8, 8);
const double kPi = std::numbers::pi;

QuantumState two_photon_quarter(const FockSpace& s) {
    return pure_state(s, {{2, 0, Complex(std::cos(kPi / 4), 0.0)},
                          {0, 2, Complex(0.0, std::sin(kPi / 4))}});
}

std::vector<PhaseMoments> exact_four_phase(const QuantumState& st) {
    std::vector<PhaseMoments> out;
    for (const double phi : {0.0, kPi / 2, kPi / 4, -kPi / 4})
        out.push_back(outcome_distribution(st, phi).exact_moments());
    return out;
}

} // namespace

TEST(OutcomeDistribution, VacuumIsDeterministic) {
    const QuantumState vac = pure_state(kSpace, {{0, 0, Complex(1.0, 0.0)}});
    for (const double phi : {0.0, 0.9, kPi / 2}) {
        const OutcomeDistribution d = outcome_distribution(vac, phi);
        EXPECT_NEAR(d.pmf[static_cast<std::size_t>(kSpace.index(0, 0))], 1.0, 1e-12);
        EXPECT_NEAR(d.mean_nminus, 0.0, 1e-12);
        EXPECT_NEAR(d.mean_nplus, 0.0, 1e-12);
    }
}

TEST(OutcomeDistribution, SinglePhotonSplits) {
    const QuantumState one = pure_state(kSpace, {{1, 0, Complex(1.0, 0.0)}});
    const OutcomeDistribution d = outcome_distribution(one, 0.0);
    EXPECT_NEAR(d.pmf[static_cast<std::size_t>(kSpace.index(1, 0))], 0.5, 1e-12);
    EXPECT_NEAR(d.pmf[static_cast<std::size_t>(kSpace.index(0, 1))], 0.5, 1e-12);
    EXPECT_NEAR(d.mean_nplus, 1.0, 1e-12);
}

TEST(OutcomeDistribution, TwoPhotonMomentsMatchOperatorRoute) {
    const QuantumState psi = two_photon_quarter(kSpace);
    const OutcomeDistribution d = outcome_distribution(psi, 0.0);
    // N- = 2 Jx at phi = 0: first moment 0, second 4 <Jx^2> = 2
    EXPECT_NEAR(d.mean_nminus, 0.0, 1e-12);
    EXPECT_NEAR(d.mean_nminus_sq, 2.0, 1e-12);
}

TEST(OutcomeDistribution, ConservesTotalPhotonNumber) {
    const OperatorSet set = build_operator_set(kSpace);
    for (const auto& st : catalog_random_suite(10, 3, kSpace)) {
        const double want = real_expectation(st, set.n_plus);
        for (const double phi : {0.0, 0.37, kPi / 4})
            EXPECT_NEAR(outcome_distribution(st, phi).mean_nplus, want, 1e-10);
    }
}

TEST(ExactMomentCheck, TwoComputationPathsAgree) {
    for (const auto& st : catalog_random_suite(20, 47, kSpace))
        EXPECT_LE(exact_moment_check(st, 0.0), 1e-10);

    // phi = pi/2 turns N- into 2 Jy
    const OperatorSet set = build_operator_set(kSpace);
    for (const auto& st : catalog_random_suite(5, 53, kSpace)) {
        const OutcomeDistribution d = outcome_distribution(st, kPi / 2);
        EXPECT_NEAR(d.mean_nminus, 2.0 * real_expectation(st, set.jy), 1e-10);
        EXPECT_LE(exact_moment_check(st, kPi / 2), 1e-10);
    }
}

TEST(ExactMomentCheck, QuarterPhaseDifferenceGivesSymmetrizedProduct) {
    // (<N^2_{pi/4}> - <N^2_{-pi/4}>)/4 = <JxJy + JyJx> = sin(2 theta) = 1 at pi/4
    const QuantumState psi = two_photon_quarter(kSpace);
    const OutcomeDistribution plus = outcome_distribution(psi, kPi / 4);
    const OutcomeDistribution minus = outcome_distribution(psi, -kPi / 4);
    EXPECT_NEAR(0.25 * (plus.mean_nminus_sq - minus.mean_nminus_sq), 1.0, 1e-10);
}

TEST(SampleShots, VacuumAndDeterminism) {
    const QuantumState vac = pure_state(kSpace, {{0, 0, Complex(1.0, 0.0)}});
    const OutcomeDistribution d = outcome_distribution(vac, 0.0);
    const ShotRecord rec = sample_shots(d, 1000, 9);
    EXPECT_EQ(rec.counts[static_cast<std::size_t>(kSpace.index(0, 0))], 1000);
    EXPECT_EQ(rec.se_nminus, 0.0);
    EXPECT_EQ(rec.se_nplus, 0.0);

    const QuantumState psi = two_photon_quarter(kSpace);
    const OutcomeDistribution d2 = outcome_distribution(psi, kPi / 4);
    const ShotRecord r1 = sample_shots(d2, 5000, 42);
    const ShotRecord r2 = sample_shots(d2, 5000, 42);
    long long total = 0;
    for (const long long c : r1.counts) total += c;
    EXPECT_EQ(total, 5000);
    EXPECT_EQ(r1.counts, r2.counts);
    EXPECT_EQ(r1.est_nminus, r2.est_nminus);
    EXPECT_EQ(r1.est_nminus_sq, r2.est_nminus_sq);
    EXPECT_EQ(r1.se_nminus_sq, r2.se_nminus_sq);

    EXPECT_THROW(sample_shots(d2, 0, 1), ParameterOutOfRange);
}

TEST(SampleShots, SinglePhotonConcentration) {
    const QuantumState one = pure_state(kSpace, {{1, 0, Complex(1.0, 0.0)}});
    const OutcomeDistribution d = outcome_distribution(one, 0.0);
    const long long n = 100000;
    const ShotRecord rec = sample_shots(d, n, 7);
    // N- is +-1 with probability 1/2 each: sigma = 1
    EXPECT_LE(std::abs(rec.est_nminus), 5.0 / std::sqrt(static_cast<double>(n)));
    EXPECT_NEAR(rec.est_nminus_sq, 1.0, 1e-12); // (N-)^2 = 1 on every shot
    EXPECT_NEAR(rec.se_nminus, 1.0 / std::sqrt(static_cast<double>(n)), 2e-4);
}

TEST(Reconstruct, ClosesOnExactMoments) {
    const OperatorSet set = build_operator_set(kSpace);
    for (const auto& st : catalog_random_suite(20, 101, kSpace)) {
        const CovarianceRecord direct = covariance_record(st, set);
        const CovarianceRecord recon = reconstruct(exact_four_phase(st));
        EXPECT_NEAR(recon.mean_jx, direct.mean_jx, 1e-10);
        EXPECT_NEAR(recon.mean_jy, direct.mean_jy, 1e-10);
        EXPECT_NEAR(recon.var_jx, direct.var_jx, 1e-10);
        EXPECT_NEAR(recon.var_jy, direct.var_jy, 1e-10);
        EXPECT_NEAR(recon.cov_xy, direct.cov_xy, 1e-10);
        EXPECT_NEAR(recon.mean_n, direct.mean_n, 1e-10);
        EXPECT_EQ(recon.provenance, Provenance::estimated);
    }
}

TEST(Reconstruct, VacuumGivesExactZeros) {
    const QuantumState vac = pure_state(kSpace, {{0, 0, Complex(1.0, 0.0)}});
    std::vector<PhaseMoments> records;
    for (const double phi : {0.0, kPi / 2, kPi / 4, -kPi / 4})
        records.push_back(sample_shots(outcome_distribution(vac, phi), 500, 3).moments());
    const CovarianceRecord rec = reconstruct(records);
    EXPECT_EQ(rec.mean_jx, 0.0);
    EXPECT_EQ(rec.var_jx, 0.0);
    EXPECT_EQ(rec.cov_xy, 0.0);
    EXPECT_EQ(rec.mean_n, 0.0);
}

TEST(Reconstruct, ValidatesPhaseSetAndSpaces) {
    const QuantumState psi = two_photon_quarter(kSpace);
    auto records = exact_four_phase(psi);

    auto missing = records;
    missing[3] = outcome_distribution(psi, 0.5).exact_moments();
    EXPECT_THROW(reconstruct(missing), MissingPhaseSetting);

    auto short_list = records;
    short_list.pop_back();
    EXPECT_THROW(reconstruct(short_list), MissingPhaseSetting);

    auto mixed_spaces = records;
    const FockSpace other = build_space(6, 6);
    mixed_spaces[1] = outcome_distribution(
                          pure_state(other, {{2, 0, Complex(std::cos(kPi / 4), 0.0)},
                                             {0, 2, Complex(0.0, std::sin(kPi / 4))}}),
                          kPi / 2)
                          .exact_moments();
    EXPECT_THROW(reconstruct(mixed_spaces), InconsistentSpace);
}

TEST(EstimatedReport, ExactLimitReproducesEvaluate) {
    const QuantumState psi = two_photon_quarter(kSpace);
    const CovarianceRecord recon = reconstruct(exact_four_phase(psi));
    const CriterionReport rep = estimated_report(recon);
    EXPECT_NEAR(rep.w12, -0.25, 1e-10);
    EXPECT_EQ(rep.verdict_w12, Verdict::detected);
    EXPECT_EQ(rep.verdict_w9, Verdict::boundary);
    ASSERT_TRUE(rep.std_errs.has_value());
    EXPECT_EQ(rep.std_errs->w12, 0.0);
}

TEST(EstimatedReport, MillionShotDetection) {
    const QuantumState psi = two_photon_quarter(kSpace);
    std::vector<PhaseMoments> records;
    std::uint64_t sub = 0;
    for (const double phi : {0.0, kPi / 2, kPi / 4, -kPi / 4})
        records.push_back(
            sample_shots(outcome_distribution(psi, phi), 1000000, 1000 + sub++).moments());
    const CriterionReport rep = estimated_report(reconstruct(records));
    ASSERT_TRUE(rep.std_errs.has_value());
    EXPECT_LE(std::abs(rep.w12 + 0.25), 5.0 * rep.std_errs->w12);
    EXPECT_GE(rep.z_scores->w12, 3.0);
    EXPECT_EQ(rep.verdict_w12, Verdict::detected);
}

TEST(EstimatedReport, FewShotsAreTypicallyInconclusive) {
    // a 100-shot experiment (25 per phase setting) leaves the standard error
    // at the 0.1 scale, so z >= 3 rarely fires; count verdicts across seeds
    // instead of pinning one lucky draw
    const QuantumState psi = two_photon_quarter(kSpace);
    int boundary_count = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::vector<PhaseMoments> records;
        std::uint64_t sub = 0;
        for (const double phi : {0.0, kPi / 2, kPi / 4, -kPi / 4})
            records.push_back(
                sample_shots(outcome_distribution(psi, phi), 25, seed * 91 + sub++).moments());
        const CriterionReport rep = estimated_report(reconstruct(records));
        EXPECT_GT(rep.std_errs->w12, 0.05) << "seed " << seed;
        if (rep.verdict_w12 == Verdict::boundary) ++boundary_count;
    }
    EXPECT_GE(boundary_count, 4); // inconclusive outcomes dominate or tie
}

TEST(EstimatedReport, SoundOnSeparableProductUnderNoise) {
    const FockSpace s = build_space(16, 16);
    const QuantumState coh = realize(
        StateSpec{.family = Family::coherent_product, .alpha = 1.0, .beta = 1.0}, s);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::vector<PhaseMoments> records;
        std::uint64_t sub = 0;
        for (const double phi : {0.0, kPi / 2, kPi / 4, -kPi / 4})
            records.push_back(
                sample_shots(outcome_distribution(coh, phi), 100000, seed * 37 + sub++)
                    .moments());
        const CriterionReport rep = estimated_report(reconstruct(records));
        EXPECT_NE(rep.verdict_w9, Verdict::detected) << "seed " << seed;
        EXPECT_NE(rep.verdict_w12, Verdict::detected) << "seed " << seed;
        EXPECT_NE(rep.verdict_w14, Verdict::detected) << "seed " << seed;
    }
}

TEST(EstimatedReport, RequiresEstimatedProvenance) {
    const OperatorSet set = build_operator_set(kSpace);
    const CovarianceRecord exact = covariance_record(two_photon_quarter(kSpace), set);
    EXPECT_THROW(estimated_report(exact), ParameterOutOfRange);
}
