#include "spinfid/checkpoint.hpp"
#include "spinfid/errors.hpp"
#include "spinfid/fidelity.hpp"
#include "spinfid/oracle.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>
#include <sstream>

using namespace spinfid;

namespace {

DmrgConfig exact_config(int L, std::optional<int> sector = std::nullopt) {
    DmrgConfig c;
    c.m         = std::max(2, static_cast<int>(std::lround(std::pow(3.0, L / 2 - 1))));
    c.sweeps    = 2;
    c.sz_sector = sector;
    return c;
}

double identity_error(const Eigen::MatrixXd &m) {
    if(m.rows() != m.cols()) return 1.0;
    return (m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

} // namespace

TEST(OverlapRecursion, IdenticalIsometriesKeepIdentity) {
    spinfid::testing::Gen       gen(5);
    OverlapAccumulator acc;
    Eigen::Index       m = 1;
    for(int l = 1; l <= 5; ++l) {
        const Eigen::Index next = std::min<Eigen::Index>(m * kLocalDim, 20);
        const auto         q    = gen.isometry(m * kLocalDim, next);
        acc                     = advance_system(acc, q, q);
        acc                     = advance_environment(acc, q, q);
        EXPECT_LT(identity_error(acc.system_identity), 1e-12);
        EXPECT_LT(identity_error(acc.environment_identity), 1e-12);
        EXPECT_EQ(acc.system_length, l);
        EXPECT_EQ(acc.environment_length, l);
        m = next;
    }
}

TEST(OverlapRecursion, BaseCaseIsPlainProduct) {
    spinfid::testing::Gen             gen(6);
    const Eigen::MatrixXd    I3 = Eigen::MatrixXd::Identity(3, 3);
    OverlapAccumulator       acc;
    acc                      = advance_environment(acc, I3, I3);
    const auto               oA = gen.isometry(9, 5);
    const auto               oB = gen.isometry(9, 5);
    const auto               next = advance_environment(acc, oA, oB);
    EXPECT_LT((next.environment_identity - oB.transpose() * oA).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(OverlapRecursion, SwappingRolesTransposes) {
    spinfid::testing::Gen       gen(7);
    OverlapAccumulator a, b;
    Eigen::Index       m = 1;
    for(int l = 1; l <= 4; ++l) {
        const Eigen::Index next = std::min<Eigen::Index>(m * kLocalDim, 12);
        const auto         qa   = gen.isometry(m * kLocalDim, next);
        const auto         qb   = gen.isometry(m * kLocalDim, next);
        a                       = advance_system(a, qa, qb);
        b                       = advance_system(b, qb, qa);
        a                       = advance_environment(a, qa, qb);
        b                       = advance_environment(b, qb, qa);
        EXPECT_LT((a.system_identity - b.system_identity.transpose()).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LT((a.environment_identity - b.environment_identity.transpose()).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LE(a.system_identity.cwiseAbs().maxCoeff(), 1.0 + 1e-10);
        EXPECT_LE(a.environment_identity.cwiseAbs().maxCoeff(), 1.0 + 1e-10);
        m = next;
    }
}

TEST(OverlapRecursion, ShapeMismatchIsDomainError) {
    spinfid::testing::Gen       gen(8);
    OverlapAccumulator acc;
    const auto         q3 = gen.isometry(3, 3);
    const auto         q9 = gen.isometry(9, 4);
    EXPECT_THROW(advance_system(acc, q3, gen.isometry(3, 2)), DomainError);
    EXPECT_THROW(advance_environment(acc, q9, q9), DomainError);
    acc = advance_system(acc, q3, q3);
    EXPECT_THROW(advance_system(acc, q3, q3), DomainError);
}

TEST(Overlap, MatchesOracleOnExactGrids) {
    for(int L : {4, 6, 8}) {
        for(double d : {0.55, 0.63, 0.71}) {
            const ModelParams pa{0.5, d, -1.0, L};
            const ModelParams pb{0.5, d + kDefaultDelta, -1.0, L};
            const auto        a    = run_dmrg(pa, exact_config(L));
            const auto        b    = run_dmrg(pb, exact_config(L));
            const double      want = exact_overlap(exact_ground_state(pa), exact_ground_state(pb));
            EXPECT_NEAR(overlap(a, b), want, 1e-8) << "L " << L << " D " << d;
        }
    }
}

TEST(Overlap, MatchesOracleForDistantParameters) {
    // Larger parameter gaps make the recursion carry real information.
    const ModelParams pa{0.5, 0.2, -1.0, 8};
    const ModelParams pb{0.5, 1.4, -1.0, 8};
    const auto        a    = run_dmrg(pa, exact_config(8, 0));
    const auto        b    = run_dmrg(pb, exact_config(8, 0));
    const auto        ea   = exact_ground_state(pa);
    const auto        eb   = exact_ground_state(pb);
    const double      want = exact_overlap(ea, eb);
    EXPECT_LT(want, 0.99);
    EXPECT_NEAR(overlap(a, b), want, 1e-8);
    EXPECT_NEAR(overlap(b, a), overlap(a, b), 1e-12);
}

TEST(Overlap, NeelStatesSelectedByOppositeBoundaryFields) {
    const ModelParams pa{4.0, 0.0, -1.0, 8};
    const ModelParams pb{4.0, 0.0, 1.0, 8};
    const auto        a = run_dmrg(pa, exact_config(8));
    const auto        b = run_dmrg(pb, exact_config(8));
    EXPECT_LT(overlap(a, b), 0.1);
    EXPECT_NEAR(overlap(a, b), exact_overlap(exact_ground_state(pa), exact_ground_state(pb)), 1e-8);
}

TEST(Overlap, SelfOverlapIsOneWithIdentityHistory) {
    DmrgConfig c;
    c.m         = 24;
    c.sweeps    = 2;
    c.sz_sector = 0;
    const auto r = run_dmrg({2.59, 2.3, -1.0, 24}, c);
    for(const auto &acc : overlap_history(r, r)) {
        EXPECT_LT(identity_error(acc.system_identity), 1e-12);
        EXPECT_LT(identity_error(acc.environment_identity), 1e-12);
    }
    EXPECT_NEAR(overlap(r, r), 1.0, 1e-10);
}

TEST(Overlap, TruncatedRunsAreSymmetricAndBounded) {
    DmrgConfig c;
    c.m         = 20;
    c.sweeps    = 2;
    c.sz_sector = 0;
    const auto a = run_dmrg({1.0, 0.9, -1.0, 20}, c);
    const auto b = run_dmrg({1.0, 0.95, -1.0, 20}, c);
    const double f = overlap(a, b);
    EXPECT_NEAR(f, overlap(b, a), 1e-12);
    EXPECT_LE(f, 1.0 + 1e-10);
    EXPECT_GT(f, 0.9);
}

TEST(Overlap, RefusesMismatchedRecords) {
    DmrgConfig c;
    c.m      = 9;
    c.sweeps = 1;
    const auto a8  = run_dmrg({1.0, 0.5, -1.0, 8}, c);
    const auto a10 = run_dmrg({1.0, 0.5, -1.0, 10}, c);
    EXPECT_THROW(overlap(a8, a10), IncompatibleError);

    DmrgConfig c2 = c;
    c2.m          = 8;
    EXPECT_THROW(overlap(a8, run_dmrg({1.0, 0.6, -1.0, 8}, c2)), IncompatibleError);
    c2        = c;
    c2.sweeps = 2;
    EXPECT_THROW(overlap(a8, run_dmrg({1.0, 0.6, -1.0, 8}, c2)), IncompatibleError);

    auto off_center = a8;
    off_center.stacks.system.pop_back();
    EXPECT_THROW(overlap(a8, off_center), DomainError);
}

TEST(Overlap, SurvivesCheckpointRoundTrip) {
    DmrgConfig c;
    c.m         = 12;
    c.sweeps    = 1;
    c.sz_sector = 0;
    const auto a = run_dmrg({0.5, 0.6, -1.0, 12}, c);
    const auto b = run_dmrg({0.5, 0.601, -1.0, 12}, c);
    std::stringstream sa, sb;
    write_checkpoint(sa, a);
    write_checkpoint(sb, b);
    const auto ra = read_checkpoint(sa);
    const auto rb = read_checkpoint(sb);
    EXPECT_EQ(overlap(ra, rb), overlap(a, b));
}

TEST(Susceptibility, Examples) {
    EXPECT_EQ(susceptibility(1.0, 1e-3, 100), 0.0);
    EXPECT_NEAR(susceptibility(0.9995, 1e-3, 100), 10.0, 1e-9);
    EXPECT_EQ(kDefaultDelta, 1e-3);
    EXPECT_EQ(susceptibility(1.0 + 5e-11, 1e-3, 10), 0.0);
    EXPECT_THROW(susceptibility(0.9, 0.0, 10), DomainError);
    EXPECT_THROW(susceptibility(1.1, 1e-3, 10), DomainError);
    EXPECT_THROW(susceptibility(-0.1, 1e-3, 10), DomainError);
}
