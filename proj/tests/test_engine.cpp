#include "spinfid/engine.hpp"
#include "spinfid/errors.hpp"
#include "spinfid/observables.hpp"
#include "spinfid/oracle.hpp"

#include "generators.hpp"

#include <cmath>
#include <gtest/gtest.h>
#include <numeric>

using namespace spinfid;

namespace {

DmrgConfig exact_config(int L, std::optional<int> sector = std::nullopt) {
    DmrgConfig c;
    c.m         = std::max(2, static_cast<int>(std::lround(std::pow(3.0, L / 2 - 1))));
    c.sweeps    = 2;
    c.sz_sector = sector;
    return c;
}

void expect_record_invariants(const GroundStateRecord &r) {
    const int L = r.params.length;
    ASSERT_EQ(r.stacks.system.size(), static_cast<std::size_t>(L / 2 - 1));
    ASSERT_EQ(r.stacks.environment.size(), static_cast<std::size_t>(L / 2 - 1));
    for(const auto *stack : {&r.stacks.system, &r.stacks.environment}) {
        Eigen::Index prev = 1;
        for(std::size_t l = 0; l < stack->size(); ++l) {
            const auto &q = (*stack)[l];
            EXPECT_EQ(q.rows(), prev * kLocalDim);
            EXPECT_LE(q.cols(), std::min<double>(r.config.m, std::pow(3.0, static_cast<double>(l + 1))));
            const Eigen::MatrixXd qtq = q.transpose() * q;
            EXPECT_LT((qtq - Eigen::MatrixXd::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff(), 1e-12);
            prev = q.cols();
        }
    }
    EXPECT_EQ(r.wavefunction.dim_system, r.stacks.system.back().cols());
    EXPECT_EQ(r.wavefunction.dim_environment, r.stacks.environment.back().cols());
    EXPECT_NEAR(r.wavefunction.norm(), 1.0, 1e-12);

    ASSERT_FALSE(r.rho_spectrum.empty());
    const double sum = std::accumulate(r.rho_spectrum.begin(), r.rho_spectrum.end(), 0.0);
    EXPECT_NEAR(sum, 1.0, 1e-10);
    for(std::size_t i = 0; i < r.rho_spectrum.size(); ++i) {
        EXPECT_GE(r.rho_spectrum[i], 0.0);
        EXPECT_LE(r.rho_spectrum[i], 1.0);
        if(i > 0) EXPECT_LE(r.rho_spectrum[i], r.rho_spectrum[i - 1]);
    }
    EXPECT_EQ(r.sweep_energies.size(), static_cast<std::size_t>(r.config.sweeps + 1));
    EXPECT_DOUBLE_EQ(r.sweep_energies.back(), r.energy);
    EXPECT_GE(r.max_trunc_error, 0.0);
    EXPECT_LE(r.max_trunc_error, 1.0);
}

} // namespace

TEST(Dmrg, HeisenbergL4MatchesOracle) {
    const ModelParams p{1.0, 0.0, 0.0, 4};
    DmrgConfig        c;
    c.m      = 81;
    c.sweeps = 2;
    const auto r = run_dmrg(p, c);
    EXPECT_NEAR(r.energy, exact_ground_state(p).energy, 1e-9);
    expect_record_invariants(r);
}

TEST(Dmrg, ExactWhenAllStatesKept) {
    for(int L : {4, 6, 8, 10}) {
        for(double lambda : {0.5, 1.0, 2.59}) {
            const ModelParams p{lambda, 0.8, -1.0, L};
            const auto        ed = exact_ground_state(p);
            const auto        r  = run_dmrg(p, exact_config(L));
            EXPECT_NEAR(r.energy, ed.energy, 1e-9) << "L " << L << " lambda " << lambda;
            EXPECT_NEAR(entanglement_entropy(r.rho_spectrum), exact_half_chain_entropy(ed), 1e-6);
            expect_record_invariants(r);
        }
    }
}

TEST(Dmrg, BlockedPathMatchesDensePath) {
    for(int L : {6, 8}) {
        const ModelParams p{2.59, 2.3, -1.0, L};
        const auto        dense   = run_dmrg(p, exact_config(L));
        const auto        blocked = run_dmrg(p, exact_config(L, 0));
        EXPECT_NEAR(dense.energy, blocked.energy, 1e-10);
        EXPECT_NEAR(entanglement_entropy(dense.rho_spectrum), entanglement_entropy(blocked.rho_spectrum), 1e-8);
    }
    // truncated regime
    const ModelParams p{0.5, 0.63, -1.0, 16};
    DmrgConfig        c;
    c.m           = 24;
    c.sweeps      = 3;
    const auto dense = run_dmrg(p, c);
    c.sz_sector      = 0;
    const auto blocked = run_dmrg(p, c);
    EXPECT_NEAR(dense.energy, blocked.energy, 1e-7);
}

TEST(Dmrg, VariationalAgainstOracle) {
    for(int m : {4, 9, 20}) {
        const ModelParams p{0.5, 0.63, -1.0, 10};
        DmrgConfig        c;
        c.m          = m;
        c.sweeps     = 3;
        const auto r = run_dmrg(p, c);
        EXPECT_GE(r.energy, exact_ground_state(p).energy - 1e-10) << "m " << m;
        expect_record_invariants(r);
    }
}

TEST(Dmrg, SzSectorBookkeeping) {
    const ModelParams p{1.0, 0.3, -1.0, 8};
    for(int sector : {0, 1, -2, 3}) {
        DmrgConfig c = exact_config(8, sector);
        const auto r = run_dmrg(p, c);
        EXPECT_NEAR(r.sz_expectation, sector, 1e-8) << "sector " << sector;
        expect_record_invariants(r);
    }
}

TEST(Dmrg, Deterministic) {
    const ModelParams p{2.59, 2.2, -1.0, 12};
    DmrgConfig        c;
    c.m          = 16;
    c.sweeps     = 2;
    const auto a = run_dmrg(p, c);
    const auto b = run_dmrg(p, c);
    EXPECT_EQ(a.energy, b.energy);
    EXPECT_EQ(a.wavefunction.data, b.wavefunction.data);
    ASSERT_EQ(a.stacks.system.size(), b.stacks.system.size());
    for(std::size_t l = 0; l < a.stacks.system.size(); ++l) {
        EXPECT_EQ(a.stacks.system[l], b.stacks.system[l]);
        EXPECT_EQ(a.stacks.environment[l], b.stacks.environment[l]);
    }
}

TEST(Dmrg, SweepEnergiesDoNotRiseWithoutTruncation) {
    const ModelParams p{1.0, 0.5, -1.0, 10};
    const auto        r = run_dmrg(p, exact_config(10));
    for(std::size_t i = 1; i < r.sweep_energies.size(); ++i)
        EXPECT_LE(r.sweep_energies[i], r.sweep_energies[i - 1] + 1e-10);
}

// With truncation the center energy may creep up by an amount of the order of
// the discarded weight times |E|; anything beyond that is a real bug.
TEST(Dmrg, SweepEnergiesRiseOnlyWithinTruncation) {
    const ModelParams p{0.5, 0.63, -1.0, 20};
    DmrgConfig        c;
    c.m          = 32;
    c.sweeps     = 4;
    c.sz_sector  = 0;
    const auto   r     = run_dmrg(p, c);
    const double slack = r.max_trunc_error * std::abs(r.energy);
    for(std::size_t i = 1; i < r.sweep_energies.size(); ++i)
        EXPECT_LE(r.sweep_energies[i], r.sweep_energies[i - 1] + slack) << "after sweep " << i;
    EXPECT_LT(r.sweep_energies.back(), r.sweep_energies.front());
    expect_record_invariants(r);
}

TEST(Dmrg, InputValidation) {
    DmrgConfig c;
    c.m = 1;
    EXPECT_THROW(run_dmrg({1.0, 0.0, -1.0, 8}, c), DomainError);
    c.m      = 8;
    c.sweeps = 0;
    EXPECT_THROW(run_dmrg({1.0, 0.0, -1.0, 8}, c), DomainError);
    c.sweeps      = 1;
    c.lanczos_tol = 0.0;
    EXPECT_THROW(run_dmrg({1.0, 0.0, -1.0, 8}, c), DomainError);
    c.lanczos_tol = 1e-10;
    EXPECT_THROW(run_dmrg({1.0, 0.0, -1.0, 2}, c), DomainError);
    EXPECT_THROW(run_dmrg({1.0, 0.0, -1.0, 7}, c), DomainError);
    c.sz_sector = 9;
    EXPECT_THROW(run_dmrg({1.0, 0.0, -1.0, 8}, c), DomainError);
}

TEST(Dmrg, ConvergenceErrorCarriesStep) {
    DmrgConfig c;
    c.m           = 9;
    c.sweeps      = 1;
    c.lanczos_tol = 1e-300;
    try {
        run_dmrg({1.0, 0.5, -1.0, 8}, c);
        FAIL() << "expected a convergence error";
    } catch(const ConvergenceError &e) {
        EXPECT_GE(e.step(), 1);
    }
}

TEST(ReducedDensityMatrix, ProductStateHasRankOne) {
    const int       ms = 4, me = 5;
    Eigen::VectorXd u  = Eigen::VectorXd::LinSpaced(ms * kLocalDim, 1.0, 2.0);
    Eigen::VectorXd v  = Eigen::VectorXd::LinSpaced(me * kLocalDim, -1.0, 3.0);
    Eigen::MatrixXd m  = u * v.transpose();
    m /= m.norm();
    const auto psi = SuperblockWavefunction::from_matrix(m, ms, me);
    for(Side side : {Side::system, Side::environment}) {
        const Eigen::MatrixXd rho = reduced_density_matrix(psi, side);
        EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
        EXPECT_NEAR(es.eigenvalues().maxCoeff(), 1.0, 1e-12);
        EXPECT_LT(es.eigenvalues().head(es.eigenvalues().size() - 1).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(ReducedDensityMatrix, WavefunctionIndexing) {
    spinfid::testing::Gen    gen(3);
    const int       ms = 3, me = 2;
    Eigen::MatrixXd m  = gen.matrix(ms * kLocalDim, me * kLocalDim);
    const auto      psi = SuperblockWavefunction::from_matrix(m, ms, me);
    for(int a = 0; a < ms; ++a)
        for(int s = 0; s < kLocalDim; ++s)
            for(int t = 0; t < kLocalDim; ++t)
                for(int b = 0; b < me; ++b) EXPECT_EQ(psi(a, s, t, b), m(a * kLocalDim + s, t * me + b));
    EXPECT_EQ(psi.as_matrix(), m);
    EXPECT_THROW(SuperblockWavefunction::from_matrix(m, ms + 1, me), DomainError);
}

TEST(Truncate, Examples) {
    Eigen::VectorXd d(6);
    d << 0.6, 0.3, 0.1, 0.0, 0.0, 0.0;
    const auto t = truncate(d.asDiagonal().toDenseMatrix(), 2);
    EXPECT_NEAR(t.trunc_error, 0.1, 1e-12);
    EXPECT_EQ(t.isometry.cols(), 2);
    EXPECT_NEAR(t.kept_weights(0), 0.6, 1e-15);
    EXPECT_NEAR(std::abs(t.isometry(0, 0)), 1.0, 1e-15);

    spinfid::testing::Gen gen(11);
    const Eigen::MatrixXd rho = gen.density(7, 7);
    const auto            all = truncate(rho, 10);
    EXPECT_EQ(all.isometry.cols(), 7);
    EXPECT_NEAR(all.trunc_error, 0.0, 1e-12);
    EXPECT_LT((all.isometry.transpose() * all.isometry - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff(),
              1e-12);
}
