#pragma once

#include "spinfid/model.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace spinfid {

/// Finite-system DMRG settings.
struct DmrgConfig {
    int                m             = 64;    ///< kept states per block
    int                sweeps        = 5;     ///< finite-system sweeps after the warmup
    double             lanczos_tol   = 1e-10; ///< superblock residual tolerance
    double             trunc_target  = 1e-9;  ///< advisory; reported, never enforced
    std::optional<int> sz_sector;             ///< restrict to a total-Sz sector (enables quantum-number blocking)

    void validate() const;
};

/// Block isometries from the final sweep, index l-1 holding the block of length l.
///
/// System isometries act on (previous block) x (new site) with row index
/// a * s + sigma; environment isometries act on (new site) x (previous block)
/// with row index sigma * m_prev + b. The length-one entries map the bare
/// site (m_prev = 1) and are the identity in both cases.
struct TransformationStack {
    std::vector<Eigen::MatrixXd> system;
    std::vector<Eigen::MatrixXd> environment;
    int                          local_dim = kLocalDim;
};

/// Psi(m_S, alpha, beta, m_E) stored row-major, shape dim_system x s x s x dim_environment.
struct SuperblockWavefunction {
    int             dim_system      = 0;
    int             dim_environment = 0;
    Eigen::VectorXd data;

    [[nodiscard]] double operator()(int ms, int alpha, int beta, int me) const {
        return data[((static_cast<Eigen::Index>(ms) * kLocalDim + alpha) * kLocalDim + beta) * dim_environment + me];
    }
    /// (m_S, alpha) x (beta, m_E) matrix view as a copy.
    [[nodiscard]] Eigen::MatrixXd as_matrix() const;
    [[nodiscard]] double          norm() const { return data.norm(); }

    static SuperblockWavefunction from_matrix(const Eigen::MatrixXd &m, int dim_system, int dim_environment);
};

/// Everything a converged run leaves behind, captured at the symmetric cut
/// (system and environment blocks of length L/2 - 1 plus two free sites).
struct GroundStateRecord {
    ModelParams            params;
    DmrgConfig             config;
    double                 energy = 0.0;
    SuperblockWavefunction wavefunction;
    TransformationStack    stacks;
    std::vector<double>    rho_spectrum;    ///< half-chain density-matrix eigenvalues, descending
    double                 max_trunc_error = 0.0;
    std::vector<double>    sweep_energies;  ///< center energy after the warmup and after each sweep
    double                 sz_expectation = 0.0;
};

GroundStateRecord run_dmrg(const ModelParams &params, const DmrgConfig &config);

enum class Side { system, environment };

/// Traces out the complementary half of Psi. The system result is indexed by
/// (m_S, alpha), the environment result by (beta, m_E).
Eigen::MatrixXd reduced_density_matrix(const SuperblockWavefunction &psi, Side side);

struct Truncation {
    Eigen::MatrixXd isometry;    ///< kept eigenvectors as columns, descending weight
    Eigen::VectorXd kept_weights;
    double          trunc_error = 0.0;
};

/// Keeps the min(m, dim) eigenvectors of largest eigenvalue. Exact ties are
/// resolved by eigensolver order, so identical input gives identical output.
Truncation truncate(const Eigen::MatrixXd &rho, int m);

} // namespace spinfid
