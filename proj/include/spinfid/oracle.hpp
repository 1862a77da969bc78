#pragma once

#include "spinfid/lanczos.hpp"
#include "spinfid/model.hpp"

#include <Eigen/Dense>

namespace spinfid {

/// Largest chain the exact-diagonalization reference accepts (3^12 = 531441 amplitudes).
inline constexpr int kMaxExactLength = 12;

/// Ground state of the full chain in the product basis. Site 1 is the most
/// significant base-3 digit; digit 0, 1, 2 stands for Sz = +1, 0, -1.
struct ExactState {
    ModelParams     params;
    double          energy = 0.0;
    Eigen::VectorXd amplitudes;
};

/// Matrix-free application of the chain Hamiltonian on the 3^L product space.
void apply_chain_hamiltonian(const ModelParams &params, const Eigen::VectorXd &in, Eigen::VectorXd &out);

/// Lowest eigenpair by matrix-free Lanczos. The sign is fixed so that the
/// largest-magnitude amplitude is positive.
ExactState exact_ground_state(const ModelParams &params);
ExactState exact_ground_state(const ModelParams &params, const LanczosOptions &options);

/// |<a|b>|.
double exact_overlap(const ExactState &a, const ExactState &b);

/// Von Neumann entropy (bits) of the left L/2 sites.
double exact_half_chain_entropy(const ExactState &a);

/// <a| sum_j Sz_j |a>.
double exact_total_sz(const ExactState &a);

} // namespace spinfid
