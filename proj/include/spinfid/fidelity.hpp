#pragma once

#include "spinfid/engine.hpp"

#include <Eigen/Dense>
#include <vector>

namespace spinfid {

/// Parameter step used for the finite-difference susceptibility.
inline constexpr double kDefaultDelta = 1e-3;

/// Overlap matrices between the renormalized block bases of two runs:
/// system_identity(b, a) = <b_S|a_S> for blocks of length system_length,
/// and likewise for the environment. Run A supplies the kets, run B the bras.
struct OverlapAccumulator {
    Eigen::MatrixXd system_identity      = Eigen::MatrixXd::Identity(1, 1);
    Eigen::MatrixXd environment_identity = Eigen::MatrixXd::Identity(1, 1);
    int             system_length        = 0;
    int             environment_length   = 0;
};

/// [1_E^l] = oB^T (1_s (x) [1_E^{l-1}]) oA.
OverlapAccumulator advance_environment(const OverlapAccumulator &acc, const Eigen::MatrixXd &oA,
                                       const Eigen::MatrixXd &oB);

/// [1_S^l] = oB^T ([1_S^{l-1}] (x) 1_s) oA.
OverlapAccumulator advance_system(const OverlapAccumulator &acc, const Eigen::MatrixXd &oA, const Eigen::MatrixXd &oB);

/// Accumulator after each block length 1 .. L/2-1, grown from both chain ends.
std::vector<OverlapAccumulator> overlap_history(const GroundStateRecord &a, const GroundStateRecord &b);

/// <b|a> with sign, contracted at the symmetric cut.
double signed_overlap(const GroundStateRecord &a, const GroundStateRecord &b);

/// F = |<b|a>|. Both runs must share L, m and the sweep schedule.
double overlap(const GroundStateRecord &a, const GroundStateRecord &b);

/// 2 (1 - F) / (L delta^2).
double susceptibility(double fidelity, double delta, int length);

} // namespace spinfid
