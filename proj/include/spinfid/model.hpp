#pragma once

#include <Eigen/Dense>

namespace spinfid {

/// Local Hilbert-space dimension of a spin-one site.
inline constexpr int kLocalDim = 3;

/// Spin-one matrices in the basis (|+1>, |0>, |-1>).
struct SpinOperators {
    Eigen::Matrix3cd sx;
    Eigen::Matrix3cd sy;
    Eigen::Matrix3cd sz;
    Eigen::Matrix3cd sz2;
    Eigen::Matrix3cd s_plus;
    Eigen::Matrix3cd s_minus;
};

/// Couplings of
///   H = sum_j [ Sx_j Sx_{j+1} + Sy_j Sy_{j+1} + lambda Sz_j Sz_{j+1} + D (Sz_j)^2 ] + h1 Sz_1
/// on an open chain of `length` sites.
struct ModelParams {
    double lambda  = 1.0;
    double d_aniso = 0.0;
    double h1      = -1.0;
    int    length  = 4;

    /// Throws DomainError unless length is even and at least 2.
    void validate() const;
};

SpinOperators spin1_operators();

/// Real matrices used by the solvers. sm is the transpose of sp.
struct RealSpinOperators {
    Eigen::Matrix3d sz;
    Eigen::Matrix3d sp;
    Eigen::Matrix3d sm;
};
RealSpinOperators real_spin1_operators();

/// Sx(x)Sx + Sy(x)Sy + lambda Sz(x)Sz. Two-site index is 3*s1 + s2.
Eigen::Matrix<double, 9, 9> bond_hamiltonian(const ModelParams &params);

/// D (Sz)^2, plus h1 Sz on site 1. Sites are numbered 1..L.
Eigen::Matrix3d site_hamiltonian(const ModelParams &params, int site_index);

} // namespace spinfid
