#include "spinfid/model.hpp"

#include "spinfid/errors.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>

namespace spinfid {

void ModelParams::validate() const {
    if(length < 2 || length % 2 != 0)
        throw DomainError("chain length must be even and >= 2, got " + std::to_string(length));
    if(!std::isfinite(lambda) || !std::isfinite(d_aniso) || !std::isfinite(h1))
        throw DomainError("model couplings must be finite");
}

SpinOperators spin1_operators() {
    using cd = std::complex<double>;
    const double r2 = std::sqrt(2.0);

    SpinOperators ops;
    ops.sz = Eigen::Matrix3cd::Zero();
    ops.sz(0, 0) = 1.0;
    ops.sz(2, 2) = -1.0;

    ops.s_plus = Eigen::Matrix3cd::Zero();
    ops.s_plus(0, 1) = r2; // |0>  -> |+1>
    ops.s_plus(1, 2) = r2; // |-1> -> |0>
    ops.s_minus = ops.s_plus.adjoint();

    ops.sx  = 0.5 * (ops.s_plus + ops.s_minus);
    ops.sy  = (ops.s_plus - ops.s_minus) / cd(0.0, 2.0);
    ops.sz2 = ops.sz * ops.sz;
    return ops;
}

RealSpinOperators real_spin1_operators() {
    const auto ops = spin1_operators();
    RealSpinOperators r;
    r.sz = ops.sz.real();
    r.sp = ops.s_plus.real();
    r.sm = ops.s_minus.real();
    return r;
}

Eigen::Matrix<double, 9, 9> bond_hamiltonian(const ModelParams &params) {
    const auto     ops = spin1_operators();
    Eigen::Matrix<std::complex<double>, 9, 9> h =
        Eigen::kroneckerProduct(ops.sx, ops.sx) + Eigen::kroneckerProduct(ops.sy, ops.sy) +
        params.lambda * Eigen::kroneckerProduct(ops.sz, ops.sz);
    // Sx Sx + Sy Sy = (S+ S- + S- S+)/2 is real in this basis.
    return h.real();
}

Eigen::Matrix3d site_hamiltonian(const ModelParams &params, int site_index) {
    if(site_index < 1 || site_index > params.length)
        throw DomainError("site index " + std::to_string(site_index) + " outside 1.." + std::to_string(params.length));
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    h(0, 0)           = params.d_aniso;
    h(2, 2)           = params.d_aniso;
    if(site_index == 1) {
        h(0, 0) += params.h1;
        h(2, 2) -= params.h1;
    }
    return h;
}

} // namespace spinfid
