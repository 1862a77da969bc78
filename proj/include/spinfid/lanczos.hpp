#pragma once

#include <Eigen/Dense>
#include <functional>

namespace spinfid {

/// y = A x for a real symmetric operator A.
using LinearOperator = std::function<void(const Eigen::VectorXd &x, Eigen::VectorXd &y)>;

struct LanczosOptions {
    double tolerance    = 1e-10; ///< stop when ||A v - theta v|| <= tolerance
    int    krylov_dim   = 60;    ///< vectors per restart cycle (all kept for full reorthogonalization)
    int    max_steps    = 5000;  ///< total matrix-vector products across restarts
};

struct LanczosResult {
    double          eigenvalue = 0.0;
    Eigen::VectorXd eigenvector;
    double          residual  = 0.0;
    int             steps     = 0;
    bool            converged = false;
};

/// Lowest eigenpair of a symmetric operator by restarted Lanczos with full
/// reorthogonalization. Each cycle restarts from the current Ritz vector.
/// `start` need not be normalized but must be nonzero.
LanczosResult lanczos_lowest(const LinearOperator &op, Eigen::VectorXd start, const LanczosOptions &options = {});

} // namespace spinfid
