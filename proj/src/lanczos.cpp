#include "spinfid/lanczos.hpp"

#include "spinfid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace spinfid {

namespace {

// Lowest Ritz pair of the leading k x k block of the tridiagonal (alpha, beta).
void lowest_ritz(const std::vector<double> &alpha, const std::vector<double> &beta, int k, double &theta,
                 Eigen::VectorXd &y) {
    if(k == 1) {
        theta = alpha[0];
        y     = Eigen::VectorXd::Ones(1);
        return;
    }
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd off  = Eigen::Map<const Eigen::VectorXd>(beta.data(), k - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    theta = es.eigenvalues()(0);
    y     = es.eigenvectors().col(0);
}

} // namespace

LanczosResult lanczos_lowest(const LinearOperator &op, Eigen::VectorXd start, const LanczosOptions &options) {
    const Eigen::Index n = start.size();
    if(n == 0) throw DomainError("lanczos: empty start vector");
    double nrm = start.norm();
    if(!(nrm > 0.0) || !std::isfinite(nrm)) throw DomainError("lanczos: start vector must be nonzero and finite");
    start /= nrm;

    LanczosResult res;
    res.eigenvector = std::move(start);

    const int       kmax = static_cast<int>(std::min<Eigen::Index>(options.krylov_dim, n));
    Eigen::MatrixXd basis(n, kmax);
    Eigen::VectorXd w(n);
    std::vector<double> alpha, beta;

    while(res.steps < options.max_steps) {
        alpha.clear();
        beta.clear();
        basis.col(0) = res.eigenvector;
        double          theta = 0.0;
        Eigen::VectorXd y;
        int             k          = 0;
        bool            exhausted  = false;

        for(int j = 0; j < kmax && res.steps < options.max_steps; ++j) {
            op(basis.col(j), w);
            ++res.steps;
            double a = basis.col(j).dot(w);
            alpha.push_back(a);
            k = j + 1;
            // full reorthogonalization, twice is enough
            for(int pass = 0; pass < 2; ++pass) {
                Eigen::VectorXd c = basis.leftCols(k).transpose() * w;
                w.noalias() -= basis.leftCols(k) * c;
            }
            double b = w.norm();
            lowest_ritz(alpha, beta, k, theta, y);
            double est = b * std::abs(y(k - 1));
            if(est <= 0.1 * options.tolerance || b <= 1e-14 * std::max(1.0, std::abs(theta))) {
                exhausted = b <= 1e-14 * std::max(1.0, std::abs(theta));
                break;
            }
            if(j + 1 < kmax) {
                beta.push_back(b);
                basis.col(j + 1) = w / b;
            }
        }

        Eigen::VectorXd x = basis.leftCols(k) * y;
        x.normalize();
        op(x, w);
        ++res.steps;
        res.eigenvalue  = x.dot(w);
        res.residual    = (w - res.eigenvalue * x).norm();
        res.eigenvector = std::move(x);
        if(res.residual <= options.tolerance) {
            res.converged = true;
            return res;
        }
        if(exhausted && k == n) break; // whole space spanned; cannot do better
    }
    return res;
}

} // namespace spinfid
