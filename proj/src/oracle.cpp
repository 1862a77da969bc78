#include "spinfid/oracle.hpp"

#include "spinfid/errors.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace spinfid {

namespace {

// Sz for base-3 digit 0, 1, 2.
constexpr double kSz[3] = {1.0, 0.0, -1.0};

class ChainOperator {
  public:
    explicit ChainOperator(const ModelParams &p) : params_(p) {
        const int L = p.length;
        weight_.assign(L, 1);
        for(int j = L - 2; j >= 0; --j) weight_[j] = weight_[j + 1] * 3;
        dim_ = weight_[0] * 3;

        diag_.resize(dim_);
        std::vector<int> digit(L, 0);
        for(long idx = 0; idx < dim_; ++idx) {
            double e = 0.0;
            for(int j = 0; j < L; ++j) {
                const double sz = kSz[digit[j]];
                e += p.d_aniso * sz * sz;
                if(j + 1 < L) e += p.lambda * sz * kSz[digit[j + 1]];
            }
            e += p.h1 * kSz[digit[0]];
            diag_[idx] = e;
            increment(digit);
        }
    }

    [[nodiscard]] long dim() const { return dim_; }

    void apply(const Eigen::VectorXd &in, Eigen::VectorXd &out) const {
        const int L = params_.length;
        out.resize(dim_);
        std::vector<int> digit(L, 0);
        for(long idx = 0; idx < dim_; ++idx) {
            double acc = diag_[idx] * in[idx];
            // (S+_j S-_{j+1} + S-_j S+_{j+1}) / 2 has unit matrix elements for spin one
            for(int j = 0; j + 1 < L; ++j) {
                const int a = digit[j], b = digit[j + 1];
                if(a >= 1 && b <= 1) acc += in[idx - weight_[j] + weight_[j + 1]];
                if(a <= 1 && b >= 1) acc += in[idx + weight_[j] - weight_[j + 1]];
            }
            out[idx] = acc;
            increment(digit);
        }
    }

  private:
    static void increment(std::vector<int> &digit) {
        for(int j = static_cast<int>(digit.size()) - 1; j >= 0; --j) {
            if(++digit[j] < 3) return;
            digit[j] = 0;
        }
    }

    ModelParams       params_;
    std::vector<long> weight_;
    long              dim_ = 0;
    Eigen::VectorXd   diag_;
};

void check_capacity(const ModelParams &p) {
    p.validate();
    if(p.length > kMaxExactLength)
        throw CapacityError("exact diagonalization limited to L <= " + std::to_string(kMaxExactLength) + ", got " +
                            std::to_string(p.length));
}

} // namespace

void apply_chain_hamiltonian(const ModelParams &params, const Eigen::VectorXd &in, Eigen::VectorXd &out) {
    check_capacity(params);
    ChainOperator op(params);
    if(in.size() != op.dim()) throw DomainError("vector length does not match 3^L");
    op.apply(in, out);
}

ExactState exact_ground_state(const ModelParams &params) {
    LanczosOptions opt;
    opt.tolerance  = 1e-10;
    opt.krylov_dim = 100;
    opt.max_steps  = 5000;
    return exact_ground_state(params, opt);
}

ExactState exact_ground_state(const ModelParams &params, const LanczosOptions &options) {
    check_capacity(params);
    ChainOperator op(params);

    std::mt19937_64                  rng(0x5eedf00dULL + static_cast<unsigned>(params.length));
    std::normal_distribution<double> gauss;
    Eigen::VectorXd                  start(op.dim());
    for(auto &v : start) v = gauss(rng);

    auto res = lanczos_lowest([&](const Eigen::VectorXd &x, Eigen::VectorXd &y) { op.apply(x, y); }, std::move(start),
                              options);
    if(!res.converged)
        throw ConvergenceError("exact diagonalization did not converge (residual " + std::to_string(res.residual) + ")",
                               res.steps);

    Eigen::Index imax;
    res.eigenvector.cwiseAbs().maxCoeff(&imax);
    if(res.eigenvector[imax] < 0) res.eigenvector = -res.eigenvector;

    return ExactState{params, res.eigenvalue, std::move(res.eigenvector)};
}

double exact_overlap(const ExactState &a, const ExactState &b) {
    if(a.params.length != b.params.length || a.amplitudes.size() != b.amplitudes.size())
        throw DomainError("exact_overlap: states have different chain lengths");
    return std::abs(a.amplitudes.dot(b.amplitudes));
}

double exact_half_chain_entropy(const ExactState &a) {
    const int L = a.params.length;
    if(L % 2 != 0) throw DomainError("half-chain entropy needs even L");
    long half = 1;
    for(int j = 0; j < L / 2; ++j) half *= 3;
    if(a.amplitudes.size() != half * half) throw DomainError("amplitude vector does not match 3^L");
    // row-major (left, right) amplitudes read column-major give the transpose; same singular values
    Eigen::Map<const Eigen::MatrixXd> psi(a.amplitudes.data(), half, half);
    Eigen::BDCSVD<Eigen::MatrixXd>    svd(psi);
    double                            s = 0.0;
    for(double sigma : svd.singularValues()) {
        const double p = sigma * sigma;
        if(p >= 1e-16) s -= p * std::log2(p);
    }
    return s;
}

double exact_total_sz(const ExactState &a) {
    const int        L = a.params.length;
    std::vector<int> digit(L, 0);
    double           acc = 0.0;
    for(Eigen::Index idx = 0; idx < a.amplitudes.size(); ++idx) {
        double sz = 0.0;
        for(int d : digit) sz += kSz[d];
        acc += sz * a.amplitudes[idx] * a.amplitudes[idx];
        for(int j = L - 1; j >= 0; --j) {
            if(++digit[j] < 3) break;
            digit[j] = 0;
        }
    }
    return acc;
}

} // namespace spinfid
