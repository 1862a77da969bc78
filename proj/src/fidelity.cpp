#include "spinfid/fidelity.hpp"

#include "spinfid/errors.hpp"

#include <cmath>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>

namespace spinfid {

namespace {

void check_shapes(const Eigen::MatrixXd &oA, const Eigen::MatrixXd &oB, const Eigen::MatrixXd &acc, const char *side) {
    if(oA.rows() != oB.rows() || oA.cols() != oB.cols())
        throw DomainError(std::string(side) + " isometries differ in shape: " + std::to_string(oA.rows()) + "x" +
                          std::to_string(oA.cols()) + " vs " + std::to_string(oB.rows()) + "x" +
                          std::to_string(oB.cols()));
    if(acc.rows() * kLocalDim != oB.rows() || acc.cols() * kLocalDim != oA.rows())
        throw DomainError(std::string(side) + " isometry rows do not match the accumulated block dimension");
}

void check_compatible(const GroundStateRecord &a, const GroundStateRecord &b) {
    if(a.params.length != b.params.length)
        throw IncompatibleError("records have different chain lengths (" + std::to_string(a.params.length) + " vs " +
                                std::to_string(b.params.length) + ")");
    if(a.config.m != b.config.m)
        throw IncompatibleError("records kept different numbers of states (" + std::to_string(a.config.m) + " vs " +
                                std::to_string(b.config.m) + ")");
    if(a.config.sweeps != b.config.sweeps) throw IncompatibleError("records used different sweep schedules");

    const std::size_t half = static_cast<std::size_t>(a.params.length / 2 - 1);
    for(const auto *r : {&a, &b}) {
        if(r->stacks.system.size() != half || r->stacks.environment.size() != half)
            throw DomainError("record is not captured at the symmetric cut");
        if(r->wavefunction.dim_system != r->stacks.system.back().cols() ||
           r->wavefunction.dim_environment != r->stacks.environment.back().cols())
            throw DomainError("wavefunction blocks do not match the stored transformation stack");
    }
}

} // namespace

OverlapAccumulator advance_environment(const OverlapAccumulator &acc, const Eigen::MatrixXd &oA,
                                       const Eigen::MatrixXd &oB) {
    check_shapes(oA, oB, acc.environment_identity, "environment");
    OverlapAccumulator next = acc;
    const Eigen::MatrixXd expanded =
        Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(kLocalDim, kLocalDim), acc.environment_identity);
    next.environment_identity = oB.transpose() * expanded * oA;
    next.environment_length   = acc.environment_length + 1;
    return next;
}

OverlapAccumulator advance_system(const OverlapAccumulator &acc, const Eigen::MatrixXd &oA, const Eigen::MatrixXd &oB) {
    check_shapes(oA, oB, acc.system_identity, "system");
    OverlapAccumulator next = acc;
    const Eigen::MatrixXd expanded =
        Eigen::kroneckerProduct(acc.system_identity, Eigen::MatrixXd::Identity(kLocalDim, kLocalDim));
    next.system_identity = oB.transpose() * expanded * oA;
    next.system_length   = acc.system_length + 1;
    return next;
}

std::vector<OverlapAccumulator> overlap_history(const GroundStateRecord &a, const GroundStateRecord &b) {
    check_compatible(a, b);
    std::vector<OverlapAccumulator> history;
    OverlapAccumulator              acc;
    for(std::size_t l = 0; l < a.stacks.system.size(); ++l) {
        acc = advance_system(acc, a.stacks.system[l], b.stacks.system[l]);
        acc = advance_environment(acc, a.stacks.environment[l], b.stacks.environment[l]);
        history.push_back(acc);
    }
    return history;
}

double signed_overlap(const GroundStateRecord &a, const GroundStateRecord &b) {
    const auto history = overlap_history(a, b);
    const auto &acc    = history.back();
    const auto &pa     = a.wavefunction;
    const auto &pb     = b.wavefunction;

    // <b|a> = sum_{alpha,beta} tr( B_ab^T [1_S] A_ab [1_E]^T )
    double sum = 0.0;
    for(int alpha = 0; alpha < kLocalDim; ++alpha) {
        for(int beta = 0; beta < kLocalDim; ++beta) {
            Eigen::MatrixXd ma(pa.dim_system, pa.dim_environment);
            Eigen::MatrixXd mb(pb.dim_system, pb.dim_environment);
            for(int i = 0; i < pa.dim_system; ++i)
                for(int j = 0; j < pa.dim_environment; ++j) ma(i, j) = pa(i, alpha, beta, j);
            for(int i = 0; i < pb.dim_system; ++i)
                for(int j = 0; j < pb.dim_environment; ++j) mb(i, j) = pb(i, alpha, beta, j);
            sum += mb.cwiseProduct(acc.system_identity * ma * acc.environment_identity.transpose()).sum();
        }
    }
    return sum;
}

double overlap(const GroundStateRecord &a, const GroundStateRecord &b) { return std::abs(signed_overlap(a, b)); }

double susceptibility(double fidelity, double delta, int length) {
    if(!(delta > 0.0)) throw DomainError("susceptibility needs delta > 0");
    if(length < 1) throw DomainError("susceptibility needs a positive length");
    if(!(fidelity >= 0.0) || fidelity > 1.0 + 1e-10)
        throw DomainError("fidelity " + std::to_string(fidelity) + " outside [0, 1]");
    const double f = std::min(fidelity, 1.0);
    return 2.0 * (1.0 - f) / (length * delta * delta);
}

} // namespace spinfid
