#include "spinfid/engine.hpp"

#include "blocks.hpp"
#include "spinfid/errors.hpp"
#include "spinfid/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>

namespace spinfid {

void DmrgConfig::validate() const {
    if(m < 2) throw DomainError("DMRG needs m >= 2 kept states, got " + std::to_string(m));
    if(sweeps < 1) throw DomainError("DMRG needs at least one sweep");
    if(!(lanczos_tol > 0.0)) throw DomainError("lanczos_tol must be positive");
}

Eigen::MatrixXd SuperblockWavefunction::as_matrix() const {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    return Eigen::Map<const RowMajor>(data.data(), static_cast<Eigen::Index>(dim_system) * kLocalDim,
                                      static_cast<Eigen::Index>(kLocalDim) * dim_environment);
}

SuperblockWavefunction SuperblockWavefunction::from_matrix(const Eigen::MatrixXd &m, int dim_system,
                                                           int dim_environment) {
    if(m.rows() != static_cast<Eigen::Index>(dim_system) * kLocalDim ||
       m.cols() != static_cast<Eigen::Index>(dim_environment) * kLocalDim)
        throw DomainError("wavefunction matrix shape does not match block dimensions");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    SuperblockWavefunction psi;
    psi.dim_system      = dim_system;
    psi.dim_environment = dim_environment;
    psi.data.resize(m.size());
    Eigen::Map<RowMajor>(psi.data.data(), m.rows(), m.cols()) = m;
    return psi;
}

Eigen::MatrixXd reduced_density_matrix(const SuperblockWavefunction &psi, Side side) {
    const Eigen::MatrixXd m = psi.as_matrix();
    if(side == Side::system) return m * m.transpose();
    return m.transpose() * m;
}

Truncation truncate(const Eigen::MatrixXd &rho, int m) {
    if(rho.rows() != rho.cols()) throw DomainError("truncate: density matrix must be square");
    if(m < 1) throw DomainError("truncate: m must be positive");
    const auto spec = detail::sector_spectrum(rho);
    const auto kept = detail::select_kept({spec}, m);
    const int  k    = static_cast<int>(kept.size());

    Truncation t;
    t.isometry     = spec.vectors.leftCols(k);
    t.kept_weights = spec.values.head(k);
    t.trunc_error  = std::clamp(1.0 - t.kept_weights.sum(), 0.0, 1.0);
    return t;
}

namespace {

using detail::Block;
using detail::Enlarged;
using detail::SectorSpectrum;
using detail::Superblock;

class FiniteSystem {
  public:
    FiniteSystem(const ModelParams &params, const DmrgConfig &config)
        : p_(params), c_(config), blocked_(config.sz_sector.has_value()), target_(config.sz_sector.value_or(0)),
          L_(params.length), left_(params.length + 1), right_(params.length + 1) {}

    GroundStateRecord run() {
        warmup();
        GroundStateRecord rec;
        rec.sweep_energies.push_back(energy_);
        const int center = L_ / 2 - 1;
        for(int sweep = 0; sweep < c_.sweeps; ++sweep) {
            max_trunc_ = 0.0;
            while(pos_ < L_ - 3) move_right();
            while(pos_ > 1) move_left();
            while(pos_ < center) move_right();
            rec.sweep_energies.push_back(energy_);
        }
        capture(rec);
        return rec;
    }

  private:
    void warmup() {
        left_[1]  = detail::bare_site(p_, 1, blocked_);
        right_[1] = detail::bare_site(p_, L_, blocked_);
        for(int l = 1;; ++l) {
            const int n = 2 * l + 2;
            build(l, l, std::clamp(target_, -n, n));
            if(sb_->empty()) throw DomainError("total-Sz sector " + std::to_string(target_) + " is empty");
            solve(nullptr);
            if(n == L_) break;
            left_[l + 1]  = grow(sb_->left_density(psi_), *sl_, l + 1);
            right_[l + 1] = grow(sb_->right_density(psi_), *er_, l + 1);
        }
        pos_ = L_ / 2 - 1;
    }

    // System block of length l, environment block of length r.
    void build(int l, int r, int target) {
        sb_.reset();
        sl_ = std::make_unique<Enlarged>(detail::enlarge(left_[l], p_, l + 1, blocked_, false));
        er_ = std::make_unique<Enlarged>(detail::enlarge(right_[r], p_, L_ - r, blocked_, true));
        sb_ = std::make_unique<Superblock>(*sl_, *er_, p_.lambda, target);
    }

    Block grow(const std::vector<Eigen::MatrixXd> &rho, const Enlarged &enl, int new_length) {
        std::vector<SectorSpectrum> spectra;
        spectra.reserve(rho.size());
        for(const auto &r : rho) spectra.push_back(detail::sector_spectrum(r));
        const auto kept = detail::select_kept(spectra, c_.m);
        double     w    = 0.0;
        for(const auto &k : kept) w += k.weight;
        max_trunc_ = std::max(max_trunc_, std::clamp(1.0 - w, 0.0, 1.0));
        return detail::renormalize(enl, spectra, kept, new_length);
    }

    void solve(const Eigen::VectorXd *guess) {
        ++step_;
        Eigen::VectorXd start;
        if(guess != nullptr && guess->norm() > 1e-8) {
            start = *guess;
        } else {
            std::mt19937_64                  rng(0x9e3779b97f4a7c15ULL ^ static_cast<unsigned long long>(step_));
            std::normal_distribution<double> gauss;
            start.resize(sb_->size());
            for(auto &v : start) v = gauss(rng);
        }
        LanczosOptions opt;
        opt.tolerance  = c_.lanczos_tol;
        opt.krylov_dim = 40;
        opt.max_steps  = 4000;
        auto res       = lanczos_lowest([this](const Eigen::VectorXd &x, Eigen::VectorXd &y) { sb_->apply(x, y); },
                                        std::move(start), opt);
        if(!res.converged)
            throw ConvergenceError("superblock Lanczos did not converge at step " + std::to_string(step_) +
                                       " (residual " + std::to_string(res.residual) + ")",
                                   step_);
        energy_ = res.eigenvalue;
        psi_    = std::move(res.eigenvector);
    }

    // System block absorbs the left free site; the cut moves one site right.
    void move_right() {
        const int l    = pos_;
        const int r    = L_ - l - 2;
        left_[l + 1]   = grow(sb_->left_density(psi_), *sl_, l + 1);
        const auto &os = left_[l + 1].isometry;
        const auto &oe = right_[r].isometry; // (gamma, e') x e

        const Eigen::MatrixXd t     = os.transpose() * sb_->to_product(psi_); // m_new x (beta, e)
        const int             m_new = static_cast<int>(os.cols());
        const int             m_r   = static_cast<int>(oe.cols());
        Eigen::MatrixXd       rmat(static_cast<Eigen::Index>(m_new) * kLocalDim, m_r);
        for(int s = 0; s < m_new; ++s)
            for(int b = 0; b < kLocalDim; ++b) rmat.row(s * kLocalDim + b) = t.row(s).segment(b * m_r, m_r);
        const Eigen::MatrixXd guess = rmat * oe.transpose();

        pos_ = l + 1;
        build(pos_, L_ - pos_ - 2, target_);
        const Eigen::VectorXd g = sb_->from_product(guess);
        solve(&g);
    }

    // Environment block absorbs the right free site; the cut moves one site left.
    void move_left() {
        const int l    = pos_;
        const int r    = L_ - l - 2;
        right_[r + 1]  = grow(sb_->right_density(psi_), *er_, r + 1);
        const auto &oe = right_[r + 1].isometry; // (beta, e) x e'
        const auto &os = left_[l].isometry;      // (s'', sigma) x s

        const Eigen::MatrixXd u     = sb_->to_product(psi_) * oe; // (s, alpha) x e'
        const int             m_l   = static_cast<int>(os.cols());
        const int             m_new = static_cast<int>(oe.cols());
        Eigen::MatrixXd       vmat(m_l, static_cast<Eigen::Index>(kLocalDim) * m_new);
        for(int s = 0; s < m_l; ++s)
            for(int a = 0; a < kLocalDim; ++a) vmat.row(s).segment(a * m_new, m_new) = u.row(s * kLocalDim + a);
        const Eigen::MatrixXd guess = os * vmat;

        pos_ = l - 1;
        build(pos_, L_ - pos_ - 2, target_);
        const Eigen::VectorXd g = sb_->from_product(guess);
        solve(&g);
    }

    void capture(GroundStateRecord &rec) const {
        const int c = pos_;
        rec.params  = p_;
        rec.config  = c_;
        rec.energy  = energy_;

        const auto ms    = static_cast<int>(left_[c].layout.total);
        const auto me    = static_cast<int>(right_[c].layout.total);
        rec.wavefunction = SuperblockWavefunction::from_matrix(sb_->to_product(psi_), ms, me);

        for(int l = 1; l <= c; ++l) {
            rec.stacks.system.push_back(left_[l].isometry);
            rec.stacks.environment.push_back(right_[l].isometry);
        }

        for(const auto &rho : sb_->left_density(psi_)) {
            const auto spec = detail::sector_spectrum(rho);
            for(double v : spec.values) rec.rho_spectrum.push_back(std::clamp(v, 0.0, 1.0));
        }
        std::sort(rec.rho_spectrum.begin(), rec.rho_spectrum.end(), std::greater<>());
        rec.max_trunc_error = max_trunc_;
        rec.sz_expectation  = sb_->total_sz(psi_);
    }

    ModelParams p_;
    DmrgConfig  c_;
    bool        blocked_;
    int         target_;
    int         L_;

    std::vector<Block>          left_;  // indexed by block length
    std::vector<Block>          right_; // indexed by block length
    std::unique_ptr<Enlarged>   sl_;
    std::unique_ptr<Enlarged>   er_;
    std::unique_ptr<Superblock> sb_;

    int             pos_ = 0; // length of the system block
    Eigen::VectorXd psi_;
    double          energy_    = 0.0;
    double          max_trunc_ = 0.0;
    long            step_      = 0;
};

} // namespace

GroundStateRecord run_dmrg(const ModelParams &params, const DmrgConfig &config) {
    params.validate();
    config.validate();
    if(params.length < 4) throw DomainError("DMRG needs L >= 4, got " + std::to_string(params.length));
    if(config.sz_sector && std::abs(*config.sz_sector) > params.length)
        throw DomainError("total-Sz sector " + std::to_string(*config.sz_sector) + " does not exist for L = " +
                          std::to_string(params.length));
    FiniteSystem dmrg(params, config);
    return dmrg.run();
}

} // namespace spinfid
