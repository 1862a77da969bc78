#pragma once

// Quantum-number blocked operators for the DMRG engine. Without Sz
// conservation every state carries label 0 and each object collapses to a
// single dense sector, so one code path serves both modes.

#include "spinfid/model.hpp"

#include <Eigen/Dense>
#include <vector>

namespace spinfid::detail {

/// Sectors ordered by strictly descending quantum number.
struct SectorLayout {
    std::vector<int> qn;
    std::vector<int> dim;
    std::vector<int> offset;
    int              total = 0;

    [[nodiscard]] int size() const { return static_cast<int>(qn.size()); }
    [[nodiscard]] int find(int q) const;
    void              push(int q, int d);
};

/// One nonzero block of an operator: dim(to) x dim(from).
struct OpBlock {
    int             from = 0;
    int             to   = 0;
    Eigen::MatrixXd mat;
};

/// Renormalized block of `length` sites.
struct Block {
    int                          length = 0;
    SectorLayout                 layout;
    std::vector<Eigen::MatrixXd> ham;
    std::vector<Eigen::MatrixXd> sz_edge;  // Sz of the site facing the free sites
    std::vector<Eigen::MatrixXd> sz_total;
    std::vector<OpBlock>         sp_edge;  // S+ of the same site
    Eigen::MatrixXd              isometry; // dense, product-basis rows
};

/// Contiguous row range moved by a site raising operator.
struct Move {
    int    from_sector = 0, from_offset = 0;
    int    to_sector = 0, to_offset = 0;
    int    len  = 0;
    double coef = 0.0;
};

/// A block plus one bare site. For the system side the site sits to the right
/// (product index a * s + sigma), for the environment to the left
/// (product index sigma * m + b).
struct Enlarged {
    SectorLayout                 layout;
    std::vector<int>             product_index;
    std::vector<Eigen::MatrixXd> ham;
    std::vector<Eigen::MatrixXd> sz_total;
    std::vector<Eigen::VectorXd> sz_site;
    std::vector<Move>            sp_site;
    int                          block_total = 0;
};

[[nodiscard]] inline int site_qn(int sigma, bool blocked) { return blocked ? 1 - sigma : 0; }

Block    bare_site(const ModelParams &params, int site_index, bool blocked);
Enlarged enlarge(const Block &block, const ModelParams &params, int site_index, bool blocked, bool site_first);

/// Eigenpairs of one density-matrix sector, eigenvalues descending, each
/// eigenvector signed so its largest-magnitude entry is positive.
struct SectorSpectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};
SectorSpectrum sector_spectrum(const Eigen::MatrixXd &rho);

struct KeptState {
    int    sector = 0;
    int    index  = 0;
    double weight = 0.0;
};
/// The min(m, total) heaviest states; ties broken by (sector, index).
std::vector<KeptState> select_kept(const std::vector<SectorSpectrum> &spectra, int m);

/// Projects an enlarged block onto the kept density-matrix eigenvectors.
Block renormalize(const Enlarged &enl, const std::vector<SectorSpectrum> &spectra, const std::vector<KeptState> &kept,
                  int new_length);

/// Two enlarged blocks coupled by the central bond, restricted to one total
/// quantum number. Vectors are the concatenation of column-major
/// (left sector) x (right sector) blocks.
class Superblock {
  public:
    Superblock(const Enlarged &left, const Enlarged &right, double lambda, int target);

    [[nodiscard]] Eigen::Index size() const { return size_; }
    [[nodiscard]] bool         empty() const { return blocks_.empty(); }

    void apply(const Eigen::VectorXd &in, Eigen::VectorXd &out) const;

    /// Rows are left product indices, columns right product indices.
    [[nodiscard]] Eigen::VectorXd from_product(const Eigen::MatrixXd &m) const;
    [[nodiscard]] Eigen::MatrixXd to_product(const Eigen::VectorXd &v) const;

    /// Per-sector reduced density matrices (zero matrices for sectors with no weight).
    [[nodiscard]] std::vector<Eigen::MatrixXd> left_density(const Eigen::VectorXd &v) const;
    [[nodiscard]] std::vector<Eigen::MatrixXd> right_density(const Eigen::VectorXd &v) const;

    [[nodiscard]] double total_sz(const Eigen::VectorXd &v) const;

  private:
    struct PsiBlock {
        int             left = 0, right = 0;
        Eigen::Index    offset = 0;
        Eigen::MatrixXd szsz; // lambda * sz_alpha sz_beta, elementwise
    };
    struct Hop {
        int    src = 0, dst = 0;
        int    src_row = 0, src_col = 0, dst_row = 0, dst_col = 0;
        int    rows = 0, cols = 0;
        double coef = 0.0;
    };

    const Enlarged       &left_;
    const Enlarged       &right_;
    std::vector<PsiBlock> blocks_;
    std::vector<Hop>      hops_;
    Eigen::Index          size_ = 0;
};

} // namespace spinfid::detail
