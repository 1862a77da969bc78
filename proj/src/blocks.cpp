#include "blocks.hpp"

#include "spinfid/errors.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <utility>

namespace spinfid::detail {

namespace {

Eigen::MatrixXd &op_block(std::vector<OpBlock> &op, int from, int to, int rows, int cols) {
    for(auto &b : op)
        if(b.from == from && b.to == to) return b.mat;
    op.push_back({from, to, Eigen::MatrixXd::Zero(rows, cols)});
    return op.back().mat;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd &m) { return 0.5 * (m + m.transpose()); }

} // namespace

int SectorLayout::find(int q) const {
    for(int i = 0; i < size(); ++i)
        if(qn[i] == q) return i;
    return -1;
}

void SectorLayout::push(int q, int d) {
    if(!qn.empty() && q >= qn.back()) throw DomainError("sector layout: quantum numbers must be pushed descending");
    qn.push_back(q);
    dim.push_back(d);
    offset.push_back(total);
    total += d;
}

Block bare_site(const ModelParams &params, int site_index, bool blocked) {
    const auto            ops = real_spin1_operators();
    const Eigen::Matrix3d h   = site_hamiltonian(params, site_index);

    Block blk;
    blk.length = 1;
    // blocked: one sector per state (qn +1, 0, -1); dense: a single sector of dimension 3
    int              sector_of[kLocalDim], pos_of[kLocalDim];
    std::vector<int> dims;
    for(int s = 0; s < kLocalDim; ++s) {
        sector_of[s] = blocked ? s : 0;
        if(static_cast<int>(dims.size()) <= sector_of[s]) dims.push_back(0);
        pos_of[s] = dims[sector_of[s]]++;
    }
    for(int i = 0; i < static_cast<int>(dims.size()); ++i) blk.layout.push(site_qn(i, blocked), dims[i]);

    const int n = blk.layout.size();
    blk.ham.assign(n, Eigen::MatrixXd());
    blk.sz_edge.assign(n, Eigen::MatrixXd());
    for(int i = 0; i < n; ++i) {
        blk.ham[i]     = Eigen::MatrixXd::Zero(dims[i], dims[i]);
        blk.sz_edge[i] = Eigen::MatrixXd::Zero(dims[i], dims[i]);
    }
    for(int s = 0; s < kLocalDim; ++s) {
        blk.ham[sector_of[s]](pos_of[s], pos_of[s])     = h(s, s);
        blk.sz_edge[sector_of[s]](pos_of[s], pos_of[s]) = ops.sz(s, s);
    }
    blk.sz_total = blk.sz_edge;
    for(int s = 1; s < kLocalDim; ++s) {
        auto &m = op_block(blk.sp_edge, sector_of[s], sector_of[s - 1], dims[sector_of[s - 1]], dims[sector_of[s]]);
        m(pos_of[s - 1], pos_of[s]) = ops.sp(s - 1, s);
    }
    blk.isometry = Eigen::MatrixXd::Zero(kLocalDim, kLocalDim);
    for(int s = 0; s < kLocalDim; ++s) blk.isometry(s, blk.layout.offset[sector_of[s]] + pos_of[s]) = 1.0;
    return blk;
}

Enlarged enlarge(const Block &block, const ModelParams &params, int site_index, bool blocked, bool site_first) {
    const auto            ops = real_spin1_operators();
    const Eigen::Matrix3d h   = site_hamiltonian(params, site_index);
    const auto           &bl  = block.layout;
    const int             nb  = bl.size();

    std::vector<std::pair<int, int>> order; // (block sector, sigma) in product order
    if(site_first) {
        for(int s = 0; s < kLocalDim; ++s)
            for(int a = 0; a < nb; ++a) order.emplace_back(a, s);
    } else {
        for(int a = 0; a < nb; ++a)
            for(int s = 0; s < kLocalDim; ++s) order.emplace_back(a, s);
    }

    std::vector<int> qns;
    for(auto [a, s] : order) qns.push_back(bl.qn[a] + site_qn(s, blocked));
    std::vector<int> uniq = qns;
    std::sort(uniq.begin(), uniq.end(), std::greater<>());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    // location of each (block sector, sigma) piece inside its enlarged sector
    std::vector<std::array<std::pair<int, int>, kLocalDim>> loc(nb);
    std::vector<int>                                        fill(uniq.size(), 0);
    for(auto [a, s] : order) {
        const int q   = bl.qn[a] + site_qn(s, blocked);
        const int sec = static_cast<int>(std::find(uniq.begin(), uniq.end(), q) - uniq.begin());
        loc[a][s]     = {sec, fill[sec]};
        fill[sec] += bl.dim[a];
    }

    Enlarged enl;
    enl.block_total = bl.total;
    for(std::size_t i = 0; i < uniq.size(); ++i) enl.layout.push(uniq[i], fill[i]);
    const int n = enl.layout.size();
    enl.product_index.assign(enl.layout.total, -1);
    enl.ham.resize(n);
    enl.sz_total.resize(n);
    enl.sz_site.resize(n);
    for(int i = 0; i < n; ++i) {
        const int d     = enl.layout.dim[i];
        enl.ham[i]      = Eigen::MatrixXd::Zero(d, d);
        enl.sz_total[i] = Eigen::MatrixXd::Zero(d, d);
        enl.sz_site[i]  = Eigen::VectorXd::Zero(d);
    }

    for(auto [a, s] : order) {
        const auto [sec, off] = loc[a][s];
        const int da          = bl.dim[a];
        for(int k = 0; k < da; ++k) {
            const int pos          = enl.layout.offset[sec] + off + k;
            const int bidx         = bl.offset[a] + k;
            enl.product_index[pos] = site_first ? s * bl.total + bidx : bidx * kLocalDim + s;
        }
        const double sz = ops.sz(s, s);
        auto         hb = enl.ham[sec].block(off, off, da, da);
        hb += block.ham[a];
        hb.diagonal().array() += h(s, s);
        hb += params.lambda * sz * block.sz_edge[a];
        auto zb = enl.sz_total[sec].block(off, off, da, da);
        zb += block.sz_total[a];
        zb.diagonal().array() += sz;
        enl.sz_site[sec].segment(off, da).setConstant(sz);
    }

    // (S+_edge S-_site + S-_edge S+_site) / 2
    for(const auto &sp : block.sp_edge) {
        for(int s = 0; s + 1 < kLocalDim; ++s) {
            const auto [sec_src, off_src] = loc[sp.from][s];
            const auto [sec_dst, off_dst] = loc[sp.to][s + 1];
            if(sec_src != sec_dst) throw DomainError("enlarge: bond term crosses quantum-number sectors");
            const double c = 0.5 * ops.sm(s + 1, s);
            enl.ham[sec_src].block(off_dst, off_src, bl.dim[sp.to], bl.dim[sp.from]) += c * sp.mat;
            enl.ham[sec_src].block(off_src, off_dst, bl.dim[sp.from], bl.dim[sp.to]) += c * sp.mat.transpose();
        }
    }

    for(int a = 0; a < nb; ++a) {
        for(int s = 1; s < kLocalDim; ++s) {
            const auto [sf, of] = loc[a][s];
            const auto [st, ot] = loc[a][s - 1];
            enl.sp_site.push_back({sf, of, st, ot, bl.dim[a], ops.sp(s - 1, s)});
        }
    }
    return enl;
}

SectorSpectrum sector_spectrum(const Eigen::MatrixXd &rho) {
    SectorSpectrum out;
    const auto     d = rho.rows();
    if(d == 0) return out;
    if(rho.cwiseAbs().maxCoeff() == 0.0) {
        out.values  = Eigen::VectorXd::Zero(d);
        out.vectors = Eigen::MatrixXd::Identity(d, d);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(rho));
    out.values  = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    for(Eigen::Index k = 0; k < d; ++k) {
        Eigen::Index imax;
        out.vectors.col(k).cwiseAbs().maxCoeff(&imax);
        if(out.vectors(imax, k) < 0) out.vectors.col(k) *= -1.0;
    }
    return out;
}

std::vector<KeptState> select_kept(const std::vector<SectorSpectrum> &spectra, int m) {
    std::vector<KeptState> all;
    for(int sec = 0; sec < static_cast<int>(spectra.size()); ++sec)
        for(int k = 0; k < spectra[sec].values.size(); ++k) all.push_back({sec, k, spectra[sec].values[k]});
    std::sort(all.begin(), all.end(), [](const KeptState &x, const KeptState &y) {
        if(x.weight != y.weight) return x.weight > y.weight;
        if(x.sector != y.sector) return x.sector < y.sector;
        return x.index < y.index;
    });
    if(static_cast<int>(all.size()) > m) all.resize(m);
    return all;
}

Block renormalize(const Enlarged &enl, const std::vector<SectorSpectrum> &spectra, const std::vector<KeptState> &kept,
                  int new_length) {
    const int        n = enl.layout.size();
    std::vector<int> count(n, 0);
    for(const auto &k : kept) ++count[k.sector];

    Block            blk;
    blk.length = new_length;
    std::vector<int> new_index(n, -1);
    for(int i = 0; i < n; ++i) {
        if(count[i] == 0) continue;
        new_index[i] = blk.layout.size();
        blk.layout.push(enl.layout.qn[i], count[i]);
    }

    std::vector<Eigen::MatrixXd> rot(n);
    for(int i = 0; i < n; ++i)
        if(count[i] > 0) rot[i] = spectra[i].vectors.leftCols(count[i]);

    const int nn = blk.layout.size();
    blk.ham.resize(nn);
    blk.sz_edge.resize(nn);
    blk.sz_total.resize(nn);
    blk.isometry = Eigen::MatrixXd::Zero(enl.layout.total, blk.layout.total);
    for(int i = 0; i < n; ++i) {
        const int j = new_index[i];
        if(j < 0) continue;
        const auto &o   = rot[i];
        blk.ham[j]      = symmetrized(o.transpose() * enl.ham[i] * o);
        blk.sz_total[j] = symmetrized(o.transpose() * enl.sz_total[i] * o);
        blk.sz_edge[j]  = symmetrized(o.transpose() * enl.sz_site[i].asDiagonal() * o);
        for(int p = 0; p < enl.layout.dim[i]; ++p) {
            const int row = enl.product_index[enl.layout.offset[i] + p];
            blk.isometry.row(row).segment(blk.layout.offset[j], count[i]) = o.row(p);
        }
    }

    // S+ of the new site, assembled per sector pair then rotated
    std::vector<OpBlock> sp;
    for(const auto &mv : enl.sp_site) {
        if(new_index[mv.from_sector] < 0 || new_index[mv.to_sector] < 0) continue;
        auto &m = op_block(sp, mv.from_sector, mv.to_sector, enl.layout.dim[mv.to_sector],
                           enl.layout.dim[mv.from_sector]);
        m.block(mv.to_offset, mv.from_offset, mv.len, mv.len).diagonal().array() += mv.coef;
    }
    for(auto &b : sp) {
        Eigen::MatrixXd r = rot[b.to].transpose() * b.mat * rot[b.from];
        blk.sp_edge.push_back({new_index[b.from], new_index[b.to], std::move(r)});
    }
    return blk;
}

Superblock::Superblock(const Enlarged &left, const Enlarged &right, double lambda, int target)
    : left_(left), right_(right) {
    const int                     nl = left.layout.size();
    const int                     nr = right.layout.size();
    std::vector<std::vector<int>> block_of(nl, std::vector<int>(nr, -1));
    for(int l = 0; l < nl; ++l) {
        const int r = right.layout.find(target - left.layout.qn[l]);
        if(r < 0) continue;
        PsiBlock b;
        b.left   = l;
        b.right  = r;
        b.offset = size_;
        b.szsz   = lambda * left.sz_site[l] * right.sz_site[r].transpose();
        size_ += static_cast<Eigen::Index>(left.layout.dim[l]) * right.layout.dim[r];
        block_of[l][r] = static_cast<int>(blocks_.size());
        blocks_.push_back(std::move(b));
    }

    for(const auto &ma : left.sp_site) {
        for(const auto &mb : right.sp_site) {
            const double c = 0.5 * ma.coef * mb.coef;
            // S+_alpha S-_beta
            int src = block_of[ma.from_sector][mb.to_sector];
            int dst = block_of[ma.to_sector][mb.from_sector];
            if(src >= 0 && dst >= 0)
                hops_.push_back({src, dst, ma.from_offset, mb.to_offset, ma.to_offset, mb.from_offset, ma.len, mb.len, c});
            // S-_alpha S+_beta
            src = block_of[ma.to_sector][mb.from_sector];
            dst = block_of[ma.from_sector][mb.to_sector];
            if(src >= 0 && dst >= 0)
                hops_.push_back({src, dst, ma.to_offset, mb.from_offset, ma.from_offset, mb.to_offset, ma.len, mb.len, c});
        }
    }
}

void Superblock::apply(const Eigen::VectorXd &in, Eigen::VectorXd &out) const {
    out.resize(size_);
    for(const auto &b : blocks_) {
        const int                         rows = left_.layout.dim[b.left];
        const int                         cols = right_.layout.dim[b.right];
        Eigen::Map<const Eigen::MatrixXd> x(in.data() + b.offset, rows, cols);
        Eigen::Map<Eigen::MatrixXd>       y(out.data() + b.offset, rows, cols);
        y.noalias() = left_.ham[b.left] * x;
        y.noalias() += x * right_.ham[b.right].transpose();
        y += b.szsz.cwiseProduct(x);
    }
    for(const auto &h : hops_) {
        const auto &bs = blocks_[h.src];
        const auto &bd = blocks_[h.dst];
        Eigen::Map<const Eigen::MatrixXd> x(in.data() + bs.offset, left_.layout.dim[bs.left], right_.layout.dim[bs.right]);
        Eigen::Map<Eigen::MatrixXd>       y(out.data() + bd.offset, left_.layout.dim[bd.left], right_.layout.dim[bd.right]);
        y.block(h.dst_row, h.dst_col, h.rows, h.cols) += h.coef * x.block(h.src_row, h.src_col, h.rows, h.cols);
    }
}

Eigen::VectorXd Superblock::from_product(const Eigen::MatrixXd &m) const {
    Eigen::VectorXd v(size_);
    for(const auto &b : blocks_) {
        const int rows = left_.layout.dim[b.left];
        const int cols = right_.layout.dim[b.right];
        const int lo   = left_.layout.offset[b.left];
        const int ro   = right_.layout.offset[b.right];
        for(int j = 0; j < cols; ++j) {
            const int pc = right_.product_index[ro + j];
            for(int i = 0; i < rows; ++i)
                v[b.offset + i + static_cast<Eigen::Index>(j) * rows] = m(left_.product_index[lo + i], pc);
        }
    }
    return v;
}

Eigen::MatrixXd Superblock::to_product(const Eigen::VectorXd &v) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(left_.layout.total, right_.layout.total);
    for(const auto &b : blocks_) {
        const int rows = left_.layout.dim[b.left];
        const int cols = right_.layout.dim[b.right];
        const int lo   = left_.layout.offset[b.left];
        const int ro   = right_.layout.offset[b.right];
        for(int j = 0; j < cols; ++j) {
            const int pc = right_.product_index[ro + j];
            for(int i = 0; i < rows; ++i)
                m(left_.product_index[lo + i], pc) = v[b.offset + i + static_cast<Eigen::Index>(j) * rows];
        }
    }
    return m;
}

std::vector<Eigen::MatrixXd> Superblock::left_density(const Eigen::VectorXd &v) const {
    std::vector<Eigen::MatrixXd> rho(left_.layout.size());
    for(int i = 0; i < left_.layout.size(); ++i) rho[i] = Eigen::MatrixXd::Zero(left_.layout.dim[i], left_.layout.dim[i]);
    for(const auto &b : blocks_) {
        Eigen::Map<const Eigen::MatrixXd> x(v.data() + b.offset, left_.layout.dim[b.left], right_.layout.dim[b.right]);
        rho[b.left].noalias() += x * x.transpose();
    }
    return rho;
}

std::vector<Eigen::MatrixXd> Superblock::right_density(const Eigen::VectorXd &v) const {
    std::vector<Eigen::MatrixXd> rho(right_.layout.size());
    for(int i = 0; i < right_.layout.size(); ++i)
        rho[i] = Eigen::MatrixXd::Zero(right_.layout.dim[i], right_.layout.dim[i]);
    for(const auto &b : blocks_) {
        Eigen::Map<const Eigen::MatrixXd> x(v.data() + b.offset, left_.layout.dim[b.left], right_.layout.dim[b.right]);
        rho[b.right].noalias() += x.transpose() * x;
    }
    return rho;
}

double Superblock::total_sz(const Eigen::VectorXd &v) const {
    double acc = 0.0;
    for(const auto &b : blocks_) {
        Eigen::Map<const Eigen::MatrixXd> x(v.data() + b.offset, left_.layout.dim[b.left], right_.layout.dim[b.right]);
        acc += x.cwiseProduct(left_.sz_total[b.left] * x).sum();
        acc += x.cwiseProduct(x * right_.sz_total[b.right].transpose()).sum();
    }
    return acc;
}

} // namespace spinfid::detail
