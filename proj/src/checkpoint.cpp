#include "spinfid/checkpoint.hpp"

#include "spinfid/errors.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

namespace spinfid {

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'D', 'M', 'R'};
constexpr std::uint32_t       kMaxExtent = 1u << 24;

template <typename T> void put(std::ostream &out, T v) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U bits  = std::bit_cast<U>(v);
    std::array<char, sizeof(T)> buf{};
    for(std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    out.write(buf.data(), buf.size());
}

template <typename T> T get(std::istream &in) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    std::array<unsigned char, sizeof(T)> buf{};
    if(!in.read(reinterpret_cast<char *>(buf.data()), buf.size())) throw IoError("checkpoint truncated");
    U bits = 0;
    for(std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
    return std::bit_cast<T>(bits);
}

void put_array(std::ostream &out, const Eigen::MatrixXd &m) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
    for(Eigen::Index i = 0; i < m.rows(); ++i)
        for(Eigen::Index j = 0; j < m.cols(); ++j) put<double>(out, m(i, j));
}

Eigen::MatrixXd get_array(std::istream &in) {
    const auto rows = get<std::uint32_t>(in);
    const auto cols = get<std::uint32_t>(in);
    if(rows > kMaxExtent || cols > kMaxExtent || static_cast<std::uint64_t>(rows) * cols > kMaxExtent)
        throw IoError("checkpoint array too large");
    Eigen::MatrixXd m(rows, cols);
    for(std::uint32_t i = 0; i < rows; ++i)
        for(std::uint32_t j = 0; j < cols; ++j) m(i, j) = get<double>(in);
    return m;
}

void put_vector(std::ostream &out, const std::vector<double> &v) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(v.size()));
    put<std::uint32_t>(out, 1);
    for(double x : v) put<double>(out, x);
}

std::vector<double> get_vector(std::istream &in) {
    const Eigen::MatrixXd m = get_array(in);
    if(m.cols() != 1 && m.size() != 0) throw IoError("checkpoint vector has more than one column");
    return {m.data(), m.data() + m.size()};
}

std::vector<Eigen::MatrixXd> get_stack(std::istream &in) {
    const auto n = get<std::uint32_t>(in);
    if(n > kMaxExtent) throw IoError("checkpoint stack too long");
    std::vector<Eigen::MatrixXd> stack;
    stack.reserve(n);
    for(std::uint32_t i = 0; i < n; ++i) stack.push_back(get_array(in));
    return stack;
}

} // namespace

void write_checkpoint(std::ostream &out, const GroundStateRecord &rec) {
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kCheckpointVersion);

    put<double>(out, rec.params.lambda);
    put<double>(out, rec.params.d_aniso);
    put<double>(out, rec.params.h1);
    put<std::int32_t>(out, rec.params.length);

    put<std::int32_t>(out, rec.config.m);
    put<std::int32_t>(out, rec.config.sweeps);
    put<double>(out, rec.config.lanczos_tol);
    put<double>(out, rec.config.trunc_target);
    put<std::uint32_t>(out, rec.config.sz_sector.has_value() ? 1u : 0u);
    put<std::int32_t>(out, rec.config.sz_sector.value_or(0));

    put<double>(out, rec.energy);
    put<double>(out, rec.max_trunc_error);
    put<double>(out, rec.sz_expectation);

    const auto &psi = rec.wavefunction;
    put<std::int32_t>(out, psi.dim_system);
    put<std::int32_t>(out, psi.dim_environment);
    put_vector(out, {psi.data.data(), psi.data.data() + psi.data.size()});

    put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.stacks.system.size()));
    for(const auto &o : rec.stacks.system) put_array(out, o);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.stacks.environment.size()));
    for(const auto &o : rec.stacks.environment) put_array(out, o);

    put_vector(out, rec.rho_spectrum);
    put_vector(out, rec.sweep_energies);
    if(!out) throw IoError("checkpoint write failed");
}

GroundStateRecord read_checkpoint(std::istream &in) {
    std::array<char, 4> magic{};
    if(!in.read(magic.data(), magic.size()) || magic != kMagic) throw IoError("not a checkpoint file (bad magic)");
    const auto version = get<std::uint32_t>(in);
    if(version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));

    GroundStateRecord rec;
    rec.params.lambda  = get<double>(in);
    rec.params.d_aniso = get<double>(in);
    rec.params.h1      = get<double>(in);
    rec.params.length  = get<std::int32_t>(in);

    rec.config.m            = get<std::int32_t>(in);
    rec.config.sweeps       = get<std::int32_t>(in);
    rec.config.lanczos_tol  = get<double>(in);
    rec.config.trunc_target = get<double>(in);
    const auto has_sector   = get<std::uint32_t>(in);
    const auto sector       = get<std::int32_t>(in);
    if(has_sector != 0) rec.config.sz_sector = sector;

    rec.energy          = get<double>(in);
    rec.max_trunc_error = get<double>(in);
    rec.sz_expectation  = get<double>(in);

    auto &psi           = rec.wavefunction;
    psi.dim_system      = get<std::int32_t>(in);
    psi.dim_environment = get<std::int32_t>(in);
    const auto data     = get_vector(in);
    if(psi.dim_system < 0 || psi.dim_environment < 0 ||
       data.size() != static_cast<std::size_t>(psi.dim_system) * psi.dim_environment * kLocalDim * kLocalDim)
        throw IoError("checkpoint wavefunction size does not match its block dimensions");
    psi.data = Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));

    rec.stacks.system      = get_stack(in);
    rec.stacks.environment = get_stack(in);
    rec.rho_spectrum       = get_vector(in);
    rec.sweep_energies     = get_vector(in);

    try {
        rec.params.validate();
        rec.config.validate();
    } catch(const DomainError &e) {
        throw IoError(std::string("checkpoint holds invalid settings: ") + e.what());
    }
    return rec;
}

void save_checkpoint(const std::filesystem::path &path, const GroundStateRecord &rec) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if(!out) throw IoError("cannot open " + path.string() + " for writing");
    write_checkpoint(out, rec);
}

GroundStateRecord load_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if(!in) throw IoError("cannot open " + path.string());
    return read_checkpoint(in);
}

} // namespace spinfid
