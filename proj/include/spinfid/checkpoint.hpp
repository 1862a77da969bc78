#pragma once

// Portable binary layout of a GroundStateRecord. All integers are
// little-endian u32/i32, all reals little-endian IEEE-754 doubles.
//
//   "FDMR"  u32 version
//   params: f64 lambda, f64 d_aniso, f64 h1, i32 length
//   config: i32 m, i32 sweeps, f64 lanczos_tol, f64 trunc_target,
//           u32 has_sector, i32 sector
//   f64 energy, f64 max_trunc_error, f64 sz_expectation
//   wavefunction: i32 dim_system, i32 dim_environment, array
//   u32 n_system,      n_system      x array
//   u32 n_environment, n_environment x array
//   rho_spectrum: array
//   sweep_energies: array
//
// An array is u32 rows, u32 cols, then rows * cols f64 in row-major order.

#include "spinfid/engine.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace spinfid {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream &out, const GroundStateRecord &rec);
GroundStateRecord read_checkpoint(std::istream &in);

void              save_checkpoint(const std::filesystem::path &path, const GroundStateRecord &rec);
GroundStateRecord load_checkpoint(const std::filesystem::path &path);

} // namespace spinfid
