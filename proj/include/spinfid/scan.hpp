#pragma once

#include "spinfid/engine.hpp"
#include "spinfid/observables.hpp"
#include "spinfid/scaling.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spinfid {

struct ScanConfig {
    double             lambda      = 1.0;
    double             d_min       = 0.0;
    double             d_max       = 1.0;
    double             d_step      = 0.01;
    double             delta       = 1e-3;
    std::vector<int>   lengths     = {32};
    int                m           = 64;
    int                sweeps      = 5;
    double             lanczos_tol = 1e-10;
    double             h1          = -1.0;
    std::optional<int> sz_sector;
    std::string        output; ///< empty means standard output
    std::string        checkpoint_dir;
    int                workers = 1;

    void validate() const;

    /// d_min + i * d_step up to d_max (inclusive within 1e-9 of a step).
    [[nodiscard]] std::vector<double> d_grid() const;
    [[nodiscard]] DmrgConfig          dmrg() const;
};

inline constexpr std::string_view kCsvHeader =
    "lambda,L,D,delta,m,energy,e_density,fidelity,susceptibility,entropy,max_trunc_error";

struct PointResult {
    ScanRecord  row;
    std::string error; ///< empty on success; the row then holds NaN physics columns
};

/// Runs DMRG at D and D + delta with identical settings and fills one row.
/// Engine errors are caught and reported through PointResult::error.
PointResult scan_point(const ScanConfig &config, int length, double d);

/// Scans every (L, D) grid point with config.workers threads. Rows reach
/// `csv` in grid order (L outer, D inner) whatever order they finish in.
std::vector<PointResult> run_scan(const ScanConfig &config, std::ostream &csv, std::ostream *log = nullptr);

std::string format_csv_row(const ScanRecord &row);

std::vector<ScanRecord> read_scan_csv(std::istream &in);
std::vector<ScanRecord> read_scan_csv(const std::filesystem::path &path);

/// Splits rows into validated series, ordered by (lambda, L).
std::vector<ScanSeries> group_series(const std::vector<ScanRecord> &rows);

enum class Observable { susceptibility, entropy, energy_curvature };

Observable  parse_observable(std::string_view name);
std::string observable_name(Observable obs);

/// The observable along D. energy_curvature is -d2e/dD2 at interior points.
/// Rows with NaN values are skipped, except that the curvature needs an
/// unbroken grid.
std::vector<CurvePoint> observable_curve(const ScanSeries &series, Observable obs);

struct SeriesPeak {
    double     lambda = 0.0;
    int        length = 0;
    CurvePoint peak;
};

std::vector<SeriesPeak> series_peaks(const std::vector<ScanSeries> &series, Observable obs);

struct EdCheckRow {
    int    length = 0;
    double d      = 0.0;
    double energy_delta  = 0.0;
    double overlap_delta = 0.0;
    double entropy_delta = 0.0;
    bool   ok            = false;
};

struct EdTolerance {
    double energy  = 1e-9;
    double overlap = 1e-8;
    double entropy = 1e-6;
};

/// DMRG against exact diagonalization on the configured grid. Lengths up to
/// 10 run with the exact number of kept states; L = 12 uses config.m.
std::vector<EdCheckRow> run_ed_check(const ScanConfig &config, const EdTolerance &tol = {});

} // namespace spinfid
