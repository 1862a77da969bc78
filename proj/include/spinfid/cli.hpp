#pragma once

#include "spinfid/scan.hpp"
#include "spinfid/scaling.hpp"

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace spinfid::cli {

enum ExitCode : int {
    kOk            = 0,
    kCheckFailed   = 1,
    kConfig        = 2,
    kCapacity      = 3,
    kConvergence   = 4,
    kIo            = 5,
    kParse         = 6,
    kFit           = 7,
    kDomain        = 8,
};

int exit_code_for(const std::exception &e);

/// Applies `key = value` lines onto `config`. Blank lines and text after '#'
/// are ignored; unknown keys and malformed values raise ConfigError.
void apply_config_text(std::istream &in, ScanConfig &config);
void apply_config_file(const std::filesystem::path &path, ScanConfig &config);

enum class FitKind { dc_nu, powerlaw, saturation, central_charge };

FitKind    parse_fit_kind(const std::string &name);
Observable default_observable(FitKind kind);

struct FitReport {
    FitKind                 kind = FitKind::dc_nu;
    Observable              observable = Observable::susceptibility;
    std::vector<SeriesPeak> peaks;
    FitResult               result;
};

/// Reads scan CSVs, locates the per-L peaks and runs the requested fit.
FitReport run_fit(FitKind kind, const std::vector<std::filesystem::path> &csvs, Observable observable);

void print_fit_report(std::ostream &out, const FitReport &report);
void write_fit_csv(std::ostream &out, const FitReport &report);

/// Full command-line entry point; returns the process exit status.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace spinfid::cli
