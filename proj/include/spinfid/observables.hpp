#pragma once

#include <span>
#include <vector>

namespace spinfid {

/// One row of a D-scan. Entropy is in bits.
struct ScanRecord {
    double lambda          = 0.0;
    int    length          = 0;
    double d_aniso         = 0.0;
    double delta           = 0.0;
    int    m               = 0;
    double energy          = 0.0;
    double e_density       = 0.0;
    double fidelity        = 1.0;
    double susceptibility  = 0.0;
    double entropy         = 0.0;
    double max_trunc_error = 0.0;
};

/// Records at fixed (lambda, L) over a uniform, strictly increasing D-grid.
struct ScanSeries {
    std::vector<ScanRecord> records;
    double                  grid_step = 0.0;

    /// Checks ordering and spacing (to 1e-12) and fills grid_step.
    void validate();
};

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
};

/// -sum p log2 p over entries with p > 1e-16.
double entanglement_entropy(std::span<const double> probabilities);

/// Central second difference of e_density at interior grid points.
std::vector<CurvePoint> second_derivative(const ScanSeries &series);

/// Vertex of the parabola through the discrete maximum and its neighbours.
CurvePoint peak_location(std::span<const CurvePoint> curve);

} // namespace spinfid
