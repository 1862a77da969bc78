#include "spinfid/observables.hpp"

#include "spinfid/errors.hpp"

#include <cmath>
#include <string>

namespace spinfid {

void ScanSeries::validate() {
    if(records.size() < 2) {
        grid_step = 0.0;
        return;
    }
    const double step = records[1].d_aniso - records[0].d_aniso;
    if(!(step > 0.0)) throw DomainError("scan D values must be strictly increasing");
    for(std::size_t i = 1; i < records.size(); ++i) {
        const double h = records[i].d_aniso - records[i - 1].d_aniso;
        if(!(h > 0.0)) throw DomainError("scan D values must be strictly increasing");
        if(std::abs(h - step) > 1e-12)
            throw DomainError("scan D grid is not uniform at D = " + std::to_string(records[i].d_aniso));
    }
    grid_step = step;
}

double entanglement_entropy(std::span<const double> probabilities) {
    double s = 0.0;
    for(double p : probabilities) {
        if(p < -1e-10) throw DomainError("negative density-matrix eigenvalue " + std::to_string(p));
        if(p > 1e-16) s -= p * std::log2(p);
    }
    return s;
}

std::vector<CurvePoint> second_derivative(const ScanSeries &series) {
    const auto &r = series.records;
    if(r.size() < 3) throw DomainError("second derivative needs at least 3 grid points");
    if(!(series.grid_step > 0.0)) throw DomainError("series has no grid step; call validate() first");
    const double h2 = series.grid_step * series.grid_step;
    std::vector<CurvePoint> out;
    out.reserve(r.size() - 2);
    for(std::size_t i = 1; i + 1 < r.size(); ++i)
        out.push_back({r[i].d_aniso, (r[i - 1].e_density - 2.0 * r[i].e_density + r[i + 1].e_density) / h2});
    return out;
}

CurvePoint peak_location(std::span<const CurvePoint> curve) {
    if(curve.size() < 3) throw DomainError("peak location needs at least 3 points");
    std::size_t k = 0;
    for(std::size_t i = 1; i < curve.size(); ++i)
        if(curve[i].y > curve[k].y) k = i;
    if(k == 0 || k + 1 == curve.size())
        throw BoundaryError("maximum at the window edge x = " + std::to_string(curve[k].x) + "; widen the scan");

    const double x0 = curve[k - 1].x, x1 = curve[k].x, x2 = curve[k + 1].x;
    const double y0 = curve[k - 1].y, y1 = curve[k].y, y2 = curve[k + 1].y;
    // Newton form: y = y0 + d1 (x - x0) + d2 (x - x0)(x - x1)
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double d2  = (d12 - d01) / (x2 - x0);
    if(!(d2 < 0.0)) return curve[k];
    const double xv = 0.5 * (x0 + x1) - d01 / (2.0 * d2);
    const double yv = y0 + d01 * (xv - x0) + d2 * (xv - x0) * (xv - x1);
    return {xv, yv};
}

} // namespace spinfid
