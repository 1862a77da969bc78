#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spinfid {

/// Gaussian-line exponents, all fixed by the Luttinger parameter K.
struct ExponentSet {
    double K               = 1.0;
    double nu              = 1.0; ///< 1 / (2 - K)
    double delta_q         = 0.0; ///< 2K - 3
    double rho             = 0.0; ///< K / (2 - K)
    double energy_exponent = 0.0; ///< -(rho - 1) / nu = 2 (1 - K)
    double d               = 1.0;
    double z               = 1.0;
    double delta_v         = 1.0; ///< = K

    /// Lowest derivative of the energy density that is singular: floor(rho) + 2.
    int order = 2;
    /// rho is an integer within 1e-12, where the singularity turns logarithmic.
    bool marginal = false;
};

ExponentSet exponents_from_k(double K);

double k_from_nu(double nu);
double k_from_delta_q(double delta_q);
double k_from_energy_exponent(double energy_exponent);

struct FitParameter {
    std::string name;
    double      value = 0.0;
    double      sigma = 0.0; ///< one-sigma, from s^2 (J^T J)^-1
};

struct FitResult {
    std::string                model_name;
    std::vector<FitParameter>  parameters;
    double                     rss         = 0.0;
    int                        points_used = 0;
    std::optional<ExponentSet> exponents;

    [[nodiscard]] const FitParameter &parameter(const std::string &name) const;
};

struct SizePoint {
    double L = 0.0;
    double y = 0.0;
};

/// y = D_c + A L^(-1/nu), multi-start over nu.
FitResult fit_dc_nu(std::span<const SizePoint> points);

/// log y = log a + slope log L.
FitResult fit_powerlaw(std::span<const SizePoint> points);

/// y = S_inf - a L^(-b) with b > 0.
FitResult fit_saturation(std::span<const SizePoint> points);

/// y = (c/6) log2 L + const.
FitResult fit_central_charge(std::span<const SizePoint> points);

} // namespace spinfid
