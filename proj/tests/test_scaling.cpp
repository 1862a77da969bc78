#include "spinfid/errors.hpp"
#include "spinfid/scaling.hpp"

#include <cmath>
#include <functional>
#include <gtest/gtest.h>

using namespace spinfid;

namespace {

std::vector<SizePoint> sample(const std::vector<double> &Ls, const std::function<double(double)> &f) {
    std::vector<SizePoint> pts;
    for(double L : Ls) pts.push_back({L, f(L)});
    return pts;
}

const std::vector<double> kSizes = {40, 80, 120, 160, 200, 240, 280, 320, 360, 400};

} // namespace

TEST(Exponents, PublishedValues) {
    const auto a = exponents_from_k(0.85);
    EXPECT_NEAR(a.nu, 0.8696, 1e-4);
    EXPECT_NEAR(a.delta_q, -1.3, 1e-12);
    EXPECT_EQ(a.order, 2);

    EXPECT_NEAR(exponents_from_k(1.5).delta_q, 0.0, 1e-15);

    const auto c = exponents_from_k(1.580);
    EXPECT_NEAR(c.rho, 3.762, 1e-3);
    EXPECT_GE(c.order, 5);

    const auto b = exponents_from_k(1.328);
    EXPECT_EQ(b.order, 3);
    EXPECT_EQ(a.d, 1.0);
    EXPECT_EQ(a.z, 1.0);
    EXPECT_EQ(a.delta_v, 0.85);
}

TEST(Exponents, ClassificationBoundaries) {
    EXPECT_TRUE(exponents_from_k(1.0).marginal); // rho = 1
    EXPECT_EQ(exponents_from_k(1.0).order, 3);
    EXPECT_EQ(exponents_from_k(0.5).order, 2);    // rho = 1/3
    EXPECT_EQ(exponents_from_k(1.45).order, 4);   // rho ~ 2.64
    EXPECT_FALSE(exponents_from_k(1.45).marginal);
}

TEST(Exponents, DomainErrors) {
    EXPECT_THROW(exponents_from_k(0.0), DomainError);
    EXPECT_THROW(exponents_from_k(2.0), DomainError);
    EXPECT_THROW(exponents_from_k(-1.0), DomainError);
    EXPECT_THROW(exponents_from_k(std::nan("")), DomainError);
    EXPECT_THROW(k_from_nu(0.4), DomainError);
    EXPECT_THROW(k_from_delta_q(1.5), DomainError);
    EXPECT_THROW(k_from_energy_exponent(2.5), DomainError);
}

TEST(Exponents, Inversions) {
    EXPECT_NEAR(k_from_nu(0.79), 2.0 - 1.0 / 0.79, 1e-15);
    EXPECT_NEAR(k_from_delta_q(-1.28), 0.86, 1e-15);
    EXPECT_NEAR(k_from_energy_exponent(0.40), 0.8, 1e-15);
}

TEST(FitDcNu, RecoversGenerator) {
    const auto pts = sample(kSizes, [](double L) { return 2.3 + 0.5 * std::pow(L, -1.0 / 0.8); });
    const auto r   = fit_dc_nu(pts);
    EXPECT_NEAR(r.parameter("D_c").value, 2.3, 1e-6);
    EXPECT_NEAR(r.parameter("nu").value, 0.8, 1e-6);
    EXPECT_NEAR(r.parameter("A").value, 0.5, 1e-6);
    EXPECT_LT(r.rss, 1e-20);
    EXPECT_EQ(r.points_used, 10);
    ASSERT_TRUE(r.exponents.has_value());
    EXPECT_NEAR(r.exponents->K, 0.75, 1e-6);
}

TEST(FitDcNu, NegativeAmplitudeAndSmallSets) {
    const auto pts = sample({32, 64, 96, 128}, [](double L) { return 0.63 - 1.2 * std::pow(L, -1.0 / 1.51); });
    const auto r   = fit_dc_nu(pts);
    EXPECT_NEAR(r.parameter("D_c").value, 0.63, 1e-6);
    EXPECT_NEAR(r.parameter("nu").value, 1.51, 1e-6);
    EXPECT_THROW(fit_dc_nu(sample({32, 64, 96}, [](double) { return 1.0; })), DomainError);
    EXPECT_THROW(fit_dc_nu(sample({32, 32, 64, 64}, [](double) { return 1.0; })), DomainError);
}

TEST(FitPowerlaw, ExactLogLinear) {
    const auto r = fit_powerlaw(sample({32, 64, 96, 128}, [](double L) { return 2.0 * std::pow(L, 1.28); }));
    EXPECT_NEAR(r.parameter("slope").value, 1.28, 1e-10);
    EXPECT_NEAR(r.parameter("amplitude").value, 2.0, 1e-9);
    EXPECT_THROW(fit_powerlaw(sample({32, 64, 96}, [](double L) { return 50.0 - L; })), DomainError);
    EXPECT_THROW(fit_powerlaw(sample({32, 64}, [](double L) { return L; })), DomainError);
}

TEST(FitSaturation, RecoversGenerator) {
    const auto pts = sample(kSizes, [](double L) { return 0.073 - 0.23 * std::pow(L, -0.75); });
    const auto r   = fit_saturation(pts);
    EXPECT_NEAR(r.parameter("S_inf").value, 0.073, 1e-6);
    EXPECT_NEAR(r.parameter("a").value, 0.23, 1e-6);
    EXPECT_NEAR(r.parameter("b").value, 0.75, 1e-6);
}

TEST(FitSaturation, ConstantSeries) {
    const auto r = fit_saturation(sample({32, 64, 96, 128}, [](double) { return 0.5; }));
    EXPECT_NEAR(r.parameter("S_inf").value, 0.5, 1e-9);
    EXPECT_NEAR(r.parameter("a").value, 0.0, 1e-9);
    EXPECT_GT(r.parameter("b").value, 0.0);
    EXPECT_THROW(fit_saturation(sample({32, 64, 96}, [](double) { return 0.5; })), DomainError);
}

TEST(FitCentralCharge, Examples) {
    const auto r = fit_central_charge(sample({32, 64, 96, 128}, [](double L) { return std::log2(L) / 6.0 + 0.4; }));
    EXPECT_NEAR(r.parameter("c").value, 1.0, 1e-10);
    EXPECT_NEAR(r.parameter("offset").value, 0.4, 1e-10);
    const auto flat = fit_central_charge(sample({32, 64, 96}, [](double) { return 0.7; }));
    EXPECT_NEAR(flat.parameter("c").value, 0.0, 1e-12);
    EXPECT_THROW(fit_central_charge(sample({32, 64}, [](double) { return 0.7; })), DomainError);
}

TEST(FitResult, UnknownParameter) {
    const auto r = fit_central_charge(sample({32, 64, 96}, [](double) { return 0.7; }));
    EXPECT_THROW((void)r.parameter("nu"), DomainError);
}
