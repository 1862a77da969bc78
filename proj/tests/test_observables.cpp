#include "spinfid/errors.hpp"
#include "spinfid/observables.hpp"

#include <gtest/gtest.h>

using namespace spinfid;

namespace {

ScanSeries series_of(double d0, double h, int n, double (*e)(double)) {
    ScanSeries s;
    for(int i = 0; i < n; ++i) {
        ScanRecord r;
        r.d_aniso   = d0 + i * h;
        r.e_density = e(r.d_aniso);
        s.records.push_back(r);
    }
    s.validate();
    return s;
}

} // namespace

TEST(Entropy, Examples) {
    EXPECT_EQ(entanglement_entropy(std::vector<double>{1.0}), 0.0);
    EXPECT_NEAR(entanglement_entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 2.0, 1e-15);
    EXPECT_NEAR(entanglement_entropy(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}), 1.584962500721156, 1e-12);
    EXPECT_EQ(entanglement_entropy(std::vector<double>{1.0, 1e-17, 0.0, -1e-12}), 0.0);
    EXPECT_THROW(entanglement_entropy(std::vector<double>{1.0, -1e-9}), DomainError);
}

TEST(SecondDerivative, ExactOnLowOrderPolynomials) {
    const auto quad = second_derivative(series_of(0.3, 0.01, 9, [](double d) { return d * d; }));
    ASSERT_EQ(quad.size(), 7u);
    for(const auto &p : quad) EXPECT_NEAR(p.y, 2.0, 1e-8);
    EXPECT_NEAR(quad.front().x, 0.31, 1e-15);

    const auto flat = second_derivative(series_of(0.0, 0.1, 5, [](double) { return -1.25; }));
    for(const auto &p : flat) EXPECT_EQ(p.y, 0.0);

    const auto cubic = second_derivative(series_of(-1.0, 0.25, 9, [](double d) { return d * d * d - d; }));
    for(const auto &p : cubic) EXPECT_NEAR(p.y, 6.0 * p.x, 1e-12);
}

TEST(SecondDerivative, Errors) {
    EXPECT_THROW(second_derivative(series_of(0.0, 0.1, 2, [](double d) { return d; })), DomainError);
    ScanSeries s;
    s.records.resize(3);
    EXPECT_THROW(second_derivative(s), DomainError);
}

TEST(ScanSeries, ValidateChecksGrid) {
    ScanSeries s;
    for(double d : {0.1, 0.2, 0.3}) {
        ScanRecord r;
        r.d_aniso = d;
        s.records.push_back(r);
    }
    s.validate();
    EXPECT_NEAR(s.grid_step, 0.1, 1e-15);
    s.records[2].d_aniso = 0.35;
    EXPECT_THROW(s.validate(), DomainError);
    s.records[2].d_aniso = 0.2;
    EXPECT_THROW(s.validate(), DomainError);
}

TEST(PeakLocation, Examples) {
    const std::vector<CurvePoint> tri = {{0, 0}, {1, 1}, {2, 0}};
    const auto                    p   = peak_location(tri);
    EXPECT_NEAR(p.x, 1.0, 1e-15);
    EXPECT_NEAR(p.y, 1.0, 1e-15);

    std::vector<CurvePoint> parabola;
    for(int i = 0; i < 11; ++i) {
        const double d = 0.5 + 0.03 * i;
        parabola.push_back({d, -(d - 0.7) * (d - 0.7)});
    }
    const auto q = peak_location(parabola);
    EXPECT_NEAR(q.x, 0.7, 1e-12);
    EXPECT_NEAR(q.y, 0.0, 1e-12);
}

TEST(PeakLocation, EdgeMaximumIsBoundaryError) {
    EXPECT_THROW(peak_location(std::vector<CurvePoint>{{0, 3}, {1, 2}, {2, 1}}), BoundaryError);
    EXPECT_THROW(peak_location(std::vector<CurvePoint>{{0, 1}, {1, 2}, {2, 3}}), BoundaryError);
    EXPECT_THROW(peak_location(std::vector<CurvePoint>{{0, 1}, {1, 2}}), DomainError);
}
