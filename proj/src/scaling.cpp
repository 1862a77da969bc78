#include "spinfid/scaling.hpp"

#include "spinfid/errors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <unsupported/Eigen/LevenbergMarquardt>

namespace spinfid {

ExponentSet exponents_from_k(double K) {
    if(!(K > 0.0 && K < 2.0)) throw DomainError("Luttinger parameter K = " + std::to_string(K) + " outside (0, 2)");
    ExponentSet e;
    e.K               = K;
    e.nu              = 1.0 / (2.0 - K);
    e.delta_q         = 2.0 * K - 3.0;
    e.rho             = K / (2.0 - K);
    e.energy_exponent = 2.0 * (1.0 - K);
    e.delta_v         = K;
    e.order           = static_cast<int>(std::floor(e.rho)) + 2;
    e.marginal        = std::abs(e.rho - std::round(e.rho)) < 1e-12;
    return e;
}

double k_from_nu(double nu) {
    if(!(nu > 0.5)) throw DomainError("nu = " + std::to_string(nu) + " gives K outside (0, 2)");
    return 2.0 - 1.0 / nu;
}

double k_from_delta_q(double delta_q) {
    const double K = 0.5 * (delta_q + 3.0);
    if(!(K > 0.0 && K < 2.0)) throw DomainError("Delta_Q = " + std::to_string(delta_q) + " gives K outside (0, 2)");
    return K;
}

double k_from_energy_exponent(double energy_exponent) {
    const double K = 1.0 - 0.5 * energy_exponent;
    if(!(K > 0.0 && K < 2.0))
        throw DomainError("energy exponent " + std::to_string(energy_exponent) + " gives K outside (0, 2)");
    return K;
}

const FitParameter &FitResult::parameter(const std::string &name) const {
    for(const auto &p : parameters)
        if(p.name == name) return p;
    throw DomainError("fit result has no parameter '" + name + "'");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Linear {
    double intercept = 0.0, slope = 0.0;
    double sigma_intercept = kNaN, sigma_slope = kNaN;
    double rss = 0.0;
};

Linear linear_fit(const Eigen::VectorXd &x, const Eigen::VectorXd &y) {
    const auto      n = x.size();
    Eigen::MatrixXd A(n, 2);
    A.col(0).setOnes();
    A.col(1) = x;
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    Linear                r;
    r.intercept = c(0);
    r.slope     = c(1);
    r.rss       = (A * c - y).squaredNorm();
    if(n > 2) {
        const Eigen::Matrix2d cov = (A.transpose() * A).inverse() * (r.rss / static_cast<double>(n - 2));
        r.sigma_intercept         = std::sqrt(cov(0, 0));
        r.sigma_slope             = std::sqrt(cov(1, 1));
    }
    return r;
}

/// Model y(L; p) with analytic gradient in the natural parameters p.
struct Model {
    std::function<double(double, const Eigen::VectorXd &)>          value;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd &)> gradient;
};

/// Internal parameters q map to natural ones through p = q except for the
/// indices listed in `log_params`, where p = exp(q) keeps them positive.
struct Functor : Eigen::DenseFunctor<double> {
    Functor(const Model &model, const Eigen::VectorXd &L, const Eigen::VectorXd &y, std::vector<int> log_params)
        : Eigen::DenseFunctor<double>(3, static_cast<int>(L.size())), model_(model), L_(L), y_(y),
          log_(std::move(log_params)) {}

    [[nodiscard]] Eigen::VectorXd natural(const Eigen::VectorXd &q) const {
        Eigen::VectorXd p = q;
        for(int i : log_) p(i) = std::exp(q(i));
        return p;
    }

    int operator()(const Eigen::VectorXd &q, Eigen::VectorXd &fvec) const {
        const Eigen::VectorXd p = natural(q);
        for(Eigen::Index i = 0; i < L_.size(); ++i) fvec(i) = model_.value(L_(i), p) - y_(i);
        return 0;
    }

    int df(const Eigen::VectorXd &q, Eigen::MatrixXd &fjac) const {
        const Eigen::VectorXd p = natural(q);
        for(Eigen::Index i = 0; i < L_.size(); ++i) {
            Eigen::VectorXd g = model_.gradient(L_(i), p);
            for(int k : log_) g(k) *= p(k);
            fjac.row(i) = g.transpose();
        }
        return 0;
    }

    const Model     &model_;
    Eigen::VectorXd  L_, y_;
    std::vector<int> log_;
};

struct NonlinearFit {
    Eigen::VectorXd params;
    Eigen::VectorXd sigma;
    double          rss = std::numeric_limits<double>::infinity();
};

NonlinearFit refine(const Model &model, const Eigen::VectorXd &L, const Eigen::VectorXd &y, Eigen::VectorXd start,
                    const std::vector<int> &log_params) {
    Functor         f(model, L, y, log_params);
    Eigen::VectorXd q = std::move(start);
    for(int i : log_params) q(i) = std::log(q(i));

    Eigen::LevenbergMarquardt<Functor> lm(f);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    lm.setGtol(0.0);
    lm.setMaxfev(4000);
    lm.minimize(q);

    NonlinearFit out;
    out.params = f.natural(q);
    Eigen::VectorXd r(L.size());
    f(q, r);
    out.rss = r.squaredNorm();
    if(!out.params.allFinite() || !std::isfinite(out.rss)) out.rss = std::numeric_limits<double>::infinity();

    const auto      n = L.size();
    Eigen::MatrixXd J(n, 3);
    for(Eigen::Index i = 0; i < n; ++i) J.row(i) = model.gradient(L(i), out.params).transpose();
    out.sigma = Eigen::VectorXd::Constant(3, kNaN);
    if(n > 3) {
        const Eigen::Matrix3d                      jtj = J.transpose() * J;
        Eigen::FullPivLU<Eigen::Matrix3d>          lu(jtj);
        if(lu.isInvertible()) {
            const Eigen::Matrix3d cov = lu.inverse() * (out.rss / static_cast<double>(n - 3));
            for(int k = 0; k < 3; ++k) out.sigma(k) = std::sqrt(std::max(cov(k, k), 0.0));
        }
    }
    return out;
}

void split(std::span<const SizePoint> points, Eigen::VectorXd &L, Eigen::VectorXd &y) {
    std::vector<SizePoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](const SizePoint &a, const SizePoint &b) {
        return a.L < b.L || (a.L == b.L && a.y < b.y);
    });
    L.resize(static_cast<Eigen::Index>(sorted.size()));
    y.resize(L.size());
    for(std::size_t i = 0; i < sorted.size(); ++i) {
        if(!(sorted[i].L > 0.0) || !std::isfinite(sorted[i].y))
            throw DomainError("fit points need L > 0 and finite values");
        L(static_cast<Eigen::Index>(i)) = sorted[i].L;
        y(static_cast<Eigen::Index>(i)) = sorted[i].y;
    }
}

int distinct_sizes(const Eigen::VectorXd &L) { return static_cast<int>(std::set<double>(L.begin(), L.end()).size()); }

FitResult make_result(std::string name, const std::vector<std::string> &names, const Eigen::VectorXd &p,
                      const Eigen::VectorXd &sigma, double rss, Eigen::Index n) {
    FitResult r;
    r.model_name = std::move(name);
    for(std::size_t k = 0; k < names.size(); ++k)
        r.parameters.push_back({names[k], p(static_cast<Eigen::Index>(k)), sigma(static_cast<Eigen::Index>(k))});
    r.rss         = std::max(rss, 0.0);
    r.points_used = static_cast<int>(n);
    return r;
}

} // namespace

FitResult fit_dc_nu(std::span<const SizePoint> points) {
    Eigen::VectorXd L, y;
    split(points, L, y);
    if(distinct_sizes(L) < 4) throw DomainError("fit_dc_nu needs at least 4 distinct sizes");

    // p = (D_c, A, nu)
    const Model model{
        [](double l, const Eigen::VectorXd &p) { return p(0) + p(1) * std::pow(l, -1.0 / p(2)); },
        [](double l, const Eigen::VectorXd &p) {
            const double t = std::pow(l, -1.0 / p(2));
            return Eigen::Vector3d(1.0, t, p(1) * t * std::log(l) / (p(2) * p(2))).eval();
        }};

    NonlinearFit best;
    for(double nu0 : {0.5, 0.75, 1.0, 1.5, 2.0}) {
        const Linear    lin = linear_fit(L.array().pow(-1.0 / nu0).matrix(), y);
        Eigen::VectorXd start(3);
        start << lin.intercept, lin.slope, nu0;
        NonlinearFit fit = refine(model, L, y, start, {});
        if(!(fit.params(2) > 0.0)) continue;
        if(fit.rss < best.rss) best = fit;
    }
    if(!std::isfinite(best.rss)) throw FitError("fit_dc_nu did not converge from any start");

    FitResult r = make_result("dc-nu", {"D_c", "A", "nu"}, best.params, best.sigma, best.rss, L.size());
    if(best.params(2) > 0.5) r.exponents = exponents_from_k(k_from_nu(best.params(2)));
    return r;
}

FitResult fit_powerlaw(std::span<const SizePoint> points) {
    if(points.size() < 3) throw DomainError("fit_powerlaw needs at least 3 points");
    Eigen::VectorXd L, y;
    split(points, L, y);
    if((y.array() <= 0.0).any()) throw DomainError("fit_powerlaw needs positive values");
    const Linear lin = linear_fit(L.array().log().matrix(), y.array().log().matrix());
    Eigen::VectorXd p(2), s(2);
    p << std::exp(lin.intercept), lin.slope;
    s << std::exp(lin.intercept) * lin.sigma_intercept, lin.sigma_slope;
    return make_result("powerlaw", {"amplitude", "slope"}, p, s, lin.rss, L.size());
}

FitResult fit_saturation(std::span<const SizePoint> points) {
    Eigen::VectorXd L, y;
    split(points, L, y);
    if(L.size() < 4) throw DomainError("fit_saturation needs at least 4 points");

    // p = (S_inf, a, b)
    const Model model{
        [](double l, const Eigen::VectorXd &p) { return p(0) - p(1) * std::pow(l, -p(2)); },
        [](double l, const Eigen::VectorXd &p) {
            const double t = std::pow(l, -p(2));
            return Eigen::Vector3d(1.0, -t, p(1) * t * std::log(l)).eval();
        }};

    NonlinearFit best;
    for(double b0 : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
        const Linear    lin = linear_fit(L.array().pow(-b0).matrix(), y);
        Eigen::VectorXd start(3);
        start << lin.intercept, -lin.slope, b0;
        NonlinearFit fit = refine(model, L, y, start, {2});
        if(fit.rss < best.rss) best = fit;
    }
    if(!std::isfinite(best.rss) || !(best.params(2) > 0.0))
        throw FitError("fit_saturation did not converge from any start");
    return make_result("saturation", {"S_inf", "a", "b"}, best.params, best.sigma, best.rss, L.size());
}

FitResult fit_central_charge(std::span<const SizePoint> points) {
    if(points.size() < 3) throw DomainError("fit_central_charge needs at least 3 points");
    Eigen::VectorXd L, y;
    split(points, L, y);
    const Linear lin = linear_fit(L.array().log().matrix() / std::log(2.0), y);
    Eigen::VectorXd p(2), s(2);
    p << 6.0 * lin.slope, lin.intercept;
    s << 6.0 * lin.sigma_slope, lin.sigma_intercept;
    return make_result("central-charge", {"c", "offset"}, p, s, lin.rss, L.size());
}

} // namespace spinfid
