#include <doctest.h>

#include <cmath>
#include <numbers>

#include "trap/quadrature.hpp"
#include "trap/spectral.hpp"

using namespace trap;

TEST_SUITE("quadrature") {

TEST_CASE("adaptive Gauss-Kronrod") {
    const auto r = integrate_adaptive<double>([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-13);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    const auto c = integrate_adaptive<cplx>([](double x) { return std::exp(cplx(0, x)); }, 0.0, std::numbers::pi, 1e-13);
    CHECK(std::abs(c.value - cplx(0, 2)) < 1e-12);
}

TEST_CASE("residues on a finite loop") {
    const ContourSpec around_zero = enclosing_contour(0.1, 0.0, 0.0, 1e-12);
    CHECK(std::abs(contour_integrate([](cplx l) { return 1.0 / l; }, around_zero).value - 1.0) < 1e-10);
    const ContourSpec unit = enclosing_contour(1.0, 0.0, 0.0, 1e-12);
    const auto r = contour_integrate([](cplx l) { return 1.0 / (l - 0.5); }, unit);
    CHECK(std::abs(r.value - 1.0) < 1e-10);
    CHECK(r.trace.size() >= 2);
    CHECK(std::abs(contour_integrate([](cplx l) { return std::exp(l); }, unit).value) < 1e-10);
}

TEST_CASE("residues on the stadium") {
    const ContourSpec st = truncated_contour(3.0, 0.0, 0.0, 1e-10);
    CHECK(std::abs(contour_integrate([](cplx l) { return 1.0 / (l - 2.0); }, st).value - 1.0) < 1e-9);
}

TEST_CASE("spectral sum equals the contour integral of 1/(phi (x_j - lambda))") {
    const Eigen::Vector3d x(0.2, 0.5, 0.9);
    const auto s = compute_spectrum(x);
    const Eigen::Index j = 1;
    auto g = [](cplx l) { return std::exp(-2.0 * l); };
    double left = 0.0;
    for (Eigen::Index k = 0; k < 3; ++k) left += s.weights[k] * g(s.eigenvalues[k]).real() / s.rate_gap(j, k);
    const ContourSpec c = enclosing_contour(0.9, 2.0, 0.0, 1e-12);
    const cplx right =
        contour_integrate([&](cplx l) { return g(l) / (secular_phi<double>(x, l) * (x[j] - l)); }, c).value;
    CHECK(std::abs(right - left) <= 1e-8);
}

TEST_CASE("contour spec rules") {
    const auto c = enclosing_contour(1.0, 100.0, 10.0);
    CHECK(c.left_margin == doctest::Approx(0.02));
    CHECK(enclosing_contour(1.0, 0.1, 0.0).left_margin == 0.5);
    ContourSpec bad;
    bad.left_margin = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("singular expectation") {
    SingularIntegralSpec spec;
    spec.alpha = 0.5;
    auto one = [](double) { return 1.0; };
    const cplx v = ex_integral(one, cplx(-1.0, 0.0), spec);
    // Brute force in u = x^alpha: 0.5 x^{-1/2} dx = du, integrand 1/(-1 - u^2).
    const int m = 200000;
    double fine = 0.0;
    for (int i = 0; i < m; ++i) {
        const double u0 = double(i) / m, u1 = double(i + 1) / m, um = 0.5 * (u0 + u1);
        auto f = [](double u) { return 1.0 / (-1.0 - u * u); };
        fine += (f(u0) + 4 * f(um) + f(u1)) / (6.0 * m);
    }
    CHECK(std::abs(v.real() - fine) <= 1e-9);
    CHECK(std::abs(v.real() + std::numbers::pi / 4) <= 1e-12);
    CHECK(std::abs(v.imag()) < 1e-15);

    CHECK(std::abs(ex_integral([](double) { return 0.0; }, cplx(-1.0, 0.3), spec)) == 0.0);
    const cplx lam(0.4, 0.2);
    auto h = [](double x) { return std::cos(3 * x); };
    CHECK(std::abs(ex_integral(h, std::conj(lam), spec) - std::conj(ex_integral(h, lam, spec))) < 1e-13);
    CHECK_THROWS_AS(ex_integral(one, cplx(0.5, 0.0), spec), std::domain_error);
}

TEST_CASE("singular expectation on the half-line") {
    SingularIntegralSpec spec;
    spec.alpha = 0.5;
    spec.upper = std::numeric_limits<double>::infinity();
    // int_0^inf 0.5 x^{-1/2}/(-1-x) dx = -pi/2.
    const cplx v = ex_integral([](double) { return 1.0; }, cplx(-1.0, 0.0), spec);
    CHECK(std::abs(v.real() + std::numbers::pi / 2) < 1e-10);
}

TEST_CASE("incomplete beta tail") {
    for (double a : {0.3, 0.5, 0.8})
        CHECK(incomplete_beta_tail(a, 0.0) == doctest::Approx(beta_reflection(a)).epsilon(1e-12));
    CHECK(incomplete_beta_tail(0.5, 0.5) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    CHECK(incomplete_beta_tail(0.5, 1.0) == 0.0);
}

}
