#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "trap/landscape.hpp"
#include "trap/random.hpp"
#include "trap/spectral.hpp"

using namespace trap;

namespace {

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Eigenvalues of the mu-symmetrized generator, -sqrt(x_i x_j)/N off the diagonal.
std::vector<long double> dense_oracle(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    MatL s(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            s(i, j) = i == j ? (n - 1) * static_cast<long double>(x[i]) / n
                             : -std::sqrt(static_cast<long double>(x[i]) * x[j]) / n;
    Eigen::SelfAdjointEigenSolver<MatL> es(s, Eigen::EigenvaluesOnly);
    std::vector<long double> ev(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(ev.begin(), ev.end());
    return ev;
}

double tau_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a.array() * b.array() / x.array()).sum();
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("secular function") {
    const Eigen::Vector2d x(0.25, 0.75);
    CHECK(std::abs(secular_phi<double>(x, 0.0)) == 0.0);
    CHECK(std::abs(secular_phi<double>(x, 0.5)) < 1e-15);
    CHECK_THROWS_AS(secular_phi<double>(x, 0.25), PoleProximity);

    const auto l = sample_landscape({0.5, 200, 3});
    const std::complex<double> lambda(0.5, 0.5);
    std::complex<long double> ref = 0;
    for (Eigen::Index j = 0; j < l.size(); ++j) {
        const std::complex<long double> lam(0.5L, 0.5L);
        ref += lam / (static_cast<long double>(l.rates()[j]) - lam);
    }
    const std::complex<double> got = secular_phi(l, lambda);
    CHECK(std::abs(std::complex<long double>(got) - ref) / std::abs(ref) <= 1e-13L);
}

TEST_CASE("two sites in closed form") {
    const auto s = compute_spectrum(Eigen::Vector2d(0.25, 0.75));
    CHECK(s.eigenvalues[0] == 0.0);
    CHECK(s.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.weights[0] == doctest::Approx(3.0 / 16).epsilon(1e-14));
    CHECK(s.weights[1] == doctest::Approx(1.0 / 16).epsilon(1e-14));
}

TEST_CASE("three sites against the dense oracle") {
    const Eigen::Vector3d x(0.2, 0.5, 0.9);
    const auto s = compute_spectrum(x);
    // Frozen from the symmetric eigensolver.
    CHECK(s.eigenvalues[1] == doctest::Approx(0.33057458).epsilon(1e-8));
    CHECK(s.eigenvalues[2] == doctest::Approx(0.73609208).epsilon(1e-8));
    const auto ev = dense_oracle(x);
    for (int k = 1; k < 3; ++k) CHECK(std::abs(s.eigenvalues[k] - ev[k]) <= 1e-14L);
}

TEST_CASE("random landscapes against the dense oracle") {
    Philox4x32 pick(2024, 0);
    double worst = 0.0;
    for (int r = 0; r < 100; ++r) {
        const std::size_t n = 2 + pick.below(63);
        const double alpha = 0.2 + 0.7 * pick.uniform();
        const auto l = sample_landscape({alpha, n, 500 + static_cast<std::uint64_t>(r)});
        const auto s = compute_spectrum(l);
        const auto ev = dense_oracle(l.rates());
        CHECK(std::abs(ev[0]) < 1e-15L);
        for (Eigen::Index k = 1; k < l.size(); ++k)
            worst = std::max(worst, static_cast<double>(std::abs((s.eigenvalues[k] - ev[k]) / ev[k])));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("interlacing and residuals") {
    const auto l = sample_landscape({0.3, 500, 8});
    const auto s = compute_spectrum(l);
    CHECK(s.eigenvalues[0] == 0.0);
    for (Eigen::Index k = 1; k < s.size(); ++k) {
        CHECK(l.rates()[k - 1] < s.eigenvalues[k]);
        CHECK(s.eigenvalues[k] < l.rates()[k]);
        CHECK(std::abs(secular_residual(s, k)) <= 1e-10 * s.size());
    }
}

TEST_CASE("eigenvectors") {
    const auto s2 = compute_spectrum(Eigen::Vector2d(0.25, 0.75));
    CHECK((eigenvector(s2, 0).array() == 1.0).all());
    const Eigen::VectorXd v = eigenvector(s2, 1);
    CHECK(v[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(3.0).epsilon(1e-14));

    const Eigen::Vector3d x(0.2, 0.5, 0.9);
    const auto s = compute_spectrum(x);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const Eigen::VectorXd a = eigenvector(s, i), b = eigenvector(s, j);
            const double scale = std::sqrt(tau_inner(x, a, a) * tau_inner(x, b, b));
            CHECK(std::abs(tau_inner(x, a, b)) <= 1e-10 * scale);
        }
    // The generator really acts as lambda on psi.
    const Eigen::MatrixXd L = build_generator<double>(x);
    for (int k = 0; k < 3; ++k) {
        const Eigen::VectorXd psi = eigenvector(s, k);
        CHECK((L * psi - s.eigenvalues[k] * psi).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("spectral distribution") {
    const auto s = compute_spectrum(sample_landscape({0.5, 10000, 4}));
    CHECK(spectral_cdf_distance(s, 0.5) <= 0.05);
    const auto one = compute_spectrum(Eigen::VectorXd::Constant(1, 0.4));
    const double d = spectral_cdf_distance(one, 0.5);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
}

TEST_CASE("count below a level without the spectrum") {
    const auto l = sample_landscape({0.5, 300, 12});
    const auto s = compute_spectrum(l);
    for (double a : {1e-4, 0.01, 0.3, 0.77, 2.0}) {
        const auto direct = std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(), [&](double v) { return v <= a; });
        CHECK(spectral_count_below(l.rates(), a) == direct);
    }
}

TEST_CASE("perturbation series") {
    const auto l = sample_landscape({0.5, 100, 1});
    const auto rep = perturbation_report(compute_spectrum(l));
    for (Eigen::Index k = 0; k < l.size(); ++k) CHECK(rep.first_order[k] == -l.rates()[k]);

    const Eigen::Vector4d x(0.2, 0.500, 0.501, 0.9);
    const auto near = perturbation_report(compute_spectrum(x));
    const auto& p = near.peaks[2];  // eigenvalue in (0.500, 0.501)
    CHECK(((p.first == 1 && p.second == 2) || (p.first == 2 && p.second == 1)));
    CHECK(p.first_sign == -p.second_sign);

    int satisfied = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
        satisfied += perturbation_report(compute_spectrum(sample_landscape({0.5, 100, seed}))).condition_satisfied;
    CHECK(satisfied == 0);
}

}
