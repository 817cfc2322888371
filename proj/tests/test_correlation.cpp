#include <doctest.h>

#include <cmath>
#include <numbers>

#include "trap/correlation.hpp"
#include "trap/landscape.hpp"
#include "trap/montecarlo.hpp"
#include "trap/resolvent.hpp"

using namespace trap;

namespace {

// Pi from the uniformization oracle: sum_j nu_{t_w}(j) exp(-c x_j t).
double pi_oracle(const Eigen::VectorXd& x, const CorrelationQuery& q) {
    const Eigen::VectorXd nu = uniformization_oracle(ReversibleChain::trap_model(x), q.t_w);
    const double c = jump_rate_factor(x.size());
    return (nu.array() * (-c * q.t * x.array()).exp()).sum();
}

}  // namespace

TEST_SUITE("correlation") {

TEST_CASE("state distribution") {
    const auto l = sample_landscape({0.5, 30, 2});
    const auto s = compute_spectrum(l);
    const auto d0 = state_distribution_spectral(s, 0.0);
    CHECK((d0.probabilities.array() - 1.0 / 30).abs().maxCoeff() < 1e-14);

    const auto two = compute_spectrum(Eigen::Vector2d(0.25, 0.75));
    const auto eq = state_distribution_spectral(two, 1e3);
    CHECK(std::abs(eq.probabilities[0] - 0.75) <= 1e-10);
    CHECK(std::abs(eq.probabilities[1] - 0.25) <= 1e-10);

    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto ls = sample_landscape({0.6, 10 + 10 * seed, seed});
        const auto ss = compute_spectrum(ls);
        for (double t : {0.5, 5.0, 40.0}) {
            const Eigen::VectorXd ref = uniformization_oracle(ReversibleChain::trap_model(ls.rates()), t);
            CHECK((state_distribution_spectral(ss, t).probabilities - ref).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("Pi from the spectrum") {
    const Eigen::Vector2d x(0.25, 0.75);
    const auto s = compute_spectrum(x);
    CHECK(pi_spectral(s, {0.0, 3.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pi_spectral(s, {1.0, 0.0}) == doctest::Approx((std::exp(-0.125) + std::exp(-0.375)) / 2).epsilon(1e-14));

    const auto l = sample_landscape({0.5, 40, 77});
    const auto sl = compute_spectrum(l);
    for (double t : {1.0, 20.0})
        for (double tw : {0.0, 3.0, 50.0}) {
            const CorrelationQuery q{t, tw};
            CHECK(std::abs(pi_spectral(sl, q) - pi_oracle(l.rates(), q)) <= 1e-8);
        }
    const std::vector<double> ts{1.0, 20.0};
    const Eigen::VectorXd curve = pi_spectral_curve(sl, 3.0, ts);
    CHECK(curve[1] == doctest::Approx(pi_spectral(sl, {20.0, 3.0})).epsilon(1e-13));
}

TEST_CASE("expectations from the spectrum") {
    const Eigen::Vector2d x(0.25, 0.75);
    const auto s = compute_spectrum(x);
    CHECK(expect_h_spectral(s, [](double) { return 1.0; }, 7.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(expect_h_spectral(s, [](double v) { return v; }, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(expect_h_spectral(s, [](double v) { return v; }, 1e3) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("contour against spectrum") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto l = sample_landscape({0.5, 64, seed});
        const auto s = compute_spectrum(l);
        for (double tw : {0.0, 5.0, 50.0})
            for (double t : {0.0, 1.0, 30.0}) {
                const CorrelationQuery q{t, tw};
                const ContourSpec c = enclosing_contour(l.rates().maxCoeff(), t, tw, 1e-10);
                const cplx raw = pi_contour_raw(l.rates(), c, q);
                CHECK(std::abs(raw.real() - pi_spectral(s, q)) <= 1e-6);
                CHECK(std::abs(raw.imag()) <= 1e-10);
                if (t == 0.0) CHECK(std::abs(raw.real() - 1.0) <= 1e-8);
            }
        const double delta = 0.3;
        auto ind = [&](double v) { return v >= delta ? 1.0 : 0.0; };
        const ContourSpec c = enclosing_contour(l.rates().maxCoeff(), 20.0, 0.0, 1e-10);
        CHECK(expect_h_contour(l.rates(), c, [](double) { return 1.0; }, 20.0) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(expect_h_contour(l.rates(), c, ind, 20.0) - expect_h_spectral(s, ind, 20.0)) <= 1e-6);
        CHECK(std::abs(expect_h_contour(l.rates(), c, [](double v) { return v > 2.0 ? 1.0 : 0.0; }, 20.0)) <= 1e-10);
    }
}

TEST_CASE("aging function") {
    CHECK(aging_function(0.5, 1e-12) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(aging_function(0.3, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(aging_function(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(aging_function(0.5, 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    for (double th : {0.1, 0.7, 4.0, 30.0})
        CHECK(aging_function(0.5, th) ==
              doctest::Approx(2 / std::numbers::pi * std::acos(std::sqrt(th / (1 + th)))).epsilon(1e-12));
}

TEST_CASE("Pi in the N -> infinity limit") {
    CHECK(pi_limit(0.5, enclosing_contour(1.0, 0.0, 10.0), {0.0, 10.0}) == doctest::Approx(1.0).epsilon(1e-8));
    const CorrelationQuery q = CorrelationQuery::from_ratio(1.0, 1e3);
    const double lim = pi_limit(0.5, enclosing_contour(1.0, q.t, q.t_w), q);
    CHECK(std::abs(lim - 0.5) <= 0.05);
    // Finite-N convergence: landscape fluctuations shrink with the number of
    // sites at rates ~ 1/t_w, about N t_w^{-alpha}; t_w = 10 leaves ~3000.
    const CorrelationQuery q10 = CorrelationQuery::from_ratio(1.0, 10.0);
    const double lim10 = pi_limit(0.5, enclosing_contour(1.0, q10.t, q10.t_w), q10);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto s = compute_spectrum(sample_landscape({0.5, 10000, seed}));
        CHECK(std::abs(pi_spectral(s, q10) - lim10) <= 0.01);
    }
}

TEST_CASE("Laplace transform of Pi in t_w") {
    const cplx w(0.7, 0.4);
    CHECK(std::abs(pi_hat_limit(0.5, 0.0, w) - 1.0 / w) < 1e-12);
    double bound = 0.0;
    for (double r : {1.0, 10.0, 1e3, 1e5})
        for (double phi : {0.0, 1.0, -2.0, 2.3})
            bound = std::max(bound, std::abs(std::polar(r, phi) * pi_hat_limit(0.5, 1.0, std::polar(r, phi))));
    CHECK(bound < 10.0);
    // omega Pi_hat -> A(theta) with error O(|omega|^{1-alpha}).
    double c = 0.0;
    for (double r : {1e-2, 1e-3, 1e-4, 1e-5})
        for (double phi : {0.0, 1.5, -2.2}) {
            const cplx w2 = std::polar(r, phi);
            c = std::max(c, std::abs(w2 * pi_hat_limit(0.5, 1.0, w2) - 0.5) / std::pow(r, 0.5));
        }
    CHECK(c < 5.0);
}

TEST_CASE("deep trap constants") {
    const auto k = deep_trap_constants(0.5, 0.25, DepthDomain::unit_interval);
    CHECK(k.c == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
    CHECK(k.B_norm == doctest::Approx(std::numbers::pi).epsilon(1e-14));
    CHECK(k.B == doctest::Approx(2 / std::numbers::pi).epsilon(1e-14));
    CHECK(deep_trap_constants(0.3, 0.25, DepthDomain::unit_interval).B_norm ==
          doctest::Approx(std::numbers::pi / std::sin(0.3 * std::numbers::pi)));
    // Half-line: int_{1/4}^inf x^{-3/2} = 4.
    CHECK(deep_trap_constants(0.5, 0.25, DepthDomain::half_line).B == doctest::Approx(4 / std::numbers::pi));
}

TEST_CASE("limiting depth distribution") {
    const std::vector<double> thetas{0.1, 0.3, 1.0, 3.0, 10.0};
    const std::vector<double> zeros(100, 0.0);
    const ZReport z0 = z_distribution_checks(0.5, zeros, thetas);
    double want = 0.0;
    for (double th : thetas) want = std::max(want, 1.0 - aging_function(0.5, th));
    CHECK(z0.max_deviation == doctest::Approx(want).epsilon(1e-14));
    for (double v : z0.empirical) CHECK(v == 1.0);

    const auto l = sample_landscape({0.5, 10000, 21});
    McConfig cfg;
    cfg.replicas = 10000;
    cfg.seed = 99;
    const double t = 1e3;
    const auto samples = mc_scaled_depth(l.rates(), t, cfg);
    const ZReport z = z_distribution_checks(0.5, samples, thetas);
    CHECK(z.max_deviation <= 3 * z.max_stderr + 0.05);

    // P(tau/t >= u) is P(t x <= 1/u), read off the same samples.
    for (double u : {0.3, 1.0, 3.0}) {
        double frac = 0.0;
        for (double v : samples) frac += (1.0 / v >= u) ? 1.0 : 0.0;
        frac /= samples.size();
        const double se = std::sqrt(frac * (1 - frac) / samples.size());
        CHECK(std::abs(frac - z_cdf(0.5, 1.0 / u)) <= 3 * se + 0.05);
    }
    CHECK(z_cdf(0.5, 0.0) == 0.0);
    CHECK(z_density(0.5, 1.0) > 0.0);
}

}
