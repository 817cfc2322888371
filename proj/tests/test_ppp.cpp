#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trap/landscape.hpp"
#include "trap/ppp.hpp"
#include "trap/spectral.hpp"

using namespace trap;

TEST_SUITE("ppp") {

TEST_CASE("point count is Poisson with mean exp(-alpha E)") {
    const double mean = std::exp(5.0);
    double sum = 0.0;
    const int draws = 1000;
    for (int s = 0; s < draws; ++s) {
        const auto p = sample_ppp(PppConfig::with_tau0(0.5, -10.0, 1.0, static_cast<std::uint64_t>(s)));
        sum += static_cast<double>(p.count());
        CHECK(p.rates.maxCoeff() <= p.config.bound());
        CHECK((p.energies.array() >= -10.0).all());
    }
    CHECK(std::abs(sum / draws - mean) <= 3 * std::sqrt(mean / draws));
}

TEST_CASE("grand-canonical rates follow x^alpha") {
    const double E = -2.0 * std::log(1e4);
    const auto p = sample_ppp(PppConfig::grand_canonical(0.5, E, 3));
    CHECK(p.rates.maxCoeff() <= 1.0);
    CHECK(ks_distance_power_law(p.rates, 0.5) <= 0.03);
}

TEST_CASE("conditioned on N points the grand-canonical sample is the canonical landscape") {
    for (std::uint64_t seed : {1u, 2u, 30u}) {
        const auto p = sample_ppp_conditioned(PppConfig::grand_canonical(0.5, -9.0, seed), 200);
        const auto l = sample_landscape({0.5, 200, seed});
        CHECK(p.rates == l.rates());
        const CorrelationQuery q{10.0, 10.0};
        CHECK(pi_E(p, q, PiEMethod::spectral).value == pi_spectral(compute_spectrum(l), q));
    }
}

TEST_CASE("spectrum of a PPP landscape") {
    const auto p = sample_ppp(PppConfig::with_tau0(0.5, -9.0, 0.5, 4));
    const auto s = compute_spectrum(p.rates);
    CHECK(s.size() == p.count());
    for (Eigen::Index k = 1; k < s.size(); ++k) {
        CHECK(p.rates[k - 1] < s.eigenvalues[k]);
        CHECK(s.eigenvalues[k] < p.rates[k]);
    }
}

TEST_CASE("rescaled spectral measure approaches a^alpha") {
    // tau0 small enough that the points below a = O(1) number tau0^{-alpha} a^alpha >> 1;
    // E chosen so that about 100/tau0^alpha points are drawn.
    const double tau0 = 1e-6, alpha = 0.5;
    const double E = -std::log(100.0 / std::pow(tau0, alpha)) / alpha;
    const std::vector<double> a{0.5, 1.0, 2.0};
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto p = sample_ppp(PppConfig::with_tau0(alpha, E, tau0, seed));
        const Eigen::VectorXd m = rescaled_spectral_measure(p, a);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(m[static_cast<Eigen::Index>(i)] - std::sqrt(a[i])) <= 0.1);
    }
}

TEST_CASE("stationary limit") {
    const auto p = sample_ppp(PppConfig::with_tau0(0.5, -15.0, 1.0, 2));
    CHECK(stationary_limit_pi(p, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    double prev = 1.0;
    for (double t : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double v = stationary_limit_pi(p, t);
        CHECK(v < prev);
        prev = v;
    }
    const auto s = compute_spectrum(p.rates);
    for (double t : {1.0, 10.0}) CHECK(std::abs(pi_spectral(s, {t, 1e3}) - stationary_limit_pi(p, t)) <= 0.02);
    CHECK(tau_tail_fraction(p) < 1e-3);
}

TEST_CASE("Pi_E methods agree") {
    const auto p = sample_ppp(PppConfig::with_tau0(0.5, -9.0, 0.01, 6));
    REQUIRE(p.count() > 20);
    for (double tw : {0.0, 10.0, 300.0}) {
        const CorrelationQuery q{tw > 0 ? tw : 5.0, tw};
        const double a = pi_E(p, q, PiEMethod::spectral).value;
        const auto c = pi_E(p, q, PiEMethod::contour, 1e-9);
        const auto l = pi_E(p, q, PiEMethod::laplace, 1e-9);
        CHECK(std::abs(a - c.value) <= 1e-6);
        CHECK(std::abs(a - l.value) <= 1e-6);
        CHECK(c.truncation_error == truncation_bound(0.5, p.config.bound()));
    }
}

TEST_CASE("truncation bound") {
    double prev = truncation_bound(0.5, 100.0);
    for (double M = 200.0; M < 1e7; M *= 2) {
        CHECK(truncation_bound(0.5, M) < prev);
        prev = truncation_bound(0.5, M);
    }
    const double M = truncation_for(0.5, 1e-2);
    CHECK(truncation_bound(0.5, M) <= 1e-2 * (1 + 1e-9));
    CHECK(truncation_bound(0.5, 0.99 * M) > 1e-2);
}

TEST_CASE("fixed tau0 relaxes") {
    RegimeGrid g;
    g.regime = 1;
    g.threshold = -12.0;
    g.seed = 3;
    g.t_ws = {10.0, 100.0, 1000.0};
    const auto rows = regime_experiment(g);
    std::vector<double> pi;
    for (const auto& r : rows)
        if (r.quantity == "pi_E") pi.push_back(r.value);
    REQUIRE(pi.size() == 3);
    CHECK(pi[0] > pi[1]);
    CHECK(pi[1] > pi[2]);
    CHECK(pi[2] < 1e-2);

    std::ostringstream a, b;
    write_regime_csv(a, rows);
    write_regime_csv(b, regime_experiment(g));
    CHECK(a.str() == b.str());
}

TEST_CASE("configuration checks") {
    CHECK_THROWS_AS(sample_ppp(PppConfig::with_tau0(0.5, -40.0, 1.0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(PppConfig::with_tau0(0.5, -1.0, 0.0, 1), std::invalid_argument);
    CHECK(pi_method_from_string(to_string(PiEMethod::laplace)) == PiEMethod::laplace);
    CHECK_THROWS_AS(pi_method_from_string("nope"), std::invalid_argument);
}

}
