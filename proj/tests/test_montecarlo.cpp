#include <doctest.h>

#include <cmath>
#include <map>

#include "trap/correlation.hpp"
#include "trap/errors.hpp"
#include "trap/landscape.hpp"
#include "trap/montecarlo.hpp"

using namespace trap;

namespace {

double variance(const std::vector<double>& v) {
    const McEstimate e = summarize(v);
    return e.stderr_ * e.stderr_ * static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("zero horizon") {
    const auto l = sample_landscape({0.5, 20, 1});
    const Trajectory tr = simulate_path(l.rates(), 0.0, 3, 0);
    CHECK(tr.jump_times.empty());
    CHECK(tr.states.size() == 1);
}

TEST_CASE("holding times and jump targets") {
    const Eigen::Vector4d x(0.2, 0.5, 0.7, 1.0);
    const double factor = jump_rate_factor(4);
    const Trajectory tr = simulate_path(x, 2e5, 17, 0);
    std::map<Eigen::Index, std::vector<double>> holds;
    std::map<Eigen::Index, std::vector<int>> targets;
    for (std::size_t i = 0; i + 1 < tr.jump_times.size(); ++i) {
        const Eigen::Index site = tr.states[i + 1];
        holds[site].push_back(tr.jump_times[i + 1] - tr.jump_times[i]);
        auto& t = targets[site];
        t.resize(4);
        t[static_cast<std::size_t>(tr.states[i + 2])]++;
    }
    for (Eigen::Index i = 0; i < 4; ++i) {
        const auto& h = holds[i];
        REQUIRE(h.size() >= 10000);
        const McEstimate m = summarize(h);
        const double mean = 1.0 / (factor * x[i]);  // (N/(N-1)) tau_i
        CHECK(std::abs(m.estimate - mean) <= 3 * mean / std::sqrt(static_cast<double>(h.size())));
        // Uniform over the other three sites: chi-square with 2 degrees of freedom.
        const auto& t = targets[i];
        double total = 0.0;
        for (int c : t) total += c;
        double chi2 = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            if (static_cast<Eigen::Index>(j) == i) {
                CHECK(t[j] == 0);
                continue;
            }
            const double e = total / 3;
            chi2 += (t[j] - e) * (t[j] - e) / e;
        }
        CHECK(chi2 < 13.8155);  // p = 1e-3 for 2 degrees of freedom
    }
}

TEST_CASE("Pi estimators") {
    const auto l = sample_landscape({0.5, 64, 3});
    McConfig cfg;
    cfg.replicas = 10000;
    cfg.seed = 5;
    const McEstimate zero = mc_pi(l.rates(), {0.0, 10.0}, cfg);
    CHECK(zero.estimate == 1.0);
    CHECK(zero.stderr_ == 0.0);

    const CorrelationQuery q{10.0, 10.0};
    const auto est = mc_pi_estimators(l.rates(), q, cfg);
    const double exact = pi_spectral(compute_spectrum(l), q);
    CHECK(std::abs(est.rao_blackwell.estimate - exact) <= 3 * est.rao_blackwell.stderr_);
    CHECK(std::abs(est.indicator.estimate - exact) <= 3 * est.indicator.stderr_);
    CHECK(variance(est.rao_blackwell_samples) <= variance(est.indicator_samples));
    CHECK(mc_pi(l.rates(), q, cfg).estimate == est.rao_blackwell.estimate);
}

TEST_CASE("windowed correlations") {
    const auto l = sample_landscape({0.5, 64, 4});
    McConfig cfg;
    cfg.replicas = 4000;
    cfg.seed = 8;
    const CorrelationQuery q{10.0, 10.0};
    CHECK(mc_pi_window(l.rates(), l.rates().minCoeff(), q, WindowVariant::deep_set, cfg).estimate == 1.0);

    const auto none = mc_pi_window(l.rates(), 2.0, q, WindowVariant::deep_set, cfg);
    const auto plain = mc_pi_estimators(l.rates(), q, cfg).indicator;
    CHECK(std::abs(none.estimate - plain.estimate) <= plain.stderr_);

    const std::vector<double> ts{1.0, 10.0, 100.0};
    const auto w = mc_window_curves(l.rates(), 0.1, 10.0, ts, cfg);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(w.pi[i].estimate <= w.pi1[i].estimate);
        CHECK(w.pi1[i].estimate <= w.pi2[i].estimate);
        CHECK(w.gap[i].estimate == doctest::Approx(w.pi1[i].estimate - w.pi[i].estimate).epsilon(1e-12));
    }
}

TEST_CASE("deep-trap probability") {
    const auto l = sample_landscape({0.5, 64, 6});
    McConfig cfg;
    cfg.replicas = 10000;
    cfg.seed = 2;
    const double delta = 0.3;
    const DeepSet d = DeepSet::of(l.rates(), delta);
    const auto at0 = mc_deep_trap(l.rates(), delta, 0.0, cfg);
    const double frac = static_cast<double>(d.size) / 64.0;
    CHECK(std::abs(at0.estimate - frac) <= 3 * at0.stderr_);

    const auto s = compute_spectrum(l);
    for (double t : {1.0, 30.0}) {
        const auto e = mc_deep_trap(l.rates(), delta, t, cfg);
        const double exact = expect_h_spectral(s, [&](double v) { return v >= delta ? 1.0 : 0.0; }, t);
        CHECK(std::abs(e.estimate - exact) <= 3 * e.stderr_);
    }

    const auto big = sample_landscape({0.5, 10000, 6});
    cfg.replicas = 2000;
    std::vector<double> p;
    for (double t : {1.0, 10.0, 100.0, 1000.0}) p.push_back(mc_deep_trap(big.rates(), 0.25, t, cfg).estimate);
    CHECK(p.front() > p.back());
    // Least-squares slope of p against log t.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double lx = static_cast<double>(i);
        sx += lx, sy += p[i], sxx += lx * lx, sxy += lx * p[i];
    }
    CHECK((p.size() * sxy - sx * sy) < 0.0);
}

TEST_CASE("scaled depth samples") {
    McConfig cfg;
    cfg.replicas = 50;
    const auto one = mc_scaled_depth(Eigen::VectorXd::Constant(1, 0.3), 5.0, cfg);
    for (double v : one) CHECK(v == 1.5);
    const auto l = sample_landscape({0.5, 100, 1});
    cfg.seed = 4;
    CHECK(mc_scaled_depth(l.rates(), 50.0, cfg) == mc_scaled_depth(l.rates(), 50.0, cfg));
    // Replica r depends only on (seed, r).
    McConfig more = cfg;
    more.replicas = 80;
    const auto a = mc_scaled_depth(l.rates(), 50.0, cfg);
    const auto b = mc_scaled_depth(l.rates(), 50.0, more);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
}

TEST_CASE("event budget") {
    const auto l = sample_landscape({0.5, 100, 1});
    McConfig cfg;
    cfg.replicas = 2;
    cfg.max_events = 3;
    CHECK_THROWS_AS(mc_pi(l.rates(), {1.0, 1e4}, cfg), NonConvergence);
}

}
