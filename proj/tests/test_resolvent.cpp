#include <doctest.h>

#include <cmath>

#include "trap/landscape.hpp"
#include "trap/random.hpp"
#include "trap/resolvent.hpp"

using namespace trap;

TEST_SUITE("resolvent") {

TEST_CASE("contour at t = 0 returns the initial law") {
    const auto c = ReversibleChain::random(6, 3);
    const Eigen::VectorXd p = transition_probs_contour(c, 0.0, chain_contour(c, 0.0));
    CHECK((p - c.initial).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("random reversible chains against uniformization") {
    for (Eigen::Index n : {2, 3, 5, 8, 10})
        for (double t : {0.3, 2.0, 9.0}) {
            const auto c = ReversibleChain::random(n, static_cast<std::uint64_t>(100 + n));
            const Eigen::VectorXd a = transition_probs_contour(c, t, chain_contour(c, t));
            const Eigen::VectorXd b = uniformization_oracle(c, t);
            CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK(transition_prob_contour(c, n - 1, t, chain_contour(c, t)) == doctest::Approx(a[n - 1]));
        }
}

TEST_CASE("trap specialization equals the general formula") {
    const auto l = sample_landscape({0.5, 12, 7});
    const auto chain = ReversibleChain::trap_model(l.rates());
    for (double t : {0.5, 5.0, 40.0}) {
        const ContourSpec c = chain_contour(chain, t);
        const Eigen::VectorXd general = transition_probs_contour(chain, t, c);
        const ContourSpec ct = enclosing_contour(l.rates().maxCoeff(), t, 0.0, 1e-12);
        for (Eigen::Index j = 0; j < l.size(); ++j)
            CHECK(std::abs(trap_transition_prob_contour(l.rates(), j, t, ct) - general[j]) <= 1e-8);
    }
}

TEST_CASE("uniformization") {
    const auto c = ReversibleChain::random(7, 11);
    CHECK(uniformization_oracle(c, 0.0) == c.initial);
    for (double t : {0.1, 3.0, 50.0}) CHECK(std::abs(uniformization_oracle(c, t).sum() - 1.0) <= 1e-12);

    // Two states: rate a from 0 to 1 and b back.
    const double a = 0.7, b = 0.2;
    ReversibleChain two;
    two.generator.resize(2, 2);
    two.generator << a, -a, -b, b;
    two.mu = Eigen::Vector2d(b, a);  // mu(0) a = mu(1) b
    two.initial = Eigen::Vector2d(1.0, 0.0);
    for (double t : {0.5, 4.0}) {
        const double p0 = b / (a + b) + a / (a + b) * std::exp(-(a + b) * t);
        const Eigen::VectorXd p = uniformization_oracle(two, t);
        CHECK(std::abs(p[0] - p0) <= 1e-12);
        CHECK(std::abs(p[1] - (1 - p0)) <= 1e-12);
    }
}

TEST_CASE("chain validation") {
    ReversibleChain c = ReversibleChain::random(4, 1);
    c.generator(0, 1) *= 1.5;
    CHECK_THROWS_AS(c.validate(1e-10), std::invalid_argument);
    const auto big = ReversibleChain::trap_model(sample_landscape({0.5, 201, 1}).rates());
    CHECK_THROWS_AS(transition_probs_contour(big, 1.0, chain_contour(big, 1.0)), std::invalid_argument);
}

TEST_CASE("cofactor identities") {
    const Eigen::Vector2d x(0.25, 0.75);
    // Right side prod_{s != j}(lambda - x_s) = 0.3 - 0.75.
    CHECK(determinant_identity_check(x, 0.3, 0) <= 1e-12);
    CHECK(0.3 - x[1] == doctest::Approx(-0.45));

    const auto l = sample_landscape({0.5, 5, 2});
    for (Eigen::Index s = 0; s < 5; ++s)
        for (Eigen::Index j = 0; j < 5; ++j)
            if (s != j) CHECK(determinant_identity_check(l.rates(), l.rates()[s], j) <= 1e-12);

    Philox4x32 rng(77, 0);
    double worst = 0.0, worst_poly = 0.0;
    for (int r = 0; r < 50; ++r) {
        const auto n = static_cast<std::size_t>(2 + rng.below(5));
        const auto lr = sample_landscape({0.5, n, 1000 + static_cast<std::uint64_t>(r)});
        const cplx lambda(2 * rng.uniform() - 0.5, 2 * rng.uniform() - 1);
        for (Eigen::Index j = 0; j < lr.size(); ++j)
            worst = std::max(worst, determinant_identity_check(lr.rates(), lambda, j));
        worst_poly = std::max(worst_poly, char_poly_residual(lr.rates(), lambda));
    }
    CHECK(worst <= 1e-10);
    CHECK(worst_poly <= 1e-10);
    // N = 2 characteristic polynomial at lambda = 0.3: (0.3-0.125)(0.3-0.375) - 0.125*0.375.
    CHECK(std::abs(cofactor_determinant((0.3 * Eigen::Matrix2cd::Identity() -
                                         build_generator<double>(x).cast<cplx>()).eval()) -
                   cplx(-0.06, 0.0)) < 1e-15);
}

}
