#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "trap/quadrature.hpp"

namespace trap {

/// Finite reversible chain with semigroup e^{-tL}: zero row sums, mu(i) L_ij =
/// mu(j) L_ji, and an initial law.
struct ReversibleChain {
    Eigen::MatrixXd generator;
    Eigen::VectorXd mu;
    Eigen::VectorXd initial;

    Eigen::Index size() const { return generator.rows(); }
    /// Throws std::invalid_argument when a defining property fails by more than tol.
    void validate(double tol = 1e-12) const;

    /// The complete-graph trap model with mu = tau and a uniform start.
    static ReversibleChain trap_model(const Eigen::Ref<const Eigen::VectorXd>& rates);
    /// Symmetric conductances c_ij ~ U(0,1) on the complete graph, mu ~ U(0.5, 1.5),
    /// L_ij = -c_ij/mu_i; random initial law.
    static ReversibleChain random(Eigen::Index n, std::uint64_t seed);
};

inline constexpr Eigen::Index kMaxResolventSize = 200;

/// Loop around the spectrum of the chain, which lies in [0, 2 max_i L_ii].
ContourSpec chain_contour(const ReversibleChain& chain, double t, double tolerance = 1e-12);

/// P(Y(t) = j) for every j from (1/2 pi i) int e^{-t lambda} mu(j) sum_k
/// R_jk(lambda) nu(k)/mu(k), one LU of lambda I - L per node. N <= 200.
/// Throws NonConvergence when node doubling stalls and InvariantViolation on a
/// singular node.
Eigen::VectorXd transition_probs_contour(const ReversibleChain& chain, double t, const ContourSpec& c);

double transition_prob_contour(const ReversibleChain& chain, Eigen::Index j, double t, const ContourSpec& c);

/// The same probability for the trap model from e^{-t lambda} / ((x_j - lambda) phi(lambda)).
double trap_transition_prob_contour(const Eigen::Ref<const Eigen::VectorXd>& rates, Eigen::Index j, double t,
                                    const ContourSpec& c);

inline constexpr double kPoissonTail = 1e-12;

/// nu_0 e^{-tL} by uniformization: Poisson(Lambda t) mixture of powers of
/// I - L/Lambda, truncated once the remaining Poisson mass is below 1e-12.
Eigen::VectorXd uniformization_oracle(const ReversibleChain& chain, double t);

/// |sum_k (-1)^{j+k} (x_k/x_j) M_kj - prod_{s != j}(lambda - x_s)| with M_kj the
/// (k,j) minor of lambda I - L, by cofactor expansion. 2 <= N <= 6.
double determinant_identity_check(const Eigen::Ref<const Eigen::VectorXd>& rates, std::complex<double> lambda,
                                  Eigen::Index j);

/// |det(lambda I - L) - (lambda/N) sum_k prod_{j != k}(lambda - x_j)| relative to
/// the larger side. N <= 6.
double char_poly_residual(const Eigen::Ref<const Eigen::VectorXd>& rates, std::complex<double> lambda);

/// Determinant by Laplace expansion along the first row (small matrices only).
std::complex<double> cofactor_determinant(const Eigen::MatrixXcd& a);

}  // namespace trap
