#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trap/quadrature.hpp"
#include "trap/spectral.hpp"

namespace trap {

/// Two-time query: the system has aged t_w and is observed for a further t.
struct CorrelationQuery {
    double t = 0.0;
    double t_w = 0.0;
    double delta = 1.0;  ///< depth cutoff for deep-trap and windowed observables

    double theta() const { return t / t_w; }
    static CorrelationQuery from_ratio(double theta, double t_w, double delta = 1.0) {
        return {theta * t_w, t_w, delta};
    }
    void validate() const;
};

using RateFunction = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Finite N, spectral sums.

inline constexpr double kNegativityClip = 1e-12;

struct StateDistribution {
    Eigen::VectorXd probabilities;
    Eigen::Index clipped = 0;    ///< entries in (-1e-12, 0) set to zero
    double most_negative = 0.0;  ///< before clipping
};

/// nu_t(j) = sum_k gamma_k e^{-lambda_k t}/(x_j - lambda_k) from the uniform
/// start. Throws InvariantViolation if an entry is below -1e-12.
StateDistribution state_distribution_spectral(const SpectralDecomposition& s, double t);

/// Pi_N(t, t_w) = sum_j nu_{t_w}(j) exp(-((N-1)/N) x_j t).
double pi_spectral(const SpectralDecomposition& s, const CorrelationQuery& q);

/// Pi_N(t, t_w) for every t in `ts` at one t_w.
Eigen::VectorXd pi_spectral_curve(const SpectralDecomposition& s, double t_w, std::span<const double> ts);

/// sum_j nu_t(j) h(x_j).
double expect_h_spectral(const SpectralDecomposition& s, const RateFunction& h, double t);

// ---------------------------------------------------------------------------
// Finite N, contour integrals over the rates.

/// The complex value of the contour representation of Pi_N; the imaginary
/// part is quadrature noise.
cplx pi_contour_raw(const Eigen::Ref<const Eigen::VectorXd>& rates, const ContourSpec& c, const CorrelationQuery& q);

inline double pi_contour(const Eigen::Ref<const Eigen::VectorXd>& rates, const ContourSpec& c,
                         const CorrelationQuery& q) {
    return pi_contour_raw(rates, c, q).real();
}

double expect_h_contour(const Eigen::Ref<const Eigen::VectorXd>& rates, const ContourSpec& c, const RateFunction& h,
                        double t);

/// (1/omega) sum_j v_j/(omega + x_j) / sum_j 1/(omega + x_j): the Laplace
/// transform in t of sum_j nu_t(j) v_j. With v_j = exp(-c x_j t) it is the
/// transform of Pi(t, .) in the waiting time.
cplx finite_laplace_transform(const Eigen::Ref<const Eigen::VectorXd>& rates,
                              const Eigen::Ref<const Eigen::VectorXd>& values, cplx omega);

// ---------------------------------------------------------------------------
// N -> infinity.

/// Pi(t, t_w) with rates distributed as alpha x^{alpha-1} on (0,1].
double pi_limit(double alpha, const ContourSpec& c, const CorrelationQuery& q);

/// lim E h(x(t)); `breakpoints` are the discontinuities of h.
double expect_h_limit(double alpha, const ContourSpec& c, const RateFunction& h, std::vector<double> breakpoints,
                      double t);

/// A(theta) = (sin pi alpha / pi) * incomplete_beta_tail(alpha, theta/(1+theta)).
double aging_function(double alpha, double theta);

/// S(z) = E[1/(z + x)] = alpha * int_0^1 x^{alpha-1}/(z + x) dx for z off [-1, 0].
cplx power_law_stieltjes(double alpha, cplx z);

/// Laplace transform in t_w of Pi(theta t_w, t_w), continued to C \ (-inf, 0].
cplx pi_hat_limit(double alpha, double theta, cplx omega);

enum class DepthDomain { unit_interval, half_line };

/// Laplace transform of P(x(t) >= delta) in the N -> infinity limit, with the
/// rate law on (0,1] or the scale-free law alpha x^{alpha-1} on (0, inf).
cplx deep_trap_laplace_limit(double alpha, double delta, DepthDomain domain, cplx omega);

struct DeepTrapConstants {
    double B = 0.0;       ///< int_delta^{1 or inf} x^{alpha-2} dx / (pi/sin pi alpha)
    double c = 0.0;       ///< Gamma(alpha)
    double B_norm = 0.0;  ///< pi / sin(pi alpha)
    double ratio() const { return B / c; }
};

DeepTrapConstants deep_trap_constants(double alpha, double delta, DepthDomain domain);

/// Density and CDF of the limiting scaled depth Z, whose Laplace transform
/// is A(theta).
double z_density(double alpha, double z);
double z_cdf(double alpha, double z);

struct ZReport {
    std::vector<double> theta;
    std::vector<double> empirical;  ///< mean of exp(-theta z) over samples
    std::vector<double> stderr_;
    std::vector<double> limit;      ///< A(theta)
    double max_deviation = 0.0;
    double max_stderr = 0.0;
    double holder_constant = 0.0;   ///< sup (F(z)-F(x)) / (z^alpha - x^alpha) over sample pairs on a grid
    std::size_t samples = 0;
};

ZReport z_distribution_checks(double alpha, std::span<const double> samples, std::span<const double> theta_grid);

}  // namespace trap
