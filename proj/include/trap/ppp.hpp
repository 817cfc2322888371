#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trap/correlation.hpp"
#include "trap/montecarlo.hpp"

namespace trap {

/// Grand-canonical landscape: Poisson points E_i >= E of intensity
/// alpha e^{-alpha E} dE, observed in the time unit tau0 = e^{E0}.
struct PppConfig {
    double alpha = 0.5;
    double threshold = -10.0;  ///< E
    double log_tau0 = 0.0;     ///< E0
    std::uint64_t seed = 0;

    double tau0() const { return std::exp(log_tau0); }
    double mean_count() const { return std::exp(-alpha * threshold); }
    /// Largest rescaled rate, M = tau0 e^{-E}.
    double bound() const { return std::exp(log_tau0 - threshold); }

    static PppConfig with_tau0(double alpha, double threshold, double tau0, std::uint64_t seed);
    /// tau0 = e^E, the grand-canonical version of the N-site model.
    static PppConfig grand_canonical(double alpha, double threshold, std::uint64_t seed);
    void validate() const;
};

inline constexpr double kMaxMeanCount = 5e7;

struct PppSample {
    PppConfig config;
    Eigen::VectorXd rates;     ///< x_i = tau0 e^{-E_i}, strictly increasing
    Eigen::VectorXd energies;  ///< E_i, aligned with rates

    Eigen::Index count() const { return rates.size(); }
    Eigen::VectorXd waiting_times() const { return rates.cwiseInverse(); }
};

/// The count comes from stream kCountStream of the seed; the points reuse the
/// landscape stream layout (round r is stream r), so with tau0 = e^E and the
/// count fixed to n the rates coincide bit for bit with sample_landscape.
inline constexpr std::uint64_t kCountStream = std::uint64_t{1} << 63;

PppSample sample_ppp(const PppConfig& cfg);
PppSample sample_ppp_conditioned(const PppConfig& cfg, std::size_t count);

/// tau0^alpha #{k : lambda_k <= a} for each a.
Eigen::VectorXd rescaled_spectral_measure(const PppSample& s, std::span<const double> a);

/// sum_i tau_i e^{-x_i t} / sum_i tau_i.
double stationary_limit_pi(const PppSample& s, double t);

/// Expected waiting-time mass of the points below the threshold, relative to
/// the sampled total: (alpha/(1-alpha)) tau0^{-alpha} M^{alpha-1} / sum tau.
double tau_tail_fraction(const PppSample& s);

/// 10 M^{alpha-1} ln M, the truncation error bound of the stadium contour.
double truncation_bound(double alpha, double M);
/// Smallest M >= e with truncation_bound(alpha, M) <= tol.
double truncation_for(double alpha, double tol);

enum class PiEMethod { spectral, contour, laplace };

struct PiEResult {
    double value = 0.0;
    double truncation_error = 0.0;  ///< contour method only
    PiEMethod method = PiEMethod::spectral;
};

/// Pi_E(t, t_w). `contour` integrates over the stadium around [0, M];
/// `laplace` inverts the O(N)-per-node transform in t_w and suits large N_E.
PiEResult pi_E(const PppSample& s, const CorrelationQuery& q, PiEMethod method, double tol = 1e-8);

// ---------------------------------------------------------------------------

struct RegimeGrid {
    int regime = 1;  ///< 1: tau0 fixed, 2: tau0 = e^E, 3: tau0 -> 0 with the window cutoff
    double alpha = 0.5;
    double threshold = -15.0;
    std::vector<double> tau0s{1.0};
    std::vector<double> thetas{1.0};
    std::vector<double> t_ws{10.0, 100.0, 1000.0};
    double delta = 0.1;
    std::uint64_t seed = 0;
    McConfig mc;
    PiEMethod method = PiEMethod::spectral;
    double tol = 1e-8;  ///< contour and laplace methods
    void validate() const;
};

struct RegimeRow {
    int regime;
    double tau0, threshold, theta, t_w;
    std::string quantity;
    double value, err;
};

std::vector<RegimeRow> regime_experiment(const RegimeGrid& g);
void write_regime_csv(std::ostream& os, const std::vector<RegimeRow>& rows);

std::string to_string(PiEMethod m);
PiEMethod pi_method_from_string(const std::string& s);

}  // namespace trap
