#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace trap {

/// Minimum spacing between distinct rates; the secular solver brackets roots
/// between consecutive rates and needs them separated.
inline constexpr double kMinRateGap = 1e-12;
inline constexpr int kMaxResampleRounds = 100;

struct LandscapeConfig {
    double alpha = 0.5;
    std::size_t n = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Quenched disorder of the N-site model: energies E_i >= 0, rates
/// x_i = exp(-E_i) sorted strictly increasing, waiting times tau_i = 1/x_i.
/// The waiting times double as the reversing weight mu.
class EnergyLandscape {
public:
    EnergyLandscape() = default;

    /// Takes energies in any order. Throws std::invalid_argument when an
    /// energy is negative/non-finite or two rates are closer than kMinRateGap.
    static EnergyLandscape from_energies(double alpha, std::uint64_t seed, std::vector<double> energies);

    Eigen::Index size() const noexcept { return rates_.size(); }
    bool empty() const noexcept { return rates_.size() == 0; }
    double alpha() const noexcept { return alpha_; }
    std::uint64_t seed() const noexcept { return seed_; }

    const Eigen::VectorXd& energies() const noexcept { return energies_; }
    const Eigen::VectorXd& rates() const noexcept { return rates_; }
    const Eigen::VectorXd& waiting_times() const noexcept { return waiting_times_; }
    const Eigen::VectorXd& mu() const noexcept { return waiting_times_; }

private:
    double alpha_ = 0.5;
    std::uint64_t seed_ = 0;
    Eigen::VectorXd energies_;
    Eigen::VectorXd rates_;
    Eigen::VectorXd waiting_times_;
};

/// i.i.d. Exponential(alpha) energies drawn from stream (seed, round). A round
/// that violates the gap constraint is discarded and the next stream is used;
/// throws InvariantViolation after kMaxResampleRounds failures.
EnergyLandscape sample_landscape(const LandscapeConfig& cfg);

/// Smallest difference between consecutive entries of a sorted vector
/// (+inf for fewer than two entries).
double min_gap(const Eigen::Ref<const Eigen::VectorXd>& sorted);

/// (N-1)/N, the total jump rate of site i divided by x_i.
inline double jump_rate_factor(Eigen::Index n) noexcept {
    return n <= 1 ? 0.0 : static_cast<double>(n - 1) / static_cast<double>(n);
}

/// Generator of the complete-graph trap dynamics, sign convention e^{-tL}:
/// L_ii = (N-1)x_i/N, L_ij = -x_i/N.
template <class Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> build_generator(
    const Eigen::Ref<const Eigen::VectorXd>& rates) {
    const Eigen::Index n = rates.size();
    const Scalar inv_n = Scalar(1) / Scalar(n);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> L(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar off = -Scalar(rates[i]) * inv_n;
        L.row(i).setConstant(off);
        L(i, i) = Scalar(rates[i]) * Scalar(n - 1) * inv_n;
    }
    return L;
}

inline Eigen::MatrixXd build_generator(const EnergyLandscape& landscape) {
    return build_generator<double>(landscape.rates());
}

/// mu_eq(i) = tau_i / sum_j tau_j.
Eigen::VectorXd equilibrium_measure(const Eigen::Ref<const Eigen::VectorXd>& rates);

inline Eigen::VectorXd equilibrium_measure(const EnergyLandscape& landscape) {
    return equilibrium_measure(landscape.rates());
}

/// Sup distance between the empirical CDF of the sample and F(x) = x^alpha on [0,1].
double ks_distance_power_law(const Eigen::Ref<const Eigen::VectorXd>& sorted_sample, double alpha);

}  // namespace trap
