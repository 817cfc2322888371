#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "trap/landscape.hpp"
#include "trap/summation.hpp"

namespace trap {

/// Eigen-decomposition of the complete-graph generator. Indices are 0-based:
/// eigenvalue k lies in (x_{k-1}, x_k) for k >= 1 and eigenvalue 0 is exactly 0.
///
/// Each eigenvalue is also kept as an offset from its nearest rate ("anchor"),
/// so the differences x_j - lambda_k that every formula needs are formed
/// without cancellation even when two rates nearly coincide.
struct SpectralDecomposition {
    Eigen::VectorXd rates;
    Eigen::VectorXd eigenvalues;
    Eigen::VectorXd weights;             ///< gamma_k = 1 / sum_j x_j/(x_j - lambda_k)^2
    std::vector<Eigen::Index> anchors;   ///< -1 anchors at the origin
    Eigen::VectorXd offsets;             ///< lambda_k - x_{anchor}

    Eigen::Index size() const noexcept { return rates.size(); }

    /// x_j - lambda_k.
    double rate_gap(Eigen::Index j, Eigen::Index k) const noexcept {
        const Eigen::Index a = anchors[static_cast<std::size_t>(k)];
        const double base = a < 0 ? rates[j] : rates[j] - rates[a];
        return base - offsets[k];
    }
};

/// Thrown by secular_phi when lambda sits on top of a pole.
class PoleProximity : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kPoleProximity = 1e-14;

/// phi(lambda) = sum_j lambda / (x_j - lambda), compensated summation.
template <class Scalar>
std::complex<Scalar> secular_phi(const Eigen::Ref<const Eigen::VectorXd>& rates, std::complex<Scalar> lambda) {
    CompensatedSum<std::complex<Scalar>> acc;
    for (Eigen::Index j = 0; j < rates.size(); ++j) {
        const std::complex<Scalar> d = Scalar(rates[j]) - lambda;
        if (std::abs(d) < Scalar(kPoleProximity)) throw PoleProximity("secular_phi: lambda within 1e-14 of a rate");
        acc += lambda / d;
    }
    return acc.value();
}

inline std::complex<double> secular_phi(const EnergyLandscape& landscape, std::complex<double> lambda) {
    return secular_phi<double>(landscape.rates(), lambda);
}

/// Roots of sum_j 1/(x_j - lambda) on each bracket (x_{k-1}, x_k); rates must
/// be sorted with gaps above kMinRateGap. `tol` is a relative tolerance on
/// eigenvalues; 0 iterates to working precision. Brackets narrower than 1e-9
/// are solved in long double. Throws InvariantViolation on a bracket without a
/// sign change and NonConvergence if the safeguarded iteration stalls.
SpectralDecomposition compute_spectrum(const Eigen::Ref<const Eigen::VectorXd>& rates, double tol = 0.0);

inline SpectralDecomposition compute_spectrum(const EnergyLandscape& landscape, double tol = 0.0) {
    return compute_spectrum(landscape.rates(), tol);
}

/// phi(lambda_k) evaluated in anchored coordinates.
double secular_residual(const SpectralDecomposition& s, Eigen::Index k);

/// psi^(k)_j = x_j / (x_j - lambda_k); k = 0 gives the constant vector.
Eigen::VectorXd eigenvector(const SpectralDecomposition& s, Eigen::Index k);

/// KS distance between the empirical eigenvalue CDF and x^alpha on [0,1].
double spectral_cdf_distance(const SpectralDecomposition& s, double alpha);

/// #{k : lambda_k <= a} from interlacing and the sign of sum_j 1/(x_j - a),
/// without computing the spectrum.
Eigen::Index spectral_count_below(const Eigen::Ref<const Eigen::VectorXd>& rates, double a);

struct PeakPair {
    Eigen::Index first = -1;   ///< index of the largest |psi_j|
    Eigen::Index second = -1;  ///< index of the runner-up
    int first_sign = 0;
    int second_sign = 0;
};

/// Rayleigh-Schroedinger series of diag(x) + z T1 with T1 = -x 1^T at z = 1/N,
/// against the exact spectrum. Exact eigenvalue k is paired with x_k.
struct PerturbationReport {
    Eigen::VectorXd first_order;   ///< -x_k
    Eigen::VectorXd second_order;  ///< sum_{j!=k} x_k x_j / (x_k - x_j)
    Eigen::VectorXd perturbed;     ///< x_k + z*first + z^2*second
    double coupling = 0;           ///< z = 1/N
    double min_gap = 0;            ///< d
    double half_spread = 0;        ///< a_0 = sum x / 2
    double mean_rate = 0;
    bool condition_satisfied = false;  ///< mean rate <= d, i.e. |z| < d/(2 a_0)
    double max_relative_error = 0;     ///< over k >= 1
    Eigen::Index worst_index = -1;
    std::vector<PeakPair> peaks;       ///< per eigenvector; entry 0 is the constant mode
};

/// Requires N >= 2.
PerturbationReport perturbation_report(const SpectralDecomposition& s);

}  // namespace trap
