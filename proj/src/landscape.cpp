#include "trap/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "trap/errors.hpp"
#include "trap/random.hpp"

namespace trap {

void LandscapeConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("landscape: alpha must lie in (0,1), got " + std::to_string(alpha));
}

double min_gap(const Eigen::Ref<const Eigen::VectorXd>& sorted) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < sorted.size(); ++i) gap = std::min(gap, sorted[i] - sorted[i - 1]);
    return gap;
}

EnergyLandscape EnergyLandscape::from_energies(double alpha, std::uint64_t seed, std::vector<double> energies) {
    for (double e : energies)
        if (!std::isfinite(e) || e < 0.0) throw std::invalid_argument("landscape: energies must be finite and >= 0");
    // Decreasing energy is increasing rate.
    std::sort(energies.begin(), energies.end(), std::greater<>());

    EnergyLandscape out;
    out.alpha_ = alpha;
    out.seed_ = seed;
    const auto n = static_cast<Eigen::Index>(energies.size());
    out.energies_ = Eigen::Map<const Eigen::VectorXd>(energies.data(), n);
    // Scalar std::exp, as the point-process sampler uses, so both agree bit for bit.
    out.rates_ = out.energies_.unaryExpr([](double e) { return std::exp(-e); });
    out.waiting_times_ = out.rates_.cwiseInverse();
    if (min_gap(out.rates_) <= kMinRateGap)
        throw std::invalid_argument("landscape: two rates closer than the minimum gap");
    return out;
}

EnergyLandscape sample_landscape(const LandscapeConfig& cfg) {
    cfg.validate();
    std::vector<double> energies(cfg.n);
    for (int round = 0; round < kMaxResampleRounds; ++round) {
        Philox4x32 rng(cfg.seed, static_cast<std::uint64_t>(round));
        for (double& e : energies) e = -std::log(rng.uniform()) / cfg.alpha;
        std::vector<double> rates(energies.size());
        std::transform(energies.begin(), energies.end(), rates.begin(), [](double e) { return std::exp(-e); });
        std::sort(rates.begin(), rates.end());
        if (min_gap(Eigen::Map<const Eigen::VectorXd>(rates.data(), static_cast<Eigen::Index>(rates.size()))) >
            kMinRateGap)
            return EnergyLandscape::from_energies(cfg.alpha, cfg.seed, energies);
    }
    throw InvariantViolation("landscape: no sample met the minimum rate gap after " +
                             std::to_string(kMaxResampleRounds) + " rounds (n=" + std::to_string(cfg.n) + ")");
}

Eigen::VectorXd equilibrium_measure(const Eigen::Ref<const Eigen::VectorXd>& rates) {
    Eigen::VectorXd tau = rates.cwiseInverse();
    return tau / tau.sum();
}

double ks_distance_power_law(const Eigen::Ref<const Eigen::VectorXd>& sorted_sample, double alpha) {
    const auto n = static_cast<double>(sorted_sample.size());
    double d = 0.0;
    for (Eigen::Index i = 0; i < sorted_sample.size(); ++i) {
        const double x = std::clamp(sorted_sample[i], 0.0, 1.0);
        const double f = std::pow(x, alpha);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace trap
