#include "trap/ppp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "trap/errors.hpp"
#include "trap/landscape.hpp"
#include "trap/random.hpp"
#include "trap/spectral.hpp"
#include "trap/summation.hpp"
#include "trap/tauberian.hpp"

namespace trap {

PppConfig PppConfig::with_tau0(double alpha, double threshold, double tau0, std::uint64_t seed) {
    if (!(tau0 > 0.0)) throw std::invalid_argument("PppConfig: tau0 must be positive");
    return {alpha, threshold, std::log(tau0), seed};
}

PppConfig PppConfig::grand_canonical(double alpha, double threshold, std::uint64_t seed) {
    return {alpha, threshold, threshold, seed};
}

void PppConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("PppConfig: alpha must lie in (0,1)");
    if (!std::isfinite(threshold) || !std::isfinite(log_tau0))
        throw std::invalid_argument("PppConfig: threshold and log tau0 must be finite");
    if (!(mean_count() <= kMaxMeanCount))
        throw std::invalid_argument("PppConfig: expected point count exp(-alpha E) is too large");
}

namespace {

PppSample draw_points(const PppConfig& cfg, std::size_t n) {
    const double shift = cfg.log_tau0 - cfg.threshold;  // exactly 0 when tau0 = e^E
    std::vector<double> excess(n);
    std::vector<std::size_t> order(n);
    std::vector<double> rates(n);
    for (int round = 0; round < kMaxResampleRounds; ++round) {
        Philox4x32 rng(cfg.seed, static_cast<std::uint64_t>(round));
        for (double& e : excess) e = -std::log(rng.uniform()) / cfg.alpha;
        // Decreasing energy is increasing rate.
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return excess[a] > excess[b]; });
        for (std::size_t i = 0; i < n; ++i) rates[i] = std::exp(shift - excess[order[i]]);
        const Eigen::Map<const Eigen::VectorXd> view(rates.data(), static_cast<Eigen::Index>(n));
        if (min_gap(view) <= kMinRateGap) continue;
        PppSample s;
        s.config = cfg;
        s.rates = view;
        s.energies.resize(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) s.energies[static_cast<Eigen::Index>(i)] = cfg.threshold + excess[order[i]];
        return s;
    }
    throw InvariantViolation("sample_ppp: no draw met the minimum rate gap");
}

}  // namespace

PppSample sample_ppp(const PppConfig& cfg) {
    cfg.validate();
    Philox4x32 rng(cfg.seed, kCountStream);
    std::poisson_distribution<long long> count(cfg.mean_count());
    return draw_points(cfg, static_cast<std::size_t>(count(rng)));
}

PppSample sample_ppp_conditioned(const PppConfig& cfg, std::size_t count) {
    cfg.validate();
    return draw_points(cfg, count);
}

Eigen::VectorXd rescaled_spectral_measure(const PppSample& s, std::span<const double> a) {
    if (s.count() < 1) throw std::invalid_argument("rescaled_spectral_measure: empty sample");
    const double scale = std::pow(s.config.tau0(), s.config.alpha);
    Eigen::VectorXd out(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = scale * static_cast<double>(spectral_count_below(s.rates, a[i]));
    return out;
}

double stationary_limit_pi(const PppSample& s, double t) {
    if (s.count() < 1) throw std::invalid_argument("stationary_limit_pi: empty sample");
    CompensatedSum<double> num, den;
    for (Eigen::Index i = 0; i < s.count(); ++i) {
        const double tau = 1.0 / s.rates[i];
        num += tau * std::exp(-s.rates[i] * t);
        den += tau;
    }
    return num.value() / den.value();
}

double tau_tail_fraction(const PppSample& s) {
    const double a = s.config.alpha;
    const double tail = a / (1.0 - a) * std::pow(s.config.tau0(), -a) * std::pow(s.config.bound(), a - 1.0);
    CompensatedSum<double> total;
    for (Eigen::Index i = 0; i < s.count(); ++i) total += 1.0 / s.rates[i];
    return tail / total.value();
}

double truncation_bound(double alpha, double M) {
    if (!(M > 1.0)) return std::numeric_limits<double>::infinity();
    return 10.0 * std::pow(M, alpha - 1.0) * std::log(M);
}

double truncation_for(double alpha, double tol) {
    // The bound decreases for M > e^{1/(1-alpha)}; bisect in log M above that.
    double lo = 1.0 / (1.0 - alpha), hi = lo;
    while (truncation_bound(alpha, std::exp(hi)) > tol) {
        hi *= 2;
        if (hi > 700) throw std::invalid_argument("truncation_for: tolerance unreachable");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (truncation_bound(alpha, std::exp(mid)) > tol ? lo : hi) = mid;
    }
    return std::exp(hi);
}

PiEResult pi_E(const PppSample& s, const CorrelationQuery& q, PiEMethod method, double tol) {
    q.validate();
    if (s.count() < 1) throw std::invalid_argument("pi_E: empty sample");
    PiEResult r;
    r.method = method;
    switch (method) {
    case PiEMethod::spectral:
        r.value = pi_spectral(compute_spectrum(s.rates), q);
        break;
    case PiEMethod::contour: {
        const double M = s.config.bound();
        r.value = pi_contour(s.rates, truncated_contour(M, q.t, q.t_w, tol), q);
        r.truncation_error = truncation_bound(s.config.alpha, M);
        break;
    }
    case PiEMethod::laplace: {
        const double factor = jump_rate_factor(s.count());
        const Eigen::VectorXd v = (-factor * q.t * s.rates.array()).exp().matrix();
        if (q.t_w == 0.0) {
            r.value = v.mean();
            break;
        }
        const Transform ghat = [&](cplx w) { return finite_laplace_transform(s.rates, v, w); };
        r.value = bromwich_invert(ghat, q.t_w, BromwichPath::for_exponents(1.0, 1.0, tol)).value;
        break;
    }
    }
    return r;
}

// ---------------------------------------------------------------------------

void RegimeGrid::validate() const {
    if (regime < 1 || regime > 3) throw std::invalid_argument("RegimeGrid: regime must be 1, 2 or 3");
    if (regime != 2 && tau0s.empty()) throw std::invalid_argument("RegimeGrid: tau0 grid is empty");
    for (double t : tau0s)
        if (!(t > 0.0)) throw std::invalid_argument("RegimeGrid: tau0 values must be positive");
    for (double t : thetas)
        if (!(t >= 0.0)) throw std::invalid_argument("RegimeGrid: theta values must be non-negative");
    for (double t : t_ws)
        if (!(t >= 0.0)) throw std::invalid_argument("RegimeGrid: t_w values must be non-negative");
    if (!(delta > 0.0)) throw std::invalid_argument("RegimeGrid: delta must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("RegimeGrid: tolerance must be positive");
}

std::vector<RegimeRow> regime_experiment(const RegimeGrid& g) {
    g.validate();
    std::vector<RegimeRow> rows;
    const std::vector<double> tau0s = g.regime == 2 ? std::vector<double>{std::exp(g.threshold)} : g.tau0s;
    for (double tau0 : tau0s) {
        const PppConfig cfg = g.regime == 2 ? PppConfig::grand_canonical(g.alpha, g.threshold, g.seed)
                                            : PppConfig::with_tau0(g.alpha, g.threshold, tau0, g.seed);
        const PppSample s = sample_ppp(cfg);
        auto row = [&](double theta, double t_w, const char* what, double v, double e) {
            rows.push_back({g.regime, cfg.tau0(), g.threshold, theta, t_w, what, v, e});
        };
        row(0.0, 0.0, "count", static_cast<double>(s.count()), 0.0);
        if (g.regime == 1) row(0.0, 0.0, "tail_fraction", tau_tail_fraction(s), 0.0);
        std::optional<SpectralDecomposition> spec;
        if (g.method == PiEMethod::spectral && s.count() > 0) spec = compute_spectrum(s.rates);
        for (double t_w : g.t_ws) {
            for (double theta : g.thetas) {
                const CorrelationQuery q{theta * t_w, t_w, g.delta};
                if (s.count() > 0) {
                    const double v = spec ? pi_spectral(*spec, q) : pi_E(s, q, g.method, g.tol).value;
                    row(theta, t_w, "pi_E", v, 0.0);
                }
                if (g.regime == 1 && s.count() > 0) row(theta, t_w, "stationary_limit", stationary_limit_pi(s, q.t), 0.0);
                if (g.regime != 1) row(theta, t_w, "aging_function", aging_function(g.alpha, theta), 0.0);
                if (g.regime == 3 && s.count() > 0) {
                    const McEstimate w1 = mc_pi_window(s.rates, g.delta, q, WindowVariant::deep_set, g.mc);
                    row(theta, t_w, "pi1_E_mc", w1.estimate, w1.stderr_);
                }
            }
        }
    }
    return rows;
}

void write_regime_csv(std::ostream& os, const std::vector<RegimeRow>& rows) {
    os << "regime,tau0,E,theta,t_w,quantity,value,err\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%s,%.17g,%.17g\n", r.regime, r.tau0, r.threshold,
                      r.theta, r.t_w, r.quantity.c_str(), r.value, r.err);
        os << buf;
    }
}

std::string to_string(PiEMethod m) {
    switch (m) {
    case PiEMethod::spectral: return "spectral";
    case PiEMethod::contour: return "contour";
    case PiEMethod::laplace: return "laplace";
    }
    return "spectral";
}

PiEMethod pi_method_from_string(const std::string& s) {
    if (s == "spectral") return PiEMethod::spectral;
    if (s == "contour") return PiEMethod::contour;
    if (s == "laplace") return PiEMethod::laplace;
    throw std::invalid_argument("unknown Pi_E method '" + s + "'");
}

}  // namespace trap
