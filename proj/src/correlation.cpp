#include "trap/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "trap/errors.hpp"
#include "trap/parallel.hpp"
#include "trap/summation.hpp"

namespace trap {

void CorrelationQuery::validate() const {
    if (!(t >= 0.0) || !(t_w >= 0.0)) throw std::invalid_argument("CorrelationQuery: times must be non-negative");
    if (!(delta > 0.0)) throw std::invalid_argument("CorrelationQuery: delta must be positive");
}

StateDistribution state_distribution_spectral(const SpectralDecomposition& s, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("state_distribution_spectral: t must be non-negative");
    const Eigen::Index n = s.size();
    Eigen::VectorXd coeff(n);
    for (Eigen::Index k = 0; k < n; ++k) coeff[k] = s.weights[k] * std::exp(-s.eigenvalues[k] * t);

    StateDistribution out;
    out.probabilities.resize(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ju) {
        const auto j = static_cast<Eigen::Index>(ju);
        CompensatedSum<double> acc;
        // The two eigenvalues straddling x_j carry the large opposite-sign terms.
        const Eigen::Index hi = std::min(j + 1, n - 1);
        acc += coeff[j] / s.rate_gap(j, j) + (hi != j ? coeff[hi] / s.rate_gap(j, hi) : 0.0);
        for (Eigen::Index k = 0; k < n; ++k)
            if (k != j && k != hi) acc += coeff[k] / s.rate_gap(j, k);
        out.probabilities[j] = acc.value();
    });
    for (Eigen::Index j = 0; j < n; ++j) {
        double& p = out.probabilities[j];
        if (p < 0.0) {
            out.most_negative = std::min(out.most_negative, p);
            if (p < -kNegativityClip)
                throw InvariantViolation("state_distribution_spectral: probability " + std::to_string(p) +
                                         " at site " + std::to_string(j));
            p = 0.0;
            ++out.clipped;
        }
    }
    return out;
}

namespace {

double relax_sum(const SpectralDecomposition& s, const Eigen::VectorXd& nu, double t) {
    const double c = jump_rate_factor(s.size());
    CompensatedSum<double> acc;
    for (Eigen::Index j = 0; j < s.size(); ++j) acc += nu[j] * std::exp(-c * s.rates[j] * t);
    return acc.value();
}

}  // namespace

double pi_spectral(const SpectralDecomposition& s, const CorrelationQuery& q) {
    q.validate();
    return relax_sum(s, state_distribution_spectral(s, q.t_w).probabilities, q.t);
}

Eigen::VectorXd pi_spectral_curve(const SpectralDecomposition& s, double t_w, std::span<const double> ts) {
    const Eigen::VectorXd nu = state_distribution_spectral(s, t_w).probabilities;
    Eigen::VectorXd out(static_cast<Eigen::Index>(ts.size()));
    for (std::size_t i = 0; i < ts.size(); ++i) out[static_cast<Eigen::Index>(i)] = relax_sum(s, nu, ts[i]);
    return out;
}

double expect_h_spectral(const SpectralDecomposition& s, const RateFunction& h, double t) {
    const Eigen::VectorXd nu = state_distribution_spectral(s, t).probabilities;
    CompensatedSum<double> acc;
    for (Eigen::Index j = 0; j < s.size(); ++j) acc += nu[j] * h(s.rates[j]);
    return acc.value();
}

namespace {

// (e^{-t lambda}/lambda) * sum_j v_j/(x_j - lambda) / sum_j 1/(x_j - lambda)
cplx ratio_integrand(const Eigen::VectorXd& x, const Eigen::VectorXd& v, double t, cplx lambda) {
    CompensatedSum<cplx> num, den;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const cplx r = 1.0 / (x[j] - lambda);
        num += v[j] * r;
        den += r;
    }
    return std::exp(-t * lambda) / lambda * num.value() / den.value();
}

}  // namespace

cplx pi_contour_raw(const Eigen::Ref<const Eigen::VectorXd>& rates, const ContourSpec& c, const CorrelationQuery& q) {
    q.validate();
    const Eigen::VectorXd x = rates;
    const double factor = jump_rate_factor(x.size());
    const Eigen::VectorXd v = (-factor * q.t * x.array()).exp().matrix();
    return contour_integrate([&](cplx l) { return ratio_integrand(x, v, q.t_w, l); }, c).value;
}

double expect_h_contour(const Eigen::Ref<const Eigen::VectorXd>& rates, const ContourSpec& c, const RateFunction& h,
                        double t) {
    const Eigen::VectorXd x = rates;
    Eigen::VectorXd v(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) v[j] = h(x[j]);
    return contour_integrate([&](cplx l) { return ratio_integrand(x, v, t, l); }, c).value.real();
}

cplx finite_laplace_transform(const Eigen::Ref<const Eigen::VectorXd>& rates,
                              const Eigen::Ref<const Eigen::VectorXd>& values, cplx omega) {
    CompensatedSum<cplx> num, den;
    for (Eigen::Index j = 0; j < rates.size(); ++j) {
        const cplx r = 1.0 / (omega + rates[j]);
        num += values[j] * r;
        den += r;
    }
    return num.value() / (omega * den.value());
}

// ---------------------------------------------------------------------------

cplx power_law_stieltjes(double alpha, cplx z) {
    if (z.imag() == 0.0 && z.real() >= -1.0 && z.real() <= 0.0)
        throw std::domain_error("power_law_stieltjes: z on the cut [-1, 0]");
    const double az = std::abs(z);
    if (az >= 2.0) {
        // alpha * sum_n (-1)^n z^{-n-1} / (alpha + n)
        const cplx w = -1.0 / z;
        cplx term = 1.0 / z;
        cplx sum{};
        for (int n = 0; n < 200; ++n) {
            const cplx add = term / (alpha + n);
            sum += add;
            if (std::abs(add) < 1e-17 * std::abs(sum)) break;
            term *= w;
        }
        return alpha * sum;
    }
    if (az <= 0.5) {
        // alpha * (pi z^{alpha-1}/sin(pi alpha) - sum_n (-z)^n/(n+1-alpha))
        cplx term = 1.0;
        cplx sum{};
        for (int n = 0; n < 200; ++n) {
            const cplx add = term / (n + 1.0 - alpha);
            sum += add;
            if (std::abs(add) < 1e-17 * std::abs(sum)) break;
            term *= -z;
        }
        return alpha * (beta_reflection(alpha) * std::pow(z, alpha - 1.0) - sum);
    }
    std::vector<double> pts{0.0, 1.0};
    if (z.real() < 0.0 && z.real() > -1.0) pts.insert(pts.begin() + 1, std::pow(-z.real(), alpha));
    const auto r = integrate_adaptive<cplx>([&](double u) { return 1.0 / (z + std::pow(u, 1.0 / alpha)); }, pts,
                                            1e-15, 1e-14, 8000);
    if (!r.converged) throw NonConvergence("power_law_stieltjes: quadrature did not converge");
    return r.value;
}

namespace {

SingularIntegralSpec unit_spec(double alpha, std::vector<double> breaks = {}) {
    SingularIntegralSpec s;
    s.alpha = alpha;
    s.upper = 1.0;
    s.abs_tol = 1e-13;
    s.breakpoints = std::move(breaks);
    return s;
}

}  // namespace

double expect_h_limit(double alpha, const ContourSpec& c, const RateFunction& h, std::vector<double> breakpoints,
                      double t) {
    const SingularIntegralSpec spec = unit_spec(alpha, std::move(breakpoints));
    auto f = [&](cplx l) {
        const cplx num = ex_integral(h, l, spec);
        const cplx den = -power_law_stieltjes(alpha, -l);
        return std::exp(-t * l) / l * num / den;
    };
    return contour_integrate(f, c).value.real();
}

double pi_limit(double alpha, const ContourSpec& c, const CorrelationQuery& q) {
    q.validate();
    const double t = q.t;
    return expect_h_limit(alpha, c, [t](double x) { return std::exp(-x * t); }, {}, q.t_w);
}

double aging_function(double alpha, double theta) {
    if (!(theta >= 0.0)) throw std::invalid_argument("aging_function: theta must be non-negative");
    if (theta == 0.0) return 1.0;
    if (std::isinf(theta)) return 0.0;
    return incomplete_beta_tail(alpha, theta / (1.0 + theta)) / beta_reflection(alpha);
}

cplx pi_hat_limit(double alpha, double theta, cplx omega) {
    if (omega.imag() == 0.0 && omega.real() <= 0.0)
        throw std::domain_error("pi_hat_limit: omega on the cut (-inf, 0]");
    if (theta == 0.0) return 1.0 / omega;
    // E_x[ 1 / ((omega + x theta + x) (omega + x theta) S(omega + x theta)) ]
    auto integrand = [&](double u) -> cplx {
        const double x = std::pow(u, 1.0 / alpha);
        const cplx z = omega + x * theta;
        return 1.0 / ((z + x) * z * power_law_stieltjes(alpha, z));
    };
    std::vector<double> pts{0.0, 1.0};
    for (double xs : {-omega.real() / (1.0 + theta), -omega.real() / theta, (-1.0 - omega.real()) / theta})
        if (xs > 0.0 && xs < 1.0) pts.push_back(std::pow(xs, alpha));
    std::sort(pts.begin(), pts.end());
    const auto r = integrate_adaptive<cplx>(integrand, pts, 1e-14, 1e-11, 8000);
    if (!r.converged) throw NonConvergence("pi_hat_limit: quadrature did not converge");
    return r.value;
}

cplx deep_trap_laplace_limit(double alpha, double delta, DepthDomain domain, cplx omega) {
    if (omega.imag() == 0.0 && omega.real() <= 0.0)
        throw std::domain_error("deep_trap_laplace_limit: omega on the cut (-inf, 0]");
    // alpha * int_0^delta x^{alpha-1}/(omega+x) dx = delta^{alpha-1} S(omega/delta)
    const cplx below = std::pow(delta, alpha - 1.0) * power_law_stieltjes(alpha, omega / delta);
    const cplx total = domain == DepthDomain::unit_interval
                           ? power_law_stieltjes(alpha, omega)
                           : alpha * beta_reflection(alpha) * std::pow(omega, alpha - 1.0);
    return (1.0 - below / total) / omega;
}

DeepTrapConstants deep_trap_constants(double alpha, double delta, DepthDomain domain) {
    if (!(delta > 0.0)) throw std::invalid_argument("deep_trap_constants: delta must be positive");
    if (domain == DepthDomain::unit_interval && delta > 1.0)
        throw std::invalid_argument("deep_trap_constants: delta must not exceed 1 on the unit interval");
    DeepTrapConstants k;
    k.B_norm = beta_reflection(alpha);
    const double upper = domain == DepthDomain::unit_interval ? 1.0 : 0.0;
    k.B = (std::pow(delta, alpha - 1.0) - upper) / (1.0 - alpha) / k.B_norm;
    k.c = std::tgamma(alpha);
    return k;
}

namespace {

// int_0^1 v^{alpha-1} e^{-w(1-v)} dv
double kummer_part(double alpha, double w) {
    const auto r = integrate_adaptive<double>(
        [&](double r) { return std::exp(-w * (1.0 - std::pow(r, 1.0 / alpha))); }, 0.0, 1.0, 1e-15, 1e-13);
    return r.value / alpha;
}

double z_norm(double alpha) {
    return std::sin(std::numbers::pi * alpha) / (std::numbers::pi * std::tgamma(alpha));
}

}  // namespace

double z_density(double alpha, double z) {
    if (!(z > 0.0)) return 0.0;
    return z_norm(alpha) * std::pow(z, alpha - 1.0) * kummer_part(alpha, z);
}

double z_cdf(double alpha, double z) {
    if (!(z > 0.0)) return 0.0;
    const double head_end = std::min(z, 1.0);
    // w = s^{1/alpha} turns w^{alpha-1} dw into ds/alpha
    const auto head = integrate_adaptive<double>(
        [&](double s) { return kummer_part(alpha, std::pow(s, 1.0 / alpha)); }, 0.0, std::pow(head_end, alpha),
        1e-13, 1e-12);
    double F = z_norm(alpha) / alpha * head.value;
    if (z > 1.0) {
        const auto tail = integrate_adaptive<double>([&](double y) { return z_density(alpha, std::exp(y)) * std::exp(y); },
                                                     0.0, std::log(z), 1e-13, 1e-12);
        F += tail.value;
    }
    return std::min(F, 1.0);
}

ZReport z_distribution_checks(double alpha, std::span<const double> samples, std::span<const double> theta_grid) {
    if (samples.empty()) throw std::invalid_argument("z_distribution_checks: empty sample");
    ZReport rep;
    rep.samples = samples.size();
    const auto n = static_cast<double>(samples.size());
    for (double th : theta_grid) {
        CompensatedSum<double> m1, m2;
        for (double z : samples) {
            const double e = std::exp(-th * z);
            m1 += e;
            m2 += e * e;
        }
        const double mean = m1.value() / n;
        const double var = std::max(0.0, m2.value() / n - mean * mean);
        const double se = samples.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
        const double lim = aging_function(alpha, th);
        rep.theta.push_back(th);
        rep.empirical.push_back(mean);
        rep.stderr_.push_back(se);
        rep.limit.push_back(lim);
        rep.max_deviation = std::max(rep.max_deviation, std::abs(mean - lim));
        rep.max_stderr = std::max(rep.max_stderr, se);
    }

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto first_pos = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
    if (first_pos != sorted.end() && sorted.back() > *first_pos) {
        const double lo = std::log(*first_pos), hi = std::log(sorted.back());
        constexpr int kGrid = 48;
        std::vector<double> grid(kGrid), cdf(kGrid);
        for (int i = 0; i < kGrid; ++i) {
            grid[i] = std::exp(lo + (hi - lo) * i / (kGrid - 1));
            cdf[i] = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), grid[i]) - sorted.begin()) / n;
        }
        for (int i = 0; i < kGrid; ++i)
            for (int j = i + 1; j < kGrid; ++j) {
                const double dz = std::pow(grid[j], alpha) - std::pow(grid[i], alpha);
                if (dz > 0) rep.holder_constant = std::max(rep.holder_constant, (cdf[j] - cdf[i]) / dz);
            }
    }
    return rep;
}

}  // namespace trap
