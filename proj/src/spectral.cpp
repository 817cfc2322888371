#include "trap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "trap/errors.hpp"
#include "trap/parallel.hpp"

namespace trap {

namespace {

constexpr double kExtendedBracket = 1e-9;
constexpr int kMaxIterations = 200;
constexpr int kRationalIterations = 40;

// Split of sum_j 1/(x_j - lambda) into poles left (j < k) and right (j >= k)
// of the bracket, with derivatives. lambda = base + tau.
template <class T>
struct SecularParts {
    T left = 0, left_deriv = 0;
    T right = 0, right_deriv = 0;
    T value() const { return left + right; }
};

template <class T>
SecularParts<T> evaluate_parts(const double* x, Eigen::Index n, Eigen::Index k, double base, T tau) {
    SecularParts<T> p;
    const T b = static_cast<T>(base);
    for (Eigen::Index j = 0; j < k; ++j) {
        const T r = T(1) / ((static_cast<T>(x[j]) - b) - tau);
        p.left += r;
        p.left_deriv += r * r;
    }
    for (Eigen::Index j = k; j < n; ++j) {
        const T r = T(1) / ((static_cast<T>(x[j]) - b) - tau);
        p.right += r;
        p.right_deriv += r * r;
    }
    return p;
}

// Zero of the two-pole model A + SL/(pl - s) + SR/(pr - s) that matches the
// left and right partial sums in value and slope at tau. Returns the offset
// step; NaN if the quadratic has no root inside (pl, pr).
template <class T>
T rational_step(const SecularParts<T>& p, T pl, T pr, T tau) {
    const T dl = pl - tau;
    const T dr = pr - tau;
    const T sl = p.left_deriv * dl * dl;
    const T sr = p.right_deriv * dr * dr;
    const T g = p.value();
    const T a = g - sl / dl - sr / dr;
    const T b = a * (dl + dr) + sl + sr;
    const T c = dl * dr * g;
    auto inside = [&](T u) { return u > dl && u < dr; };
    if (a == T(0)) {
        const T u = c / b;
        return inside(u) ? u : std::numeric_limits<T>::quiet_NaN();
    }
    const T disc = std::max(T(0), b * b - 4 * a * c);
    const T sq = std::sqrt(disc);
    const T q = b >= 0 ? (b + sq) / 2 : (b - sq) / 2;
    const T u1 = q / a;
    const T u2 = q != T(0) ? c / q : u1;
    if (inside(u2)) return u2;
    if (inside(u1)) return u1;
    return std::numeric_limits<T>::quiet_NaN();
}

struct RootResult {
    Eigen::Index anchor;
    double offset;
};

template <class T>
RootResult solve_bracket(const double* x, Eigen::Index n, Eigen::Index k, double tol) {
    const T eps = std::numeric_limits<T>::epsilon();
    const T h = static_cast<T>(x[k]) - static_cast<T>(x[k - 1]);

    const SecularParts<T> mid = evaluate_parts<T>(x, n, k, x[k - 1], h / 2);
    const T gmid = mid.value();
    if (!std::isfinite(static_cast<double>(gmid)))
        throw InvariantViolation("compute_spectrum: non-finite secular value on bracket " + std::to_string(k));
    if (gmid == T(0)) return {k - 1, static_cast<double>(h / 2)};

    // Anchor at the pole on the side of the root; offsets stay small there.
    const bool left = gmid > 0;
    const Eigen::Index anchor = left ? k - 1 : k;
    const double base = x[anchor];
    const T pl = left ? T(0) : -h;
    const T pr = left ? h : T(0);
    T lo = left ? T(0) : -h / 2;
    T hi = left ? h / 2 : T(0);
    const T tau_mid = left ? h / 2 : -h / 2;

    T tau = tau_mid + rational_step(mid, pl, pr, tau_mid);
    if (!(tau > lo && tau < hi)) tau = (lo + hi) / 2;

    for (int it = 0; it < kMaxIterations; ++it) {
        const SecularParts<T> p = evaluate_parts<T>(x, n, k, base, tau);
        const T g = p.value();
        if (g == T(0)) return {anchor, static_cast<double>(tau)};
        if (g < 0)
            lo = tau;
        else
            hi = tau;

        T next = std::numeric_limits<T>::quiet_NaN();
        if (it < kRationalIterations) next = tau + rational_step(p, pl, pr, tau);
        if (!(next > lo && next < hi)) next = (lo + hi) / 2;

        const T step = std::abs(next - tau);
        const T scale = std::abs(tau);
        const T lambda = std::abs(static_cast<T>(base) + tau);
        if (step <= 4 * eps * scale || hi - lo <= 4 * eps * scale ||
            (tol > 0 && step <= static_cast<T>(tol) * lambda)) {
            if (!(next > pl && next < pr))
                throw InvariantViolation("compute_spectrum: root escaped bracket " + std::to_string(k));
            return {anchor, static_cast<double>(next)};
        }
        tau = next;
    }
    throw NonConvergence("compute_spectrum: bracket " + std::to_string(k) + " did not converge");
}

}  // namespace

SpectralDecomposition compute_spectrum(const Eigen::Ref<const Eigen::VectorXd>& rates, double tol) {
    const Eigen::Index n = rates.size();
    SpectralDecomposition s;
    s.rates = rates;
    s.eigenvalues = Eigen::VectorXd::Zero(n);
    s.weights = Eigen::VectorXd::Zero(n);
    s.offsets = Eigen::VectorXd::Zero(n);
    s.anchors.assign(static_cast<std::size_t>(n), -1);
    if (n == 0) return s;
    for (Eigen::Index j = 0; j < n; ++j)
        if (!(rates[j] > 0.0) || (j > 0 && !(rates[j] - rates[j - 1] > kMinRateGap)))
            throw InvariantViolation("compute_spectrum: rates must be positive, sorted and separated by the minimum gap");

    const double* x = s.rates.data();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ku) {
        const auto k = static_cast<Eigen::Index>(ku);
        if (k > 0) {
            const RootResult r = (x[k] - x[k - 1] < kExtendedBracket) ? solve_bracket<long double>(x, n, k, tol)
                                                                      : solve_bracket<double>(x, n, k, tol);
            s.anchors[ku] = r.anchor;
            s.offsets[k] = r.offset;
            s.eigenvalues[k] = x[r.anchor] + r.offset;
        }
        double inv_weight = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = s.rate_gap(j, k);
            inv_weight += x[j] / (d * d);
        }
        s.weights[k] = 1.0 / inv_weight;
    });
    return s;
}

double secular_residual(const SpectralDecomposition& s, Eigen::Index k) {
    if (k == 0) return 0.0;
    CompensatedSum<double> acc;
    for (Eigen::Index j = 0; j < s.size(); ++j) acc += 1.0 / s.rate_gap(j, k);
    return s.eigenvalues[k] * acc.value();
}

Eigen::VectorXd eigenvector(const SpectralDecomposition& s, Eigen::Index k) {
    if (k < 0 || k >= s.size()) throw std::out_of_range("eigenvector: index out of range");
    Eigen::VectorXd psi(s.size());
    if (k == 0) return psi.setOnes();
    for (Eigen::Index j = 0; j < s.size(); ++j) psi[j] = s.rates[j] / s.rate_gap(j, k);
    return psi;
}

double spectral_cdf_distance(const SpectralDecomposition& s, double alpha) {
    return ks_distance_power_law(s.eigenvalues, alpha);
}

Eigen::Index spectral_count_below(const Eigen::Ref<const Eigen::VectorXd>& rates, double a) {
    const Eigen::Index n = rates.size();
    if (n == 0 || a < 0.0) return 0;
    const auto m = static_cast<Eigen::Index>(std::upper_bound(rates.data(), rates.data() + n, a) - rates.data());
    if (m == n) return n;
    if (m == 0) return 1;
    if (rates[m - 1] == a) return m;
    CompensatedSum<double> g;
    for (Eigen::Index j = 0; j < n; ++j) g += 1.0 / (rates[j] - a);
    return g.value() >= 0.0 ? m + 1 : m;
}

PerturbationReport perturbation_report(const SpectralDecomposition& s) {
    const Eigen::Index n = s.size();
    if (n < 2) throw std::invalid_argument("perturbation_report: needs N >= 2");
    const Eigen::VectorXd& x = s.rates;
    PerturbationReport r;
    r.coupling = 1.0 / static_cast<double>(n);
    r.min_gap = min_gap(x);
    r.half_spread = x.sum() / 2.0;
    r.mean_rate = x.mean();
    r.condition_satisfied = r.mean_rate <= r.min_gap;
    r.first_order = -x;
    r.second_order.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        CompensatedSum<double> acc;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != k) acc += x[k] * x[j] / (x[k] - x[j]);
        r.second_order[k] = acc.value();
    }
    const double z = r.coupling;
    r.perturbed = x + z * r.first_order + z * z * r.second_order;
    for (Eigen::Index k = 1; k < n; ++k) {
        const double err = std::abs(r.perturbed[k] - s.eigenvalues[k]) / s.eigenvalues[k];
        if (err > r.max_relative_error || r.worst_index < 0) {
            r.max_relative_error = err;
            r.worst_index = k;
        }
    }
    r.peaks.resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 1; k < n; ++k) {
        const Eigen::VectorXd psi = eigenvector(s, k);
        PeakPair pp;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double m = std::abs(psi[j]);
            if (pp.first < 0 || m > std::abs(psi[pp.first])) {
                pp.second = pp.first;
                pp.first = j;
            } else if (pp.second < 0 || m > std::abs(psi[pp.second])) {
                pp.second = j;
            }
        }
        pp.first_sign = psi[pp.first] > 0 ? 1 : -1;
        pp.second_sign = psi[pp.second] > 0 ? 1 : -1;
        r.peaks[static_cast<std::size_t>(k)] = pp;
    }
    return r;
}

}  // namespace trap
