#include "trap/resolvent.hpp"

#include <cmath>
#include <stdexcept>

#include "trap/errors.hpp"
#include "trap/landscape.hpp"
#include "trap/random.hpp"
#include "trap/spectral.hpp"
#include "trap/summation.hpp"

namespace trap {

void ReversibleChain::validate(double tol) const {
    const Eigen::Index n = generator.rows();
    if (generator.cols() != n || mu.size() != n || initial.size() != n)
        throw std::invalid_argument("ReversibleChain: inconsistent sizes");
    if ((mu.array() <= 0.0).any()) throw std::invalid_argument("ReversibleChain: mu must be positive");
    if ((initial.array() < 0.0).any() || std::abs(initial.sum() - 1.0) > tol * n)
        throw std::invalid_argument("ReversibleChain: initial law is not a probability vector");
    const double scale = std::max(1.0, generator.cwiseAbs().maxCoeff());
    if (generator.rowwise().sum().cwiseAbs().maxCoeff() > tol * scale * n)
        throw std::invalid_argument("ReversibleChain: rows must sum to zero");
    const Eigen::MatrixXd flux = mu.asDiagonal() * generator;
    if ((flux - flux.transpose()).cwiseAbs().maxCoeff() > tol * scale * mu.maxCoeff())
        throw std::invalid_argument("ReversibleChain: generator is not reversible for mu");
}

ReversibleChain ReversibleChain::trap_model(const Eigen::Ref<const Eigen::VectorXd>& rates) {
    ReversibleChain c;
    c.generator = build_generator<double>(rates);
    c.mu = rates.cwiseInverse();
    c.initial = Eigen::VectorXd::Constant(rates.size(), 1.0 / static_cast<double>(rates.size()));
    return c;
}

ReversibleChain ReversibleChain::random(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("ReversibleChain::random: n must be positive");
    Philox4x32 rng(seed, 0);
    ReversibleChain c;
    c.mu.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) c.mu[i] = 0.5 + rng.uniform();
    c.generator = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double cond = rng.uniform();
            c.generator(i, j) = -cond / c.mu[i];
            c.generator(j, i) = -cond / c.mu[j];
        }
    for (Eigen::Index i = 0; i < n; ++i) c.generator(i, i) = -c.generator.row(i).sum();
    c.initial.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) c.initial[i] = rng.exponential(1.0);
    c.initial /= c.initial.sum();
    return c;
}

ContourSpec chain_contour(const ReversibleChain& chain, double t, double tolerance) {
    // Gershgorin: the spectrum is real and inside [0, 2 max L_ii].
    return enclosing_contour(2.0 * chain.generator.diagonal().maxCoeff(), t, 0.0, tolerance);
}

Eigen::VectorXd transition_probs_contour(const ReversibleChain& chain, double t, const ContourSpec& c) {
    chain.validate(1e-10);
    c.validate();
    const Eigen::Index n = chain.size();
    if (n > kMaxResolventSize) throw std::invalid_argument("transition_probs_contour: N above the dense cap");
    if (c.kind != ContourKind::finite_loop) throw std::invalid_argument("transition_probs_contour: needs a finite loop");
    const Eigen::VectorXcd rhs = chain.initial.cwiseQuotient(chain.mu).cast<cplx>();
    const Eigen::MatrixXcd L = chain.generator.cast<cplx>();

    const detail::EllipseLoop loop(c);
    const double two_pi = 2.0 * std::numbers::pi;
    auto node = [&](double th) -> Eigen::VectorXcd {
        const cplx lambda = loop.point(th);
        Eigen::MatrixXcd a = -L;
        a.diagonal().array() += lambda;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
        if (!(std::abs(lu.determinant()) > 0.0))
            throw InvariantViolation("transition_probs_contour: node on an eigenvalue");
        return (std::exp(-t * lambda) * loop.tangent(th)) * lu.solve(rhs);
    };
    const double density = c.nodes_per_unit > 0 ? c.nodes_per_unit : 2.0 / c.left_margin;
    std::size_t m = std::max<std::size_t>(32, static_cast<std::size_t>(std::ceil(density * loop.perimeter())));
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(n);
    for (std::size_t i = 0; i < m; ++i) sum += node(two_pi * static_cast<double>(i) / static_cast<double>(m));
    auto scaled = [&](std::size_t count) -> Eigen::VectorXd {
        const cplx f = (two_pi / static_cast<double>(count)) / cplx(0.0, two_pi);
        return (chain.mu.cast<cplx>().cwiseProduct(sum) * f).real();
    };
    Eigen::VectorXd value = scaled(m);
    for (int d = 0; d < c.max_doublings; ++d) {
        for (std::size_t i = 0; i < m; ++i)
            sum += node(two_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(m));
        m *= 2;
        const Eigen::VectorXd next = scaled(m);
        const double change = (next - value).cwiseAbs().maxCoeff();
        value = next;
        if (change < c.tolerance) return value;
    }
    throw NonConvergence("transition_probs_contour: no convergence after node doubling");
}

double transition_prob_contour(const ReversibleChain& chain, Eigen::Index j, double t, const ContourSpec& c) {
    if (j < 0 || j >= chain.size()) throw std::out_of_range("transition_prob_contour: site index");
    return transition_probs_contour(chain, t, c)[j];
}

double trap_transition_prob_contour(const Eigen::Ref<const Eigen::VectorXd>& rates, Eigen::Index j, double t,
                                    const ContourSpec& c) {
    if (j < 0 || j >= rates.size()) throw std::out_of_range("trap_transition_prob_contour: site index");
    const double xj = rates[j];
    auto f = [&](cplx l) { return std::exp(-t * l) / ((xj - l) * secular_phi<double>(rates, l)); };
    return contour_integrate(f, c).value.real();
}

Eigen::VectorXd uniformization_oracle(const ReversibleChain& chain, double t) {
    chain.validate(1e-10);
    if (!(t >= 0.0)) throw std::invalid_argument("uniformization_oracle: t must be non-negative");
    const Eigen::Index n = chain.size();
    const double rate = chain.generator.diagonal().maxCoeff();
    if (t == 0.0 || rate <= 0.0) return chain.initial;
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - chain.generator / rate;
    const double mean = rate * t;
    Eigen::RowVectorXd v = chain.initial.transpose();
    std::vector<CompensatedSum<double>> acc(static_cast<std::size_t>(n));
    CompensatedSum<double> mass;
    for (long k = 0;; ++k) {
        const double w = std::exp(-mean + static_cast<double>(k) * std::log(mean) - std::lgamma(k + 1.0));
        for (Eigen::Index i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] += w * v[i];
        mass += w;
        if (static_cast<double>(k) > mean && 1.0 - mass.value() < kPoissonTail) break;
        if (k > 100000000) throw NonConvergence("uniformization_oracle: Poisson series too long");
        v = v * P;
    }
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = acc[static_cast<std::size_t>(i)].value();
    return out;
}

std::complex<double> cofactor_determinant(const Eigen::MatrixXcd& a) {
    const Eigen::Index n = a.rows();
    if (n == 0) return 1.0;
    if (n == 1) return a(0, 0);
    std::complex<double> det = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::MatrixXcd minor(n - 1, n - 1);
        for (Eigen::Index i = 1; i < n; ++i)
            for (Eigen::Index j = 0, jj = 0; j < n; ++j)
                if (j != c) minor(i - 1, jj++) = a(i, j);
        const double sign = c % 2 == 0 ? 1.0 : -1.0;
        det += sign * a(0, c) * cofactor_determinant(minor);
    }
    return det;
}

namespace {

Eigen::MatrixXcd shifted_generator(const Eigen::Ref<const Eigen::VectorXd>& rates, std::complex<double> lambda) {
    Eigen::MatrixXcd a = -build_generator<double>(rates).cast<cplx>();
    a.diagonal().array() += lambda;
    return a;
}

Eigen::MatrixXcd drop(const Eigen::MatrixXcd& a, Eigen::Index row, Eigen::Index col) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXcd m(n - 1, n - 1);
    for (Eigen::Index i = 0, ii = 0; i < n; ++i) {
        if (i == row) continue;
        for (Eigen::Index j = 0, jj = 0; j < n; ++j)
            if (j != col) m(ii, jj++) = a(i, j);
        ++ii;
    }
    return m;
}

void require_small(const Eigen::Ref<const Eigen::VectorXd>& rates, Eigen::Index lo) {
    if (rates.size() < lo || rates.size() > 6) throw std::invalid_argument("cofactor checks need a small landscape");
}

}  // namespace

double determinant_identity_check(const Eigen::Ref<const Eigen::VectorXd>& rates, std::complex<double> lambda,
                                  Eigen::Index j) {
    require_small(rates, 2);
    if (j < 0 || j >= rates.size()) throw std::out_of_range("determinant_identity_check: site index");
    const Eigen::MatrixXcd a = shifted_generator(rates, lambda);
    std::complex<double> lhs = 0.0, rhs = 1.0;
    for (Eigen::Index k = 0; k < rates.size(); ++k) {
        const double sign = (j + k) % 2 == 0 ? 1.0 : -1.0;
        lhs += sign * (rates[k] / rates[j]) * cofactor_determinant(drop(a, k, j));
        if (k != j) rhs *= lambda - rates[k];
    }
    return std::abs(lhs - rhs);
}

double char_poly_residual(const Eigen::Ref<const Eigen::VectorXd>& rates, std::complex<double> lambda) {
    require_small(rates, 1);
    const Eigen::Index n = rates.size();
    const std::complex<double> det = cofactor_determinant(shifted_generator(rates, lambda));
    std::complex<double> sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        std::complex<double> p = 1.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != k) p *= lambda - rates[j];
        sum += p;
    }
    const std::complex<double> rhs = lambda * sum / static_cast<double>(n);
    const double scale = std::max({std::abs(det), std::abs(rhs), 1e-300});
    return std::abs(det - rhs) / scale;
}

}  // namespace trap
