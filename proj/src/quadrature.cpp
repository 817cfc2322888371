#include "trap/quadrature.hpp"

#include <string>

namespace trap {

void ContourSpec::validate() const {
    if (!(left_margin > 0.0)) throw std::invalid_argument("ContourSpec: left margin must be positive");
    if (!(tolerance > 0.0)) throw std::invalid_argument("ContourSpec: tolerance must be positive");
    if (kind == ContourKind::finite_loop) {
        if (!(half_height > 0.0)) throw std::invalid_argument("ContourSpec: half height must be positive");
        if (!(right_end > -left_margin)) throw std::invalid_argument("ContourSpec: empty loop");
    } else if (!(truncation > 0.0)) {
        throw std::invalid_argument("ContourSpec: truncation must be positive");
    }
}

namespace {
double default_margin(double t, double t_w) { return std::min(0.5, 2.0 / std::max({t, t_w, 1.0})); }
}  // namespace

ContourSpec enclosing_contour(double x_max, double t, double t_w, double tolerance) {
    ContourSpec c;
    c.kind = ContourKind::finite_loop;
    c.left_margin = default_margin(t, t_w);
    c.right_end = std::max(x_max, 0.0) + c.left_margin;
    c.half_height = 0.5 * (c.right_end + c.left_margin);
    c.tolerance = tolerance;
    return c;
}

ContourSpec truncated_contour(double truncation, double t, double t_w, double tolerance) {
    ContourSpec c;
    c.kind = ContourKind::truncated_infinite;
    c.left_margin = default_margin(t, t_w);
    c.half_height = c.left_margin;
    c.truncation = truncation;
    c.right_end = truncation + c.left_margin;
    c.tolerance = tolerance;
    return c;
}

void SingularIntegralSpec::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("SingularIntegralSpec: alpha must lie in (0,1)");
    if (!(upper > 0.0)) throw std::invalid_argument("SingularIntegralSpec: upper limit must be positive");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("SingularIntegralSpec: tolerance must be positive");
}

double incomplete_beta_tail(double alpha, double lower) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("incomplete_beta_tail: alpha must lie in (0,1)");
    if (!(lower >= 0.0 && lower <= 1.0)) throw std::invalid_argument("incomplete_beta_tail: lower must lie in [0,1]");
    if (lower == 1.0) return 0.0;
    constexpr double tol = 2e-14;
    const double beta = 1.0 - alpha;
    double total = 0.0;

    // (max(lower,1/2), 1): v = (1-u)^alpha
    const double split = std::max(lower, 0.5);
    auto near_one = [&](double v) { return std::pow(1.0 - std::pow(v, 1.0 / alpha), -alpha); };
    const auto right = integrate_adaptive<double>(near_one, 0.0, std::pow(1.0 - split, alpha), tol * alpha, 1e-15);
    if (!right.converged) throw NonConvergence("incomplete_beta_tail: quadrature near 1 did not converge");
    total += right.value / alpha;

    // (lower, 1/2): w = u^{1-alpha}
    if (lower < 0.5) {
        auto near_zero = [&](double w) { return std::pow(1.0 - std::pow(w, 1.0 / beta), -beta); };
        const auto left =
            integrate_adaptive<double>(near_zero, std::pow(lower, beta), std::pow(0.5, beta), tol * beta, 1e-15);
        if (!left.converged) throw NonConvergence("incomplete_beta_tail: quadrature near 0 did not converge");
        total += left.value / beta;
    }
    return total;
}

}  // namespace trap
