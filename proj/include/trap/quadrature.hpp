#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "trap/errors.hpp"

namespace trap {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7/15) on real intervals, real or complex integrands.

namespace detail {

inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1,3,5 and the centre.
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
    double a, b;
    V value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class V, class F>
Panel<V> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const V fc = f(c);
    V kron = fc * kKronrodWeights[7];
    V gauss = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kKronrodNodes[i];
        const V sum = f(c - dx) + f(c + dx);
        kron += sum * kKronrodWeights[i];
        if (i % 2 == 1) gauss += sum * kGaussWeights[i / 2];
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

template <class V>
struct QuadResult {
    V value{};
    double error = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Globally adaptive quadrature over consecutive panels [p_0,p_1],...,
/// bisecting the panel with the largest error estimate until the total error
/// is below max(abs_tol, rel_tol*|value|) or max_panels is reached.
template <class V, class F>
QuadResult<V> integrate_adaptive(F&& f, std::span<const double> points, double abs_tol, double rel_tol = 0.0,
                                 std::size_t max_panels = 4000) {
    std::priority_queue<detail::Panel<V>> heap;
    QuadResult<V> r;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        heap.push(detail::gk15<V>(f, points[i], points[i + 1]));
        r.evaluations += 15;
    }
    auto totals = [&] {
        V v{};
        double e = 0;
        auto copy = heap;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        return std::pair{v, e};
    };
    V value{};
    double error = 0;
    {
        auto [v, e] = totals();
        value = v;
        error = e;
    }
    while (!heap.empty() && error > std::max(abs_tol, rel_tol * std::abs(value)) && heap.size() < max_panels) {
        const detail::Panel<V> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        const auto left = detail::gk15<V>(f, worst.a, mid);
        const auto right = detail::gk15<V>(f, mid, worst.b);
        r.evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Re-sum occasionally so the running totals do not drift.
        if (heap.size() % 64 == 0) {
            auto [v, e] = totals();
            value = v;
            error = e;
        }
    }
    auto [v, e] = totals();
    r.value = v;
    r.error = e;
    r.converged = e <= std::max(abs_tol, rel_tol * std::abs(v));
    return r;
}

template <class V, class F>
QuadResult<V> integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                                 std::size_t max_panels = 4000) {
    const double pts[2] = {a, b};
    return integrate_adaptive<V>(std::forward<F>(f), std::span<const double>(pts, 2), abs_tol, rel_tol, max_panels);
}

// ---------------------------------------------------------------------------
// Closed contours.

enum class ContourKind {
    finite_loop,         ///< closed loop inside [-eps, right_end] x [-h, h]
    truncated_infinite,  ///< stadium of radius eps around [0, truncation]
};

struct ContourSpec {
    ContourKind kind = ContourKind::finite_loop;
    double left_margin = 0.5;   ///< eps: the loop crosses the real axis at -eps
    double right_end = 1.5;
    double half_height = 1.0;
    double nodes_per_unit = 0;  ///< initial trapezoid density; 0 picks 2/eps
    double truncation = 0;      ///< M, right end of the enclosed segment for truncated_infinite
    double tolerance = 1e-10;
    int max_doublings = 20;

    void validate() const;
};

/// Loop around [0, x_max] with eps = min(0.5, 2/max(t, t_w, 1)); the left edge
/// amplifies e^{-t lambda} by at most e^2.
ContourSpec enclosing_contour(double x_max, double t, double t_w, double tolerance = 1e-10);

/// Stadium around [0, M] with the same eps rule.
ContourSpec truncated_contour(double truncation, double t, double t_w, double tolerance = 1e-10);

struct ConvergenceStep {
    std::size_t nodes;
    cplx value;
    double change;
};

struct ContourResult {
    cplx value;
    std::vector<ConvergenceStep> trace;
};

namespace detail {

// The finite loop is the ellipse inscribed in the rectangle, so the
// trapezoid rule sees a smooth periodic integrand.
struct EllipseLoop {
    double centre, semi_x, semi_y;
    explicit EllipseLoop(const ContourSpec& c)
        : centre(0.5 * (c.right_end - c.left_margin)), semi_x(0.5 * (c.right_end + c.left_margin)),
          semi_y(c.half_height) {}
    cplx point(double th) const { return {centre + semi_x * std::cos(th), semi_y * std::sin(th)}; }
    cplx tangent(double th) const { return {-semi_x * std::sin(th), semi_y * std::cos(th)}; }
    double perimeter() const {
        const double a = semi_x, b = semi_y;
        const double hh = (a - b) * (a - b) / ((a + b) * (a + b));
        return std::numbers::pi * (a + b) * (1 + 3 * hh / (10 + std::sqrt(4 - 3 * hh)));
    }
};

}  // namespace detail

/// (1/2 pi i) times the contour integral of f, positively oriented. Finite
/// loops use the trapezoid rule with node doubling (previous nodes reused)
/// until successive values differ by less than the tolerance; truncated
/// stadia use adaptive Gauss-Kronrod on each piece. Throws NonConvergence.
template <class F>
ContourResult contour_integrate(F&& f, const ContourSpec& c) {
    c.validate();
    const double two_pi = 2.0 * std::numbers::pi;
    const cplx two_pi_i(0.0, two_pi);
    ContourResult out;
    if (c.kind == ContourKind::finite_loop) {
        const detail::EllipseLoop loop(c);
        const double density = c.nodes_per_unit > 0 ? c.nodes_per_unit : 2.0 / c.left_margin;
        std::size_t n = std::max<std::size_t>(32, static_cast<std::size_t>(std::ceil(density * loop.perimeter())));
        auto node = [&](double th) { return f(loop.point(th)) * loop.tangent(th); };
        cplx sum{};
        for (std::size_t m = 0; m < n; ++m) sum += node(two_pi * static_cast<double>(m) / static_cast<double>(n));
        cplx value = sum * (two_pi / static_cast<double>(n)) / two_pi_i;
        out.trace.push_back({n, value, std::numeric_limits<double>::infinity()});
        for (int d = 0; d < c.max_doublings; ++d) {
            cplx extra{};
            for (std::size_t m = 0; m < n; ++m)
                extra += node(two_pi * (static_cast<double>(m) + 0.5) / static_cast<double>(n));
            sum += extra;
            n *= 2;
            const cplx next = sum * (two_pi / static_cast<double>(n)) / two_pi_i;
            const double change = std::abs(next - value);
            value = next;
            out.trace.push_back({n, value, change});
            if (change < c.tolerance) {
                out.value = value;
                return out;
            }
        }
        throw NonConvergence("contour_integrate: no convergence after node doubling");
    }

    // Stadium: bottom edge, right half-circle, top edge, left half-circle.
    const double eps = c.left_margin;
    const double M = c.truncation;
    const double tol = c.tolerance / 4.0;
    cplx total{};
    std::size_t evals = 0;
    // Poles sit eps off the edges, so the edges start from panels of width
    // about eps; a single wide GK15 panel can step over them unnoticed.
    constexpr std::size_t kMaxEdgePanels = 200000;
    const auto edge_panels = static_cast<std::size_t>(std::ceil(M / eps));
    if (edge_panels > kMaxEdgePanels) throw NonConvergence("contour_integrate: stadium too long for its margin");
    auto add = [&](auto&& piece, double a, double b, std::size_t n = 1) {
        std::vector<double> pts(n + 1);
        for (std::size_t i = 0; i <= n; ++i) pts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
        const auto r = integrate_adaptive<cplx>(piece, pts, tol * two_pi, 0.0, 4 * n + 20000);
        if (!r.converged) throw NonConvergence("contour_integrate: stadium piece did not converge");
        total += r.value;
        evals += r.evaluations;
    };
    add([&](double s) { return f(cplx(s, -eps)); }, 0.0, M, std::max<std::size_t>(edge_panels, 1));
    add([&](double th) { return f(M + eps * std::polar(1.0, th)) * cplx(0, eps) * std::polar(1.0, th); },
        -0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
    add([&](double s) { return -f(cplx(s, eps)); }, 0.0, M, std::max<std::size_t>(edge_panels, 1));
    add([&](double th) { return f(eps * std::polar(1.0, th)) * cplx(0, eps) * std::polar(1.0, th); },
        0.5 * std::numbers::pi, 1.5 * std::numbers::pi);
    out.value = total / two_pi_i;
    out.trace.push_back({evals, out.value, 0.0});
    return out;
}

// ---------------------------------------------------------------------------
// Expectations against alpha x^{alpha-1} dx.

struct SingularIntegralSpec {
    double alpha = 0.5;
    double upper = 1.0;  ///< right end of the domain; +inf for the half-line
    double abs_tol = 1e-12;
    std::vector<double> breakpoints;  ///< discontinuities of h, in x

    void validate() const;
};

namespace detail {

inline void add_break(std::vector<double>& pts, double u) {
    if (u > 0.0 && u < 1.0) pts.push_back(u);
}

inline std::vector<double> finish_breaks(std::vector<double> pts) {
    pts.push_back(0.0);
    pts.push_back(1.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace detail

/// Integral of h(x)/(lambda - x) alpha x^{alpha-1} over (0, upper). The
/// substitution x = upper*u^{1/alpha} (and x = 1/y, y = v^{1/(1-alpha)} on
/// (1, inf)) removes the endpoint singularity. Throws std::domain_error for
/// lambda on the integration domain.
template <class H>
cplx ex_integral(H&& h, cplx lambda, const SingularIntegralSpec& s) {
    s.validate();
    const bool half_line = std::isinf(s.upper);
    if (lambda.imag() == 0.0 && lambda.real() >= 0.0 && (half_line || lambda.real() <= s.upper))
        throw std::domain_error("ex_integral: lambda on the integration domain");
    const double a = s.alpha;
    const double top = half_line ? 1.0 : s.upper;
    const double scale = std::pow(top, a);
    const double nearest = std::clamp(lambda.real(), 0.0, top);
    const double tol = half_line ? s.abs_tol / 2 : s.abs_tol;

    std::vector<double> pts;
    for (double d : s.breakpoints)
        if (d > 0 && d < top) detail::add_break(pts, std::pow(d / top, a));
    if (nearest > 0) detail::add_break(pts, std::pow(nearest / top, a));
    pts = detail::finish_breaks(std::move(pts));
    auto inner = [&](double u) -> cplx {
        const double x = top * std::pow(u, 1.0 / a);
        const double hv = h(x);
        return hv == 0.0 ? cplx{} : hv / (lambda - x);
    };
    auto r = integrate_adaptive<cplx>(inner, pts, tol / scale, 1e-13, 8000);
    if (!r.converged) throw NonConvergence("ex_integral: adaptive quadrature did not converge");
    cplx value = scale * r.value;
    if (!half_line) return value;

    const double b = 1.0 - a;
    std::vector<double> tail;
    for (double d : s.breakpoints)
        if (d > 1.0) detail::add_break(tail, std::pow(1.0 / d, b));
    if (lambda.real() > 1.0) detail::add_break(tail, std::pow(1.0 / lambda.real(), b));
    tail = detail::finish_breaks(std::move(tail));
    auto outer = [&](double v) -> cplx {
        const double y = std::pow(v, 1.0 / b);
        if (y == 0.0) return cplx{};
        const double hv = h(1.0 / y);
        return hv == 0.0 ? cplx{} : hv / (lambda * y - 1.0);
    };
    auto q = integrate_adaptive<cplx>(outer, tail, tol * b / a, 1e-13, 8000);
    if (!q.converged) throw NonConvergence("ex_integral: tail quadrature did not converge");
    return value + (a / b) * q.value;
}

/// Integral over (lower, 1) of u^{-alpha}(1-u)^{alpha-1}, absolute error below 1e-12.
double incomplete_beta_tail(double alpha, double lower);

/// pi / sin(pi alpha), the complete integral.
inline double beta_reflection(double alpha) { return std::numbers::pi / std::sin(std::numbers::pi * alpha); }

}  // namespace trap
