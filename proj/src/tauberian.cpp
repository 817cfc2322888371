#include "trap/tauberian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "trap/summation.hpp"

namespace trap {

cplx laplace_forward(const RealFunction& G, cplx omega, const LaplaceOptions& opts) {
    if (!(omega.real() > 0.0)) throw std::domain_error("laplace_forward: Re omega must be positive");
    const double T = std::log(std::max(opts.bound, opts.tol) / opts.tol) / omega.real();
    // One panel per oscillation, capped.
    const auto cycles = static_cast<std::size_t>(std::min(2000.0, std::ceil(std::abs(omega.imag()) * T / (2 * std::numbers::pi))));
    std::vector<double> pts;
    const std::size_t n = cycles + 1;
    for (std::size_t i = 0; i <= n; ++i) pts.push_back(T * static_cast<double>(i) / static_cast<double>(n));
    if (T > 1.0) pts.insert(pts.begin() + 1, std::min(1.0, pts[1] / 2));
    std::sort(pts.begin(), pts.end());
    const auto r = integrate_adaptive<cplx>([&](double t) { return G(t) * std::exp(-t * omega); }, pts,
                                            opts.tol, 1e-13, opts.max_panels + n);
    if (!r.converged) throw NonConvergence("laplace_forward: panel budget exhausted");
    return r.value;
}

cplx laplace_analytic(const AnalyticFunction& G, cplx omega, const LaplaceOptions& opts) {
    if (omega.imag() == 0.0 && omega.real() <= 0.0) throw std::domain_error("laplace_analytic: omega on (-inf, 0]");
    const double m = std::abs(omega);
    const cplx dir = std::conj(omega) / m;  // e^{-i arg omega}, so t*omega = u real
    const double u_max = std::log(std::max(opts.bound, opts.tol) / opts.tol) + 1.0;
    const double pts[] = {0.0, 1.0, 5.0, u_max};
    const auto r = integrate_adaptive<cplx>([&](double u) { return G(u * dir / m) * std::exp(-u); },
                                            std::span<const double>(pts, 4), opts.tol * m, 1e-14, opts.max_panels);
    if (!r.converged) throw NonConvergence("laplace_analytic: quadrature did not converge");
    return r.value * dir / m;
}

// ---------------------------------------------------------------------------

namespace {

cplx aitken(cplx a, cplx b, cplx c) {
    const cplx d1 = b - a, d2 = c - b;
    const cplx den = d2 - d1;
    if (std::abs(den) <= 1e-300 || std::abs(d2) <= 1e-15 * std::abs(c)) return c;
    return c - d2 * d2 / den;
}

}  // namespace

TauberianReport tauberian_limit(const TauberianProbe& p, const SectorGrid& grid) {
    if (!(p.beta > 0.0)) throw std::invalid_argument("tauberian_limit: beta must be positive");
    if (grid.radii < 3 || !(grid.r_min > 0.0 && grid.r_max > grid.r_min))
        throw std::invalid_argument("tauberian_limit: need at least three decreasing radii");
    TauberianReport rep;
    const double q = std::pow(grid.r_min / grid.r_max, 1.0 / (grid.radii - 1));
    double correction = std::numeric_limits<double>::infinity();
    CompensatedSum<double> b_sum;
    for (double phi : grid.angles) {
        if (std::abs(phi) > 0.75 * std::numbers::pi + 1e-12)
            throw std::invalid_argument("tauberian_limit: ray outside the sector |arg| <= 3pi/4");
        RayFit ray;
        ray.angle = phi;
        for (int m = 0; m < grid.radii; ++m) {
            const double r = grid.r_max * std::pow(q, m);
            const cplx w = std::polar(r, phi);
            const cplx v = std::pow(w, p.beta) * p.ghat(w);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NonConvergence("tauberian_limit: non-finite transform on the sector");
            ray.radii.push_back(r);
            ray.scaled.push_back(v);
        }
        const std::size_t n = ray.scaled.size();
        ray.limit = aitken(ray.scaled[n - 3], ray.scaled[n - 2], ray.scaled[n - 1]);
        const double e1 = std::abs(ray.scaled[n - 3] - ray.limit);
        const double e2 = std::abs(ray.scaled[n - 2] - ray.limit);
        ray.correction_exponent = (e1 > 0 && e2 > 0) ? std::log(e1 / e2) / std::log(1.0 / q) : 0.0;
        // Divergent fit: the scaled transform moves away from its own limit.
        const double first = std::abs(ray.scaled.front() - ray.limit);
        const double last = std::abs(ray.scaled.back() - ray.limit);
        if (last > first + 1e-12 * std::abs(ray.limit) + 1e-15)
            throw NonConvergence("tauberian_limit: omega^beta Ghat does not settle along a ray");
        if (e1 > 1e-13 * std::abs(ray.limit)) correction = std::min(correction, ray.correction_exponent);
        b_sum += ray.limit.real();
        rep.rays.push_back(std::move(ray));
    }
    rep.B = b_sum.value() / static_cast<double>(rep.rays.size());
    for (const auto& r : rep.rays) rep.spread = std::max(rep.spread, std::abs(r.limit - rep.B));
    rep.correction_exponent = std::isinf(correction) ? 0.0 : correction;

    // Decay for |omega| >= 1 on the real ray.
    const double g1 = std::abs(p.ghat(cplx(1e2, 0.0)));
    const double g2 = std::abs(p.ghat(cplx(1e4, 0.0)));
    rep.decay_exponent = (g1 > 0 && g2 > 0) ? std::log(g1 / g2) / std::log(1e2) : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------

BromwichPath BromwichPath::for_exponents(double gamma, double beta, double tol) {
    BromwichPath p;
    p.rho = std::min(gamma, beta) / 2.0;
    p.tol = tol;
    return p;
}

void BromwichPath::validate() const {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("BromwichPath: rho must lie in (0,1]");
    if (!(x >= 0.0)) throw std::invalid_argument("BromwichPath: x must be non-negative");
    if (!(tol > 0.0)) throw std::invalid_argument("BromwichPath: tolerance must be positive");
    if (!(K0 >= 1.0)) throw std::invalid_argument("BromwichPath: K0 must be at least 1");
}

BromwichResult bromwich_invert(const Transform& ghat, double s, const BromwichPath& path) {
    path.validate();
    if (!(s > 0.0)) throw std::invalid_argument("bromwich_invert: s must be positive");
    const double pi = std::numbers::pi;
    const double x = path.x > 0.0 ? path.x : 1.0 / s;
    const double piece_tol = path.tol * pi / 8.0;
    auto f = [&](cplx w) { return std::exp(s * w) * ghat(w); };
    auto integrate = [&](auto&& g, std::vector<double> pts) {
        const auto r = integrate_adaptive<cplx>(g, pts, piece_tol, 1e-12, 20000);
        if (!r.converged) throw NonConvergence("bromwich_invert: path segment did not converge");
        return r.value;
    };

    // Upper half of the path; the lower half is its mirror, so G = Im(I)/pi.
    cplx I{};
    const double r0 = std::sqrt(2.0) / s;
    const double top = 0.75 * pi;
    I += integrate([&](double psi) { const cplx w = std::polar(r0, psi); return f(w) * cplx(0, 1) * w; },
                   {0.0, top / 2, top});

    const cplx dir = std::polar(1.0, top);
    const double r1 = std::sqrt(2.0);
    if (r0 != r1) {
        const double lo = std::min(r0, r1), hi = std::max(r0, r1);
        std::vector<double> pts{lo};
        for (double r = 4 * lo; r < hi; r *= 4) pts.push_back(r);
        pts.push_back(hi);
        const cplx seg = integrate([&](double r) { return f(r * dir) * dir; }, pts);
        I += r0 < r1 ? seg : -seg;
    }

    // The curve is followed until e^{-st} is negligible, i.e. as K -> inf;
    // K itself only has to make the closing segments small.
    const double inv_rho = 1.0 / path.rho;
    auto curve = [&](double t) {
        const cplx w(-t, std::pow(t, inv_rho));
        const cplx dw(-1.0, inv_rho * std::pow(t, inv_rho - 1.0));
        return f(w) * dw;
    };
    auto closing = [&](double K) {
        const double lo = std::max(-std::pow(K, path.rho), x - 60.0 / s);
        return integrate([&](double u) { return f(cplx(u, K)); }, {lo, std::max(lo, x - 5.0 / s), x});
    };

    BromwichResult res;
    double K = path.K0;
    const double t_cut = 1.0 + 60.0 / s;
    for (int d = 0; d <= path.max_doublings; ++d, K *= 2) {
        const double c = std::abs(closing(K)) / pi;
        if (c < path.tol) {
            std::vector<double> pts{1.0};
            for (double t = 2.0; t < t_cut; t *= 2) pts.push_back(t);
            pts.push_back(t_cut);
            I += integrate(curve, pts);
            res.value = I.imag() / pi;
            res.K = K;
            res.closing = c;
            res.doublings = d;
            return res;
        }
    }
    throw NonConvergence("bromwich_invert: closing segment did not fall below tolerance");
}

}  // namespace trap
