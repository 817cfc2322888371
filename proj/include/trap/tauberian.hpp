#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "trap/quadrature.hpp"

namespace trap {

using Transform = std::function<cplx(cplx)>;
using RealFunction = std::function<double(double)>;
using AnalyticFunction = std::function<cplx(cplx)>;

struct LaplaceOptions {
    double bound = 1.0;  ///< sup |G|, sets the truncation point
    double tol = 1e-12;
    std::size_t max_panels = 20000;
};

/// int_0^inf G(t) e^{-t omega} dt for Re omega > 0, truncated where
/// bound * e^{-t Re omega} < tol. Throws std::domain_error for Re omega <= 0.
cplx laplace_forward(const RealFunction& G, cplx omega, const LaplaceOptions& opts = {});

/// The same transform continued to omega off (-inf, 0] by integrating along
/// the ray arg t = -arg omega. G must be analytic and bounded by opts.bound on
/// the sector |arg t| <= |arg omega|.
cplx laplace_analytic(const AnalyticFunction& G, cplx omega, const LaplaceOptions& opts = {});

// ---------------------------------------------------------------------------

/// Ghat with its two sector exponents: |Ghat| <= c|omega|^{-gamma} for
/// |omega| >= 1 and omega^beta Ghat -> B as omega -> 0.
struct TauberianProbe {
    Transform ghat;
    double beta = 1.0;
    double gamma = 1.0;
};

struct RayFit {
    double angle = 0.0;
    std::vector<double> radii;
    std::vector<cplx> scaled;        ///< omega^beta Ghat(omega)
    cplx limit;                      ///< Aitken extrapolation of the three smallest radii
    double correction_exponent = 0;  ///< slope of log|scaled - limit| at the small end
};

struct TauberianReport {
    double B = 0.0;               ///< mean of Re(limit) over the rays
    double spread = 0.0;          ///< max |limit - B| over the rays
    double correction_exponent = 0.0;  ///< min over rays
    double decay_exponent = 0.0;  ///< empirical gamma from |omega| in [1e2, 1e4]
    std::vector<RayFit> rays;
};

struct SectorGrid {
    std::vector<double> angles{0.0, 1.5707963267948966, -1.5707963267948966, 2.356194490192345, -2.356194490192345};
    double r_max = 1.0;
    double r_min = 1e-4;
    int radii = 17;  ///< geometric, r_max down to r_min
};

/// Fits B = lim omega^beta Ghat(omega) along rays of the sector. Throws
/// NonConvergence when the scaled transform does not settle (hypotheses fail).
TauberianReport tauberian_limit(const TauberianProbe& p, const SectorGrid& grid = {});

/// Gamma(beta), the constant relating B to lim s^{1-beta} G(s).
inline double tauberian_constant(double beta) { return std::tgamma(beta); }

// ---------------------------------------------------------------------------

/// Deformed inversion path: arc of radius sqrt(2)/s through the positive axis
/// to angle 3pi/4, the ray segment to -1+i, the curve -t + i t^{1/rho} up to
/// height K, and the closing horizontal to x + iK (plus mirror images).
struct BromwichPath {
    double rho = 0.5;        ///< min(gamma, beta)/2
    double x = 0.0;          ///< abscissa of the vertical line; 0 picks 1/s
    double tol = 1e-8;       ///< bound on the closing-segment contribution
    double K0 = 2.0;
    int max_doublings = 60;

    static BromwichPath for_exponents(double gamma, double beta, double tol = 1e-8);
    void validate() const;
};

struct BromwichResult {
    double value = 0.0;
    double K = 0.0;
    double closing = 0.0;  ///< |contribution| of the closing segments at the final K
    int doublings = 0;
};

/// G(s) = (1/2 pi i) int e^{s omega} Ghat(omega) d omega over the path, for
/// real G. K doubles until the closing segments contribute less than path.tol.
BromwichResult bromwich_invert(const Transform& ghat, double s, const BromwichPath& path = {});

}  // namespace trap
