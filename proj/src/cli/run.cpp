#include "trap/cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trap/correlation.hpp"
#include "trap/io.hpp"
#include "trap/landscape.hpp"
#include "trap/montecarlo.hpp"
#include "trap/ppp.hpp"
#include "trap/spectral.hpp"
#include "trap/tauberian.hpp"

namespace trap::cli {

using nlohmann::json;
namespace fs = std::filesystem;
using io::fmt;

namespace {

EnergyLandscape landscape_of(const json& p) {
    return sample_landscape(
        {p.at("alpha").get<double>(), p.at("n").get<std::size_t>(), p.at("seed").get<std::uint64_t>()});
}

void save_landscape(const fs::path& dir, const EnergyLandscape& l) {
    std::ostringstream js, csv;
    io::write_landscape_json(js, l);
    io::write_landscape_csv(csv, l);
    io::write_file(dir / "landscape.json", js.str());
    io::write_file(dir / "landscape.csv", csv.str());
}

json run_sample(const json& p, const fs::path& dir) {
    const EnergyLandscape l = landscape_of(p);
    save_landscape(dir, l);
    // Empirical CDF of the rates against x^alpha.
    std::ostringstream curves;
    curves << "x,empirical_cdf,power_law_cdf\n";
    const double n = static_cast<double>(l.size());
    for (Eigen::Index i = 0; i < l.size(); ++i) {
        const double x = l.rates()[i];
        curves << fmt(x) << ',' << fmt((i + 1) / n) << ',' << fmt(std::pow(x, l.alpha())) << '\n';
    }
    io::write_file(dir / "curves.csv", curves.str());
    return {{"n", l.size()},
            {"ks_distance", ks_distance_power_law(l.rates(), l.alpha())},
            {"min_gap", min_gap(l.rates())},
            {"max_rate", l.rates().maxCoeff()}};
}

json run_spectrum(const json& p, const fs::path& dir) {
    const EnergyLandscape l = landscape_of(p);
    save_landscape(dir, l);
    const SpectralDecomposition s = compute_spectrum(l, p.at("tol").get<double>());
    std::ostringstream csv, js;
    io::write_spectrum_csv(csv, s);
    io::write_spectrum_json(js, s);
    io::write_file(dir / "curves.csv", csv.str());
    io::write_file(dir / "spectrum.json", js.str());
    double residual = 0.0;
    for (Eigen::Index k = 1; k < s.size(); ++k) residual = std::max(residual, std::abs(secular_residual(s, k)));
    return {{"n", s.size()},
            {"max_secular_residual", residual},
            {"spectral_cdf_distance", spectral_cdf_distance(s, l.alpha())},
            {"landscape_ks_distance", ks_distance_power_law(l.rates(), l.alpha())}};
}

json run_aging(const json& p, const fs::path& dir) {
    const EnergyLandscape l = landscape_of(p);
    save_landscape(dir, l);
    const double alpha = l.alpha();
    const double t_w = p.at("t_w").get<double>();
    const auto thetas = p.at("thetas").get<std::vector<double>>();
    std::vector<double> ts;
    for (double th : thetas) ts.push_back(th * t_w);

    const SpectralDecomposition s = compute_spectrum(l);
    const Eigen::VectorXd spectral = pi_spectral_curve(s, t_w, ts);
    McConfig mc;
    mc.replicas = p.at("replicas").get<std::size_t>();
    mc.seed = trajectory_seed(p.at("seed").get<std::uint64_t>());
    const auto sim = mc_pi_theta_curve(l.rates(), t_w, thetas, mc);

    std::ostringstream csv;
    csv << "alpha,theta,t_w,method,value,abs_err_estimate\n";
    double dev_mc = 0, dev_spec = 0, dev_mc_spec = 0, max_se = 0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double th = thetas[i];
        const double limit = aging_function(alpha, th);
        auto row = [&](const char* method, double v, double e) {
            csv << fmt(alpha) << ',' << fmt(th) << ',' << fmt(t_w) << ',' << method << ',' << fmt(v) << ',' << fmt(e)
                << '\n';
        };
        // Deterministic columns are exact to working precision.
        row("spectral", spectral[static_cast<Eigen::Index>(i)], 0.0);
        row("mc", sim[i].estimate, sim[i].stderr_);
        row("limit", limit, 0.0);
        dev_mc = std::max(dev_mc, std::abs(sim[i].estimate - limit));
        dev_spec = std::max(dev_spec, std::abs(spectral[static_cast<Eigen::Index>(i)] - limit));
        dev_mc_spec = std::max(dev_mc_spec, std::abs(sim[i].estimate - spectral[static_cast<Eigen::Index>(i)]));
        max_se = std::max(max_se, sim[i].stderr_);
    }
    io::write_file(dir / "curves.csv", csv.str());
    return {{"n", l.size()},
            {"replicas", mc.replicas},
            {"max_abs_dev_mc_limit", dev_mc},
            {"max_abs_dev_spectral_limit", dev_spec},
            {"max_abs_dev_mc_spectral", dev_mc_spec},
            {"max_stderr", max_se}};
}

json run_mc(const json& p, const fs::path& dir) {
    const EnergyLandscape l = landscape_of(p);
    save_landscape(dir, l);
    McConfig mc;
    mc.replicas = p.at("replicas").get<std::size_t>();
    mc.seed = trajectory_seed(p.at("seed").get<std::uint64_t>());
    const std::string what = p.at("quantity").get<std::string>();
    const double t_w = p.at("t_w").get<double>();
    const double delta = p.at("delta").get<double>();
    const CorrelationQuery q = CorrelationQuery::from_ratio(p.at("theta").get<double>(), t_w, delta);

    std::vector<double> samples;
    if (what == "pi" || what == "pi_indicator") {
        auto both = mc_pi_estimators(l.rates(), q, mc);
        samples = what == "pi" ? std::move(both.rao_blackwell_samples) : std::move(both.indicator_samples);
    } else if (what == "window1" || what == "window2") {
        const auto v = what == "window1" ? WindowVariant::deep_set : WindowVariant::deep_set_or_start;
        samples = mc_pi_window_samples(l.rates(), delta, q, v, mc);
    } else if (what == "deep") {
        samples = mc_deep_trap_samples(l.rates(), delta, t_w, mc);
    } else {
        samples = mc_scaled_depth(l.rates(), t_w, mc);
    }
    const McEstimate e = summarize(samples);

    std::ostringstream csv, sum;
    csv << "replica,quantity,value\n";
    for (std::size_t r = 0; r < samples.size(); ++r) csv << r << ',' << what << ',' << fmt(samples[r]) << '\n';
    sum << "quantity,estimate,stderr,n_replicas,seed\n"
        << what << ',' << fmt(e.estimate) << ',' << fmt(e.stderr_) << ',' << e.replicas << ',' << mc.seed << '\n';
    io::write_file(dir / "curves.csv", csv.str());
    io::write_file(dir / "summary.csv", sum.str());
    return {{"quantity", what}, {"estimate", e.estimate}, {"stderr", e.stderr_}, {"n_replicas", e.replicas},
            {"trajectory_seed", mc.seed}};
}

json run_ppp(const json& p, const fs::path& dir) {
    RegimeGrid g;
    g.regime = p.at("regime").get<int>();
    g.alpha = p.at("alpha").get<double>();
    g.threshold = p.at("threshold").get<double>();
    g.tau0s = p.at("tau0s").get<std::vector<double>>();
    g.thetas = p.at("thetas").get<std::vector<double>>();
    g.t_ws = p.at("t_ws").get<std::vector<double>>();
    g.delta = p.at("delta").get<double>();
    g.seed = p.at("seed").get<std::uint64_t>();
    g.mc.replicas = p.at("replicas").get<std::size_t>();
    g.mc.seed = trajectory_seed(g.seed);
    g.method = pi_method_from_string(p.at("method").get<std::string>());
    g.tol = p.at("tol").get<double>();
    const auto rows = regime_experiment(g);
    std::ostringstream csv;
    write_regime_csv(csv, rows);
    io::write_file(dir / "curves.csv", csv.str());
    json counts = json::array();
    for (const auto& r : rows)
        if (r.quantity == "count") counts.push_back({{"tau0", r.tau0}, {"count", r.value}});
    return {{"regime", g.regime}, {"rows", rows.size()}, {"counts", counts}};
}

}  // namespace

TauberSetup tauber_setup(const json& p) {
    const std::string kind = p.at("transform").get<std::string>();
    const double alpha = p.at("alpha").get<double>();
    TauberSetup t;
    if (kind == "pi_hat") {
        const double theta = p.at("theta").get<double>();
        t.ghat = [=](cplx w) { return pi_hat_limit(alpha, theta, w); };
        t.beta = 1.0;
        t.expected_B = aging_function(alpha, theta);
    } else {
        const double delta = p.at("delta").get<double>();
        const DepthDomain d = kind == "deep_trap_unit" ? DepthDomain::unit_interval : DepthDomain::half_line;
        t.ghat = [=](cplx w) { return deep_trap_laplace_limit(alpha, delta, d, w); };
        t.beta = alpha;
        t.expected_B = deep_trap_constants(alpha, delta, d).B;
    }
    return t;
}

namespace {

json run_tauber(const json& p, const fs::path& dir) {
    const TauberSetup t = tauber_setup(p);
    SectorGrid grid;
    grid.r_min = p.at("r_min").get<double>();
    grid.radii = p.at("radii").get<int>();
    const TauberianReport rep = tauberian_limit({t.ghat, t.beta, t.gamma}, grid);

    std::ostringstream csv;
    csv << "omega_re,omega_im,ghat_re,ghat_im\n";
    for (const auto& ray : rep.rays)
        for (std::size_t m = 0; m < ray.radii.size(); ++m) {
            const cplx w = std::polar(ray.radii[m], ray.angle);
            const cplx g = ray.scaled[m] / std::pow(w, t.beta);
            csv << fmt(w.real()) << ',' << fmt(w.imag()) << ',' << fmt(g.real()) << ',' << fmt(g.imag()) << '\n';
        }
    io::write_file(dir / "curves.csv", csv.str());

    const BromwichPath path = BromwichPath::for_exponents(t.gamma, t.beta, p.at("tol").get<double>());
    const double target = t.expected_B / tauberian_constant(t.beta);
    json inversions = json::array();
    for (double s : p.at("s_values").get<std::vector<double>>()) {
        const BromwichResult r = bromwich_invert(t.ghat, s, path);
        inversions.push_back({{"s", s},
                              {"G", r.value},
                              {"scaled", std::pow(s, 1.0 - t.beta) * r.value},
                              {"K", r.K},
                              {"closing", r.closing}});
    }
    json rays = json::array();
    for (const auto& r : rep.rays)
        rays.push_back({{"angle", r.angle},
                        {"limit_re", r.limit.real()},
                        {"limit_im", r.limit.imag()},
                        {"correction_exponent", r.correction_exponent}});
    return {{"beta", t.beta},
            {"gamma", t.gamma},
            {"B", rep.B},
            {"expected_B", t.expected_B},
            {"spread", rep.spread},
            {"correction_exponent", rep.correction_exponent},
            {"decay_exponent", rep.decay_exponent},
            {"expected_scaled_limit", target},
            {"rays", rays},
            {"inversions", inversions}};
}

}  // namespace

RunOutcome run_manifest(const Manifest& m, const fs::path& dir) {
    if (m.kind == Kind::validate) throw ValidationError("validate is not a run kind; call validate_run");
    fs::create_directories(dir);
    // The resolved manifest goes first so that a failed run still records what was asked.
    io::write_file(dir / "manifest.json", resolved_json(m).dump(2) + "\n");
    json body;
    switch (m.kind) {
    case Kind::sample: body = run_sample(m.params, dir); break;
    case Kind::spectrum: body = run_spectrum(m.params, dir); break;
    case Kind::aging: body = run_aging(m.params, dir); break;
    case Kind::mc: body = run_mc(m.params, dir); break;
    case Kind::ppp: body = run_ppp(m.params, dir); break;
    case Kind::tauber: body = run_tauber(m.params, dir); break;
    case Kind::validate: break;
    }
    json summary;
    summary["kind"] = to_string(m.kind);
    summary["version"] = kManifestVersion;
    summary["results"] = body;
    io::write_file(dir / "summary.json", summary.dump(2) + "\n");
    return {dir, summary};
}

}  // namespace trap::cli
