#include "trap/cli/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trap/cli/manifest.hpp"
#include "trap/cli/run.hpp"
#include "trap/correlation.hpp"
#include "trap/io.hpp"
#include "trap/landscape.hpp"
#include "trap/montecarlo.hpp"
#include "trap/ppp.hpp"

namespace trap::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Checker {
public:
    explicit Checker(ValidationReport& r) : r_(r) {}
    void operator()(const std::string& name, bool ok, const std::string& detail = "") {
        if (ok)
            r_.passed.push_back(name);
        else
            r_.violations.push_back(detail.empty() ? name : name + ": " + detail);
    }

private:
    ValidationReport& r_;
};

std::string num(double v) { return io::fmt(v); }

io::CsvTable table(const fs::path& p) {
    if (!fs::exists(p)) throw ValidationError("missing artifact " + p.filename().string());
    try {
        return io::read_csv(p);
    } catch (const std::runtime_error& e) {
        throw ValidationError(p.filename().string() + ": " + e.what());
    }
}

std::vector<double> column(const io::CsvTable& t, const std::string& name) {
    try {
        return t.numbers(name);
    } catch (const std::runtime_error& e) {
        throw ValidationError(std::string("curves.csv: ") + e.what());
    }
}

void check_header(Checker& check, const io::CsvTable& t, const std::vector<std::string>& want) {
    check("curves.csv header", t.header == want);
}

EnergyLandscape stored_landscape(const fs::path& dir) {
    if (!fs::exists(dir / "landscape.json")) throw ValidationError("missing artifact landscape.json");
    std::istringstream is(io::read_file(dir / "landscape.json"));
    try {
        return io::read_landscape_json(is);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("landscape.json: ") + e.what());
    }
}

// The stored landscape must be the one the manifest draws.
EnergyLandscape replay_landscape(Checker& check, const fs::path& dir, const json& p) {
    const EnergyLandscape stored = stored_landscape(dir);
    const EnergyLandscape fresh = sample_landscape(
        {p.at("alpha").get<double>(), p.at("n").get<std::size_t>(), p.at("seed").get<std::uint64_t>()});
    check("landscape replays from the manifest",
          stored.size() == fresh.size() && stored.energies() == fresh.energies());
    return stored;
}

void validate_sample(Checker& check, const fs::path& dir, const json& p) {
    const EnergyLandscape l = replay_landscape(check, dir, p);
    const io::CsvTable csv = table(dir / "landscape.csv");
    check("landscape.csv header", csv.header == std::vector<std::string>{"index", "energy", "rate", "tau"});
    const auto rate = csv.numbers("rate");
    const auto tau = csv.numbers("tau");
    bool same = static_cast<Eigen::Index>(rate.size()) == l.size();
    for (std::size_t i = 0; same && i < rate.size(); ++i)
        same = rate[i] == l.rates()[static_cast<Eigen::Index>(i)] && tau[i] == 1.0 / rate[i];
    check("landscape.csv matches landscape.json", same);
    check("rates strictly increasing", std::is_sorted(rate.begin(), rate.end()) && min_gap(l.rates()) > 0.0);

    const io::CsvTable curves = table(dir / "curves.csv");
    check_header(check, curves, {"x", "empirical_cdf", "power_law_cdf"});
}

void validate_spectrum(Checker& check, const fs::path& dir, const json& p) {
    const EnergyLandscape l = replay_landscape(check, dir, p);
    const io::CsvTable t = table(dir / "curves.csv");
    check_header(check, t, {"k", "lambda_k", "gamma_k"});
    const auto lambda = column(t, "lambda_k");
    const auto gamma = column(t, "gamma_k");
    const auto& x = l.rates();
    const Eigen::Index n = l.size();
    if (static_cast<Eigen::Index>(lambda.size()) != n) {
        check("one eigenvalue per site", false, num(lambda.size()) + " rows for N = " + num(n));
        return;
    }
    check("lambda_0 = 0", std::abs(lambda[0]) <= 1e-12 * x[n - 1], num(lambda[0]));

    std::vector<std::string> bad_interlace, bad_root, bad_weight;
    for (Eigen::Index k = 1; k < n; ++k) {
        const double lk = lambda[static_cast<std::size_t>(k)];
        if (!(x[k - 1] < lk && lk < x[k])) {
            bad_interlace.push_back("k=" + num(k));
            continue;
        }
        // sum_j 1/(x_j - lambda) vanishes at an eigenvalue; compare with the scale of its terms.
        CompensatedSum<long double> s, a, w;
        for (Eigen::Index j = 0; j < n; ++j) {
            const long double d = static_cast<long double>(x[j]) - lk;
            s += 1.0L / d;
            a += std::abs(1.0L / d);
            w += x[j] / (d * d);
        }
        if (std::abs(s.value()) > 1e-6L * a.value()) bad_root.push_back("k=" + num(k));
        const double g = static_cast<double>(1.0L / w.value());
        if (std::abs(g - gamma[static_cast<std::size_t>(k)]) > 1e-6 * g) bad_weight.push_back("k=" + num(k));
    }
    auto list = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < std::min<std::size_t>(v.size(), 5); ++i) s += (i ? ", " : "") + v[i];
        return v.size() > 5 ? s + ", ..." : s;
    };
    check("interlacing x_{k-1} < lambda_k < x_k", bad_interlace.empty(), list(bad_interlace));
    check("secular equation at every eigenvalue", bad_root.empty(), list(bad_root));
    check("weights gamma_k", bad_weight.empty(), list(bad_weight));
    if (!bad_interlace.empty()) return;

    // Orthogonality in l^2(tau) on a fixed subset of pairs: psi_k(j) = x_j/(x_j - lambda_k).
    const Eigen::Index stride = std::max<Eigen::Index>(1, n / 100);
    double worst = 0.0;
    for (Eigen::Index k = 1; k + 1 < n; k += stride)
        for (Eigen::Index m : {k + 1, n - k}) {
            if (m == k || m >= n || m < 1) continue;
            CompensatedSum<long double> ip, nk, nm;
            for (Eigen::Index j = 0; j < n; ++j) {
                const long double a = static_cast<long double>(x[j]) - lambda[static_cast<std::size_t>(k)];
                const long double b = static_cast<long double>(x[j]) - lambda[static_cast<std::size_t>(m)];
                ip += x[j] / (a * b);
                nk += x[j] / (a * a);
                nm += x[j] / (b * b);
            }
            worst = std::max(worst, static_cast<double>(std::abs(ip.value()) / std::sqrt(nk.value() * nm.value())));
        }
    check("eigenvectors orthogonal in l2(tau)", worst <= 1e-6, "max |cos| = " + num(worst));
}

void validate_aging(Checker& check, const fs::path& dir, const json& p) {
    replay_landscape(check, dir, p);
    const io::CsvTable t = table(dir / "curves.csv");
    check_header(check, t, {"alpha", "theta", "t_w", "method", "value", "abs_err_estimate"});
    const auto theta = column(t, "theta");
    const auto value = column(t, "value");
    const auto err = column(t, "abs_err_estimate");
    const std::size_t mcol = t.column("method");
    std::vector<double> spec, lim, mc, se, th;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const std::string& m = t.rows[i][mcol];
        if (m == "spectral") spec.push_back(value[i]), th.push_back(theta[i]);
        if (m == "limit") lim.push_back(value[i]);
        if (m == "mc") mc.push_back(value[i]), se.push_back(err[i]);
    }
    const auto thetas = p.at("thetas").get<std::vector<double>>();
    check("one row per theta and method", spec.size() == thetas.size() && lim.size() == thetas.size() &&
                                               mc.size() == thetas.size());
    if (spec.size() != thetas.size() || lim.size() != thetas.size() || mc.size() != thetas.size()) return;
    bool range = true, limit_ok = true, close = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        range = range && spec[i] >= 0 && spec[i] <= 1 && mc[i] >= 0 && mc[i] <= 1;
        limit_ok = limit_ok && std::abs(lim[i] - aging_function(p.at("alpha").get<double>(), th[i])) <= 1e-12;
        const double z = std::abs(mc[i] - spec[i]) / (se[i] + 1e-300);
        worst = std::max(worst, z);
        close = close && std::abs(mc[i] - spec[i]) <= 5.0 * se[i] + 1e-3;
    }
    check("correlations lie in [0,1]", range);
    check("limit column equals A(theta)", limit_ok);
    auto decreasing = [&](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (th[i] > th[i - 1] && v[i] > v[i - 1] + 1e-12) return false;
        return true;
    };
    check("spectral curve non-increasing in theta", decreasing(spec));
    check("limit curve non-increasing in theta", decreasing(lim));
    check("Monte Carlo within 5 stderr of the spectral curve", close, "max z = " + num(worst));
}

void validate_mc(Checker& check, const fs::path& dir, const json& p) {
    replay_landscape(check, dir, p);
    const io::CsvTable t = table(dir / "curves.csv");
    check_header(check, t, {"replica", "quantity", "value"});
    const auto v = column(t, "value");
    check("one row per replica", v.size() == p.at("replicas").get<std::size_t>());
    const io::CsvTable s = table(dir / "summary.csv");
    check("summary.csv header", s.header == std::vector<std::string>{"quantity", "estimate", "stderr", "n_replicas", "seed"});
    const McEstimate full = summarize(v);
    if (!s.rows.empty()) {
        const double est = s.numbers("estimate")[0];
        check("summary estimate is the replica mean", std::abs(est - full.estimate) <= 1e-12 * (1 + std::abs(est)));
    }
    // stderr ~ 1/sqrt(n): half the replicas should give sqrt(2) times the error.
    const McEstimate half = summarize(std::span<const double>(v.data(), v.size() / 2));
    if (full.stderr_ > 0.0 && half.stderr_ > 0.0) {
        const double ratio = half.stderr_ / full.stderr_ / std::sqrt(2.0);
        check("stderr follows the square-root law within 20%", std::abs(ratio - 1.0) <= 0.2,
              "ratio to sqrt(2) = " + num(ratio));
    } else {
        check("stderr follows the square-root law within 20%", full.stderr_ == 0.0 && half.stderr_ == 0.0,
              "degenerate sample in one half only");
    }
}

void validate_ppp(Checker& check, const fs::path& dir, const json& p) {
    const io::CsvTable t = table(dir / "curves.csv");
    check_header(check, t, {"regime", "tau0", "E", "theta", "t_w", "quantity", "value", "err"});
    const auto value = column(t, "value");
    const auto err = column(t, "err");
    const std::size_t q = t.column("quantity");
    const double alpha = p.at("alpha").get<double>(), E = p.at("threshold").get<double>();
    const auto seed = p.at("seed").get<std::uint64_t>();
    const auto expected = static_cast<double>(sample_ppp(PppConfig::grand_canonical(alpha, E, seed)).count());
    bool finite = true, counts = true, range = true;
    for (std::size_t i = 0; i < value.size(); ++i) {
        finite = finite && std::isfinite(value[i]) && err[i] >= 0.0;
        const std::string& what = t.rows[i][q];
        if (what == "count") counts = counts && value[i] == expected;
        if (what == "pi_E" || what == "aging_function" || what == "pi1_E_mc" || what == "stationary_limit")
            range = range && value[i] >= -1e-12 && value[i] <= 1 + 1e-12;
    }
    check("values finite with non-negative errors", finite);
    check("point counts replay from the seed", counts);
    check("correlations lie in [0,1]", range);
}

void validate_tauber(Checker& check, const fs::path& dir, const json& p, const json& summary) {
    const io::CsvTable t = table(dir / "curves.csv");
    check_header(check, t, {"omega_re", "omega_im", "ghat_re", "ghat_im"});
    const auto wr = column(t, "omega_re"), wi = column(t, "omega_im");
    const auto gr = column(t, "ghat_re"), gi = column(t, "ghat_im");
    const TauberSetup s = tauber_setup(p);
    double worst = 0.0;
    for (std::size_t i = 0; i < wr.size(); ++i) {
        const cplx g = s.ghat(cplx(wr[i], wi[i]));
        worst = std::max(worst, std::abs(g - cplx(gr[i], gi[i])) / std::max(std::abs(g), 1e-300));
    }
    check("probe dumps reproduce the transform", worst <= 1e-10, "max relative error " + num(worst));
    const json& r = summary.at("results");
    const double B = r.at("B").get<double>(), want = r.at("expected_B").get<double>();
    check("fitted B within 1% of the exact constant", std::abs(B - want) <= 0.01 * std::abs(want),
          num(B) + " vs " + num(want));
    bool closed = true;
    for (const auto& inv : r.at("inversions")) closed = closed && inv.at("closing").get<double>() < p.at("tol").get<double>();
    check("inversion closing segments below tolerance", closed);
}

}  // namespace

ValidationReport validate_run(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError("no run directory " + dir.string());
    for (const char* f : {"manifest.json", "summary.json", "curves.csv"})
        if (!fs::exists(dir / f)) throw ValidationError(std::string("missing artifact ") + f);
    const Manifest m = parse_manifest_text(io::read_file(dir / "manifest.json"));
    json summary;
    try {
        summary = json::parse(io::read_file(dir / "summary.json"));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("summary.json: ") + e.what());
    }
    ValidationReport rep;
    rep.kind = to_string(m.kind);
    Checker check(rep);
    check("summary kind matches manifest", summary.value("kind", "") == rep.kind);
    switch (m.kind) {
    case Kind::sample: validate_sample(check, dir, m.params); break;
    case Kind::spectrum: validate_spectrum(check, dir, m.params); break;
    case Kind::aging: validate_aging(check, dir, m.params); break;
    case Kind::mc: validate_mc(check, dir, m.params); break;
    case Kind::ppp: validate_ppp(check, dir, m.params); break;
    case Kind::tauber: validate_tauber(check, dir, m.params, summary); break;
    case Kind::validate: throw ValidationError("a validate manifest is not a run");
    }
    return rep;
}

}  // namespace trap::cli
