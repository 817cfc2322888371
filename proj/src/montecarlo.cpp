#include "trap/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "trap/errors.hpp"
#include "trap/parallel.hpp"
#include "trap/random.hpp"
#include "trap/summation.hpp"

namespace trap {

void McConfig::validate() const {
    if (replicas < 1) throw std::invalid_argument("McConfig: replicas must be >= 1");
    if (!(horizon >= 0.0)) throw std::invalid_argument("McConfig: horizon must be non-negative");
    if (max_events < 1) throw std::invalid_argument("McConfig: max_events must be >= 1");
}

Eigen::Index Trajectory::state_at(double t) const {
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    return states[static_cast<std::size_t>(it - jump_times.begin())];
}

DeepSet DeepSet::of(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta) {
    DeepSet d;
    d.delta = delta;
    d.first = static_cast<Eigen::Index>(std::lower_bound(rates.data(), rates.data() + rates.size(), delta) -
                                        rates.data());
    d.size = rates.size() - d.first;
    return d;
}

McEstimate summarize(std::span<const double> samples) {
    McEstimate e;
    e.replicas = samples.size();
    if (samples.empty()) return e;
    CompensatedSum<double> s1;
    for (double v : samples) s1 += v;
    const auto n = static_cast<double>(samples.size());
    e.estimate = s1.value() / n;
    if (samples.size() > 1) {
        CompensatedSum<double> s2;
        for (double v : samples) s2 += (v - e.estimate) * (v - e.estimate);
        e.stderr_ = std::sqrt(s2.value() / (n - 1.0) / n);
    }
    return e;
}

namespace {

// Event-driven walker on the complete graph. Holding times are redrawn when
// the walker is advanced again, which memorylessness allows.
class Walker {
public:
    Walker(const Eigen::Ref<const Eigen::VectorXd>& rates, std::uint64_t seed, std::uint64_t stream,
           std::uint64_t max_events)
        : x_(rates.data()),
          n_(rates.size()),
          factor_(jump_rate_factor(rates.size())),
          rng_(seed, stream),
          max_events_(max_events) {
        state_ = static_cast<Eigen::Index>(rng_.below(static_cast<std::uint64_t>(n_)));
    }

    Eigen::Index state() const { return state_; }
    double now() const { return now_; }
    double rate(Eigen::Index i) const { return factor_ * x_[i]; }
    Philox4x32& rng() { return rng_; }

    double holding_time() { return n_ <= 1 ? std::numeric_limits<double>::infinity() : rng_.exponential(rate(state_)); }

    Eigen::Index jump_target() {
        auto j = static_cast<Eigen::Index>(rng_.below(static_cast<std::uint64_t>(n_ - 1)));
        return j >= state_ ? j + 1 : j;
    }

    /// Runs until the next jump would fall after `until`; on_jump(time, site)
    /// sees every jump. Returns with now() == until.
    template <class OnJump>
    void advance_to(double until, OnJump&& on_jump) {
        for (;;) {
            const double hold = holding_time();
            if (now_ + hold > until) break;
            now_ += hold;
            state_ = jump_target();
            if (++events_ > max_events_) throw NonConvergence("Monte Carlo: max_events exceeded before the horizon");
            on_jump(now_, state_);
        }
        now_ = until;
    }

    void advance_to(double until) {
        advance_to(until, [](double, Eigen::Index) {});
    }

    /// One holding period and jump; returns the jump time (inf if the site
    /// never leaves) and the new site.
    std::pair<double, Eigen::Index> step() {
        const double hold = holding_time();
        if (std::isinf(hold)) return {hold, state_};
        now_ += hold;
        state_ = jump_target();
        if (++events_ > max_events_) throw NonConvergence("Monte Carlo: max_events exceeded");
        return {now_, state_};
    }

private:
    const double* x_;
    Eigen::Index n_;
    double factor_;
    Philox4x32 rng_;
    std::uint64_t max_events_;
    std::uint64_t events_ = 0;
    Eigen::Index state_ = 0;
    double now_ = 0.0;
};

void require_sites(const Eigen::Ref<const Eigen::VectorXd>& rates) {
    if (rates.size() < 1) throw std::invalid_argument("Monte Carlo: empty landscape");
}

template <class PerReplica>
std::vector<double> run_replicas(const McConfig& cfg, PerReplica&& f) {
    cfg.validate();
    std::vector<double> out(cfg.replicas);
    parallel_for(cfg.replicas, [&](std::size_t r) { out[r] = f(static_cast<std::uint64_t>(r)); });
    return out;
}

}  // namespace

Trajectory simulate_path(const Eigen::Ref<const Eigen::VectorXd>& rates, double horizon, std::uint64_t seed,
                         std::uint64_t stream, std::uint64_t max_events) {
    require_sites(rates);
    if (!(horizon >= 0.0)) throw std::invalid_argument("simulate_path: horizon must be non-negative");
    Walker w(rates, seed, stream, max_events);
    Trajectory tr;
    tr.horizon = horizon;
    tr.states.push_back(w.state());
    w.advance_to(horizon, [&](double t, Eigen::Index s) {
        tr.jump_times.push_back(t);
        tr.states.push_back(s);
    });
    return tr;
}

McEstimate mc_pi(const Eigen::Ref<const Eigen::VectorXd>& rates, const CorrelationQuery& q, const McConfig& cfg) {
    require_sites(rates);
    q.validate();
    const double factor = jump_rate_factor(rates.size());
    const auto samples = run_replicas(cfg, [&](std::uint64_t r) {
        Walker w(rates, cfg.seed, r, cfg.max_events);
        w.advance_to(q.t_w);
        return std::exp(-factor * rates[w.state()] * q.t);
    });
    return summarize(samples);
}

PiEstimators mc_pi_estimators(const Eigen::Ref<const Eigen::VectorXd>& rates, const CorrelationQuery& q,
                              const McConfig& cfg) {
    require_sites(rates);
    q.validate();
    cfg.validate();
    const double factor = jump_rate_factor(rates.size());
    PiEstimators out;
    out.rao_blackwell_samples.resize(cfg.replicas);
    out.indicator_samples.resize(cfg.replicas);
    parallel_for(cfg.replicas, [&](std::size_t r) {
        Walker w(rates, cfg.seed, r, cfg.max_events);
        w.advance_to(q.t_w);
        out.rao_blackwell_samples[r] = std::exp(-factor * rates[w.state()] * q.t);
        out.indicator_samples[r] = w.holding_time() > q.t ? 1.0 : 0.0;
    });
    out.rao_blackwell = summarize(out.rao_blackwell_samples);
    out.indicator = summarize(out.indicator_samples);
    return out;
}

std::vector<McEstimate> mc_pi_theta_curve(const Eigen::Ref<const Eigen::VectorXd>& rates, double t_w,
                                          std::span<const double> thetas, const McConfig& cfg) {
    require_sites(rates);
    cfg.validate();
    const double factor = jump_rate_factor(rates.size());
    std::vector<double> depth(cfg.replicas);
    parallel_for(cfg.replicas, [&](std::size_t r) {
        Walker w(rates, cfg.seed, r, cfg.max_events);
        w.advance_to(t_w);
        depth[r] = factor * rates[w.state()];
    });
    std::vector<McEstimate> out;
    std::vector<double> samples(cfg.replicas);
    for (double th : thetas) {
        for (std::size_t r = 0; r < cfg.replicas; ++r) samples[r] = std::exp(-depth[r] * th * t_w);
        out.push_back(summarize(samples));
    }
    return out;
}

namespace {

struct WindowTimes {
    double first_jump = std::numeric_limits<double>::infinity();          // T0
    double first_exit = std::numeric_limits<double>::infinity();          // T1: lands outside D
    double first_exit_or_back = std::numeric_limits<double>::infinity();  // T2: outside D and not Y(t_w)
};

// Times measured from t_w; events later than `span` stay at +inf.
WindowTimes window_times(const Eigen::Ref<const Eigen::VectorXd>& rates, const DeepSet& deep, double t_w,
                         double span, std::uint64_t seed, std::uint64_t stream, std::uint64_t max_events) {
    Walker w(rates, seed, stream, max_events);
    w.advance_to(t_w);
    const Eigen::Index start = w.state();
    WindowTimes wt;
    for (;;) {
        const auto [time, site] = w.step();
        const double rel = time - t_w;
        if (!(rel <= span)) break;
        if (std::isinf(wt.first_jump)) wt.first_jump = rel;
        const bool in_deep = deep.contains(site);
        if (!in_deep && std::isinf(wt.first_exit)) wt.first_exit = rel;
        if (!in_deep && site != start) {
            wt.first_exit_or_back = rel;
            break;
        }
    }
    return wt;
}

}  // namespace

std::vector<double> mc_pi_window_samples(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta,
                                         const CorrelationQuery& q, WindowVariant variant, const McConfig& cfg) {
    require_sites(rates);
    q.validate();
    const DeepSet deep = DeepSet::of(rates, delta);
    return run_replicas(cfg, [&](std::uint64_t r) {
        const WindowTimes wt = window_times(rates, deep, q.t_w, q.t, cfg.seed, r, cfg.max_events);
        const double end = variant == WindowVariant::deep_set ? wt.first_exit : wt.first_exit_or_back;
        return end > q.t ? 1.0 : 0.0;
    });
}

McEstimate mc_pi_window(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta, const CorrelationQuery& q,
                        WindowVariant variant, const McConfig& cfg) {
    return summarize(mc_pi_window_samples(rates, delta, q, variant, cfg));
}

WindowCurves mc_window_curves(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta, double t_w,
                              std::span<const double> ts, const McConfig& cfg) {
    require_sites(rates);
    cfg.validate();
    const DeepSet deep = DeepSet::of(rates, delta);
    const double span = ts.empty() ? 0.0 : *std::max_element(ts.begin(), ts.end());
    std::vector<WindowTimes> times(cfg.replicas);
    parallel_for(cfg.replicas, [&](std::size_t r) {
        times[r] = window_times(rates, deep, t_w, span, cfg.seed, r, cfg.max_events);
    });
    WindowCurves out;
    out.ts.assign(ts.begin(), ts.end());
    std::vector<double> a(cfg.replicas), b(cfg.replicas), c(cfg.replicas), d(cfg.replicas);
    for (double t : ts) {
        for (std::size_t r = 0; r < cfg.replicas; ++r) {
            a[r] = times[r].first_jump > t ? 1.0 : 0.0;
            b[r] = times[r].first_exit > t ? 1.0 : 0.0;
            c[r] = times[r].first_exit_or_back > t ? 1.0 : 0.0;
            d[r] = b[r] - a[r];
        }
        out.pi.push_back(summarize(a));
        out.pi1.push_back(summarize(b));
        out.pi2.push_back(summarize(c));
        out.gap.push_back(summarize(d));
    }
    return out;
}

std::vector<double> mc_deep_trap_samples(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta, double t,
                                         const McConfig& cfg) {
    require_sites(rates);
    const DeepSet deep = DeepSet::of(rates, delta);
    return run_replicas(cfg, [&](std::uint64_t r) {
        Walker w(rates, cfg.seed, r, cfg.max_events);
        w.advance_to(t);
        return deep.contains(w.state()) ? 1.0 : 0.0;
    });
}

McEstimate mc_deep_trap(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta, double t, const McConfig& cfg) {
    return summarize(mc_deep_trap_samples(rates, delta, t, cfg));
}

std::vector<double> mc_scaled_depth(const Eigen::Ref<const Eigen::VectorXd>& rates, double t, const McConfig& cfg) {
    require_sites(rates);
    if (!(t > 0.0)) throw std::invalid_argument("mc_scaled_depth: t must be positive");
    return run_replicas(cfg, [&](std::uint64_t r) {
        Walker w(rates, cfg.seed, r, cfg.max_events);
        w.advance_to(t);
        return t * rates[w.state()];
    });
}

}  // namespace trap
