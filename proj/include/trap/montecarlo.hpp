#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trap/correlation.hpp"

namespace trap {

struct McConfig {
    std::size_t replicas = 1000;
    std::uint64_t seed = 0;
    double horizon = 0.0;                 ///< used by simulate_path-style runs
    std::uint64_t max_events = 100'000'000;  ///< per replica

    void validate() const;
};

/// Piecewise-constant path of the site process. states[0] is the initial
/// site; states[i+1] is entered at jump_times[i].
struct Trajectory {
    std::vector<double> jump_times;
    std::vector<Eigen::Index> states;
    double horizon = 0.0;

    Eigen::Index initial_state() const { return states.front(); }
    Eigen::Index state_at(double t) const;
};

/// Sites with rate >= delta. Rates are sorted, so this is a suffix.
struct DeepSet {
    double delta = 0.0;
    Eigen::Index first = 0;
    Eigen::Index size = 0;

    static DeepSet of(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta);
    bool contains(Eigen::Index i) const { return i >= first; }
};

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t replicas = 0;
};

/// Mean and standard error of a replica sample, reduced in index order.
McEstimate summarize(std::span<const double> samples);

/// Uniform start; holding time at i is Exponential(((N-1)/N) x_i); jumps go
/// to one of the other N-1 sites uniformly. Replica `stream` of `seed`.
/// Throws NonConvergence when max_events jumps do not reach the horizon.
Trajectory simulate_path(const Eigen::Ref<const Eigen::VectorXd>& rates, double horizon, std::uint64_t seed,
                         std::uint64_t stream, std::uint64_t max_events = 100'000'000);

/// Rao-Blackwellized: per replica, exp(-((N-1)/N) x_{Y(t_w)} t).
McEstimate mc_pi(const Eigen::Ref<const Eigen::VectorXd>& rates, const CorrelationQuery& q, const McConfig& cfg);

/// Both estimators of Pi on the same streams: the conditional expectation and
/// the no-jump indicator built from the residual holding time.
struct PiEstimators {
    McEstimate rao_blackwell;
    McEstimate indicator;
    std::vector<double> rao_blackwell_samples;
    std::vector<double> indicator_samples;
};
PiEstimators mc_pi_estimators(const Eigen::Ref<const Eigen::VectorXd>& rates, const CorrelationQuery& q,
                              const McConfig& cfg);

/// Pi(theta t_w, t_w) on a grid of theta from one set of paths.
std::vector<McEstimate> mc_pi_theta_curve(const Eigen::Ref<const Eigen::VectorXd>& rates, double t_w,
                                          std::span<const double> thetas, const McConfig& cfg);

enum class WindowVariant {
    deep_set = 1,            ///< every jump in the window lands in D
    deep_set_or_start = 2,   ///< every jump lands in D or back on Y(t_w)
};

/// Windowed correlation Pi^(1) or Pi^(2) at (q.t, q.t_w) with D = {x >= delta}.
McEstimate mc_pi_window(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta, const CorrelationQuery& q,
                        WindowVariant variant, const McConfig& cfg);

/// Per-replica indicators behind mc_pi_window, replica r from stream r.
std::vector<double> mc_pi_window_samples(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta,
                                         const CorrelationQuery& q, WindowVariant variant, const McConfig& cfg);

/// All three indicators on one set of paths for a grid of t at fixed t_w.
/// `gap` is the paired estimate of Pi^(1) - Pi.
struct WindowCurves {
    std::vector<double> ts;
    std::vector<McEstimate> pi, pi1, pi2, gap;
};
WindowCurves mc_window_curves(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta, double t_w,
                              std::span<const double> ts, const McConfig& cfg);

/// P(x(t) >= delta).
std::vector<double> mc_deep_trap_samples(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta, double t,
                                         const McConfig& cfg);
McEstimate mc_deep_trap(const Eigen::Ref<const Eigen::VectorXd>& rates, double delta, double t, const McConfig& cfg);

/// Replica samples of t * x(t), index r from stream r.
std::vector<double> mc_scaled_depth(const Eigen::Ref<const Eigen::VectorXd>& rates, double t, const McConfig& cfg);

}  // namespace trap
