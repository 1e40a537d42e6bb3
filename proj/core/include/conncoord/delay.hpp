#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace conncoord {

enum class DelayKind { constant, sinusoidal, random_walk };

std::string_view to_string(DelayKind kind);
DelayKind delay_kind_from_string(std::string_view name);

struct DelayProfileSpec {
    DelayKind kind = DelayKind::sinusoidal;
    double dbar = 0.0;          // upper bound [s]
    double value = 0.0;         // constant profile: d(t) = min(value, dbar)
    double frequency = 1.0;     // sinusoidal: d = dbar (1 + sin(2 pi f t + phase)) / 2
    double phase = 0.0;         // [rad]
    double walk_sigma = 0.01;   // random walk: std. dev. of each increment [s]
    double walk_step = 0.01;    // random walk: node spacing [s]
    std::uint64_t seed = 0;
};

/**
 * Bounded time-varying delay d(t) in [0, dbar].
 *
 * The random-walk kind draws its nodes lazily from a seeded generator and
 * caches them, so a profile must not be shared between threads.
 */
class DelayProfile {
public:
    DelayProfile() = default;
    explicit DelayProfile(const DelayProfileSpec& spec);

    double operator()(double t) const;
    double bound() const noexcept { return spec_.dbar; }
    const DelayProfileSpec& spec() const noexcept { return spec_; }

private:
    double walk_node(std::size_t k) const;

    DelayProfileSpec spec_;
    mutable std::vector<double> walk_;
    mutable std::mt19937_64 rng_;
    mutable std::normal_distribution<double> step_;
};

/**
 * Time-stamped samples of one agent's position.
 *
 * Lookups before the first sample return that sample (constant pre-history)
 * as long as it has not been dropped. Lookups past the newest sample
 * extrapolate linearly from the two newest samples.
 */
class History {
public:
    /// Samples older than `newest - retention` may be dropped; retention <= 0 keeps everything.
    explicit History(double retention = 0.0);

    /// Throws std::invalid_argument unless t is strictly after the newest sample.
    void record(double t, const Eigen::VectorXd& x);

    /// Linear interpolation at `theta`. Throws std::out_of_range for an
    /// uncovered lookback and std::logic_error when empty.
    Eigen::VectorXd at(double theta) const;

    bool empty() const noexcept { return samples_.empty(); }
    std::size_t size() const noexcept { return samples_.size(); }
    double oldest_time() const;
    double newest_time() const;
    double retention() const noexcept { return retention_; }

private:
    struct Sample {
        double t;
        Eigen::VectorXd x;
    };
    std::deque<Sample> samples_;
    double retention_;
    bool truncated_ = false;
};

/// x(t - d(t)) from the sender's history.
Eigen::VectorXd query_delayed(const History& history, double t, const DelayProfile& profile);

}  // namespace conncoord
