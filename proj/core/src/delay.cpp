#include "conncoord/delay.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace conncoord {

std::string_view to_string(DelayKind kind) {
    switch (kind) {
        case DelayKind::constant: return "constant";
        case DelayKind::sinusoidal: return "sinusoidal";
        case DelayKind::random_walk: return "random_walk";
    }
    return "unknown";
}

DelayKind delay_kind_from_string(std::string_view name) {
    if (name == "constant") return DelayKind::constant;
    if (name == "sinusoidal") return DelayKind::sinusoidal;
    if (name == "random_walk") return DelayKind::random_walk;
    throw std::invalid_argument("unknown delay profile '" + std::string(name) + "'");
}

DelayProfile::DelayProfile(const DelayProfileSpec& spec)
    : spec_(spec), rng_(spec.seed), step_(0.0, spec.walk_sigma > 0.0 ? spec.walk_sigma : 1.0) {
    if (!(spec.dbar >= 0.0) || !std::isfinite(spec.dbar)) {
        throw std::invalid_argument("delay bound must be finite and non-negative");
    }
    if (spec.kind == DelayKind::random_walk && (!(spec.walk_step > 0.0) || spec.walk_sigma < 0.0)) {
        throw std::invalid_argument("random walk needs a positive node spacing and non-negative sigma");
    }
    if (spec.kind == DelayKind::constant && spec.value < 0.0) {
        throw std::invalid_argument("constant delay must be non-negative");
    }
}

double DelayProfile::walk_node(std::size_t k) const {
    if (walk_.empty()) {
        walk_.push_back(0.5 * spec_.dbar);
    }
    // Nodes are always drawn in order, so the walk depends only on the seed.
    while (walk_.size() <= k) {
        const double next = walk_.back() + (spec_.walk_sigma > 0.0 ? step_(rng_) : 0.0);
        walk_.push_back(std::clamp(next, 0.0, spec_.dbar));
    }
    return walk_[k];
}

double DelayProfile::operator()(double t) const {
    double d = 0.0;
    switch (spec_.kind) {
        case DelayKind::constant:
            d = std::min(spec_.value, spec_.dbar);
            break;
        case DelayKind::sinusoidal:
            d = spec_.dbar * (1.0 + std::sin(2.0 * std::numbers::pi * spec_.frequency * t + spec_.phase)) /
                2.0;
            break;
        case DelayKind::random_walk: {
            if (t <= 0.0) {
                d = walk_node(0);
                break;
            }
            const double s = t / spec_.walk_step;
            const auto k = static_cast<std::size_t>(std::floor(s));
            const double w = s - static_cast<double>(k);
            d = (1.0 - w) * walk_node(k) + w * walk_node(k + 1);
            break;
        }
    }
    return std::clamp(d, 0.0, spec_.dbar);
}

History::History(double retention) : retention_(retention) {}

void History::record(double t, const Eigen::VectorXd& x) {
    if (!samples_.empty()) {
        if (!(t > samples_.back().t)) {
            throw std::invalid_argument("history timestamps must be strictly increasing");
        }
        if (x.size() != samples_.back().x.size()) {
            throw std::invalid_argument("history sample dimension changed");
        }
    }
    samples_.push_back(Sample{t, x});
    if (retention_ > 0.0) {
        const double horizon = t - retention_;
        // Keep one sample at or before the horizon so lookups at it can interpolate.
        while (samples_.size() > 2 && samples_[1].t <= horizon) {
            samples_.pop_front();
            truncated_ = true;
        }
    }
}

double History::oldest_time() const {
    if (samples_.empty()) throw std::logic_error("empty history");
    return samples_.front().t;
}

double History::newest_time() const {
    if (samples_.empty()) throw std::logic_error("empty history");
    return samples_.back().t;
}

Eigen::VectorXd History::at(double theta) const {
    if (samples_.empty()) {
        throw std::logic_error("lookup in empty history");
    }
    const Sample& first = samples_.front();
    if (theta <= first.t) {
        if (truncated_ && theta < first.t) {
            throw std::out_of_range("delayed lookup at t = " + std::to_string(theta) +
                                    " precedes the retained history (oldest " +
                                    std::to_string(first.t) + ")");
        }
        return first.x;
    }
    const Sample& last = samples_.back();
    if (theta >= last.t) {
        if (samples_.size() < 2 || theta == last.t) {
            return last.x;
        }
        const Sample& prev = samples_[samples_.size() - 2];
        const double w = (theta - last.t) / (last.t - prev.t);
        return last.x + w * (last.x - prev.x);
    }
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), theta,
                                     [](double v, const Sample& s) { return v < s.t; });
    const Sample& hi = *it;
    const Sample& lo = *std::prev(it);
    const double w = (theta - lo.t) / (hi.t - lo.t);
    return (1.0 - w) * lo.x + w * hi.x;
}

Eigen::VectorXd query_delayed(const History& history, double t, const DelayProfile& profile) {
    return history.at(t - profile(t));
}

}  // namespace conncoord
