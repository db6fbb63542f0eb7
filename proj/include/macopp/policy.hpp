#pragma once

// Scripted stochastic policies with exact pmfs: a deterministic
// nearest-landmark greedy base, epsilon-greedy randomisation and an
// epsilon-bias mixture towards a fixed action.

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "macopp/mpe.hpp"
#include "macopp/rng.hpp"

namespace macopp {

struct ActionPmf {
    std::array<double, kNumActions> p{};

    double operator[](Action a) const { return p[static_cast<std::size_t>(a)]; }
    double sum() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }
};

struct PolicySpec {
    double eps_greedy = 0.1;
    double eps_bias = 0.0;
    Action bias_action = Action::Down;
    double capture_radius = 0.1;

    void validate() const {
        if (eps_greedy < 0.0 || eps_greedy >= 1.0)
            throw std::invalid_argument("eps_greedy must be in [0,1)");
        if (eps_bias < 0.0 || eps_bias >= 1.0)
            throw std::invalid_argument("eps_bias must be in [0,1)");
    }
};

// Deterministic greedy rule: head for the nearest unclaimed landmark
// (a landmark is claimed when some other observed agent sits within the
// capture radius of it); emit the cardinal action best aligned with the
// direction to it, "nothing" once within the capture radius. Ties on
// alignment break in the fixed order left, right, up, down.
inline Action base_action(const Observation& obs, double capture_radius = 0.1) {
    if (obs.landmarks.empty()) return Action::Nothing;

    auto claimed = [&](const Vec2& l) {
        for (const Vec2& q : obs.other_positions)
            if ((q - l).norm() <= capture_radius) return true;
        return false;
    };

    int best = -1;
    double best_dist = 0.0;
    for (int pass = 0; pass < 2 && best < 0; ++pass) {
        for (std::size_t i = 0; i < obs.landmarks.size(); ++i) {
            if (pass == 0 && claimed(obs.landmarks[i])) continue;
            double d = (obs.landmarks[i] - obs.own_pos).norm();
            if (best < 0 || d < best_dist) {
                best = static_cast<int>(i);
                best_dist = d;
            }
        }
    }

    if (best_dist <= capture_radius) return Action::Nothing;
    Vec2 dir = obs.landmarks[static_cast<std::size_t>(best)] - obs.own_pos;
    constexpr std::array<Action, 4> order = {Action::Left, Action::Right, Action::Up,
                                             Action::Down};
    Action arg = order[0];
    double best_dot = action_vector(order[0]).dot(dir);
    for (std::size_t i = 1; i < order.size(); ++i) {
        double d = action_vector(order[i]).dot(dir);
        if (d > best_dot) {
            best_dot = d;
            arg = order[i];
        }
    }
    return arg;
}

// eps_bias * delta_{bias} + (1 - eps_bias) * eps-greedy(base).
inline ActionPmf pmf(const PolicySpec& spec, const Observation& obs) {
    spec.validate();
    Action g = base_action(obs, spec.capture_radius);
    ActionPmf out;
    const double off = spec.eps_greedy / (kNumActions - 1);
    for (int a = 0; a < kNumActions; ++a)
        out.p[static_cast<std::size_t>(a)] = (1.0 - spec.eps_bias) *
            (a == static_cast<int>(g) ? 1.0 - spec.eps_greedy : off);
    out.p[static_cast<std::size_t>(spec.bias_action)] += spec.eps_bias;
    return out;
}

inline Action sample(const PolicySpec& spec, const Observation& obs, Rng& rng) {
    ActionPmf d = pmf(spec, obs);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = u(rng);
    double cum = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
        cum += d.p[static_cast<std::size_t>(a)];
        if (r <= cum) return static_cast<Action>(a);
    }
    return static_cast<Action>(kNumActions - 1);
}

}  // namespace macopp
