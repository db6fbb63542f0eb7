#pragma once

// Exact target/behavioural density ratio over ego action sequences,
// computed in log space as a sum of per-step pmf log-ratios.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "macopp/mpe.hpp"
#include "macopp/policy.hpp"
#include "macopp/trajectory.hpp"

namespace macopp {

inline constexpr double kDefaultDrCap = 1e12;

// Sum over transitions (time-major, then ego index) of
// log pi*_e(a | x_t) - log pi^b_e(a | x_t), with pmfs evaluated on the
// exact observation of the state. `states` holds the states at which
// the actions were taken; `ego_actions[t][i]` is the action of the i-th
// ego agent at states[t].
inline double log_density_ratio(const std::vector<GlobalState>& states,
                                const std::vector<std::vector<Action>>& ego_actions,
                                const std::vector<PolicySpec>& behavioural_ego,
                                const std::vector<PolicySpec>& target_ego,
                                const std::vector<int>& ego_agents) {
    if (states.size() != ego_actions.size())
        throw std::invalid_argument("one state per ego action record required");
    if (behavioural_ego.size() != ego_agents.size() || target_ego.size() != ego_agents.size())
        throw std::invalid_argument("one behavioural and one target spec per ego agent required");

    double log_w = 0.0;
    for (std::size_t t = 0; t < states.size(); ++t) {
        if (ego_actions[t].size() != ego_agents.size())
            throw std::invalid_argument("ego action record arity mismatch");
        for (std::size_t i = 0; i < ego_agents.size(); ++i) {
            Observation obs = observe_exact(states[t], ego_agents[i]);
            Action a = ego_actions[t][i];
            double pb = pmf(behavioural_ego[i], obs)[a];
            if (!(pb > 0.0))
                throw std::invalid_argument(
                    "behavioural policy must have full support on the action space");
            double pt = pmf(target_ego[i], obs)[a];
            log_w += std::log(pt) - std::log(pb);
        }
    }
    return log_w;
}

// Linear-space ratio, saturated at `cap` to keep reweighting arithmetic
// finite. A capped weight this large forces the infinity atom past the
// quantile anyway, so conservatism is preserved.
inline double density_ratio_from_log(double log_w, double cap = kDefaultDrCap,
                                     bool* saturated = nullptr) {
    if (saturated) *saturated = false;
    if (log_w > std::log(cap)) {
        if (saturated) *saturated = true;
        return cap;
    }
    return std::exp(log_w);
}

inline double density_ratio(const std::vector<GlobalState>& states,
                            const std::vector<std::vector<Action>>& ego_actions,
                            const std::vector<PolicySpec>& behavioural_ego,
                            const std::vector<PolicySpec>& target_ego,
                            const std::vector<int>& ego_agents, double cap = kDefaultDrCap) {
    return density_ratio_from_log(
        log_density_ratio(states, ego_actions, behavioural_ego, target_ego, ego_agents), cap);
}

// Density ratio of a continuation trajectory whose first state is the
// last prefix state: actions at states[0..n-2] are exactly the shifted
// ego actions of Eq. form (the product starts at the action taken in
// the last prefix state).
inline double log_density_ratio_of_continuation(const Trajectory& continuation,
                                                const std::vector<PolicySpec>& behavioural_ego,
                                                const std::vector<PolicySpec>& target_ego,
                                                const std::vector<int>& ego_agents) {
    std::vector<GlobalState> at(continuation.states.begin(), continuation.states.end() - 1);
    return log_density_ratio(at, continuation.ego_actions, behavioural_ego, target_ego,
                             ego_agents);
}

}  // namespace macopp
