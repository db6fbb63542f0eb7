#pragma once

// Trajectories of global states plus the recorded ego-agent actions,
// and rollout of the behavioural / target processes.

#include <stdexcept>
#include <vector>

#include "macopp/mpe.hpp"
#include "macopp/policy.hpp"
#include "macopp/rng.hpp"

namespace macopp {

// T global states and T-1 per-transition ego action records.
struct Trajectory {
    std::vector<GlobalState> states;
    std::vector<std::vector<Action>> ego_actions;  // [transition][ego index order]

    std::size_t length() const { return states.size(); }
};

// Policies for all K agents. Ego agents may switch policy after the
// prefix; `after_switch` picks the spec in force at a given step.
struct ProcessPolicies {
    std::vector<PolicySpec> behavioural;        // per agent, always K entries
    std::vector<PolicySpec> ego_target;         // per ego agent (order of cfg.ego_agents)
    int switch_step = -1;                       // ego uses target at steps >= switch_step; -1: never

    const PolicySpec& active(const EnvConfig& cfg, int agent, int t) const {
        if (switch_step >= 0 && t >= switch_step) {
            for (std::size_t i = 0; i < cfg.ego_agents.size(); ++i)
                if (cfg.ego_agents[i] == agent) return ego_target[i];
        }
        return behavioural[static_cast<std::size_t>(agent)];
    }
};

// Simulate `total_length` states starting from `init` (which becomes
// state index `start_t`). Ego agents act on the exact observation so
// that their action pmf is a deterministic function of the state;
// non-ego agents act on the noisy observation.
inline Trajectory rollout(const GlobalState& init, int start_t, int total_length,
                          const ProcessPolicies& policies, const EnvConfig& cfg, Rng& rng) {
    if (total_length < 1) throw std::invalid_argument("total_length must be >= 1");
    if (policies.behavioural.size() != static_cast<std::size_t>(cfg.num_agents))
        throw std::invalid_argument("one behavioural policy per agent required");
    Trajectory traj;
    traj.states.push_back(init);
    for (int t = start_t; t < start_t + total_length - 1; ++t) {
        const GlobalState& s = traj.states.back();
        std::vector<Action> actions(static_cast<std::size_t>(cfg.num_agents));
        std::vector<Action> ego(cfg.ego_agents.size());
        for (int k = 0; k < cfg.num_agents; ++k) {
            bool is_ego = false;
            std::size_t ego_slot = 0;
            for (std::size_t i = 0; i < cfg.ego_agents.size(); ++i)
                if (cfg.ego_agents[i] == k) {
                    is_ego = true;
                    ego_slot = i;
                }
            Observation obs = is_ego ? observe_exact(s, k) : observe(s, k, cfg, rng);
            Action a = sample(policies.active(cfg, k, t), obs, rng);
            actions[static_cast<std::size_t>(k)] = a;
            if (is_ego) ego[ego_slot] = a;
        }
        traj.ego_actions.push_back(ego);
        traj.states.push_back(step(s, actions, cfg, rng));
    }
    return traj;
}

inline Trajectory rollout_fresh(int total_length, const ProcessPolicies& policies,
                                const EnvConfig& cfg, Rng& rng) {
    return rollout(sample_initial(cfg, rng), 0, total_length, policies, cfg, rng);
}

// Continue an existing prefix: the last prefix state is re-used as the
// first state of the returned trajectory.
inline Trajectory continue_from(const Trajectory& prefix, int suffix_steps,
                                const ProcessPolicies& policies, const EnvConfig& cfg, Rng& rng) {
    if (prefix.states.empty()) throw std::invalid_argument("empty prefix");
    int start_t = static_cast<int>(prefix.states.size()) - 1;
    return rollout(prefix.states.back(), start_t, suffix_steps + 1, policies, cfg, rng);
}

}  // namespace macopp
