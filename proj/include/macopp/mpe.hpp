#pragma once

// Multi-particle environment: K agents on a 2D arena with M static
// landmarks, discrete 5-action control and double-integrator dynamics.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "macopp/rng.hpp"

namespace macopp {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

enum class Action : int { Left = 0, Right = 1, Up = 2, Down = 3, Nothing = 4 };

inline constexpr int kNumActions = 5;

inline Vec2 action_vector(Action a) {
    switch (a) {
        case Action::Left: return {-1.0, 0.0};
        case Action::Right: return {1.0, 0.0};
        case Action::Up: return {0.0, 1.0};
        case Action::Down: return {0.0, -1.0};
        case Action::Nothing: return {0.0, 0.0};
    }
    throw std::invalid_argument("unknown action id");
}

struct AgentState {
    Vec2 pos;
    Vec2 vel;
};

struct GlobalState {
    std::vector<AgentState> agents;
    std::vector<Vec2> landmarks;  // static within a trajectory
};

struct EnvConfig {
    int num_agents = 3;
    int num_landmarks = 3;
    std::vector<int> ego_agents = {0};
    double accel = 0.5;
    double sigma_act = 0.02;
    double sigma_sensor = 0.05;
    double arena_half_width = 1.0;

    void validate() const {
        if (num_agents < 1) throw std::invalid_argument("num_agents must be >= 1");
        if (num_landmarks < 0) throw std::invalid_argument("num_landmarks must be >= 0");
        if (accel <= 0.0) throw std::invalid_argument("accel must be positive");
        if (sigma_act < 0.0 || sigma_sensor < 0.0)
            throw std::invalid_argument("noise std must be non-negative");
        if (arena_half_width <= 0.0)
            throw std::invalid_argument("arena_half_width must be positive");
        for (int e : ego_agents)
            if (e < 0 || e >= num_agents)
                throw std::invalid_argument("ego agent index out of range");
    }
};

// Agent positions and landmarks i.i.d. uniform on the arena square,
// velocities zero.
inline GlobalState sample_initial(const EnvConfig& cfg, Rng& rng) {
    std::uniform_real_distribution<double> u(-cfg.arena_half_width, cfg.arena_half_width);
    GlobalState s;
    s.agents.resize(static_cast<std::size_t>(cfg.num_agents));
    for (auto& a : s.agents) {
        a.pos = {u(rng), u(rng)};
        a.vel = {0.0, 0.0};
    }
    s.landmarks.resize(static_cast<std::size_t>(cfg.num_landmarks));
    for (auto& l : s.landmarks) l = {u(rng), u(rng)};
    return s;
}

// Double-integrator update: position advances by the pre-update velocity
// plus actuation noise, then velocity absorbs the control impulse.
inline GlobalState step(const GlobalState& state, const std::vector<Action>& actions,
                        const EnvConfig& cfg, Rng& rng) {
    if (actions.size() != state.agents.size())
        throw std::invalid_argument("one action per agent required");
    std::normal_distribution<double> noise(0.0, 1.0);
    GlobalState next;
    next.landmarks = state.landmarks;
    next.agents.reserve(state.agents.size());
    for (std::size_t k = 0; k < state.agents.size(); ++k) {
        const AgentState& a = state.agents[k];
        AgentState na;
        na.pos = a.pos + a.vel;
        if (cfg.sigma_act > 0.0) {
            na.pos.x += cfg.sigma_act * noise(rng);
            na.pos.y += cfg.sigma_act * noise(rng);
        }
        na.vel = a.vel + action_vector(actions[k]) * cfg.accel;
        next.agents.push_back(na);
    }
    return next;
}

// What agent k sees: own state exactly, other agents' positions with
// additive Gaussian noise, landmarks exactly.
struct Observation {
    Vec2 own_pos;
    Vec2 own_vel;
    std::vector<Vec2> other_positions;  // indexed by original agent order, self omitted
    std::vector<Vec2> landmarks;

    std::size_t flat_size() const { return 4 + 2 * other_positions.size() + 2 * landmarks.size(); }
};

inline Observation observe(const GlobalState& state, int agent_index, const EnvConfig& cfg,
                           Rng& rng) {
    if (agent_index < 0 || agent_index >= static_cast<int>(state.agents.size()))
        throw std::invalid_argument("agent index out of range");
    Observation obs;
    obs.own_pos = state.agents[static_cast<std::size_t>(agent_index)].pos;
    obs.own_vel = state.agents[static_cast<std::size_t>(agent_index)].vel;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t j = 0; j < state.agents.size(); ++j) {
        if (static_cast<int>(j) == agent_index) continue;
        Vec2 p = state.agents[j].pos;
        if (cfg.sigma_sensor > 0.0) {
            p.x += cfg.sigma_sensor * noise(rng);
            p.y += cfg.sigma_sensor * noise(rng);
        }
        obs.other_positions.push_back(p);
    }
    obs.landmarks = state.landmarks;
    return obs;
}

// Noise-free view of the state; the deterministic input on which policy
// pmfs are defined (the pmf must be an exact function of the state for
// the density ratio to be exactly recomputable).
inline Observation observe_exact(const GlobalState& state, int agent_index) {
    EnvConfig cfg;
    cfg.sigma_sensor = 0.0;
    cfg.num_agents = static_cast<int>(state.agents.size());
    cfg.num_landmarks = static_cast<int>(state.landmarks.size());
    Rng dummy(0);
    return observe(state, agent_index, cfg, dummy);
}

}  // namespace macopp
