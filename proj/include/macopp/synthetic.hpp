#pragma once

// Data-driven approximation of the target process: learned one-step
// dynamics for the non-ego agents, true dynamics plus known target
// policy for the ego agents, and the Monte-Carlo max-DR search.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "macopp/conformal.hpp"
#include "macopp/density_ratio.hpp"
#include "macopp/mpe.hpp"
#include "macopp/policy.hpp"
#include "macopp/predictor.hpp"
#include "macopp/rng.hpp"
#include "macopp/trajectory.hpp"

namespace macopp {

// End-to-end one-step model x_t -> next agent states, fitted for all
// agents; consumers pick the rows they need (non-ego always, ego only
// when running with learned ego dynamics). Gaussian residual model,
// isotropic per output dimension.
struct DynamicsModel {
    int num_agents = 0;
    int num_landmarks = 0;
    double ridge_lambda = 1e-3;
    Eigen::MatrixXd weights;             // (K * kStateDims) x feat_dim
    std::vector<double> residual_sigma;  // per output dimension, > 0

    int feat_dim() const { return num_agents * kStateDims + 2 * num_landmarks + 1; }

    std::vector<double> features(const GlobalState& s) const {
        std::vector<double> f;
        append_state(s, f);
        for (const auto& l : s.landmarks) {
            f.push_back(l.x);
            f.push_back(l.y);
        }
        f.push_back(1.0);
        return f;
    }

    // Mean next state of agent k.
    AgentState mean_next(const GlobalState& s, int k) const {
        std::vector<double> f = features(s);
        Eigen::Map<const Eigen::VectorXd> x(f.data(), static_cast<Eigen::Index>(f.size()));
        Eigen::VectorXd y = weights.middleRows(k * kStateDims, kStateDims) * x;
        return {{y(0), y(1)}, {y(2), y(3)}};
    }

    AgentState sample_next(const GlobalState& s, int k, Rng& rng) const {
        AgentState a = mean_next(s, k);
        std::normal_distribution<double> n(0.0, 1.0);
        a.pos.x += residual_sigma[static_cast<std::size_t>(k * kStateDims)] * n(rng);
        a.pos.y += residual_sigma[static_cast<std::size_t>(k * kStateDims + 1)] * n(rng);
        a.vel.x += residual_sigma[static_cast<std::size_t>(k * kStateDims + 2)] * n(rng);
        a.vel.y += residual_sigma[static_cast<std::size_t>(k * kStateDims + 3)] * n(rng);
        return a;
    }
};

// Ridge fit over all one-step transitions of the given trajectories.
inline DynamicsModel fit_dynamics(const std::vector<Trajectory>& data, double ridge_lambda = 1e-3) {
    std::size_t rows = 0;
    for (const auto& tr : data)
        if (tr.states.size() >= 2) rows += tr.states.size() - 1;
    if (rows < 10) throw std::invalid_argument("need at least 10 one-step transitions");

    DynamicsModel m;
    m.num_agents = static_cast<int>(data.front().states.front().agents.size());
    m.num_landmarks = static_cast<int>(data.front().states.front().landmarks.size());
    m.ridge_lambda = ridge_lambda;
    const int fd = m.feat_dim();
    const int od = m.num_agents * kStateDims;

    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), fd);
    Eigen::MatrixXd Y(static_cast<Eigen::Index>(rows), od);
    Eigen::Index r = 0;
    for (const auto& tr : data) {
        for (std::size_t t = 0; t + 1 < tr.states.size(); ++t) {
            std::vector<double> f = m.features(tr.states[t]);
            for (int j = 0; j < fd; ++j) X(r, j) = f[static_cast<std::size_t>(j)];
            std::vector<double> y;
            append_state(tr.states[t + 1], y);
            for (int j = 0; j < od; ++j) Y(r, j) = y[static_cast<std::size_t>(j)];
            ++r;
        }
    }

    Eigen::MatrixXd B;
    if (ridge_lambda > 0.0) {
        Eigen::MatrixXd G = X.transpose() * X;
        G.diagonal().array() += ridge_lambda;
        B = G.ldlt().solve(X.transpose() * Y);
    } else {
        B = X.completeOrthogonalDecomposition().solve(Y);
    }
    m.weights = B.transpose();

    Eigen::MatrixXd R = X * B - Y;
    m.residual_sigma.assign(static_cast<std::size_t>(od), kSigmaFloor);
    for (int d = 0; d < od; ++d) {
        double var = R.col(d).squaredNorm() / static_cast<double>(rows);
        m.residual_sigma[static_cast<std::size_t>(d)] = std::max(std::sqrt(var), kSigmaFloor);
    }
    return m;
}

struct SyntheticProcess {
    const DynamicsModel* dynamics;
    const EnvConfig* cfg;
    std::vector<PolicySpec> ego_behavioural;
    std::vector<PolicySpec> ego_target;
    bool learned_ego_dynamics = false;
    double dr_cap = kDefaultDrCap;
};

struct SyntheticSample {
    Trajectory continuation;  // first state = last prefix state
    double log_dr = 0.0;
    double dr = 1.0;
    bool saturated = false;
};

// One synthetic continuation of `horizon` transitions: ego actions from
// the target pmf on the exact observation, ego next-state via the true
// transition (or the learned row), non-ego next-states via the learned
// model; the log density ratio of the sampled actions accumulates along
// the way.
inline SyntheticSample sample_synthetic_continuation(const GlobalState& last_prefix_state,
                                                     const SyntheticProcess& proc, int horizon,
                                                     Rng& rng) {
    SyntheticSample out;
    out.continuation.states.push_back(last_prefix_state);
    const EnvConfig& cfg = *proc.cfg;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int t = 0; t < horizon; ++t) {
        const GlobalState& s = out.continuation.states.back();
        GlobalState next;
        next.landmarks = s.landmarks;
        next.agents.resize(s.agents.size());

        std::vector<Action> ego(cfg.ego_agents.size());
        for (std::size_t i = 0; i < cfg.ego_agents.size(); ++i) {
            int e = cfg.ego_agents[i];
            Observation obs = observe_exact(s, e);
            ActionPmf tgt = pmf(proc.ego_target[i], obs);
            // inverse-cdf draw
            std::uniform_real_distribution<double> u(0.0, 1.0);
            double r = u(rng), cum = 0.0;
            Action a = static_cast<Action>(kNumActions - 1);
            for (int ai = 0; ai < kNumActions; ++ai) {
                cum += tgt.p[static_cast<std::size_t>(ai)];
                if (r <= cum) {
                    a = static_cast<Action>(ai);
                    break;
                }
            }
            ego[i] = a;
            double pb = pmf(proc.ego_behavioural[i], obs)[a];
            if (!(pb > 0.0))
                throw std::invalid_argument("behavioural ego policy must have full support");
            out.log_dr += std::log(tgt[a]) - std::log(pb);
        }
        out.continuation.ego_actions.push_back(ego);

        for (std::size_t k = 0; k < s.agents.size(); ++k) {
            bool is_ego = false;
            std::size_t slot = 0;
            for (std::size_t i = 0; i < cfg.ego_agents.size(); ++i)
                if (cfg.ego_agents[i] == static_cast<int>(k)) {
                    is_ego = true;
                    slot = i;
                }
            if (is_ego && !proc.learned_ego_dynamics) {
                const AgentState& a = s.agents[k];
                AgentState na;
                na.pos = a.pos + a.vel;
                if (cfg.sigma_act > 0.0) {
                    na.pos.x += cfg.sigma_act * noise(rng);
                    na.pos.y += cfg.sigma_act * noise(rng);
                }
                na.vel = a.vel + action_vector(ego[slot]) * cfg.accel;
                next.agents[k] = na;
            } else {
                next.agents[k] = proc.dynamics->sample_next(s, static_cast<int>(k), rng);
            }
        }
        out.continuation.states.push_back(next);
    }
    out.dr = density_ratio_from_log(out.log_dr, proc.dr_cap, &out.saturated);
    return out;
}

struct MaxDrEstimate {
    double w_tilde = 1.0;
    int n_samples = 0;
    int n_passing = 0;
    bool saturated = false;
};

// Per-candidate CP test over synthetic continuations; the returned
// w_tilde is the largest DR among passing candidates, or the smallest
// sampled DR when nothing passes (least-inflating fallback, flagged by
// n_passing == 0).
inline MaxDrEstimate estimate_max_dr_from_samples(const std::vector<double>& scores,
                                                  const std::vector<double>& drs,
                                                  const std::vector<bool>& saturated,
                                                  const WeightedCalibrationSet& calib,
                                                  double alpha) {
    if (scores.size() != drs.size() || scores.empty())
        throw std::invalid_argument("need matching, non-empty score/DR lists");
    MaxDrEstimate est;
    est.n_samples = static_cast<int>(scores.size());
    double min_dr = drs.front();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        min_dr = std::min(min_dr, drs[i]);
        CriticalValue q = weighted_quantile(calib, drs[i], alpha);
        if (q.admits(scores[i])) {
            if (est.n_passing == 0 || drs[i] > est.w_tilde) {
                est.w_tilde = drs[i];
                est.saturated = saturated[i];
            }
            ++est.n_passing;
        }
    }
    if (est.n_passing == 0) est.w_tilde = min_dr;
    return est;
}

// Full search for one test prefix: sample `n_samples` continuations,
// score each against the prediction center, and reduce.
inline MaxDrEstimate estimate_max_dr(const GlobalState& last_prefix_state,
                                     const SyntheticProcess& proc, int n_samples, int horizon,
                                     const SuffixMatrix& center,
                                     const WeightedCalibrationSet& calib,
                                     const std::vector<double>& gammas,
                                     const std::vector<double>& sigma, double alpha,
                                     bool positions_only, Rng& rng) {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    std::vector<double> scores, drs;
    std::vector<bool> sat;
    scores.reserve(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        SyntheticSample s = sample_synthetic_continuation(last_prefix_state, proc, horizon, rng);
        std::vector<GlobalState> suffix(s.continuation.states.begin() + 1,
                                        s.continuation.states.end());
        scores.push_back(score(center, suffix_matrix(suffix, positions_only), gammas, sigma));
        drs.push_back(s.dr);
        sat.push_back(s.saturated);
    }
    return estimate_max_dr_from_samples(scores, drs, sat, calib, alpha);
}

}  // namespace macopp
