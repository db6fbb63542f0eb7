#pragma once

// Linear trajectory predictor: closed-form ridge regression from the
// flattened prefix (states + landmarks + bias) to the flattened suffix,
// plus the per-dimension normalisation constants sigma used by the
// nonconformity score.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "macopp/conformal.hpp"
#include "macopp/mpe.hpp"
#include "macopp/trajectory.hpp"

namespace macopp {

inline constexpr double kSigmaFloor = 1e-6;
inline constexpr int kStateDims = 4;  // pos.x, pos.y, vel.x, vel.y

// Flatten agent states of one global state, time-major caller side.
inline void append_state(const GlobalState& s, std::vector<double>& out) {
    for (const auto& a : s.agents) {
        out.push_back(a.pos.x);
        out.push_back(a.pos.y);
        out.push_back(a.vel.x);
        out.push_back(a.vel.y);
    }
}

inline std::vector<double> prefix_features(const std::vector<GlobalState>& prefix) {
    std::vector<double> f;
    for (const auto& s : prefix) append_state(s, f);
    for (const auto& l : prefix.front().landmarks) {
        f.push_back(l.x);
        f.push_back(l.y);
    }
    f.push_back(1.0);  // bias
    return f;
}

// Suffix states as a steps x (K * kStateDims) matrix, optionally
// restricted to positions for scoring.
inline SuffixMatrix suffix_matrix(const std::vector<GlobalState>& suffix, bool positions_only) {
    SuffixMatrix m;
    for (const auto& s : suffix) {
        std::vector<double> row;
        for (const auto& a : s.agents) {
            row.push_back(a.pos.x);
            row.push_back(a.pos.y);
            if (!positions_only) {
                row.push_back(a.vel.x);
                row.push_back(a.vel.y);
            }
        }
        m.push_back(std::move(row));
    }
    return m;
}

struct PredictorModel {
    int prefix_len = 0;   // H
    int suffix_len = 0;   // T - H
    int num_agents = 0;
    int num_landmarks = 0;
    double ridge_lambda = 1e-3;
    Eigen::MatrixXd weights;      // out_dim x feat_dim
    std::vector<double> sigma;    // per per-step state dimension (K * kStateDims)

    int feat_dim() const { return prefix_len * num_agents * kStateDims + 2 * num_landmarks + 1; }
    int step_dim() const { return num_agents * kStateDims; }
    int out_dim() const { return suffix_len * step_dim(); }

    // Predicted suffix as steps x step_dim.
    SuffixMatrix predict(const std::vector<GlobalState>& prefix) const {
        if (static_cast<int>(prefix.size()) != prefix_len)
            throw std::invalid_argument("prefix length mismatch");
        std::vector<double> f = prefix_features(prefix);
        if (static_cast<int>(f.size()) != feat_dim())
            throw std::invalid_argument("prefix feature shape mismatch");
        Eigen::Map<const Eigen::VectorXd> x(f.data(), static_cast<Eigen::Index>(f.size()));
        Eigen::VectorXd y = weights * x;
        SuffixMatrix out;
        for (int t = 0; t < suffix_len; ++t) {
            std::vector<double> row(static_cast<std::size_t>(step_dim()));
            for (int d = 0; d < step_dim(); ++d) row[static_cast<std::size_t>(d)] = y(t * step_dim() + d);
            out.push_back(std::move(row));
        }
        return out;
    }

    // Scoring sigma restricted to the scored subset of dimensions.
    std::vector<double> score_sigma(bool positions_only) const {
        if (!positions_only) return sigma;
        std::vector<double> s;
        for (int k = 0; k < num_agents; ++k) {
            s.push_back(sigma[static_cast<std::size_t>(k * kStateDims)]);
            s.push_back(sigma[static_cast<std::size_t>(k * kStateDims + 1)]);
        }
        return s;
    }
};

// One training pair: a full trajectory of length >= H + suffix_len.
// Rows are assembled in dataset order; the normal equations make the
// fit deterministic given that order.
inline PredictorModel train_predictor(const std::vector<Trajectory>& data, int prefix_len,
                                      int suffix_len, double ridge_lambda = 1e-3) {
    if (data.size() < 10) throw std::invalid_argument("need at least 10 training trajectories");
    if (prefix_len < 1 || suffix_len < 1)
        throw std::invalid_argument("prefix_len and suffix_len must be >= 1");
    if (ridge_lambda < 0.0) throw std::invalid_argument("ridge_lambda must be non-negative");

    PredictorModel m;
    m.prefix_len = prefix_len;
    m.suffix_len = suffix_len;
    m.num_agents = static_cast<int>(data.front().states.front().agents.size());
    m.num_landmarks = static_cast<int>(data.front().states.front().landmarks.size());
    m.ridge_lambda = ridge_lambda;

    const int fd = m.feat_dim();
    const int od = m.out_dim();
    const Eigen::Index n = static_cast<Eigen::Index>(data.size());

    Eigen::MatrixXd X(n, fd);
    Eigen::MatrixXd Y(n, od);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Trajectory& tr = data[static_cast<std::size_t>(i)];
        if (static_cast<int>(tr.states.size()) < prefix_len + suffix_len)
            throw std::invalid_argument("training trajectory shorter than H + suffix length");
        std::vector<GlobalState> prefix(tr.states.begin(), tr.states.begin() + prefix_len);
        std::vector<double> f = prefix_features(prefix);
        for (int j = 0; j < fd; ++j) X(i, j) = f[static_cast<std::size_t>(j)];
        std::vector<double> y;
        for (int t = 0; t < suffix_len; ++t)
            append_state(tr.states[static_cast<std::size_t>(prefix_len + t)], y);
        for (int j = 0; j < od; ++j) Y(i, j) = y[static_cast<std::size_t>(j)];
    }

    Eigen::MatrixXd B;  // fd x od
    if (ridge_lambda > 0.0) {
        Eigen::MatrixXd G = X.transpose() * X;
        G.diagonal().array() += ridge_lambda;
        B = G.ldlt().solve(X.transpose() * Y);
    } else {
        // min-norm least squares; stable under rank deficiency
        B = X.completeOrthogonalDecomposition().solve(Y);
    }
    m.weights = B.transpose();

    // sigma: std of one-step-ahead residuals (first suffix step) per
    // state dimension, floored.
    Eigen::MatrixXd R = X * B - Y;
    const int sd = m.step_dim();
    m.sigma.assign(static_cast<std::size_t>(sd), kSigmaFloor);
    for (int d = 0; d < sd; ++d) {
        double var = R.col(d).squaredNorm() / static_cast<double>(n);
        m.sigma[static_cast<std::size_t>(d)] = std::max(std::sqrt(var), kSigmaFloor);
    }
    return m;
}

}  // namespace macopp
