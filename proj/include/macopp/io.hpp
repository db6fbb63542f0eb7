#pragma once

// File formats: JSON experiment config, line-delimited trajectory
// records, model persistence and CSV reports.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "macopp/mpe.hpp"
#include "macopp/policy.hpp"
#include "macopp/predictor.hpp"
#include "macopp/synthetic.hpp"
#include "macopp/trajectory.hpp"

namespace macopp {

using nlohmann::json;

template <typename T>
inline T require_field(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key))
        throw std::runtime_error("config: missing field '" + path + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::runtime_error("config: bad value for '" + path + key + "': " + e.what());
    }
}

template <typename T>
inline T optional_field(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

// ---- trajectories -----------------------------------------------------

// One record per line: id, role (train/calib/test), kind
// (prefix/behavioural/target), landmarks, states flattened row-major
// time x agent x [px, py, vx, vy], ego actions per transition.
struct TrajectoryRecord {
    long id = 0;
    std::string role;
    std::string kind;
    Trajectory traj;
};

inline json trajectory_to_json(const TrajectoryRecord& rec) {
    json j;
    j["id"] = rec.id;
    j["role"] = rec.role;
    j["kind"] = rec.kind;
    std::vector<double> lm;
    for (const auto& l : rec.traj.states.front().landmarks) {
        lm.push_back(l.x);
        lm.push_back(l.y);
    }
    j["landmarks"] = lm;
    std::vector<double> st;
    for (const auto& s : rec.traj.states) append_state(s, st);
    j["states"] = st;
    std::vector<std::vector<int>> acts;
    for (const auto& step_actions : rec.traj.ego_actions) {
        std::vector<int> row;
        for (Action a : step_actions) row.push_back(static_cast<int>(a));
        acts.push_back(std::move(row));
    }
    j["ego_actions"] = acts;
    return j;
}

inline TrajectoryRecord trajectory_from_json(const json& j) {
    TrajectoryRecord rec;
    rec.id = require_field<long>(j, "id", "");
    rec.role = require_field<std::string>(j, "role", "");
    rec.kind = require_field<std::string>(j, "kind", "");
    auto lm = require_field<std::vector<double>>(j, "landmarks", "");
    auto st = require_field<std::vector<double>>(j, "states", "");
    auto acts = require_field<std::vector<std::vector<int>>>(j, "ego_actions", "");
    std::vector<Vec2> landmarks;
    for (std::size_t i = 0; i + 1 < lm.size(); i += 2) landmarks.push_back({lm[i], lm[i + 1]});
    if (st.empty() || st.size() % kStateDims != 0)
        throw std::runtime_error("trajectory record: bad state array length");
    // infer agent count from one transition step count vs total length
    std::size_t steps = acts.size() + 1;
    if (st.size() % (steps * kStateDims) != 0)
        throw std::runtime_error("trajectory record: state array inconsistent with actions");
    std::size_t num_agents = st.size() / (steps * kStateDims);
    std::size_t p = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        GlobalState s;
        s.landmarks = landmarks;
        for (std::size_t k = 0; k < num_agents; ++k) {
            AgentState a;
            a.pos = {st[p], st[p + 1]};
            a.vel = {st[p + 2], st[p + 3]};
            p += 4;
            s.agents.push_back(a);
        }
        rec.traj.states.push_back(std::move(s));
    }
    for (const auto& row : acts) {
        std::vector<Action> r;
        for (int a : row) {
            if (a < 0 || a >= kNumActions)
                throw std::runtime_error("trajectory record: action id out of range");
            r.push_back(static_cast<Action>(a));
        }
        rec.traj.ego_actions.push_back(std::move(r));
    }
    return rec;
}

inline void write_trajectories(const std::string& path, const std::vector<TrajectoryRecord>& recs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& r : recs) out << trajectory_to_json(r).dump() << "\n";
}

inline std::vector<TrajectoryRecord> read_trajectories(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<TrajectoryRecord> recs;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty()) continue;
        try {
            recs.push_back(trajectory_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(ln) + ": " + e.what());
        }
    }
    return recs;
}

// ---- models -----------------------------------------------------------

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    std::vector<double> flat(static_cast<std::size_t>(m.rows() * m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            flat[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
    Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    auto flat = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
        throw std::runtime_error("model file: matrix shape mismatch");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
    return m;
}

inline void save_predictor(const std::string& path, const PredictorModel& m) {
    json j{{"prefix_len", m.prefix_len},       {"suffix_len", m.suffix_len},
           {"num_agents", m.num_agents},       {"num_landmarks", m.num_landmarks},
           {"ridge_lambda", m.ridge_lambda},   {"weights", matrix_to_json(m.weights)},
           {"sigma", m.sigma}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

inline PredictorModel load_predictor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json j = json::parse(in);
    PredictorModel m;
    m.prefix_len = j.at("prefix_len").get<int>();
    m.suffix_len = j.at("suffix_len").get<int>();
    m.num_agents = j.at("num_agents").get<int>();
    m.num_landmarks = j.at("num_landmarks").get<int>();
    m.ridge_lambda = j.at("ridge_lambda").get<double>();
    m.weights = matrix_from_json(j.at("weights"));
    m.sigma = j.at("sigma").get<std::vector<double>>();
    return m;
}

inline void save_dynamics(const std::string& path, const DynamicsModel& m) {
    json j{{"num_agents", m.num_agents},
           {"num_landmarks", m.num_landmarks},
           {"ridge_lambda", m.ridge_lambda},
           {"weights", matrix_to_json(m.weights)},
           {"residual_sigma", m.residual_sigma}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

inline DynamicsModel load_dynamics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json j = json::parse(in);
    DynamicsModel m;
    m.num_agents = j.at("num_agents").get<int>();
    m.num_landmarks = j.at("num_landmarks").get<int>();
    m.ridge_lambda = j.at("ridge_lambda").get<double>();
    m.weights = matrix_from_json(j.at("weights"));
    m.residual_sigma = j.at("residual_sigma").get<std::vector<double>>();
    return m;
}

}  // namespace macopp
