#pragma once

// Experiment pipeline: dataset generation under the behavioural and
// target processes, train / calibrate / evaluate orchestration per
// mode, and coverage reporting.

#include <atomic>
#include <cmath>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "macopp/conformal.hpp"
#include "macopp/density_ratio.hpp"
#include "macopp/io.hpp"
#include "macopp/mpe.hpp"
#include "macopp/policy.hpp"
#include "macopp/predictor.hpp"
#include "macopp/rng.hpp"
#include "macopp/synthetic.hpp"
#include "macopp/trajectory.hpp"

namespace macopp {

enum class Mode { TT, BT, MacoppSynth, MacoppTrue };

inline std::string mode_name(Mode m) {
    switch (m) {
        case Mode::TT: return "TT";
        case Mode::BT: return "BT";
        case Mode::MacoppSynth: return "MACOPP_SYNTH";
        case Mode::MacoppTrue: return "MACOPP_TRUE";
    }
    return "?";
}

inline Mode parse_mode(const std::string& s) {
    if (s == "TT") return Mode::TT;
    if (s == "BT") return Mode::BT;
    if (s == "MACOPP_SYNTH") return Mode::MacoppSynth;
    if (s == "MACOPP_TRUE") return Mode::MacoppTrue;
    throw std::runtime_error("unknown mode '" + s + "' (expected TT, BT, MACOPP_SYNTH or MACOPP_TRUE)");
}

struct ExperimentConfig {
    EnvConfig env;
    double behavioural_eps_greedy = 0.1;
    double target_eps_greedy = 0.1;
    Action bias_action = Action::Down;
    double capture_radius = 0.1;

    int prefix_len = 9;   // H
    int suffix_len = 8;   // T - H
    int n_train = 800;
    int n_calib = 400;
    int n_test = 400;
    int eval_continuations = 25;
    int synth_samples = 25;
    int train_continuations = 1;

    double alpha = 0.05;
    double ridge_lambda = 1e-3;
    double dr_cap = kDefaultDrCap;
    bool score_positions_only = false;
    bool learned_ego_dynamics = false;

    std::uint64_t seed = 1;
    int workers = 0;  // 0: hardware concurrency

    double eps_bias = 0.2;
    std::vector<double> sweep_eps_bias = {0.1, 0.15, 0.2, 0.25, 0.3};
    std::vector<Mode> modes = {Mode::TT, Mode::BT, Mode::MacoppSynth, Mode::MacoppTrue};

    int total_len() const { return prefix_len + suffix_len; }

    void validate() const {
        env.validate();
        if (prefix_len < 1 || suffix_len < 1)
            throw std::runtime_error("config: prefix_len and suffix_len must be >= 1");
        if (n_train < 10 || n_calib < 1 || n_test < 1)
            throw std::runtime_error("config: split counts too small");
        if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::runtime_error("config: alpha in (0,1)");
        if (eval_continuations < 1 || synth_samples < 1 || train_continuations < 1)
            throw std::runtime_error("config: Monte-Carlo counts must be >= 1");
    }

    std::vector<PolicySpec> behavioural_policies() const {
        std::vector<PolicySpec> v(static_cast<std::size_t>(env.num_agents));
        for (auto& s : v) {
            s.eps_greedy = behavioural_eps_greedy;
            s.eps_bias = 0.0;
            s.bias_action = bias_action;
            s.capture_radius = capture_radius;
        }
        return v;
    }

    std::vector<PolicySpec> ego_behavioural_policies() const {
        std::vector<PolicySpec> v;
        for (std::size_t i = 0; i < env.ego_agents.size(); ++i) {
            PolicySpec s;
            s.eps_greedy = behavioural_eps_greedy;
            s.eps_bias = 0.0;
            s.bias_action = bias_action;
            s.capture_radius = capture_radius;
            v.push_back(s);
        }
        return v;
    }

    std::vector<PolicySpec> ego_target_policies(double bias) const {
        std::vector<PolicySpec> v;
        for (std::size_t i = 0; i < env.ego_agents.size(); ++i) {
            PolicySpec s;
            s.eps_greedy = target_eps_greedy;
            s.eps_bias = bias;
            s.bias_action = bias_action;
            s.capture_radius = capture_radius;
            v.push_back(s);
        }
        return v;
    }

    ProcessPolicies behavioural_process() const {
        ProcessPolicies p;
        p.behavioural = behavioural_policies();
        p.switch_step = -1;
        return p;
    }

    ProcessPolicies target_process(double bias) const {
        ProcessPolicies p;
        p.behavioural = behavioural_policies();
        p.ego_target = ego_target_policies(bias);
        p.switch_step = prefix_len - 1;  // action taken at the last prefix state
        return p;
    }

    std::vector<double> gammas() const {
        std::vector<double> g(static_cast<std::size_t>(suffix_len));
        for (int t = 0; t < suffix_len; ++t) g[static_cast<std::size_t>(t)] = 1.0 / (t + 1);
        return g;
    }
};

// ---- config (de)serialisation -----------------------------------------

inline Action parse_action(const std::string& s) {
    if (s == "left") return Action::Left;
    if (s == "right") return Action::Right;
    if (s == "up") return Action::Up;
    if (s == "down") return Action::Down;
    if (s == "nothing") return Action::Nothing;
    throw std::runtime_error("unknown action '" + s + "'");
}

inline std::string action_name(Action a) {
    switch (a) {
        case Action::Left: return "left";
        case Action::Right: return "right";
        case Action::Up: return "up";
        case Action::Down: return "down";
        case Action::Nothing: return "nothing";
    }
    return "?";
}

inline ExperimentConfig config_from_json(const json& j) {
    int version = require_field<int>(j, "schema_version", "");
    if (version != 1) throw std::runtime_error("config: unsupported schema_version");
    ExperimentConfig c;
    if (j.contains("env")) {
        const json& e = j.at("env");
        c.env.num_agents = optional_field(e, "num_agents", c.env.num_agents);
        c.env.num_landmarks = optional_field(e, "num_landmarks", c.env.num_landmarks);
        c.env.ego_agents = optional_field(e, "ego_agents", c.env.ego_agents);
        c.env.accel = optional_field(e, "accel", c.env.accel);
        c.env.sigma_act = optional_field(e, "sigma_act", c.env.sigma_act);
        c.env.sigma_sensor = optional_field(e, "sigma_sensor", c.env.sigma_sensor);
        c.env.arena_half_width = optional_field(e, "arena_half_width", c.env.arena_half_width);
    }
    if (j.contains("policies")) {
        const json& p = j.at("policies");
        c.behavioural_eps_greedy =
            optional_field(p, "behavioural_eps_greedy", c.behavioural_eps_greedy);
        c.target_eps_greedy = optional_field(p, "target_eps_greedy", c.target_eps_greedy);
        if (p.contains("bias_action"))
            c.bias_action = parse_action(p.at("bias_action").get<std::string>());
        c.capture_radius = optional_field(p, "capture_radius", c.capture_radius);
    }
    if (j.contains("horizon")) {
        const json& h = j.at("horizon");
        c.prefix_len = require_field<int>(h, "prefix_len", "horizon.");
        c.suffix_len = require_field<int>(h, "suffix_len", "horizon.");
    }
    if (j.contains("splits")) {
        const json& s = j.at("splits");
        c.n_train = require_field<int>(s, "n_train", "splits.");
        c.n_calib = require_field<int>(s, "n_calib", "splits.");
        c.n_test = require_field<int>(s, "n_test", "splits.");
    }
    if (j.contains("mc")) {
        const json& m = j.at("mc");
        c.eval_continuations = optional_field(m, "eval_continuations", c.eval_continuations);
        c.synth_samples = optional_field(m, "synth_samples", c.synth_samples);
        c.train_continuations = optional_field(m, "train_continuations", c.train_continuations);
    }
    c.alpha = optional_field(j, "alpha", c.alpha);
    c.ridge_lambda = optional_field(j, "ridge_lambda", c.ridge_lambda);
    c.dr_cap = optional_field(j, "dr_cap", c.dr_cap);
    c.score_positions_only = optional_field(j, "score_positions_only", c.score_positions_only);
    c.learned_ego_dynamics = optional_field(j, "learned_ego_dynamics", c.learned_ego_dynamics);
    c.seed = optional_field<std::uint64_t>(j, "seed", c.seed);
    c.workers = optional_field(j, "workers", c.workers);
    c.eps_bias = optional_field(j, "eps_bias", c.eps_bias);
    c.sweep_eps_bias = optional_field(j, "sweep_eps_bias", c.sweep_eps_bias);
    if (j.contains("modes")) {
        c.modes.clear();
        for (const auto& m : j.at("modes")) c.modes.push_back(parse_mode(m.get<std::string>()));
    }
    c.validate();
    return c;
}

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["schema_version"] = 1;
    j["env"] = {{"num_agents", c.env.num_agents},
                {"num_landmarks", c.env.num_landmarks},
                {"ego_agents", c.env.ego_agents},
                {"accel", c.env.accel},
                {"sigma_act", c.env.sigma_act},
                {"sigma_sensor", c.env.sigma_sensor},
                {"arena_half_width", c.env.arena_half_width}};
    j["policies"] = {{"behavioural_eps_greedy", c.behavioural_eps_greedy},
                     {"target_eps_greedy", c.target_eps_greedy},
                     {"bias_action", action_name(c.bias_action)},
                     {"capture_radius", c.capture_radius}};
    j["horizon"] = {{"prefix_len", c.prefix_len}, {"suffix_len", c.suffix_len}};
    j["splits"] = {{"n_train", c.n_train}, {"n_calib", c.n_calib}, {"n_test", c.n_test}};
    j["mc"] = {{"eval_continuations", c.eval_continuations},
               {"synth_samples", c.synth_samples},
               {"train_continuations", c.train_continuations}};
    j["alpha"] = c.alpha;
    j["ridge_lambda"] = c.ridge_lambda;
    j["dr_cap"] = c.dr_cap;
    j["score_positions_only"] = c.score_positions_only;
    j["learned_ego_dynamics"] = c.learned_ego_dynamics;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["eps_bias"] = c.eps_bias;
    j["sweep_eps_bias"] = c.sweep_eps_bias;
    std::vector<std::string> modes;
    for (Mode m : c.modes) modes.push_back(mode_name(m));
    j["modes"] = modes;
    return j;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    return config_from_json(json::parse(in));
}

// ---- parallel helper --------------------------------------------------

template <typename Fn>
inline void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

// ---- datasets ---------------------------------------------------------

// RNG stream purposes; combined with indices so that every rollout owns
// an independent stream regardless of scheduling.
namespace stream {
inline constexpr std::uint64_t kTrain = 1;
inline constexpr std::uint64_t kCalib = 2;
inline constexpr std::uint64_t kTest = 3;
inline constexpr std::uint64_t kCalibTarget = 4;
inline constexpr std::uint64_t kTestTarget = 5;
inline constexpr std::uint64_t kSynthSearch = 6;
inline constexpr std::uint64_t kTrueSearch = 7;
}  // namespace stream

inline Rng purpose_stream(const ExperimentConfig& cfg, std::uint64_t purpose, std::uint64_t salt,
                          std::uint64_t index) {
    return make_stream(cfg.seed ^ mix64((purpose << 48) ^ salt), index);
}

inline std::uint64_t bias_salt(double eps_bias) {
    return static_cast<std::uint64_t>(std::llround(eps_bias * 1e6));
}

// Behavioural-side data: everything that does not depend on eps_bias.
struct BehaviouralData {
    std::vector<Trajectory> train_full;   // length T, behavioural throughout
    std::vector<Trajectory> calib_full;   // length T, prefix + behavioural continuation
    std::vector<Trajectory> test_prefix;  // length H
};

inline BehaviouralData generate_behavioural(const ExperimentConfig& cfg) {
    cfg.validate();
    BehaviouralData d;
    ProcessPolicies behav = cfg.behavioural_process();

    d.train_full.resize(static_cast<std::size_t>(cfg.n_train) *
                        static_cast<std::size_t>(cfg.train_continuations));
    parallel_for(static_cast<std::size_t>(cfg.n_train), cfg.workers, [&](std::size_t i) {
        Rng rng = purpose_stream(cfg, stream::kTrain, 0, i);
        Trajectory prefix = rollout_fresh(cfg.prefix_len, behav, cfg.env, rng);
        for (int c = 0; c < cfg.train_continuations; ++c) {
            Trajectory cont = continue_from(prefix, cfg.suffix_len, behav, cfg.env, rng);
            Trajectory full = prefix;
            for (std::size_t t = 1; t < cont.states.size(); ++t)
                full.states.push_back(cont.states[t]);
            for (const auto& a : cont.ego_actions) full.ego_actions.push_back(a);
            d.train_full[i * static_cast<std::size_t>(cfg.train_continuations) +
                         static_cast<std::size_t>(c)] = std::move(full);
        }
    });

    d.calib_full.resize(static_cast<std::size_t>(cfg.n_calib));
    parallel_for(static_cast<std::size_t>(cfg.n_calib), cfg.workers, [&](std::size_t i) {
        Rng rng = purpose_stream(cfg, stream::kCalib, 0, i);
        d.calib_full[i] = rollout_fresh(cfg.total_len(), behav, cfg.env, rng);
    });

    d.test_prefix.resize(static_cast<std::size_t>(cfg.n_test));
    parallel_for(static_cast<std::size_t>(cfg.n_test), cfg.workers, [&](std::size_t i) {
        Rng rng = purpose_stream(cfg, stream::kTest, 0, i);
        d.test_prefix[i] = rollout_fresh(cfg.prefix_len, behav, cfg.env, rng);
    });
    return d;
}

// Target-side data for one eps_bias: continuations of the calibration
// prefixes (for T->T calibration) and the evaluation continuations of
// the test prefixes.
struct TargetData {
    double eps_bias = 0.0;
    std::vector<Trajectory> calib_target_cont;               // one per calibration prefix
    std::vector<std::vector<Trajectory>> test_target_cont;   // eval_continuations per test prefix
};

inline TargetData generate_target(const ExperimentConfig& cfg, const BehaviouralData& behav,
                                  double eps_bias) {
    TargetData d;
    d.eps_bias = eps_bias;
    ProcessPolicies target = cfg.target_process(eps_bias);
    const std::uint64_t salt = bias_salt(eps_bias);

    d.calib_target_cont.resize(behav.calib_full.size());
    parallel_for(behav.calib_full.size(), cfg.workers, [&](std::size_t i) {
        Rng rng = purpose_stream(cfg, stream::kCalibTarget, salt, i);
        Trajectory prefix;
        prefix.states.assign(behav.calib_full[i].states.begin(),
                             behav.calib_full[i].states.begin() + cfg.prefix_len);
        d.calib_target_cont[i] = continue_from(prefix, cfg.suffix_len, target, cfg.env, rng);
    });

    d.test_target_cont.resize(behav.test_prefix.size());
    parallel_for(behav.test_prefix.size(), cfg.workers, [&](std::size_t i) {
        Rng rng = purpose_stream(cfg, stream::kTestTarget, salt, i);
        d.test_target_cont[i].reserve(static_cast<std::size_t>(cfg.eval_continuations));
        for (int c = 0; c < cfg.eval_continuations; ++c)
            d.test_target_cont[i].push_back(
                continue_from(behav.test_prefix[i], cfg.suffix_len, target, cfg.env, rng));
    });
    return d;
}

// ---- calibration ------------------------------------------------------

// Behavioural continuation of a full calibration trajectory: states
// H-1 .. T-1 and the matching ego action records.
inline Trajectory calib_continuation(const Trajectory& full, int prefix_len) {
    Trajectory cont;
    cont.states.assign(full.states.begin() + (prefix_len - 1), full.states.end());
    cont.ego_actions.assign(full.ego_actions.begin() + (prefix_len - 1), full.ego_actions.end());
    return cont;
}

inline WeightedCalibrationSet calibrate(const ExperimentConfig& cfg, const BehaviouralData& behav,
                                        const TargetData* target, const PredictorModel& model,
                                        Mode mode, double eps_bias) {
    const std::vector<double> gammas = cfg.gammas();
    const std::vector<double> sigma = model.score_sigma(cfg.score_positions_only);
    const auto ego_b = cfg.ego_behavioural_policies();
    const auto ego_t = cfg.ego_target_policies(eps_bias);

    std::vector<CalibrationRecord> recs(behav.calib_full.size());
    parallel_for(behav.calib_full.size(), cfg.workers, [&](std::size_t i) {
        const Trajectory& full = behav.calib_full[i];
        std::vector<GlobalState> prefix(full.states.begin(),
                                        full.states.begin() + cfg.prefix_len);
        SuffixMatrix center = model.predict(prefix);

        const Trajectory* cont_traj = nullptr;
        Trajectory behav_cont;
        if (mode == Mode::TT) {
            cont_traj = &target->calib_target_cont[i];
        } else {
            behav_cont = calib_continuation(full, cfg.prefix_len);
            cont_traj = &behav_cont;
        }
        std::vector<GlobalState> suffix(cont_traj->states.begin() + 1, cont_traj->states.end());
        double s = score(center, suffix_matrix(suffix, cfg.score_positions_only), gammas, sigma);

        double w = 1.0;
        if (mode == Mode::MacoppSynth || mode == Mode::MacoppTrue) {
            double log_w =
                log_density_ratio_of_continuation(*cont_traj, ego_b, ego_t, cfg.env.ego_agents);
            w = density_ratio_from_log(log_w, cfg.dr_cap);
        }
        recs[i] = {s, w};
    });
    return WeightedCalibrationSet::from_records(std::move(recs));
}

// ---- evaluation -------------------------------------------------------

struct PrefixResult {
    CriticalValue critical_value;
    double w_tilde = 1.0;
    int n_passing = 0;
    int covered = 0;
    int prop3_violations = 0;  // sampled candidate passed with w_i <= w_tilde but left out
};

struct CoverageReport {
    std::string mode;
    double eps_bias = 0.0;
    double marginal_coverage = 0.0;
    double mean_finite_critical_value = 0.0;
    double proportion_unbounded = 0.0;
    long n_test = 0;       // prefix x continuation pairs
    int n_prefixes = 0;
    long prop3_violations = 0;
    std::vector<PrefixResult> per_prefix;
};

inline CoverageReport evaluate(const ExperimentConfig& cfg, const BehaviouralData& behav,
                               const TargetData& target, const PredictorModel& model,
                               const DynamicsModel& dynamics,
                               const WeightedCalibrationSet& calib, Mode mode) {
    const std::vector<double> gammas = cfg.gammas();
    const std::vector<double> sigma = model.score_sigma(cfg.score_positions_only);
    const auto ego_b = cfg.ego_behavioural_policies();
    const auto ego_t = cfg.ego_target_policies(target.eps_bias);
    const std::uint64_t salt = bias_salt(target.eps_bias);

    CriticalValue standard_cv;
    if (mode == Mode::TT || mode == Mode::BT) standard_cv = standard_quantile(calib, cfg.alpha);

    SyntheticProcess proc;
    proc.dynamics = &dynamics;
    proc.cfg = &cfg.env;
    proc.ego_behavioural = ego_b;
    proc.ego_target = ego_t;
    proc.learned_ego_dynamics = cfg.learned_ego_dynamics;
    proc.dr_cap = cfg.dr_cap;
    ProcessPolicies target_proc = cfg.target_process(target.eps_bias);

    std::vector<PrefixResult> results(behav.test_prefix.size());
    parallel_for(behav.test_prefix.size(), cfg.workers, [&](std::size_t i) {
        PrefixResult& res = results[i];
        const Trajectory& prefix = behav.test_prefix[i];
        SuffixMatrix center = model.predict(prefix.states);

        double w_top = 1.0;
        if (mode == Mode::TT || mode == Mode::BT) {
            res.critical_value = standard_cv;
        } else {
            std::vector<double> cand_scores, cand_drs;
            std::vector<bool> cand_sat;
            if (mode == Mode::MacoppSynth) {
                Rng rng = purpose_stream(cfg, stream::kSynthSearch, salt, i);
                for (int c = 0; c < cfg.synth_samples; ++c) {
                    SyntheticSample s = sample_synthetic_continuation(prefix.states.back(), proc,
                                                                     cfg.suffix_len, rng);
                    std::vector<GlobalState> suffix(s.continuation.states.begin() + 1,
                                                    s.continuation.states.end());
                    cand_scores.push_back(score(
                        center, suffix_matrix(suffix, cfg.score_positions_only), gammas, sigma));
                    cand_drs.push_back(s.dr);
                    cand_sat.push_back(s.saturated);
                }
            } else {
                // MACOPP_TRUE: search continuations drawn from the true
                // target process, kept separate from the evaluation set.
                Rng rng = purpose_stream(cfg, stream::kTrueSearch, salt, i);
                for (int c = 0; c < cfg.synth_samples; ++c) {
                    Trajectory cont =
                        continue_from(prefix, cfg.suffix_len, target_proc, cfg.env, rng);
                    std::vector<GlobalState> suffix(cont.states.begin() + 1, cont.states.end());
                    cand_scores.push_back(score(
                        center, suffix_matrix(suffix, cfg.score_positions_only), gammas, sigma));
                    bool sat = false;
                    double log_w = log_density_ratio_of_continuation(cont, ego_b, ego_t,
                                                                     cfg.env.ego_agents);
                    cand_drs.push_back(density_ratio_from_log(log_w, cfg.dr_cap, &sat));
                    cand_sat.push_back(sat);
                }
            }
            MaxDrEstimate est =
                estimate_max_dr_from_samples(cand_scores, cand_drs, cand_sat, calib, cfg.alpha);
            res.w_tilde = est.w_tilde;
            res.n_passing = est.n_passing;
            w_top = est.w_tilde;
            res.critical_value = weighted_quantile(calib, w_top, cfg.alpha);

            // Prop. 3 containment audit over the sampled candidates.
            for (std::size_t c = 0; c < cand_scores.size(); ++c) {
                CriticalValue own = weighted_quantile(calib, cand_drs[c], cfg.alpha);
                if (own.admits(cand_scores[c]) && cand_drs[c] <= est.w_tilde &&
                    !res.critical_value.admits(cand_scores[c]))
                    ++res.prop3_violations;
            }
        }

        for (const Trajectory& cont : target.test_target_cont[i]) {
            std::vector<GlobalState> suffix(cont.states.begin() + 1, cont.states.end());
            double s =
                score(center, suffix_matrix(suffix, cfg.score_positions_only), gammas, sigma);
            if (res.critical_value.admits(s)) ++res.covered;
        }
    });

    CoverageReport rep;
    rep.mode = mode_name(mode);
    rep.eps_bias = target.eps_bias;
    rep.n_prefixes = static_cast<int>(results.size());
    long covered = 0;
    long finite = 0;
    double cv_sum = 0.0;
    for (const auto& r : results) {
        covered += r.covered;
        rep.n_test += cfg.eval_continuations;
        rep.prop3_violations += r.prop3_violations;
        if (r.critical_value.infinite) {
            rep.proportion_unbounded += 1.0;
        } else {
            cv_sum += r.critical_value.value;
            ++finite;
        }
    }
    rep.marginal_coverage = static_cast<double>(covered) / static_cast<double>(rep.n_test);
    rep.proportion_unbounded /= static_cast<double>(results.size());
    rep.mean_finite_critical_value = finite > 0 ? cv_sum / static_cast<double>(finite) : 0.0;
    rep.per_prefix = std::move(results);
    return rep;
}

// ---- reports ----------------------------------------------------------

inline std::string report_csv_header() {
    return "mode,eps_bias,coverage,mean_cv,prop_unbounded,n_test";
}

inline std::string report_csv_row(const CoverageReport& r) {
    std::ostringstream os;
    os.precision(10);
    os << r.mode << "," << r.eps_bias << "," << r.marginal_coverage << ","
       << r.mean_finite_critical_value << "," << r.proportion_unbounded << "," << r.n_test;
    return os.str();
}

// Trained models plus the behavioural data they came from; one of these
// backs a whole sweep.
struct Pipeline {
    ExperimentConfig cfg;
    BehaviouralData behav;
    PredictorModel predictor;
    DynamicsModel dynamics;

    static Pipeline build(const ExperimentConfig& cfg) {
        Pipeline p;
        p.cfg = cfg;
        p.cfg.validate();
        p.behav = generate_behavioural(p.cfg);
        p.predictor =
            train_predictor(p.behav.train_full, cfg.prefix_len, cfg.suffix_len, cfg.ridge_lambda);
        p.dynamics = fit_dynamics(p.behav.train_full, cfg.ridge_lambda);
        return p;
    }

    CoverageReport run(Mode mode, double eps_bias) const {
        TargetData target = generate_target(cfg, behav, eps_bias);
        WeightedCalibrationSet calib =
            calibrate(cfg, behav, &target, predictor, mode, eps_bias);
        return evaluate(cfg, behav, target, predictor, dynamics, calib, mode);
    }

    std::vector<CoverageReport> sweep() const {
        std::vector<CoverageReport> out;
        for (double bias : cfg.sweep_eps_bias) {
            TargetData target = generate_target(cfg, behav, bias);
            for (Mode mode : cfg.modes) {
                WeightedCalibrationSet calib =
                    calibrate(cfg, behav, &target, predictor, mode, bias);
                out.push_back(evaluate(cfg, behav, target, predictor, dynamics, calib, mode));
            }
        }
        return out;
    }
};

}  // namespace macopp
