#include <doctest.h>

#include <cmath>

#include "macopp/harness.hpp"
#include "macopp/predictor.hpp"

using namespace macopp;

namespace {

// Noise-free behavioural rollouts: the double integrator with scripted
// deterministic policies is exactly linear in (pos, vel) given actions,
// but actions depend on state; with eps 0 and no noise the whole system
// is still deterministic, though not linear. For the in-model-class
// check use "nothing"-only dynamics (pure drift), which is linear.
std::vector<Trajectory> drift_dataset(int n, int len, Rng& rng) {
    EnvConfig cfg;
    cfg.sigma_act = 0.0;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Trajectory> out;
    for (int i = 0; i < n; ++i) {
        GlobalState s = sample_initial(cfg, rng);
        for (auto& a : s.agents) a.vel = {u(rng) * 0.1, u(rng) * 0.1};
        Trajectory tr;
        tr.states.push_back(s);
        for (int t = 1; t < len; ++t) {
            std::vector<Action> acts(s.agents.size(), Action::Nothing);
            tr.states.push_back(step(tr.states.back(), acts, cfg, rng));
            tr.ego_actions.push_back({Action::Nothing});
        }
        out.push_back(std::move(tr));
    }
    return out;
}

std::vector<Trajectory> behavioural_dataset(int n, int len, std::uint64_t seed) {
    EnvConfig cfg;
    ProcessPolicies pol;
    pol.behavioural.assign(3, PolicySpec{});
    std::vector<Trajectory> out;
    for (int i = 0; i < n; ++i) {
        Rng rng = make_stream(seed, static_cast<std::uint64_t>(i));
        out.push_back(rollout_fresh(len, pol, cfg, rng));
    }
    return out;
}

double suffix_mse(const PredictorModel& m, const std::vector<Trajectory>& data) {
    double se = 0.0;
    long cnt = 0;
    for (const auto& tr : data) {
        std::vector<GlobalState> prefix(tr.states.begin(), tr.states.begin() + m.prefix_len);
        SuffixMatrix pred = m.predict(prefix);
        std::vector<GlobalState> suffix(tr.states.begin() + m.prefix_len, tr.states.end());
        SuffixMatrix truth = suffix_matrix(suffix, false);
        for (std::size_t t = 0; t < pred.size(); ++t)
            for (std::size_t d = 0; d < pred[t].size(); ++d) {
                double r = pred[t][d] - truth[t][d];
                se += r * r;
                ++cnt;
            }
    }
    return se / static_cast<double>(cnt);
}

double zero_mse(const std::vector<Trajectory>& data, int prefix_len) {
    double se = 0.0;
    long cnt = 0;
    for (const auto& tr : data)
        for (std::size_t t = static_cast<std::size_t>(prefix_len); t < tr.states.size(); ++t) {
            std::vector<double> v;
            append_state(tr.states[t], v);
            for (double x : v) {
                se += x * x;
                ++cnt;
            }
        }
    return se / static_cast<double>(cnt);
}

}  // namespace

TEST_CASE("exactly linear noise-free system: near-zero residuals at lambda=0") {
    Rng rng(11);
    auto data = drift_dataset(60, 8, rng);
    PredictorModel m = train_predictor(data, 4, 4, 0.0);
    double worst = 0.0;
    for (const auto& tr : data) {
        std::vector<GlobalState> prefix(tr.states.begin(), tr.states.begin() + 4);
        SuffixMatrix pred = m.predict(prefix);
        std::vector<GlobalState> suffix(tr.states.begin() + 4, tr.states.end());
        SuffixMatrix truth = suffix_matrix(suffix, false);
        for (std::size_t t = 0; t < pred.size(); ++t)
            for (std::size_t d = 0; d < pred[t].size(); ++d)
                worst = std::max(worst, std::abs(pred[t][d] - truth[t][d]));
    }
    CHECK(worst <= 1e-8);
    // residual sigma hits the floor on a perfectly fit system
    for (double s : m.sigma) CHECK(s >= kSigmaFloor);
}

TEST_CASE("training MSE beats the zero predictor; held-out MSE too") {
    auto train = behavioural_dataset(300, 17, 100);
    auto heldout = behavioural_dataset(100, 17, 200);
    PredictorModel m = train_predictor(train, 9, 8, 1e-3);
    CHECK(suffix_mse(m, train) < zero_mse(train, 9));
    CHECK(suffix_mse(m, heldout) < zero_mse(heldout, 9));
}

TEST_CASE("duplicating the training set leaves the lambda=0 solution unchanged") {
    auto data = behavioural_dataset(300, 17, 13);
    auto doubled = data;
    doubled.insert(doubled.end(), data.begin(), data.end());
    PredictorModel a = train_predictor(data, 9, 8, 0.0);
    PredictorModel b = train_predictor(doubled, 9, 8, 0.0);
    double diff = (a.weights - b.weights).cwiseAbs().maxCoeff();
    CHECK(diff <= 1e-6);
}

TEST_CASE("determinism: identical data gives bit-identical weights") {
    auto data = behavioural_dataset(120, 17, 77);
    PredictorModel a = train_predictor(data, 9, 8, 1e-3);
    PredictorModel b = train_predictor(data, 9, 8, 1e-3);
    CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t i = 0; i < a.sigma.size(); ++i) CHECK(a.sigma[i] == b.sigma[i]);
}

TEST_CASE("predict is affine in the prefix features") {
    auto data = behavioural_dataset(120, 17, 31);
    PredictorModel m = train_predictor(data, 9, 8, 1e-3);
    const auto& x1 = data[0];
    const auto& x2 = data[1];
    double a = 0.3;

    std::vector<GlobalState> p1(x1.states.begin(), x1.states.begin() + 9);
    std::vector<GlobalState> p2(x2.states.begin(), x2.states.begin() + 9);
    std::vector<GlobalState> mix = p1;
    for (std::size_t t = 0; t < mix.size(); ++t)
        for (std::size_t k = 0; k < mix[t].agents.size(); ++k) {
            auto& ag = mix[t].agents[k];
            const auto& o = p2[t].agents[k];
            ag.pos = ag.pos * a + o.pos * (1 - a);
            ag.vel = ag.vel * a + o.vel * (1 - a);
        }
    for (std::size_t l = 0; l < mix[0].landmarks.size(); ++l)
        for (auto& st : mix)
            st.landmarks[l] = p1[0].landmarks[l] * a + p2[0].landmarks[l] * (1 - a);

    SuffixMatrix y1 = m.predict(p1);
    SuffixMatrix y2 = m.predict(p2);
    SuffixMatrix ym = m.predict(mix);
    for (std::size_t t = 0; t < ym.size(); ++t)
        for (std::size_t d = 0; d < ym[t].size(); ++d)
            CHECK(ym[t][d] == doctest::Approx(a * y1[t][d] + (1 - a) * y2[t][d]).epsilon(1e-9));
}

TEST_CASE("errors: too little data, shape mismatch, zero-weight prediction") {
    auto tiny = behavioural_dataset(5, 17, 1);
    CHECK_THROWS_AS(train_predictor(tiny, 9, 8, 1e-3), std::invalid_argument);

    auto data = behavioural_dataset(50, 17, 2);
    PredictorModel m = train_predictor(data, 9, 8, 1e-3);
    std::vector<GlobalState> short_prefix(data[0].states.begin(), data[0].states.begin() + 5);
    CHECK_THROWS_AS(m.predict(short_prefix), std::invalid_argument);

    m.weights.setZero();
    std::vector<GlobalState> prefix(data[0].states.begin(), data[0].states.begin() + 9);
    SuffixMatrix y = m.predict(prefix);
    for (const auto& row : y)
        for (double v : row) CHECK(v == 0.0);
}
