#pragma once

// Conformal core: nonconformity scoring, weighted calibration
// distributions with the infinity atom, quantiles and implicit
// max-DR regions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace macopp {

// A suffix trajectory flattened per step: steps x dim reals.
using SuffixMatrix = std::vector<std::vector<double>>;

struct CalibrationRecord {
    double score;
    double weight;
};

struct WeightedCalibrationSet {
    std::vector<CalibrationRecord> records;  // sorted by score ascending
    double sum_weights = 0.0;

    static WeightedCalibrationSet from_records(std::vector<CalibrationRecord> recs) {
        if (recs.empty()) throw std::invalid_argument("calibration set must be non-empty");
        for (const auto& r : recs) {
            if (!(r.weight > 0.0) || !std::isfinite(r.weight))
                throw std::invalid_argument("calibration weights must be positive and finite");
            if (!(r.score >= 0.0)) throw std::invalid_argument("scores must be non-negative");
        }
        std::sort(recs.begin(), recs.end(),
                  [](const CalibrationRecord& a, const CalibrationRecord& b) {
                      return a.score < b.score;
                  });
        WeightedCalibrationSet out;
        out.records = std::move(recs);
        out.sum_weights = 0.0;
        for (const auto& r : out.records) out.sum_weights += r.weight;
        return out;
    }

    std::size_t size() const { return records.size(); }
};

// The 1-alpha quantile of a calibration distribution; INFINITE when the
// quantile lands on the test point's infinity atom. Kept as a tagged
// value so that an unbounded region never leaks a float sentinel into
// arithmetic.
struct CriticalValue {
    bool infinite = false;
    double value = 0.0;  // meaningful only when !infinite

    static CriticalValue finite(double v) { return {false, v}; }
    static CriticalValue inf() { return {true, 0.0}; }

    bool admits(double score) const { return infinite || score <= value; }

    bool operator==(const CriticalValue& o) const {
        return infinite == o.infinite && (infinite || value == o.value);
    }
    // Ordering with INFINITE as the top element.
    bool operator<=(const CriticalValue& o) const {
        if (o.infinite) return true;
        if (infinite) return false;
        return value <= o.value;
    }
};

// Eq.-style max-over-time score: max_t gamma_t * || (pred_t - cand_t) / sigma ||_2.
inline double score(const SuffixMatrix& prediction, const SuffixMatrix& candidate,
                    const std::vector<double>& gammas, const std::vector<double>& sigma) {
    if (prediction.size() != candidate.size() || prediction.empty())
        throw std::invalid_argument("prediction/candidate step counts differ or are empty");
    if (gammas.size() != prediction.size())
        throw std::invalid_argument("one gamma per suffix step required");
    for (double g : gammas)
        if (!(g > 0.0)) throw std::invalid_argument("gammas must be positive");
    for (double s : sigma)
        if (!(s > 0.0)) throw std::invalid_argument("sigma must be strictly positive");

    double best = 0.0;
    for (std::size_t t = 0; t < prediction.size(); ++t) {
        const auto& p = prediction[t];
        const auto& c = candidate[t];
        if (p.size() != c.size() || p.size() != sigma.size())
            throw std::invalid_argument("per-step dimension mismatch");
        double sq = 0.0;
        for (std::size_t d = 0; d < p.size(); ++d) {
            double r = (p[d] - c[d]) / sigma[d];
            sq += r * r;
        }
        best = std::max(best, gammas[t] * std::sqrt(sq));
    }
    return best;
}

// Smallest calibration score whose cumulative reweighted mass reaches
// 1-alpha, with the test point holding mass test_weight/(W+test_weight)
// at +infinity. Ties on equal scores accumulate jointly. Comparisons are
// done un-normalised (cum >= (1-alpha) * total) so equal-weight inputs
// reduce exactly to the rank rule.
inline CriticalValue weighted_quantile(const WeightedCalibrationSet& calib, double test_weight,
                                       double alpha) {
    if (calib.records.empty()) throw std::invalid_argument("calibration set must be non-empty");
    if (!(test_weight > 0.0) || !std::isfinite(test_weight))
        throw std::invalid_argument("test_weight must be positive and finite");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");

    const double need = (1.0 - alpha) * (calib.sum_weights + test_weight);
    double cum = 0.0;
    std::size_t i = 0;
    while (i < calib.records.size()) {
        double s = calib.records[i].score;
        while (i < calib.records.size() && calib.records[i].score == s) {
            cum += calib.records[i].weight;
            ++i;
        }
        if (cum >= need) return CriticalValue::finite(s);
    }
    return CriticalValue::inf();
}

// Standard split-CP quantile: the ceil((1-alpha)(n+1))-th smallest score,
// INFINITE when that rank exceeds n. Requires equal weights.
inline CriticalValue standard_quantile(const WeightedCalibrationSet& calib, double alpha) {
    if (calib.records.empty()) throw std::invalid_argument("calibration set must be non-empty");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
    const double w0 = calib.records.front().weight;
    for (const auto& r : calib.records)
        if (r.weight != w0)
            throw std::invalid_argument("standard_quantile requires equal weights");

    const std::size_t n = calib.records.size();
    // Smallest k with k >= (1-alpha)(n+1); same comparison form as the
    // weighted path with unit weights.
    const double need = (1.0 - alpha) * (static_cast<double>(n) + 1.0);
    for (std::size_t k = 1; k <= n; ++k)
        if (static_cast<double>(k) >= need)
            return CriticalValue::finite(calib.records[k - 1].score);
    return CriticalValue::inf();
}

// Implicit joint prediction region: membership of a candidate suffix is
// score(center, candidate) <= critical_value. The score ignores ego
// actions, so the same test serves both the augmented region and its
// state-space projection.
struct MaxDrRegion {
    SuffixMatrix center;
    CriticalValue critical_value;
    std::vector<double> gammas;
    std::vector<double> sigma;
    double alpha = 0.05;
    double w_top = 1.0;

    bool contains(const SuffixMatrix& candidate) const {
        if (critical_value.infinite) return true;
        return score(center, candidate, gammas, sigma) <= critical_value.value;
    }

    // Per-step radius of the region in normalised-residual space.
    double radius_at(std::size_t step) const {
        if (critical_value.infinite) return std::numeric_limits<double>::infinity();
        return critical_value.value / gammas.at(step);
    }
};

inline MaxDrRegion build_region(SuffixMatrix center, const WeightedCalibrationSet& calib,
                                double w_top, std::vector<double> gammas,
                                std::vector<double> sigma, double alpha) {
    if (!(w_top > 0.0)) throw std::invalid_argument("w_top must be positive");
    MaxDrRegion region;
    region.critical_value = weighted_quantile(calib, w_top, alpha);
    region.center = std::move(center);
    region.gammas = std::move(gammas);
    region.sigma = std::move(sigma);
    region.alpha = alpha;
    region.w_top = w_top;
    return region;
}

// State-space projection of an augmented region. Because the score is
// action-independent and the region fixes a single w_top, the projected
// membership test coincides with the augmented one applied to states.
struct ProjectedRegion {
    const MaxDrRegion* region;
    bool contains(const SuffixMatrix& state_suffix) const { return region->contains(state_suffix); }
};

inline ProjectedRegion project_region(const MaxDrRegion& region) { return {&region}; }

}  // namespace macopp
