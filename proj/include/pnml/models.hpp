#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pnml/core.hpp"

namespace pnml {

namespace detail {

inline void require_binary(const LabelSpace& labels) {
  require(labels.size() == 2, "class requires a binary label space");
}

inline LogProb bernoulli_logprob(double p1, Label y) {
  return LogProb(y == 1 ? std::log(p1) : std::log1p(-p1));
}

inline void require_unit_interval(double p) {
  require(p >= 0.0 && p <= 1.0, "probability parameter must lie in [0, 1]");
}

// Zero-weight entries are skipped so that 0 * log 0 never appears.
template <class CondLogProb>
LogProb weighted_loglik(const WeightedDataset& data, CondLogProb&& cond) {
  double total = 0.0;
  for (const auto& e : data.entries()) {
    if (e.weight == 0.0) continue;
    const double lp = cond(e.sample.x, e.sample.y).value();
    if (lp == -kInf) return LogProb::zero();
    total += e.weight * lp;
  }
  return LogProb(std::min(total, 0.0));
}

/// Per-feature label weights, sorted by feature, positive-weight samples only.
struct FeatureGroup {
  double x = 0.0;
  double w0 = 0.0;
  double w1 = 0.0;
};

inline std::vector<FeatureGroup> group_by_feature(const WeightedDataset& data) {
  std::vector<FeatureGroup> groups;
  groups.reserve(data.size());
  for (const auto& e : data.entries()) {
    if (e.weight == 0.0) continue;
    FeatureGroup g{e.sample.x, 0.0, 0.0};
    (e.sample.y == 1 ? g.w1 : g.w0) = e.weight;
    groups.push_back(g);
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const FeatureGroup& a, const FeatureGroup& b) { return a.x < b.x; });
  std::vector<FeatureGroup> merged;
  for (const auto& g : groups) {
    if (!merged.empty() && merged.back().x == g.x) {
      merged.back().w0 += g.w0;
      merged.back().w1 += g.w1;
    } else {
      merged.push_back(g);
    }
  }
  return merged;
}

/// Threshold value for cut position `i` over sorted distinct features: every
/// group before `i` satisfies x <= b, every group from `i` on has x > b.
inline double cut_value(const std::vector<FeatureGroup>& groups, std::size_t i) {
  if (i == 0) return -kInf;
  if (i == groups.size()) return kInf;
  const double lo = groups[i - 1].x;
  const double hi = groups[i].x;
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

// Fraction of label-1 weight; an empty side is unconstrained and reported as 0.5.
inline double side_fraction(double w0, double w1) {
  const double w = w0 + w1;
  return w > 0.0 ? w1 / w : 0.5;
}

inline double side_loglik(double w0, double w1) {
  const double w = w0 + w1;
  double ll = 0.0;
  if (w1 > 0.0) ll += w1 * std::log(w1 / w);
  if (w0 > 0.0) ll += w0 * std::log(w0 / w);
  return ll;
}

inline bool strictly_better(double candidate, double best) {
  if (best == -kInf) return candidate > best;
  return candidate > best + 1e-12 * (1.0 + std::abs(best));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bernoulli: label-1 probability p, features ignored.
// ---------------------------------------------------------------------------

struct BernoulliTheta {
  double p = 0.5;

  bool operator==(const BernoulliTheta&) const = default;
};

class BernoulliClass {
 public:
  using theta_type = BernoulliTheta;

  LabelSpace label_space() const { return LabelSpace::binary(); }

  LogProb cond_logprob(const BernoulliTheta& theta, double /*x*/, Label y) const {
    detail::require_unit_interval(theta.p);
    return detail::bernoulli_logprob(theta.p, y);
  }

  LogProb loglik(const BernoulliTheta& theta, const WeightedDataset& data) const {
    detail::require_binary(data.label_space());
    return detail::weighted_loglik(
        data, [&](double x, Label y) { return cond_logprob(theta, x, y); });
  }

  FitResult<BernoulliTheta> weighted_ml_fit(const WeightedDataset& data) const {
    detail::require_binary(data.label_space());
    double ones = 0.0;
    for (const auto& e : data.entries())
      if (e.sample.y == 1) ones += e.weight;
    BernoulliTheta theta{ones / data.total_weight()};
    return {theta, loglik(theta, data)};
  }
};

// ---------------------------------------------------------------------------
// Segment class: k interior thresholds, k+1 Bernoulli segments. Segment s
// covers (b_{s-1}, b_s].
// ---------------------------------------------------------------------------

struct SegmentTheta {
  std::vector<double> boundaries;
  std::vector<double> segment_probs;

  std::size_t segment_of(double x) const {
    return static_cast<std::size_t>(
        std::lower_bound(boundaries.begin(), boundaries.end(), x) - boundaries.begin());
  }

  bool operator==(const SegmentTheta&) const = default;
};

inline constexpr std::size_t kMaxSegmentThresholds = 3;

namespace detail {

// Exhaustive search over strictly increasing cut tuples, lexicographic order,
// first maximizer wins.
inline SegmentTheta best_segmentation(const WeightedDataset& data, std::size_t k) {
  const auto groups = group_by_feature(data);
  const std::size_t d = groups.size();

  // Cut positions 0..d. When there are fewer positions than thresholds, extra
  // positions equivalent to "everything left" are appended; their values sit
  // just above the largest feature so boundaries stay strictly increasing.
  std::vector<std::size_t> positions;
  std::vector<double> values;
  for (std::size_t i = 0; i < d; ++i) {
    positions.push_back(i);
    values.push_back(cut_value(groups, i));
  }
  double pad = groups.back().x;
  for (std::size_t extra = 0; d + 1 + extra < k; ++extra) {
    pad = std::nextafter(pad, kInf);
    positions.push_back(d);
    values.push_back(pad);
  }
  positions.push_back(d);
  values.push_back(kInf);

  std::vector<double> pre0(d + 1, 0.0), pre1(d + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    pre0[i + 1] = pre0[i] + groups[i].w0;
    pre1[i + 1] = pre1[i] + groups[i].w1;
  }
  // Right-side sums accumulated from the right keep each side's arithmetic
  // independent of the other for the single-cut case.
  std::vector<double> suf0(d + 1, 0.0), suf1(d + 1, 0.0);
  for (std::size_t i = d; i-- > 0;) {
    suf0[i] = suf0[i + 1] + groups[i].w0;
    suf1[i] = suf1[i + 1] + groups[i].w1;
  }
  auto seg_weights = [&](std::size_t from, std::size_t to) {
    if (from == 0) return std::pair{pre0[to], pre1[to]};
    if (to == d) return std::pair{suf0[from], suf1[from]};
    return std::pair{pre0[to] - pre0[from], pre1[to] - pre1[from]};
  };

  const std::size_t m = positions.size();
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;

  double best = -kInf;
  std::vector<std::size_t> best_pick = pick;
  for (;;) {
    double total = 0.0;
    std::size_t from = 0;
    for (std::size_t s = 0; s <= k; ++s) {
      const std::size_t to = s < k ? positions[pick[s]] : d;
      const auto [w0, w1] = seg_weights(from, to);
      total += side_loglik(w0, w1);
      from = to;
    }
    if (strictly_better(total, best)) {
      best = total;
      best_pick = pick;
    }
    // next combination
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }

  SegmentTheta theta;
  std::size_t from = 0;
  for (std::size_t s = 0; s <= k; ++s) {
    const std::size_t to = s < k ? positions[best_pick[s]] : d;
    const auto [w0, w1] = seg_weights(from, to);
    theta.segment_probs.push_back(side_fraction(w0, w1));
    if (s < k) theta.boundaries.push_back(values[best_pick[s]]);
    from = to;
  }
  return theta;
}

}  // namespace detail

class SegmentClass {
 public:
  using theta_type = SegmentTheta;
  static constexpr bool requires_distinct_features = true;

  explicit SegmentClass(std::size_t k) : k_(k) {
    if (k > kMaxSegmentThresholds)
      detail::fail(ErrorCode::KTooLarge, "segment class supports at most " +
                                             std::to_string(kMaxSegmentThresholds) +
                                             " thresholds, got " + std::to_string(k));
  }

  std::size_t thresholds() const noexcept { return k_; }

  LabelSpace label_space() const { return LabelSpace::binary(); }

  LogProb cond_logprob(const SegmentTheta& theta, double x, Label y) const {
    detail::require(theta.boundaries.size() == k_ && theta.segment_probs.size() == k_ + 1,
                    "segment parameter has the wrong shape");
    return detail::bernoulli_logprob(theta.segment_probs[theta.segment_of(x)], y);
  }

  LogProb loglik(const SegmentTheta& theta, const WeightedDataset& data) const {
    detail::require_binary(data.label_space());
    return detail::weighted_loglik(
        data, [&](double x, Label y) { return cond_logprob(theta, x, y); });
  }

  FitResult<SegmentTheta> weighted_ml_fit(const WeightedDataset& data) const {
    detail::require_binary(data.label_space());
    SegmentTheta theta = detail::best_segmentation(data, k_);
    return {theta, loglik(theta, data)};
  }

 private:
  std::size_t k_;
};

inline FitResult<SegmentTheta> segment_weighted_fit(const WeightedDataset& data, std::size_t k) {
  return SegmentClass(k).weighted_ml_fit(data);
}

// ---------------------------------------------------------------------------
// 1-d barrier threshold: P(y=1|x) = p1 if x <= b else p2.
// ---------------------------------------------------------------------------

struct ThresholdTheta {
  double b = 0.0;
  double p1 = 0.5;
  double p2 = 0.5;

  bool operator==(const ThresholdTheta&) const = default;
};

class ThresholdClass {
 public:
  using theta_type = ThresholdTheta;
  static constexpr bool requires_distinct_features = true;

  LabelSpace label_space() const { return LabelSpace::binary(); }

  LogProb cond_logprob(const ThresholdTheta& theta, double x, Label y) const {
    detail::require(!std::isnan(theta.b), "threshold must not be NaN");
    detail::require_unit_interval(theta.p1);
    detail::require_unit_interval(theta.p2);
    return detail::bernoulli_logprob(x <= theta.b ? theta.p1 : theta.p2, y);
  }

  LogProb loglik(const ThresholdTheta& theta, const WeightedDataset& data) const {
    detail::require_binary(data.label_space());
    return detail::weighted_loglik(
        data, [&](double x, Label y) { return cond_logprob(theta, x, y); });
  }

  FitResult<ThresholdTheta> weighted_ml_fit(const WeightedDataset& data) const {
    detail::require_binary(data.label_space());
    const SegmentTheta seg = detail::best_segmentation(data, 1);
    ThresholdTheta theta{seg.boundaries[0], seg.segment_probs[0], seg.segment_probs[1]};
    return {theta, loglik(theta, data)};
  }
};

inline FitResult<BernoulliTheta> bernoulli_weighted_fit(const WeightedDataset& data) {
  return BernoulliClass{}.weighted_ml_fit(data);
}
inline LogProb bernoulli_loglik(const BernoulliTheta& theta, const WeightedDataset& data) {
  return BernoulliClass{}.loglik(theta, data);
}
inline FitResult<ThresholdTheta> threshold_weighted_fit(const WeightedDataset& data) {
  return ThresholdClass{}.weighted_ml_fit(data);
}
inline LogProb threshold_loglik(const ThresholdTheta& theta, const WeightedDataset& data) {
  return ThresholdClass{}.loglik(theta, data);
}

static_assert(ModelClass<BernoulliClass>);
static_assert(ModelClass<ThresholdClass>);
static_assert(ModelClass<SegmentClass>);

}  // namespace pnml
