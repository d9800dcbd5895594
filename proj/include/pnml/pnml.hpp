#pragma once

#include <cmath>
#include <concepts>
#include <vector>

#include "pnml/core.hpp"
#include "pnml/models.hpp"

namespace pnml {

namespace detail {
inline void require_same_labels(const LabelSpace& a, const LabelSpace& b) {
  require(a == b, "dataset label space does not match the model class");
}
}  // namespace detail

/// Joint ML fit of train plus (x, y), one entry per hypothesized test label.
template <ModelClass C>
struct GenieFit {
  std::vector<FitResult<typename C::theta_type>> per_label;
};

template <ModelClass C>
GenieFit<C> genie_fit(const C& cls, const Dataset& train, double x) {
  const LabelSpace labels = cls.label_space();
  detail::require_same_labels(train.label_space(), labels);
  GenieFit<C> out;
  out.per_label.reserve(labels.size());
  for (Label y = 0; y < labels.size(); ++y)
    out.per_label.push_back(cls.weighted_ml_fit(WeightedDataset::unit(train.with({x, y}))));
  return out;
}

/// log p_{theta_hat(train, x, y)}(y | x) for every label y.
template <ModelClass C>
std::vector<LogProb> genie_scores(const C& cls, const Dataset& train, double x) {
  const auto genie = genie_fit(cls, train, x);
  std::vector<LogProb> scores;
  scores.reserve(genie.per_label.size());
  for (Label y = 0; y < genie.per_label.size(); ++y)
    scores.push_back(cls.cond_logprob(genie.per_label[y].theta, x, y));
  return scores;
}

/// The pNML assignment at x; gamma is the pointwise minimax regret.
template <ModelClass C>
Prediction pnml_predict(const C& cls, const Dataset& train, double x) {
  return normalize_log_scores(genie_scores(cls, train, x));
}

/// Regret of the pNML assignment against the genie that knows label y. Equal to
/// the prediction's gamma for every label the class can produce at x; -inf for
/// a label the class assigns probability zero under every fit.
template <ModelClass C>
double pnml_regret_at(const C& cls, const Dataset& train, double x, Label y) {
  const auto scores = genie_scores(cls, train, x);
  detail::require(y < scores.size(), "label out of range");
  const Prediction q = normalize_log_scores(scores);
  if (scores[y].is_zero()) return -kInf;
  return scores[y].value() - std::log(q.probs[y]);
}

// ---------------------------------------------------------------------------
// Generalized pNML: test log-likelihood plus lambda times training
// log-likelihood.
// ---------------------------------------------------------------------------

class Lambda {
 public:
  explicit Lambda(double value) : value_(value) {
    detail::require(!std::isnan(value) && value >= 0.0, "lambda must be nonnegative");
  }
  static Lambda infinity() { return Lambda(kInf); }

  double value() const noexcept { return value_; }
  bool is_infinite() const noexcept { return value_ == kInf; }

 private:
  double value_;
};

/// lambda = +inf is the training-only fit (the class's own tie-break decides
/// among several training maximizers); lambda = 0 fits the test point alone.
template <ModelClass C>
FitResult<typename C::theta_type> glambda_fit(const C& cls, const Dataset& train, double x,
                                              Label y, Lambda lam) {
  detail::require_same_labels(train.label_space(), cls.label_space());
  if (lam.is_infinite()) {
    if (train.empty()) detail::fail(ErrorCode::EmptyData, "ERM limit needs training data");
    return cls.weighted_ml_fit(WeightedDataset::unit(train));
  }
  std::vector<WeightedSample> entries;
  entries.reserve(train.size() + 1);
  for (const auto& s : train.samples()) entries.push_back({s, lam.value()});
  entries.push_back({Sample{x, y}, 1.0});
  return cls.weighted_ml_fit(WeightedDataset(train.label_space(), std::move(entries)));
}

template <ModelClass C>
Prediction glambda_predict(const C& cls, const Dataset& train, double x, Lambda lam) {
  const std::size_t k = cls.label_space().size();
  std::vector<LogProb> scores;
  scores.reserve(k);
  if (lam.is_infinite()) {
    // Same fit for every label.
    const auto erm = glambda_fit(cls, train, x, 0, lam);
    for (Label y = 0; y < k; ++y) scores.push_back(cls.cond_logprob(erm.theta, x, y));
  } else {
    for (Label y = 0; y < k; ++y)
      scores.push_back(cls.cond_logprob(glambda_fit(cls, train, x, y, lam).theta, x, y));
  }
  return normalize_log_scores(scores);
}

// ---------------------------------------------------------------------------
// pALG: the pNML construction around an arbitrary deterministic training
// procedure.
// ---------------------------------------------------------------------------

template <class A, class C>
concept TrainingAlg = ModelClass<C> && requires(const A& alg, const Dataset& data) {
  { alg.fit(data) } -> std::same_as<FitResult<typename C::theta_type>>;
};

template <ModelClass C, TrainingAlg<C> A>
Prediction palg_predict(const A& alg, const C& cls, const Dataset& train, double x) {
  detail::require_same_labels(train.label_space(), cls.label_space());
  const std::size_t k = cls.label_space().size();
  std::vector<LogProb> scores;
  scores.reserve(k);
  for (Label y = 0; y < k; ++y)
    scores.push_back(cls.cond_logprob(alg.fit(train.with({x, y})).theta, x, y));
  return normalize_log_scores(scores);
}

/// Unit-weight maximum likelihood; pALG with this procedure is the pNML.
template <ModelClass C>
struct MaxLikelihood {
  C cls;

  FitResult<typename C::theta_type> fit(const Dataset& data) const {
    return cls.weighted_ml_fit(WeightedDataset::unit(data));
  }
};

/// Always returns the same parameter.
template <ModelClass C>
struct ConstantAlg {
  C cls;
  typename C::theta_type theta;

  FitResult<typename C::theta_type> fit(const Dataset& data) const {
    return {theta, cls.loglik(theta, WeightedDataset::unit(data))};
  }
};

/// Add-beta smoothed Bernoulli estimate (sum y + beta) / (n + 2 beta).
struct SmoothedBernoulli {
  double beta = 1.0;

  FitResult<BernoulliTheta> fit(const Dataset& data) const {
    detail::require(beta > 0.0 || !data.empty(), "smoothing needs beta > 0 or data");
    double ones = 0.0;
    for (const auto& s : data.samples()) ones += s.y == 1 ? 1.0 : 0.0;
    BernoulliTheta theta{(ones + beta) / (static_cast<double>(data.size()) + 2.0 * beta)};
    return {theta, BernoulliClass{}.loglik(theta, WeightedDataset::unit(data))};
  }
};

/// Maximum-likelihood threshold with add-beta smoothed side probabilities.
struct SmoothedThreshold {
  double beta = 1.0;

  FitResult<ThresholdTheta> fit(const Dataset& data) const {
    const ThresholdClass cls;
    const auto unit = WeightedDataset::unit(data);
    ThresholdTheta theta = cls.weighted_ml_fit(unit).theta;
    double n[2] = {0.0, 0.0}, ones[2] = {0.0, 0.0};
    for (const auto& s : data.samples()) {
      const int side = s.x <= theta.b ? 0 : 1;
      n[side] += 1.0;
      ones[side] += s.y == 1 ? 1.0 : 0.0;
    }
    auto smooth = [&](int side) {
      const double den = n[side] + 2.0 * beta;
      return den > 0.0 ? (ones[side] + beta) / den : 0.5;
    };
    theta.p1 = smooth(0);
    theta.p2 = smooth(1);
    return {theta, cls.loglik(theta, unit)};
  }
};

}  // namespace pnml
