#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pnml/core.hpp"
#include "pnml/parallel.hpp"
#include "pnml/pnml.hpp"

namespace pnml {

/// Ordered list of named hypothesis classes sharing one label space. The order
/// is part of the result: argmax ties resolve toward the lower index.
class ClassBank {
 public:
  template <ModelClass C>
  ClassBank& add(std::string name, C cls) {
    const LabelSpace labels = cls.label_space();
    if (labels_) detail::require(*labels_ == labels, "all classes in a bank must share labels");
    labels_ = labels;
    entries_.push_back({std::move(name), [cls = std::move(cls)](const Dataset& train, double x) {
                          return genie_scores(cls, train, x);
                        }});
    return *this;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const std::string& name(std::size_t i) const { return entries_.at(i).name; }
  const LabelSpace& label_space() const {
    detail::require(labels_.has_value(), "class bank is empty");
    return *labels_;
  }

  std::vector<LogProb> genie_scores_of(std::size_t i, const Dataset& train, double x) const {
    return entries_.at(i).scores(train, x);
  }

 private:
  struct Entry {
    std::string name;
    std::function<std::vector<LogProb>(const Dataset&, double)> scores;
  };
  std::vector<Entry> entries_;
  std::optional<LabelSpace> labels_;
};

struct TuReport {
  /// Max-combined assignment; its gamma is the overhead.
  Prediction prediction;
  std::vector<std::string> class_names;
  std::vector<Prediction> per_class;
  /// log sum_y max_i q_i(y|x), never above log(bank size).
  double overhead = 0.0;
  /// Regret bound per hypothesized label: Gamma of class j(y) plus overhead.
  std::vector<double> rbar;
  /// j(y): class whose genie gives label y the highest probability.
  std::vector<std::size_t> best_fit_class;
  /// k(y): class whose universal assignment gives y the highest probability.
  std::vector<std::size_t> best_universal_class;
  /// Realized regret log(p_{theta_j(y)}(y|x) / q(y|x)) per label.
  std::vector<double> regret;
  /// log sum_y q_{k(y)}(y|x).
  double tilde_regret = 0.0;
};

inline double tu_overhead_bound(std::size_t k) {
  detail::require(k >= 1, "bank must contain at least one class");
  return std::log(static_cast<double>(k));
}

inline TuReport tu_predict(const ClassBank& bank, const Dataset& train, double x) {
  const std::size_t classes = bank.size();
  detail::require(classes >= 1, "class bank is empty");
  detail::require(train.label_space() == bank.label_space(),
                  "dataset label space does not match the bank");
  const std::size_t k = bank.label_space().size();

  std::vector<std::vector<LogProb>> scores(classes);
  detail::parallel_for(classes, [&](std::size_t i) { scores[i] = bank.genie_scores_of(i, train, x); });

  TuReport r;
  r.per_class.reserve(classes);
  for (std::size_t i = 0; i < classes; ++i) {
    r.class_names.push_back(bank.name(i));
    r.per_class.push_back(normalize_log_scores(scores[i]));
  }

  std::vector<double> best_q(k, 0.0);
  r.best_fit_class.assign(k, 0);
  r.best_universal_class.assign(k, 0);
  for (Label y = 0; y < k; ++y) {
    best_q[y] = r.per_class[0].probs[y];
    for (std::size_t i = 1; i < classes; ++i) {
      if (r.per_class[i].probs[y] > best_q[y]) {
        best_q[y] = r.per_class[i].probs[y];
        r.best_universal_class[y] = i;
      }
      if (scores[i][y] > scores[r.best_fit_class[y]][y]) r.best_fit_class[y] = i;
    }
  }

  double mass = 0.0;
  for (double q : best_q) mass += q;
  r.overhead = std::log(mass);
  r.prediction.probs.resize(k);
  for (Label y = 0; y < k; ++y) r.prediction.probs[y] = best_q[y] / mass;
  r.prediction.gamma = r.overhead;

  double tilde_mass = 0.0;
  for (Label y = 0; y < k; ++y) tilde_mass += r.per_class[r.best_universal_class[y]].probs[y];
  r.tilde_regret = std::log(tilde_mass);

  r.rbar.resize(k);
  r.regret.resize(k);
  for (Label y = 0; y < k; ++y) {
    const std::size_t j = r.best_fit_class[y];
    r.rbar[y] = r.per_class[j].gamma + r.overhead;
    r.regret[y] = scores[j][y].is_zero()
                      ? -kInf
                      : scores[j][y].value() - std::log(r.prediction.probs[y]);
  }
  return r;
}

}  // namespace pnml
