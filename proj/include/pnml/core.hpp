#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pnml {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorCode {
  InvalidArgument,
  AllZeroScores,
  EmptyData,
  KTooLarge,
  TooLarge,
  DuplicateFeatures,
  ZeroPrefixMass,
  NotConverged,
  ZeroEvidence,
  EmptySubclass,
  MalformedRow,
  NonBinaryLabel,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AllZeroScores: return "AllZeroScores";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::DuplicateFeatures: return "DuplicateFeatures";
    case ErrorCode::ZeroPrefixMass: return "ZeroPrefixMass";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ZeroEvidence: return "ZeroEvidence";
    case ErrorCode::EmptySubclass: return "EmptySubclass";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonBinaryLabel: return "NonBinaryLabel";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {
[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}
inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}
}  // namespace detail

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Labels and samples
// ---------------------------------------------------------------------------

using Label = std::size_t;

/// Ordered finite label set. Labels are addressed by index; names are only
/// used for I/O.
class LabelSpace {
 public:
  explicit LabelSpace(std::vector<std::string> names) : names_(std::move(names)) {
    detail::require(names_.size() >= 2, "label space needs at least two labels");
    for (std::size_t i = 0; i < names_.size(); ++i)
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        detail::require(names_[i] != names_[j], "duplicate label '" + names_[i] + "'");
  }

  static LabelSpace binary() { return LabelSpace({"0", "1"}); }

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(Label y) const { return names_.at(y); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool operator==(const LabelSpace&) const = default;

 private:
  std::vector<std::string> names_;
};

struct Sample {
  double x = 0.0;
  Label y = 0;

  bool operator==(const Sample&) const = default;
};

/// Ordered training/test data sharing one label space.
class Dataset {
 public:
  explicit Dataset(LabelSpace labels, std::vector<Sample> samples = {})
      : labels_(std::move(labels)), samples_(std::move(samples)) {
    for (const auto& s : samples_) check(s);
  }

  const LabelSpace& label_space() const noexcept { return labels_; }
  std::span<const Sample> samples() const noexcept { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_.at(i); }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  /// Copy with `s` appended.
  Dataset with(Sample s) const {
    Dataset out = *this;
    out.push_back(s);
    return out;
  }

  /// Copy with sample `index` removed.
  Dataset without(std::size_t index) const {
    detail::require(index < samples_.size(), "sample index out of range");
    Dataset out = *this;
    out.samples_.erase(out.samples_.begin() + static_cast<std::ptrdiff_t>(index));
    return out;
  }

  void push_back(Sample s) {
    check(s);
    samples_.push_back(s);
  }

  bool operator==(const Dataset&) const = default;

 private:
  void check(const Sample& s) const {
    detail::require(std::isfinite(s.x), "sample feature must be finite");
    detail::require(s.y < labels_.size(), "sample label out of range");
  }

  LabelSpace labels_;
  std::vector<Sample> samples_;
};

struct WeightedSample {
  Sample sample;
  double weight = 1.0;
};

/// Samples with nonnegative weights, at least one of them positive.
class WeightedDataset {
 public:
  WeightedDataset(LabelSpace labels, std::vector<WeightedSample> entries)
      : labels_(std::move(labels)), entries_(std::move(entries)) {
    double total = 0.0;
    for (const auto& e : entries_) {
      detail::require(std::isfinite(e.sample.x), "sample feature must be finite");
      detail::require(e.sample.y < labels_.size(), "sample label out of range");
      detail::require(std::isfinite(e.weight) && e.weight >= 0.0,
                      "weights must be finite and nonnegative");
      total += e.weight;
    }
    if (!(total > 0.0)) detail::fail(ErrorCode::EmptyData, "no sample carries positive weight");
    total_ = total;
  }

  static WeightedDataset unit(const Dataset& data) {
    std::vector<WeightedSample> entries;
    entries.reserve(data.size());
    for (const auto& s : data.samples()) entries.push_back({s, 1.0});
    return WeightedDataset(data.label_space(), std::move(entries));
  }

  const LabelSpace& label_space() const noexcept { return labels_; }
  std::span<const WeightedSample> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  double total_weight() const noexcept { return total_; }

 private:
  LabelSpace labels_;
  std::vector<WeightedSample> entries_;
  double total_ = 0.0;
};

// ---------------------------------------------------------------------------
// Log-domain probabilities
// ---------------------------------------------------------------------------

/// Log of a probability (or of a product of probabilities). -inf is the exact
/// representation of probability zero.
class LogProb {
 public:
  constexpr LogProb() = default;
  explicit LogProb(double value) : value_(value) {
    detail::require(!std::isnan(value) && value <= 0.0, "log-probability must lie in [-inf, 0]");
  }

  static LogProb zero() { return LogProb(-kInf); }
  static LogProb one() { return LogProb(0.0); }
  static LogProb of(double p) {
    detail::require(p >= 0.0 && p <= 1.0, "probability must lie in [0, 1]");
    return LogProb(std::log(p));
  }

  double value() const noexcept { return value_; }
  double prob() const noexcept { return std::exp(value_); }
  bool is_zero() const noexcept { return value_ == -kInf; }

  auto operator<=>(const LogProb&) const = default;

 private:
  double value_ = 0.0;
};

/// log(sum_i exp(v_i)); -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> values) {
  double m = -kInf;
  for (double v : values) m = std::max(m, v);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

/// A probability vector over the label space together with its log-normalizer
/// (the learnability measure, in nats).
struct Prediction {
  std::vector<double> probs;
  double gamma = 0.0;
};

/// Turns unnormalized label scores into a distribution. `gamma` is the log of
/// the pre-normalization mass.
inline Prediction normalize_log_scores(std::span<const LogProb> scores) {
  detail::require(scores.size() >= 2, "need a score for at least two labels");
  std::vector<double> raw(scores.size());
  std::transform(scores.begin(), scores.end(), raw.begin(),
                 [](LogProb s) { return s.value(); });
  const double m = *std::max_element(raw.begin(), raw.end());
  if (m == -kInf) detail::fail(ErrorCode::AllZeroScores, "every label has zero score");

  Prediction out;
  out.probs.resize(raw.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.probs[i] = std::exp(raw[i] - m);
    mass += out.probs[i];
  }
  for (double& p : out.probs) p /= mass;
  out.gamma = m + std::log(mass);
  return out;
}

// ---------------------------------------------------------------------------
// Model classes
// ---------------------------------------------------------------------------

template <class Theta>
struct FitResult {
  Theta theta;
  LogProb achieved_loglik;
};

/// A conditional family p_theta(y|x) over a finite label space whose weighted
/// maximum-likelihood fit is computed exactly (global maximizer,
/// deterministic tie-break).
template <class C>
concept ModelClass = requires(const C& cls, const typename C::theta_type& theta,
                              const WeightedDataset& data, double x, Label y) {
  { cls.label_space() } -> std::convertible_to<LabelSpace>;
  { cls.loglik(theta, data) } -> std::same_as<LogProb>;
  { cls.weighted_ml_fit(data) } -> std::same_as<FitResult<typename C::theta_type>>;
  { cls.cond_logprob(theta, x, y) } -> std::same_as<LogProb>;
};

/// Classes that can only score sequences with pairwise distinct features set
/// `static constexpr bool requires_distinct_features = true`.
template <class C>
constexpr bool requires_distinct_features() {
  if constexpr (requires { C::requires_distinct_features; })
    return C::requires_distinct_features;
  else
    return false;
}

}  // namespace pnml
