#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pnml/core.hpp"
#include "pnml/parallel.hpp"
#include "pnml/pnml.hpp"

namespace pnml {

inline constexpr std::size_t kMaxEnumeratedSequences = std::size_t{1} << 20;

namespace detail {

// K^n, or 0 when it exceeds the enumeration guard.
inline std::size_t guarded_sequence_count(std::size_t k, std::size_t n) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (count > kMaxEnumeratedSequences / k) return 0;
    count *= k;
  }
  return count <= kMaxEnumeratedSequences ? count : 0;
}

inline std::size_t require_enumerable(std::size_t k, std::size_t n) {
  const std::size_t count = guarded_sequence_count(k, n);
  if (count == 0)
    fail(ErrorCode::TooLarge, std::to_string(k) + "^" + std::to_string(n) +
                                  " label sequences exceed the enumeration limit of 2^20");
  return count;
}

inline void require_distinct(std::span<const double> features) {
  std::vector<double> sorted(features.begin(), features.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorCode::DuplicateFeatures, "features must be pairwise distinct for this class");
}

// Label sequence for `code`, first label most significant.
inline void decode_sequence(std::size_t code, std::size_t k, std::span<Label> out) {
  for (std::size_t t = out.size(); t-- > 0;) {
    out[t] = code % k;
    code /= k;
  }
}

}  // namespace detail

/// Normalized maximum likelihood over every label sequence for a fixed
/// feature sequence. seq_logprob is indexed by the sequence code with the first
/// label as the most significant base-K digit.
struct SequenceNml {
  LabelSpace labels;
  std::vector<double> features;
  double log_normalizer = 0.0;
  std::vector<double> seq_logprob;

  std::size_t length() const noexcept { return features.size(); }

  std::size_t code_of(std::span<const Label> sequence) const {
    detail::require(sequence.size() == features.size(), "sequence length mismatch");
    std::size_t code = 0;
    for (Label y : sequence) {
      detail::require(y < labels.size(), "label out of range");
      code = code * labels.size() + y;
    }
    return code;
  }

  LogProb logprob(std::span<const Label> sequence) const {
    return LogProb(std::min(0.0, seq_logprob[code_of(sequence)]));
  }
};

template <ModelClass C>
SequenceNml nml_full(const C& cls, std::span<const double> features) {
  const LabelSpace labels = cls.label_space();
  const std::size_t k = labels.size();
  const std::size_t n = features.size();
  detail::require(n >= 1, "need at least one feature");
  const std::size_t count = detail::require_enumerable(k, n);
  if constexpr (requires_distinct_features<C>()) detail::require_distinct(features);

  std::vector<double> ml(count);
  detail::parallel_for(count, [&](std::size_t code) {
    std::vector<Label> ys(n);
    detail::decode_sequence(code, k, ys);
    std::vector<WeightedSample> entries(n);
    for (std::size_t t = 0; t < n; ++t) entries[t] = {Sample{features[t], ys[t]}, 1.0};
    ml[code] = cls.weighted_ml_fit(WeightedDataset(labels, std::move(entries)))
                   .achieved_loglik.value();
  });

  SequenceNml out{labels, std::vector<double>(features.begin(), features.end()), 0.0, {}};
  out.log_normalizer = log_sum_exp(ml);
  out.seq_logprob.resize(count);
  for (std::size_t c = 0; c < count; ++c) out.seq_logprob[c] = ml[c] - out.log_normalizer;
  return out;
}

/// Conditional NML probability of the next label given a label prefix, from
/// the marginals of the full-sequence assignment.
inline std::vector<double> nml_sequential_predict(const SequenceNml& seq,
                                                  std::span<const Label> prefix) {
  const std::size_t k = seq.labels.size();
  const std::size_t n = seq.length();
  detail::require(prefix.size() < n, "prefix must be shorter than the sequence");

  std::size_t block_start = 0;
  for (Label y : prefix) {
    detail::require(y < k, "label out of range");
    block_start = block_start * k + y;
  }
  std::size_t sub_size = 1;
  for (std::size_t t = prefix.size() + 1; t < n; ++t) sub_size *= k;
  const std::size_t block_size = sub_size * k;
  block_start *= block_size;

  const std::span<const double> block(seq.seq_logprob.data() + block_start, block_size);
  const double prefix_mass = log_sum_exp(block);
  if (prefix_mass == -kInf)
    detail::fail(ErrorCode::ZeroPrefixMass, "prefix has zero NML probability");

  std::vector<double> q(k);
  for (std::size_t a = 0; a < k; ++a)
    q[a] = std::exp(log_sum_exp(block.subspan(a * sub_size, sub_size)) - prefix_mass);
  return q;
}

/// Upper bound on the leave-one-out minimax regret given by the sequential
/// NML assignment: log of the Shtarkov sum divided by the sequence length.
template <ModelClass C>
double nml_loo_bound(const C& cls, const Dataset& data) {
  std::vector<double> features;
  features.reserve(data.size());
  for (const auto& s : data.samples()) features.push_back(s.x);
  return nml_full(cls, features).log_normalizer / static_cast<double>(data.size());
}

/// Per-point pNML regrets with each point in turn held out as the test.
template <ModelClass C>
std::vector<double> pnml_loo_terms(const C& cls, const Dataset& data) {
  detail::require(data.size() >= 2, "leave-one-out needs at least two samples");
  std::vector<double> terms(data.size());
  for (std::size_t t = 0; t < data.size(); ++t)
    terms[t] = pnml_predict(cls, data.without(t), data[t].x).gamma;
  return terms;
}

template <ModelClass C>
double pnml_loo_regret(const C& cls, const Dataset& data) {
  const auto terms = pnml_loo_terms(cls, data);
  double sum = 0.0;
  for (double v : terms) sum += v;
  return sum / static_cast<double>(terms.size());
}

}  // namespace pnml
