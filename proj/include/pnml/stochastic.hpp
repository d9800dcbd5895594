#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pnml/core.hpp"
#include "pnml/models.hpp"
#include "pnml/parallel.hpp"
#include "pnml/sequence.hpp"

namespace pnml {

/// Discrete memoryless channel: row m is the output distribution for input m.
class Channel {
 public:
  explicit Channel(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
    detail::require(!rows_.empty(), "channel needs at least one input");
    const std::size_t outputs = rows_.front().size();
    detail::require(outputs >= 1, "channel needs at least one output");
    for (const auto& row : rows_) {
      detail::require(row.size() == outputs, "channel rows must have equal length");
      double sum = 0.0;
      for (double p : row) {
        detail::require(p >= 0.0, "channel entries must be nonnegative");
        sum += p;
      }
      detail::require(std::abs(sum - 1.0) <= 1e-12, "channel rows must sum to one");
    }
  }

  static Channel binary_symmetric(double crossover) {
    detail::require(crossover >= 0.0 && crossover <= 1.0, "crossover must lie in [0, 1]");
    return Channel({{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}});
  }

  static Channel identity(std::size_t size) {
    detail::require(size >= 1, "identity channel needs at least one symbol");
    std::vector<std::vector<double>> rows(size, std::vector<double>(size, 0.0));
    for (std::size_t i = 0; i < size; ++i) rows[i][i] = 1.0;
    return Channel(std::move(rows));
  }

  /// Every input produces the same uniform output.
  static Channel uniform(std::size_t inputs, std::size_t outputs) {
    detail::require(inputs >= 1 && outputs >= 1, "channel dimensions must be positive");
    return Channel(std::vector<std::vector<double>>(
        inputs, std::vector<double>(outputs, 1.0 / static_cast<double>(outputs))));
  }

  std::size_t inputs() const noexcept { return rows_.size(); }
  std::size_t outputs() const noexcept { return rows_.front().size(); }
  std::span<const double> row(std::size_t m) const { return rows_.at(m); }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::vector<double>> rows_;
};

struct CapacityResult {
  /// Lower capacity bound at exit, in nats.
  double capacity_nats = 0.0;
  std::vector<double> prior;
  std::size_t iterations = 0;
  /// Upper minus lower bound at exit.
  double gap = 0.0;
  /// Lower bound after each iteration.
  std::vector<double> lower_history;
};

class NotConvergedError : public Error {
 public:
  explicit NotConvergedError(CapacityResult result)
      : Error(ErrorCode::NotConverged,
              "capacity iteration stopped with gap " + std::to_string(result.gap)),
        result_(std::move(result)) {}

  const CapacityResult& result() const noexcept { return result_; }

 private:
  CapacityResult result_;
};

/// Blahut-Arimoto alternating maximization. Each iteration evaluates
/// D_m = KL(row_m || q) at the current prior and brackets the capacity between
/// log sum_m w_m exp(D_m) and max_m D_m; the prior is then reweighted by
/// exp(D_m). Throws NotConvergedError (carrying the last iterate) when the
/// bracket is still wider than `tol` after `max_iter` iterations.
inline CapacityResult ba_capacity(const Channel& ch, double tol, std::size_t max_iter) {
  detail::require(tol > 0.0, "tolerance must be positive");
  detail::require(max_iter >= 1, "need at least one iteration");
  const std::size_t m = ch.inputs();
  const std::size_t n = ch.outputs();

  CapacityResult r;
  r.prior.assign(m, 1.0 / static_cast<double>(m));
  std::vector<double> q(n), d(m), log_terms(m);
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto row = ch.row(i);
      for (std::size_t j = 0; j < n; ++j) q[j] += r.prior[i] * row[j];
    }
    double upper = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto row = ch.row(i);
      double kl = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (row[j] > 0.0) kl += row[j] * std::log(row[j] / q[j]);
      d[i] = std::max(kl, 0.0);
      upper = std::max(upper, d[i]);
      log_terms[i] = r.prior[i] > 0.0 ? std::log(r.prior[i]) + d[i] : -kInf;
    }
    const double log_mass = log_sum_exp(log_terms);
    const double lower = std::max(log_mass, 0.0);
    r.lower_history.push_back(lower);
    r.capacity_nats = lower;
    r.gap = std::max(upper - lower, 0.0);
    r.iterations = iter;
    if (r.gap <= tol) return r;
    for (std::size_t i = 0; i < m; ++i) r.prior[i] = std::exp(log_terms[i] - log_mass);
  }
  throw NotConvergedError(std::move(r));
}

namespace detail {
template <ModelClass C>
double sequence_loglik(const C& cls, const typename C::theta_type& theta, const Dataset& data) {
  double total = 0.0;
  for (const auto& s : data.samples()) {
    const double lp = cls.cond_logprob(theta, s.x, s.y).value();
    if (lp == -kInf) return -kInf;
    total += lp;
  }
  return total;
}
}  // namespace detail

/// Row m lists p_{theta_m}(y^n | x^n) over every label sequence y^n, in the
/// same sequence order as SequenceNml.
template <ModelClass C>
Channel build_learning_channel(const C& cls, std::span<const typename C::theta_type> grid,
                               std::span<const double> features) {
  detail::require(!grid.empty(), "parameter grid is empty");
  const std::size_t k = cls.label_space().size();
  const std::size_t n = features.size();
  const std::size_t count = detail::require_enumerable(k, n);

  std::vector<std::vector<double>> rows(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t m) {
    std::vector<double> lp(n * k);
    for (std::size_t t = 0; t < n; ++t)
      for (Label y = 0; y < k; ++y) lp[t * k + y] = cls.cond_logprob(grid[m], features[t], y).value();
    std::vector<Label> ys(n);
    auto& row = rows[m];
    row.resize(count);
    for (std::size_t code = 0; code < count; ++code) {
      detail::decode_sequence(code, k, ys);
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += lp[t * k + ys[t]];
      row[code] = std::exp(s);
    }
  });
  return Channel(std::move(rows));
}

/// Equispaced Bernoulli parameters over [0, 1].
inline std::vector<BernoulliTheta> bernoulli_grid(std::size_t points) {
  detail::require(points >= 2, "grid needs at least two points");
  std::vector<BernoulliTheta> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i].p = static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

/// Posterior-weighted mixture over a parameter grid. gamma is 0: a Bayes
/// mixture carries no pointwise regret value.
template <ModelClass C>
Prediction bayes_mixture_predict(const C& cls, std::span<const typename C::theta_type> grid,
                                 std::span<const double> prior, const Dataset& train, double x) {
  detail::require(!grid.empty(), "parameter grid is empty");
  detail::require(prior.size() == grid.size(), "prior and grid sizes differ");
  double prior_sum = 0.0;
  for (double w : prior) {
    detail::require(w >= 0.0, "prior weights must be nonnegative");
    prior_sum += w;
  }
  detail::require(std::abs(prior_sum - 1.0) <= 1e-9, "prior must sum to one");

  std::vector<double> log_post(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m)
    log_post[m] = prior[m] > 0.0 ? std::log(prior[m]) + detail::sequence_loglik(cls, grid[m], train)
                                 : -kInf;
  const double evidence = log_sum_exp(log_post);
  if (evidence == -kInf)
    detail::fail(ErrorCode::ZeroEvidence, "every grid point gives the training zero probability");

  const std::size_t k = cls.label_space().size();
  Prediction out;
  out.probs.assign(k, 0.0);
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double post = std::exp(log_post[m] - evidence);
    if (post == 0.0) continue;
    for (Label y = 0; y < k; ++y) out.probs[y] += post * cls.cond_logprob(grid[m], x, y).prob();
  }
  return out;
}

/// Grid points whose training likelihood is at least c, in grid order.
template <ModelClass C>
std::vector<typename C::theta_type> refined_subclass(const C& cls,
                                                     std::span<const typename C::theta_type> grid,
                                                     const Dataset& train, double c) {
  detail::require(c >= 0.0 && c <= 1.0, "likelihood floor must lie in [0, 1]");
  const double log_floor = std::log(c);
  std::vector<typename C::theta_type> kept;
  for (const auto& theta : grid)
    if (detail::sequence_loglik(cls, theta, train) >= log_floor) kept.push_back(theta);
  if (kept.empty())
    detail::fail(ErrorCode::EmptySubclass, "no grid point reaches the likelihood floor");
  return kept;
}

/// Capacity-achieving mixture of p_theta(.|x) over the refined subclass. gamma
/// carries the capacity of that single-label channel.
template <ModelClass C>
Prediction refined_capacity_mixture(const C& cls, std::span<const typename C::theta_type> grid,
                                    const Dataset& train, double c, double x, double tol,
                                    std::size_t max_iter = 1'000'000) {
  const auto sub = refined_subclass(cls, grid, train, c);
  const std::size_t k = cls.label_space().size();
  std::vector<std::vector<double>> rows(sub.size(), std::vector<double>(k));
  for (std::size_t m = 0; m < sub.size(); ++m)
    for (Label y = 0; y < k; ++y) rows[m][y] = cls.cond_logprob(sub[m], x, y).prob();
  const Channel ch(std::move(rows));
  const CapacityResult cap = ba_capacity(ch, tol, max_iter);

  Prediction out;
  out.probs.assign(k, 0.0);
  for (std::size_t m = 0; m < sub.size(); ++m)
    for (Label y = 0; y < k; ++y) out.probs[y] += cap.prior[m] * ch.row(m)[y];
  out.gamma = cap.capacity_nats;
  return out;
}

}  // namespace pnml
