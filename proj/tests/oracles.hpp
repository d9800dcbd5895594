#pragma once

// Brute-force reference computations used only by the tests. Nothing here
// calls into the library's fitting code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Point {
  double x;
  int y;
  double w = 1.0;
};

// sum of w * log p(y) for a side with label-1 probability p; 0 * log 0 = 0.
inline double side_loglik_at(const std::vector<Point>& pts, double p) {
  double ll = 0.0;
  for (const auto& q : pts) {
    if (q.w == 0.0) continue;
    const double pr = q.y == 1 ? p : 1.0 - p;
    if (pr <= 0.0) return -kInf;
    ll += q.w * std::log(pr);
  }
  return ll;
}

inline double exact_fraction(const std::vector<Point>& pts) {
  double w = 0.0, w1 = 0.0;
  for (const auto& q : pts) {
    w += q.w;
    if (q.y == 1) w1 += q.w;
  }
  return w > 0.0 ? w1 / w : 0.5;
}

// Maximized threshold-class log-likelihood: each data feature (and -inf) is
// tried as the threshold b with x <= b on the left; each side uses its exact
// label-1 fraction.
inline double threshold_max_loglik(const std::vector<Point>& pts) {
  std::vector<double> bs = {-kInf};
  for (const auto& p : pts) bs.push_back(p.x);
  double best = -kInf;
  for (double b : bs) {
    std::vector<Point> left, right;
    for (const auto& p : pts) (p.x <= b ? left : right).push_back(p);
    const double ll = side_loglik_at(left, exact_fraction(left)) +
                      side_loglik_at(right, exact_fraction(right));
    best = std::max(best, ll);
  }
  return best;
}

struct BinaryPrediction {
  double q0, q1, gamma;
};

// Same partition enumeration, but returns the probability of label y at x
// under the maximizing (b, p1, p2); ties resolve to the smallest b tried.
struct ThresholdFit {
  double b, p1, p2, ll;
};

inline ThresholdFit threshold_fit(const std::vector<Point>& pts) {
  std::vector<double> bs = {-kInf};
  for (const auto& p : pts)
    if (p.w > 0.0) bs.push_back(p.x);
  std::sort(bs.begin(), bs.end());
  ThresholdFit best{0, 0.5, 0.5, -kInf};
  for (double b : bs) {
    std::vector<Point> left, right;
    for (const auto& p : pts) (p.x <= b ? left : right).push_back(p);
    const double p1 = exact_fraction(left), p2 = exact_fraction(right);
    const double ll = side_loglik_at(left, p1) + side_loglik_at(right, p2);
    const bool better =
        best.ll == -kInf ? ll > best.ll : ll > best.ll + 1e-12 * (1.0 + std::abs(best.ll));
    if (better) best = {b, p1, p2, ll};
  }
  return best;
}

// Dense grid over (b, p1, p2): b over data features and -inf, p over
// {0, 0.01, ..., 1} plus every exact side fraction.
inline double threshold_grid_max_loglik(const std::vector<Point>& pts) {
  std::vector<double> ps;
  for (int i = 0; i <= 100; ++i) ps.push_back(i / 100.0);
  std::vector<double> bs = {-kInf};
  for (const auto& p : pts) bs.push_back(p.x);
  for (double b : bs) {
    std::vector<Point> left, right;
    for (const auto& p : pts) (p.x <= b ? left : right).push_back(p);
    ps.push_back(exact_fraction(left));
    ps.push_back(exact_fraction(right));
  }
  double best = -kInf;
  for (double b : bs) {
    std::vector<Point> left, right;
    for (const auto& p : pts) (p.x <= b ? left : right).push_back(p);
    double bl = -kInf, br = -kInf;
    for (double p : ps) {
      bl = std::max(bl, side_loglik_at(left, p));
      br = std::max(br, side_loglik_at(right, p));
    }
    best = std::max(best, bl + br);
  }
  return best;
}

// Segment class with two interior thresholds: every pair b1 < b2 drawn from
// {-inf} and the data features.
inline double two_segment_max_loglik(const std::vector<Point>& pts) {
  std::vector<double> bs = {-kInf};
  for (const auto& p : pts) bs.push_back(p.x);
  std::sort(bs.begin(), bs.end());
  bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
  bs.push_back(kInf);
  double best = -kInf;
  for (std::size_t i = 0; i < bs.size(); ++i)
    for (std::size_t j = i; j < bs.size(); ++j) {
      std::vector<Point> a, b, c;
      for (const auto& p : pts) (p.x <= bs[i] ? a : (p.x <= bs[j] ? b : c)).push_back(p);
      const double ll = side_loglik_at(a, exact_fraction(a)) + side_loglik_at(b, exact_fraction(b)) +
                        side_loglik_at(c, exact_fraction(c));
      best = std::max(best, ll);
    }
  return best;
}

// Bernoulli joint-ML maximization over a finite grid of p values.
inline double bernoulli_grid_argmax(double ones, double zeros, const std::vector<double>& grid) {
  double best_p = grid.front(), best = -kInf;
  for (double p : grid) {
    double ll = 0.0;
    if (ones > 0) ll += p > 0 ? ones * std::log(p) : -kInf;
    if (zeros > 0) ll += p < 1 ? zeros * std::log(1 - p) : -kInf;
    if (ll > best) {
      best = ll;
      best_p = p;
    }
  }
  return best_p;
}

// Shtarkov sum for the Bernoulli class by enumerating all 2^n sequences.
inline double bernoulli_shtarkov(int n) {
  double total = 0.0;
  for (unsigned code = 0; code < (1u << n); ++code) {
    int k = __builtin_popcount(code);
    const double p = static_cast<double>(k) / n;
    double lik = 1.0;
    for (int i = 0; i < k; ++i) lik *= p;
    for (int i = 0; i < n - k; ++i) lik *= 1 - p;
    total += lik;
  }
  return total;
}

// pNML over the threshold class by enumeration: each hypothesized label is
// appended, the joint fit found by threshold_fit, and the label's fitted
// probability at x normalized over both labels. Returns {q(0), q(1), gamma}.
inline BinaryPrediction threshold_pnml(const std::vector<Point>& train, double x) {
  double score[2];
  for (int y = 0; y < 2; ++y) {
    auto pts = train;
    pts.push_back({x, y, 1.0});
    const auto fit = threshold_fit(pts);
    const double p1 = x <= fit.b ? fit.p1 : fit.p2;
    score[y] = y == 1 ? p1 : 1.0 - p1;
  }
  const double z = score[0] + score[1];
  return {score[0] / z, score[1] / z, std::log(z)};
}

inline std::vector<Point> random_points(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({u(rng), coin(rng) ? 1 : 0, 1.0});
  return pts;
}

}  // namespace oracle
