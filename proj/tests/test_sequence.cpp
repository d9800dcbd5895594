#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pnml/sequence.hpp"

using namespace pnml;

namespace {

std::vector<double> distinct_features(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (i + 0.5) / static_cast<double>(n);
  return x;
}

Dataset labels_only(std::initializer_list<int> ys) {
  Dataset d(LabelSpace::binary());
  double x = 0.1;
  for (int y : ys) d.push_back({x += 0.1, static_cast<Label>(y)});
  return d;
}

}  // namespace

TEST(NmlFull, BernoulliNormalizers) {
  const BernoulliClass cls;
  EXPECT_NEAR(std::exp(nml_full(cls, distinct_features(1)).log_normalizer), 2.0, 1e-12);
  const auto two = nml_full(cls, distinct_features(2));
  EXPECT_NEAR(std::exp(two.log_normalizer), 2.5, 1e-12);
  EXPECT_NEAR(two.log_normalizer, 0.916291, 1e-6);
  const auto three = nml_full(cls, distinct_features(3));
  EXPECT_NEAR(std::exp(three.log_normalizer), 2.0 + 6.0 * 4.0 / 27.0, 1e-12);
  EXPECT_NEAR(three.log_normalizer, 1.060872, 1e-6);
}

TEST(NmlFull, BernoulliMatchesEnumerationOracle) {
  for (int n = 1; n <= 12; ++n)
    EXPECT_NEAR(nml_full(BernoulliClass{}, distinct_features(n)).log_normalizer,
                std::log(oracle::bernoulli_shtarkov(n)), 1e-10);
}

TEST(NmlFull, SequenceProbabilitiesSumToOne) {
  for (int n : {1, 3, 6}) {
    for (const auto& seq : {nml_full(BernoulliClass{}, distinct_features(n)),
                            nml_full(ThresholdClass{}, distinct_features(n))}) {
      double total = 0.0;
      for (double lp : seq.seq_logprob) total += std::exp(lp);
      EXPECT_NEAR(total, 1.0, 1e-9);
      EXPECT_GE(seq.log_normalizer, 0.0);
    }
  }
}

TEST(NmlFull, Guards) {
  try {
    nml_full(BernoulliClass{}, distinct_features(21));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
  const std::vector<double> dup = {0.2, 0.5, 0.2};
  try {
    nml_full(ThresholdClass{}, dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateFeatures);
  }
  EXPECT_NO_THROW(nml_full(BernoulliClass{}, dup));
}

TEST(NmlSequential, BernoulliExamples) {
  const auto seq = nml_full(BernoulliClass{}, distinct_features(2));
  const auto first = nml_sequential_predict(seq, {});
  EXPECT_NEAR(first[1], 0.5, 1e-12);
  const Label one[] = {1};
  EXPECT_NEAR(nml_sequential_predict(seq, one)[1], 0.8, 1e-12);
  const Label too_long[] = {1, 0};
  EXPECT_THROW(nml_sequential_predict(seq, too_long), Error);
}

TEST(NmlSequential, ChainRuleReproducesSequenceProbability) {
  for (const auto& seq : {nml_full(BernoulliClass{}, distinct_features(5)),
                          nml_full(ThresholdClass{}, distinct_features(5)),
                          nml_full(SegmentClass(2), distinct_features(5))}) {
    std::vector<Label> ys(5);
    for (std::size_t code = 0; code < seq.seq_logprob.size(); ++code) {
      detail::decode_sequence(code, 2, ys);
      double lp = 0.0;
      for (std::size_t t = 0; t < ys.size(); ++t)
        lp += std::log(nml_sequential_predict(seq, std::span(ys).first(t))[ys[t]]);
      EXPECT_NEAR(lp, seq.logprob(ys).value(), 1e-9);
    }
  }
}

TEST(NmlLooBound, BernoulliValues) {
  EXPECT_NEAR(nml_loo_bound(BernoulliClass{}, labels_only({1, 0})), 0.5 * std::log(2.5), 1e-12);
  EXPECT_NEAR(nml_loo_bound(BernoulliClass{}, labels_only({1, 0})), 0.458145, 1e-6);
  EXPECT_NEAR(nml_loo_bound(BernoulliClass{}, labels_only({1, 1, 0})), 0.353624, 1e-6);
  EXPECT_NEAR(nml_loo_bound(BernoulliClass{}, labels_only({1})), std::log(2.0), 1e-12);
}

TEST(NmlLooBound, BernoulliStrictlyDecreasing) {
  double prev = kInf;
  for (int n = 2; n <= 14; ++n) {
    Dataset d(LabelSpace::binary());
    for (int i = 0; i < n; ++i) d.push_back({i * 0.01, static_cast<Label>(i % 2)});
    const double b = nml_loo_bound(BernoulliClass{}, d);
    EXPECT_LT(b, prev) << "n=" << n;
    prev = b;
  }
}

TEST(NmlLooBound, PermutationInvariant) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    auto pts = oracle::random_points(rng, 6);
    Dataset a(LabelSpace::binary());
    for (auto& p : pts) a.push_back({p.x, static_cast<Label>(p.y)});
    std::shuffle(pts.begin(), pts.end(), rng);
    Dataset b(LabelSpace::binary());
    for (auto& p : pts) b.push_back({p.x, static_cast<Label>(p.y)});
    EXPECT_NEAR(nml_loo_bound(ThresholdClass{}, a), nml_loo_bound(ThresholdClass{}, b), 1e-12);
  }
}

TEST(PnmlLoo, BernoulliClosedForm) {
  EXPECT_NEAR(pnml_loo_regret(BernoulliClass{}, labels_only({1, 1, 0})), std::log(4.0 / 3.0), 1e-12);
  EXPECT_NEAR(pnml_loo_regret(BernoulliClass{}, labels_only({1, 0})), std::log(1.5), 1e-12);
  for (int n = 2; n <= 30; ++n) {
    Dataset d(LabelSpace::binary());
    for (int i = 0; i < n; ++i) d.push_back({i * 0.1, static_cast<Label>((i * 7) % 3 == 0)});
    EXPECT_NEAR(pnml_loo_regret(BernoulliClass{}, d), std::log((n + 1.0) / n), 1e-12);
  }
}

TEST(PnmlLoo, IdenticalPointsGiveEqualTerms) {
  const Dataset d(LabelSpace::binary(), {{0.4, 1}, {0.4, 1}});
  const auto terms = pnml_loo_terms(ThresholdClass{}, d);
  EXPECT_EQ(terms[0], terms[1]);
  EXPECT_EQ(pnml_loo_regret(ThresholdClass{}, d), terms[0]);
}

TEST(PnmlLoo, MeanOfTerms) {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset d(LabelSpace::binary());
    for (auto& p : oracle::random_points(rng, 2 + trial % 7)) d.push_back({p.x, static_cast<Label>(p.y)});
    const auto terms = pnml_loo_terms(ThresholdClass{}, d);
    double sum = 0.0;
    for (double t : terms) sum += t;
    EXPECT_EQ(pnml_loo_regret(ThresholdClass{}, d), sum / terms.size());
  }
  EXPECT_THROW(pnml_loo_regret(BernoulliClass{}, labels_only({1})), Error);
}
