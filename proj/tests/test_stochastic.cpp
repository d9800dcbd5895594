#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pnml/stochastic.hpp"

using namespace pnml;

namespace {

double bsc_capacity(double e) { return std::log(2.0) + e * std::log(e) + (1 - e) * std::log(1 - e); }

Dataset labels_only(std::initializer_list<int> ys) {
  Dataset d(LabelSpace::binary());
  for (int y : ys) d.push_back({0.0, static_cast<Label>(y)});
  return d;
}

std::vector<BernoulliTheta> grid_of(std::initializer_list<double> ps) {
  std::vector<BernoulliTheta> g;
  for (double p : ps) g.push_back({p});
  return g;
}

}  // namespace

TEST(Capacity, UselessChannel) {
  const auto r = ba_capacity(Channel::uniform(3, 4), 1e-12, 1000);
  EXPECT_NEAR(r.capacity_nats, 0.0, 1e-12);
  for (double w : r.prior) EXPECT_NEAR(w, 1.0 / 3.0, 1e-12);
}

TEST(Capacity, NoiselessBinary) {
  const auto r = ba_capacity(Channel::identity(2), 1e-12, 1000);
  EXPECT_NEAR(r.capacity_nats, std::log(2.0), 1e-12);
  EXPECT_NEAR(r.prior[0], 0.5, 1e-12);
}

TEST(Capacity, BinarySymmetric) {
  const auto r = ba_capacity(Channel::binary_symmetric(0.1), 1e-10, 100000);
  EXPECT_NEAR(r.capacity_nats, bsc_capacity(0.1), 1e-6);
  EXPECT_NEAR(r.capacity_nats, 0.368064, 1e-6);
}

TEST(Capacity, AsymmetricChannelBracketsAndIsMonotone) {
  // Z-channel: closed form C = log(1 + (1-e) e^{e/(1-e)}) with e the 1->0 flip.
  const double e = 0.3;
  const Channel z({{1.0, 0.0}, {e, 1.0 - e}});
  const auto r = ba_capacity(z, 1e-11, 100000);
  const double exact = std::log(1.0 + (1.0 - e) * std::pow(e, e / (1.0 - e)));
  EXPECT_LE(r.capacity_nats, exact + 1e-12);
  EXPECT_GE(r.capacity_nats + r.gap, exact - 1e-12);
  for (std::size_t i = 1; i < r.lower_history.size(); ++i)
    EXPECT_GE(r.lower_history[i], r.lower_history[i - 1] - 1e-12);
}

TEST(Capacity, NotConvergedCarriesResult) {
  try {
    const Channel ch({{0.9, 0.1, 0.0}, {0.0, 0.2, 0.8}, {0.3, 0.3, 0.4}});
    ba_capacity(ch, 1e-15, 2);
    FAIL();
  } catch (const NotConvergedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotConverged);
    EXPECT_EQ(e.result().iterations, 2u);
    EXPECT_GT(e.result().gap, 1e-15);
  }
}

TEST(Channel, Validation) {
  EXPECT_THROW(Channel({{0.5, 0.4}}), Error);
  EXPECT_THROW(Channel({{0.5, 0.5}, {1.0}}), Error);
  EXPECT_THROW(Channel({{1.5, -0.5}}), Error);
}

TEST(LearningChannel, Examples) {
  const std::vector<double> two = {0.1, 0.2};
  const auto fair = build_learning_channel(BernoulliClass{}, std::span<const BernoulliTheta>(grid_of({0.5})), two);
  ASSERT_EQ(fair.outputs(), 4u);
  for (double p : fair.row(0)) EXPECT_NEAR(p, 0.25, 1e-15);

  const std::vector<double> one = {0.3};
  const auto ident = build_learning_channel(BernoulliClass{}, std::span<const BernoulliTheta>(grid_of({0.0, 1.0})), one);
  EXPECT_NEAR(ba_capacity(ident, 1e-12, 100).capacity_nats, std::log(2.0), 1e-12);

  const auto bsc = build_learning_channel(BernoulliClass{}, std::span<const BernoulliTheta>(grid_of({0.3, 0.7})), one);
  EXPECT_NEAR(bsc.row(0)[0], 0.7, 1e-15);
  EXPECT_NEAR(ba_capacity(bsc, 1e-12, 100000).capacity_nats, bsc_capacity(0.3), 1e-9);
  EXPECT_NEAR(bsc_capacity(0.3), 0.082282, 1e-6);
}

TEST(LearningChannel, SequenceCapacityGrowsWithLength) {
  const auto grid = bernoulli_grid(21);
  double prev = 0.0;
  for (std::size_t n = 1; n <= 5; ++n) {
    std::vector<double> xs(n, 0.0);
    const double c = ba_capacity(build_learning_channel(BernoulliClass{}, std::span<const BernoulliTheta>(grid), xs), 1e-9, 200000).capacity_nats;
    EXPECT_GT(c, prev);
    // The sequence capacity never exceeds the Shtarkov (NML) regret.
    EXPECT_LE(c, nml_full(BernoulliClass{}, xs).log_normalizer + 1e-9);
    prev = c;
  }
}

TEST(BayesMixture, Examples) {
  const auto g = grid_of({0.3, 0.7});
  const std::vector<double> uniform = {0.5, 0.5};
  const auto post = bayes_mixture_predict(BernoulliClass{}, std::span<const BernoulliTheta>(g), uniform, labels_only({1}), 0.0);
  EXPECT_NEAR(post.probs[1], 0.58, 1e-12);
  EXPECT_EQ(post.gamma, 0.0);
  const auto prior_only = bayes_mixture_predict(BernoulliClass{}, std::span<const BernoulliTheta>(g), uniform, Dataset(LabelSpace::binary()), 0.0);
  EXPECT_NEAR(prior_only.probs[1], 0.5, 1e-12);

  const auto single = grid_of({0.42});
  const std::vector<double> one = {1.0};
  EXPECT_NEAR(bayes_mixture_predict(BernoulliClass{}, std::span<const BernoulliTheta>(single), one, labels_only({1, 0, 0}), 0.0).probs[1], 0.42, 1e-15);
}

TEST(BayesMixture, PointMassPrior) {
  const auto g = bernoulli_grid(11);
  std::vector<double> prior(11, 0.0);
  prior[3] = 1.0;
  const auto q = bayes_mixture_predict(BernoulliClass{}, std::span<const BernoulliTheta>(g), prior, labels_only({1, 1, 0}), 0.0);
  EXPECT_EQ(q.probs[1], 0.3);
}

TEST(BayesMixture, ZeroEvidence) {
  const auto g = grid_of({0.0});
  const std::vector<double> one = {1.0};
  try {
    bayes_mixture_predict(BernoulliClass{}, std::span<const BernoulliTheta>(g), one, labels_only({1}), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroEvidence);
  }
}

TEST(RefinedSubclass, Examples) {
  std::vector<BernoulliTheta> g;
  for (int i = 1; i <= 9; ++i) g.push_back({i / 10.0});
  const std::span<const BernoulliTheta> grid(g);
  EXPECT_EQ(refined_subclass(BernoulliClass{}, grid, labels_only({1, 1}), 0.0).size(), 9u);
  const auto kept = refined_subclass(BernoulliClass{}, grid, labels_only({1, 1}), 0.5);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].p, 0.8);
  EXPECT_EQ(kept[1].p, 0.9);
  try {
    refined_subclass(BernoulliClass{}, grid, labels_only({1, 0}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySubclass);
  }
}

TEST(RefinedSubclass, AntitoneInFloor) {
  const auto g = bernoulli_grid(51);
  const std::span<const BernoulliTheta> grid(g);
  const auto train = labels_only({1, 0, 1, 1, 0, 1});
  std::size_t prev = g.size() + 1;
  for (double c = 0.0; c <= 0.021; c += 0.001) {
    const auto kept = refined_subclass(BernoulliClass{}, grid, train, c);
    EXPECT_LE(kept.size(), prev);
    prev = kept.size();
  }
}

TEST(RefinedCapacityMixture, Examples) {
  const auto single = grid_of({0.3});
  auto q = refined_capacity_mixture(BernoulliClass{}, std::span<const BernoulliTheta>(single), labels_only({1}), 0.0, 0.5, 1e-12);
  EXPECT_NEAR(q.probs[1], 0.3, 1e-15);
  EXPECT_NEAR(q.gamma, 0.0, 1e-15);

  const auto noiseless = grid_of({0.0, 1.0});
  q = refined_capacity_mixture(BernoulliClass{}, std::span<const BernoulliTheta>(noiseless), Dataset(LabelSpace::binary()), 0.0, 0.5, 1e-12);
  EXPECT_NEAR(q.probs[0], 0.5, 1e-12);
  EXPECT_NEAR(q.gamma, std::log(2.0), 1e-12);

  const auto bsc = grid_of({0.3, 0.7});
  q = refined_capacity_mixture(BernoulliClass{}, std::span<const BernoulliTheta>(bsc), Dataset(LabelSpace::binary()), 0.0, 0.5, 1e-12);
  EXPECT_NEAR(q.probs[0], 0.5, 1e-12);
  EXPECT_NEAR(q.gamma, bsc_capacity(0.3), 1e-9);
}
