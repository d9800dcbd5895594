// Small tour of the library: pNML on a threshold problem, the lambda
// spectrum, a twice-universal bank, and a regret curve.

#include <cstdio>
#include <iostream>

#include "pnml/pnml_all.hpp"

using namespace pnml;

int main() {
  const Dataset train(LabelSpace::binary(),
                      {{0.05, 0}, {0.2, 0}, {0.35, 1}, {0.4, 0}, {0.6, 1}, {0.7, 1}, {0.9, 1}});

  std::puts("pNML, threshold class");
  for (double x : {0.1, 0.375, 0.5, 0.8}) {
    const auto p = pnml_predict(ThresholdClass{}, train, x);
    std::printf("  x=%-6g q(1)=%-10.6f gamma=%.6f\n", x, p.probs[1], p.gamma);
  }

  std::puts("lambda spectrum at x=0.5");
  for (double lam : {0.0, 0.5, 1.0, 4.0, kInf}) {
    const auto p = glambda_predict(ThresholdClass{}, train, 0.5, Lambda(lam));
    std::printf("  lambda=%-4s q(1)=%-10.6f gamma=%.6f\n", format_number(lam).c_str(), p.probs[1], p.gamma);
  }

  ClassBank bank;
  bank.add("bernoulli", BernoulliClass{}).add("threshold", ThresholdClass{}).add("segment2", SegmentClass(2));
  const auto tu = tu_predict(bank, train, 0.5);
  std::printf("twice universal at x=0.5: q(1)=%.6f overhead=%.6f (bound %.6f)\n", tu.prediction.probs[1],
              tu.overhead, tu_overhead_bound(bank.size()));

  ExperimentConfig cfg;
  cfg.runs = 20;
  cfg.n_train = 100;
  cfg.x_grid = default_x_grid(11);
  std::puts("mean regret over 20 training draws, N=100");
  write_curve_csv(std::cout, run_regret_curve(cfg));
}
