#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pnml/core.hpp"
#include "pnml/io.hpp"
#include "pnml/models.hpp"
#include "pnml/parallel.hpp"
#include "pnml/pnml.hpp"
#include "pnml/sequence.hpp"
#include "pnml/stochastic.hpp"
#include "pnml/twice_universal.hpp"
#include "pnml/version.hpp"

namespace pnml {

// ---------------------------------------------------------------------------
// Counter-based random numbers: every draw is a pure function of
// (seed, stream, draw index).
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ull))) {}

  std::uint64_t bits(std::uint64_t draw) const { return splitmix64(key_ ^ splitmix64(draw)); }

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t draw) const {
    return (static_cast<double>(bits(draw) >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct GeneratorTheta {
  double b = 0.5;
  double p1 = 0.2;
  double p2 = 0.8;

  double prob_one(double x) const { return x <= b ? p1 : p2; }
};

enum class LearnerKind { Pnml, GLambda, Palg, TwiceUniversal, Mixture };

inline const char* to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Pnml: return "pnml";
    case LearnerKind::GLambda: return "glambda";
    case LearnerKind::Palg: return "palg";
    case LearnerKind::TwiceUniversal: return "tu";
    case LearnerKind::Mixture: return "mixture";
  }
  return "unknown";
}

inline LearnerKind learner_kind_from(const std::string& name) {
  if (name == "pnml") return LearnerKind::Pnml;
  if (name == "glambda") return LearnerKind::GLambda;
  if (name == "palg") return LearnerKind::Palg;
  if (name == "tu") return LearnerKind::TwiceUniversal;
  if (name == "mixture") return LearnerKind::Mixture;
  detail::fail(ErrorCode::InvalidArgument, "unknown learner '" + name + "'");
}

/// Which learner produces the per-point gamma. `class_name` applies to pnml,
/// glambda and palg; `bank` to tu. The mixture learner is the Bernoulli Bayes
/// mixture over `grid_points` equispaced parameters with a uniform prior.
struct LearnerSpec {
  LearnerKind kind = LearnerKind::Pnml;
  std::string class_name = "threshold";
  double lambda = 1.0;
  std::string alg = "ml";
  double beta = 1.0;
  std::vector<std::string> bank = {"bernoulli", "threshold", "segment2"};
  std::size_t grid_points = 201;
};

inline std::vector<double> default_x_grid(std::size_t points = 101) {
  detail::require(points >= 2, "grid needs at least two points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

struct ExperimentConfig {
  GeneratorTheta generator;
  std::size_t n_train = 100;
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  std::vector<double> x_grid = default_x_grid();
  LearnerSpec learner;

  void validate() const {
    const auto& g = generator;
    detail::require(!std::isnan(g.b), "generator threshold must not be NaN");
    detail::require(g.p1 >= 0.0 && g.p1 <= 1.0 && g.p2 >= 0.0 && g.p2 <= 1.0,
                    "generator probabilities must lie in [0, 1]");
    detail::require(n_train >= 1, "n_train must be at least 1");
    detail::require(runs >= 1, "runs must be at least 1");
    detail::require(!x_grid.empty(), "x_grid must not be empty");
    detail::require(std::is_sorted(x_grid.begin(), x_grid.end()), "x_grid must be sorted");
    for (double x : x_grid) detail::require(std::isfinite(x), "x_grid values must be finite");
    detail::require(!std::isnan(learner.lambda) && learner.lambda >= 0.0,
                    "lambda must be nonnegative");
  }
};

// ---------------------------------------------------------------------------
// Runtime class selection
// ---------------------------------------------------------------------------

using AnyClass = std::variant<BernoulliClass, ThresholdClass, SegmentClass>;

/// "bernoulli", "threshold" or "segment<k>" with k in 0..3.
inline AnyClass make_class(const std::string& name) {
  if (name == "bernoulli") return BernoulliClass{};
  if (name == "threshold") return ThresholdClass{};
  if (name.size() == 8 && name.rfind("segment", 0) == 0 && name[7] >= '0' && name[7] <= '9')
    return SegmentClass(static_cast<std::size_t>(name[7] - '0'));
  detail::fail(ErrorCode::InvalidArgument, "unknown model class '" + name + "'");
}

inline ClassBank make_bank(const std::vector<std::string>& names) {
  detail::require(!names.empty(), "class bank must not be empty");
  ClassBank bank;
  for (const auto& name : names)
    std::visit([&](const auto& cls) { bank.add(name, cls); }, make_class(name));
  return bank;
}

using GammaFn = std::function<double(const Dataset&, double)>;

inline GammaFn make_learner(const LearnerSpec& spec) {
  switch (spec.kind) {
    case LearnerKind::Pnml:
      return [cls = make_class(spec.class_name)](const Dataset& train, double x) {
        return std::visit([&](const auto& c) { return pnml_predict(c, train, x).gamma; }, cls);
      };
    case LearnerKind::GLambda: {
      const Lambda lam(spec.lambda);
      return [cls = make_class(spec.class_name), lam](const Dataset& train, double x) {
        return std::visit([&](const auto& c) { return glambda_predict(c, train, x, lam).gamma; },
                          cls);
      };
    }
    case LearnerKind::Palg: {
      if (spec.alg == "ml")
        return [cls = make_class(spec.class_name)](const Dataset& train, double x) {
          return std::visit(
              [&](const auto& c) {
                using C = std::decay_t<decltype(c)>;
                return palg_predict(MaxLikelihood<C>{c}, c, train, x).gamma;
              },
              cls);
        };
      if (spec.alg == "smoothed") {
        detail::require(spec.beta > 0.0, "smoothing beta must be positive");
        if (spec.class_name == "bernoulli")
          return [alg = SmoothedBernoulli{spec.beta}](const Dataset& train, double x) {
            return palg_predict(alg, BernoulliClass{}, train, x).gamma;
          };
        if (spec.class_name == "threshold")
          return [alg = SmoothedThreshold{spec.beta}](const Dataset& train, double x) {
            return palg_predict(alg, ThresholdClass{}, train, x).gamma;
          };
        detail::fail(ErrorCode::InvalidArgument,
                     "smoothed pALG is available for bernoulli and threshold classes");
      }
      detail::fail(ErrorCode::InvalidArgument, "unknown training procedure '" + spec.alg + "'");
    }
    case LearnerKind::TwiceUniversal:
      return [bank = make_bank(spec.bank)](const Dataset& train, double x) {
        return tu_predict(bank, train, x).prediction.gamma;
      };
    case LearnerKind::Mixture: {
      const auto grid = bernoulli_grid(spec.grid_points);
      const std::vector<double> prior(grid.size(), 1.0 / static_cast<double>(grid.size()));
      return [grid, prior](const Dataset& train, double x) {
        return bayes_mixture_predict(BernoulliClass{}, std::span<const BernoulliTheta>(grid),
                                     prior, train, x)
            .gamma;
      };
    }
  }
  detail::fail(ErrorCode::InvalidArgument, "unknown learner");
}

// ---------------------------------------------------------------------------
// Data generation
// ---------------------------------------------------------------------------

/// Features uniform on (0, 1), labels drawn from the threshold generator.
/// Draw 2t is feature t, draw 2t+1 its label.
inline Dataset draw_dataset(const GeneratorTheta& gen, std::size_t n, std::uint64_t seed,
                            std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  std::vector<Sample> samples(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double x = rng.uniform(2 * t);
    const bool one = rng.uniform(2 * t + 1) < gen.prob_one(x);
    samples[t] = {x, one ? Label{1} : Label{0}};
  }
  return Dataset(LabelSpace::binary(), std::move(samples));
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct CurveRow {
  double x = 0.0;
  double mean_gamma = 0.0;
  double std_gamma = 0.0;  // population standard deviation
  std::size_t runs = 0;
};

struct SweepRow {
  double lambda = 0.0;
  double x = 0.0;
  double mean_gamma = 0.0;
};

struct DecayRow {
  std::size_t n = 0;  // sequence length N+1
  double nml_bound = 0.0;
  double pnml_loo = 0.0;
};

/// Gamma per run and grid point, indexed [run][x].
inline std::vector<std::vector<double>> run_gamma_table(const ExperimentConfig& cfg) {
  cfg.validate();
  const GammaFn learner = make_learner(cfg.learner);
  std::vector<std::vector<double>> table(cfg.runs);
  detail::parallel_for(cfg.runs, [&](std::size_t run) {
    const Dataset train = draw_dataset(cfg.generator, cfg.n_train, cfg.seed, run);
    auto& row = table[run];
    row.resize(cfg.x_grid.size());
    for (std::size_t i = 0; i < cfg.x_grid.size(); ++i) row[i] = learner(train, cfg.x_grid[i]);
  });
  return table;
}

inline std::vector<CurveRow> run_regret_curve(const ExperimentConfig& cfg) {
  const auto table = run_gamma_table(cfg);
  const double runs = static_cast<double>(cfg.runs);
  std::vector<CurveRow> rows(cfg.x_grid.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double sum = 0.0;
    for (const auto& run : table) sum += run[i];
    const double mean = sum / runs;
    double sq = 0.0;
    for (const auto& run : table) sq += (run[i] - mean) * (run[i] - mean);
    rows[i] = {cfg.x_grid[i], mean, std::sqrt(sq / runs), cfg.runs};
  }
  return rows;
}

/// One glambda curve per lambda on the same training draws.
inline std::vector<SweepRow> run_lambda_sweep(const ExperimentConfig& cfg,
                                              const std::vector<double>& lambdas) {
  detail::require(!lambdas.empty(), "need at least one lambda");
  for (double lam : lambdas)
    detail::require(!std::isnan(lam) && lam >= 0.0, "lambda must be nonnegative");
  std::vector<SweepRow> out;
  out.reserve(lambdas.size() * cfg.x_grid.size());
  for (double lam : lambdas) {
    ExperimentConfig c = cfg;
    c.learner.kind = LearnerKind::GLambda;
    c.learner.lambda = lam;
    for (const auto& row : run_regret_curve(c)) out.push_back({lam, row.x, row.mean_gamma});
  }
  return out;
}

/// Both leave-one-out bounds for sequence lengths 2..max_n, one generated
/// dataset per length (generator defaults, stream = length).
inline std::vector<DecayRow> run_loo_decay(const std::string& class_name, std::size_t max_n,
                                           std::uint64_t seed,
                                           const GeneratorTheta& gen = GeneratorTheta{}) {
  detail::require(max_n >= 2, "max_n must be at least 2");
  const AnyClass cls = make_class(class_name);
  const std::size_t k = std::visit([](const auto& c) { return c.label_space().size(); }, cls);
  detail::require_enumerable(k, max_n);

  std::vector<DecayRow> rows;
  for (std::size_t n = 2; n <= max_n; ++n) {
    const Dataset data = draw_dataset(gen, n, seed, n);
    std::visit(
        [&](const auto& c) {
          rows.push_back({n, nml_loo_bound(c, data), pnml_loo_regret(c, data)});
        },
        cls);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "x,mean_gamma,std_gamma,runs\n";
  for (const auto& r : rows)
    out << format_number(r.x) << ',' << format_number(r.mean_gamma) << ','
        << format_number(r.std_gamma) << ',' << r.runs << '\n';
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "lambda,x,mean_gamma\n";
  for (const auto& r : rows)
    out << format_number(r.lambda) << ',' << format_number(r.x) << ','
        << format_number(r.mean_gamma) << '\n';
}

inline void write_decay_csv(std::ostream& out, const std::vector<DecayRow>& rows) {
  out << "n,nml_bound,pnml_loo\n";
  for (const auto& r : rows)
    out << r.n << ',' << format_number(r.nml_bound) << ',' << format_number(r.pnml_loo) << '\n';
}

// JSON encodes +inf lambda as the string "inf".
inline nlohmann::json lambda_to_json(double lam) {
  if (std::isinf(lam)) return "inf";
  return lam;
}

inline double lambda_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    detail::fail(ErrorCode::InvalidArgument, "bad lambda '" + s + "'");
  }
  return j.get<double>();
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json learner = {{"kind", to_string(cfg.learner.kind)},
                            {"class", cfg.learner.class_name},
                            {"lambda", lambda_to_json(cfg.learner.lambda)},
                            {"alg", cfg.learner.alg},
                            {"beta", cfg.learner.beta},
                            {"bank", cfg.learner.bank},
                            {"grid_points", cfg.learner.grid_points}};
  return {{"generator", {{"b", cfg.generator.b}, {"p1", cfg.generator.p1}, {"p2", cfg.generator.p2}}},
          {"n_train", cfg.n_train},
          {"runs", cfg.runs},
          {"seed", cfg.seed},
          {"x_grid", cfg.x_grid},
          {"learner", learner}};
}

/// Missing keys keep their defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      cfg.generator.b = g.value("b", cfg.generator.b);
      cfg.generator.p1 = g.value("p1", cfg.generator.p1);
      cfg.generator.p2 = g.value("p2", cfg.generator.p2);
    }
    cfg.n_train = j.value("n_train", cfg.n_train);
    cfg.runs = j.value("runs", cfg.runs);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("x_grid")) cfg.x_grid = j.at("x_grid").get<std::vector<double>>();
    if (j.contains("learner")) {
      const auto& l = j.at("learner");
      if (l.contains("kind")) cfg.learner.kind = learner_kind_from(l.at("kind").get<std::string>());
      cfg.learner.class_name = l.value("class", cfg.learner.class_name);
      if (l.contains("lambda")) cfg.learner.lambda = lambda_from_json(l.at("lambda"));
      cfg.learner.alg = l.value("alg", cfg.learner.alg);
      cfg.learner.beta = l.value("beta", cfg.learner.beta);
      if (l.contains("bank")) cfg.learner.bank = l.at("bank").get<std::vector<std::string>>();
      cfg.learner.grid_points = l.value("grid_points", cfg.learner.grid_points);
    }
  } catch (const nlohmann::json::exception& e) {
    detail::fail(ErrorCode::InvalidArgument, std::string("bad experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

/// Sidecar metadata written next to every result table.
inline nlohmann::json result_sidecar(const std::string& kind, const ExperimentConfig& cfg,
                                     const std::vector<std::string>& columns) {
  return {{"artifact", "pnml"},
          {"version", kVersion},
          {"kind", kind},
          {"units", "nats"},
          {"std", "population"},
          {"columns", columns},
          {"config", to_json(cfg)}};
}

}  // namespace pnml
