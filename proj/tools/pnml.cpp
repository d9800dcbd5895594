// Command-line front end: predict, curve, sweep, loo, tu, capacity.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pnml/pnml_all.hpp"

using nlohmann::json;
using namespace pnml;

namespace {

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::EmptyData:
    case ErrorCode::KTooLarge:
    case ErrorCode::TooLarge:
    case ErrorCode::DuplicateFeatures:
    case ErrorCode::MalformedRow:
    case ErrorCode::NonBinaryLabel:
      return true;
    default:
      return false;
  }
}

struct Units {
  bool bits = false;
  double operator()(double nats) const { return bits ? nats / std::log(2.0) : nats; }
  const char* name() const { return bits ? "bits" : "nats"; }
};

// Output numbers: 12 significant digits, infinities as strings.
json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return round_for_output(v);
}

json nums(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

double parse_lambda(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) detail::fail(ErrorCode::InvalidArgument, "bad lambda '" + s + "'");
  return v;
}

// Writes to the --out path, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) detail::fail(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

struct ExperimentOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> n_train;
  std::optional<std::size_t> grid_points;
  std::string learner;
  std::string class_name;
  std::string out;
  std::string meta;
};

void add_experiment_options(CLI::App* cmd, ExperimentOptions& o) {
  cmd->add_option("--config", o.config_path, "experiment config (JSON)");
  cmd->add_option("--seed", o.seed, "seed (overrides PNML_SEED and the config)");
  cmd->add_option("--runs", o.runs, "number of training draws");
  cmd->add_option("--n", o.n_train, "training set size");
  cmd->add_option("--grid", o.grid_points, "number of equispaced x points in [0, 1]");
  cmd->add_option("--learner", o.learner, "pnml | glambda | palg | tu | mixture");
  cmd->add_option("--class", o.class_name, "model class for pnml, glambda and palg");
  cmd->add_option("--out", o.out, "output CSV path (default: stdout)");
  cmd->add_option("--meta", o.meta, "sidecar JSON path (default: <out>.json)");
}

// Seed precedence: --seed, then PNML_SEED, then the config file.
ExperimentConfig resolve_config(const ExperimentOptions& o) {
  json j = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) detail::fail(ErrorCode::InvalidArgument, "cannot open config '" + o.config_path + "'");
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      detail::fail(ErrorCode::InvalidArgument, std::string("bad config: ") + e.what());
    }
  }
  ExperimentConfig cfg = config_from_json(j);
  if (const char* env = std::getenv("PNML_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long s = std::strtoull(env, &end, 10);
    if (*end != '\0' || *env == '-') detail::fail(ErrorCode::InvalidArgument, "PNML_SEED is not an unsigned integer");
    cfg.seed = s;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.runs) cfg.runs = *o.runs;
  if (o.n_train) cfg.n_train = *o.n_train;
  if (o.grid_points) cfg.x_grid = default_x_grid(*o.grid_points);
  if (!o.learner.empty()) cfg.learner.kind = learner_kind_from(o.learner);
  if (!o.class_name.empty()) cfg.learner.class_name = o.class_name;
  cfg.validate();
  return cfg;
}

void emit_table(const ExperimentOptions& o, const std::string& csv, json meta, const Units& u) {
  emit(o.out, csv);
  meta["units"] = u.name();
  std::string meta_path = o.meta;
  if (meta_path.empty() && !o.out.empty() && o.out != "-") meta_path = o.out + ".json";
  if (!meta_path.empty()) emit(meta_path, meta.dump(2) + "\n");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pNML universal learner"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);
  Units units;
  app.add_flag("--bits", units.bits, "report log quantities in bits instead of nats");

  // predict
  std::string train_path, learner = "pnml", class_name = "threshold", alg = "ml", out;
  std::string lambda_text = "1", bank_text = "bernoulli,threshold,segment2";
  double x = 0.0, beta = 1.0;
  std::size_t mixture_points = 201;
  auto* predict = app.add_subcommand("predict", "predict label probabilities at one feature value");
  predict->add_option("--train", train_path, "training CSV with header x,y")->required();
  predict->add_option("--x", x, "test feature")->required();
  predict->add_option("--learner", learner, "pnml | glambda | palg | tu | mixture");
  predict->add_option("--class", class_name, "bernoulli | threshold | segment0..segment3");
  predict->add_option("--lambda", lambda_text, "training weight for glambda (number or inf)");
  predict->add_option("--alg", alg, "palg training procedure: ml | smoothed");
  predict->add_option("--beta", beta, "smoothing strength for --alg smoothed");
  predict->add_option("--bank", bank_text, "comma-separated classes for tu");
  predict->add_option("--mixture-grid", mixture_points, "Bernoulli grid size for mixture");
  predict->add_option("--out", out, "output path (default: stdout)");

  // tu
  auto* tu = app.add_subcommand("tu", "twice-universal report over a bank of classes");
  tu->add_option("--train", train_path, "training CSV with header x,y")->required();
  tu->add_option("--x", x, "test feature")->required();
  tu->add_option("--bank", bank_text, "comma-separated classes");
  tu->add_option("--out", out, "output path (default: stdout)");

  // curve / sweep
  ExperimentOptions curve_opts, sweep_opts;
  auto* curve = app.add_subcommand("curve", "mean regret as a function of x over random training sets");
  add_experiment_options(curve, curve_opts);
  auto* sweep = app.add_subcommand("sweep", "regret curves across training weights lambda");
  add_experiment_options(sweep, sweep_opts);
  std::string lambdas_text = "0,0.25,0.5,1,2,4,inf";
  sweep->add_option("--lambdas", lambdas_text, "comma-separated lambdas (inf allowed)");

  // loo
  std::string loo_class = "bernoulli", loo_out;
  std::size_t max_n = 14;
  std::optional<std::uint64_t> loo_seed;
  auto* loo = app.add_subcommand("loo", "leave-one-out regret bounds against sequence length");
  loo->add_option("--class", loo_class, "model class");
  loo->add_option("--max-n", max_n, "largest sequence length (at least 2)");
  loo->add_option("--seed", loo_seed, "seed (overrides PNML_SEED)");
  loo->add_option("--out", loo_out, "output CSV path (default: stdout)");

  // capacity
  std::string channel = "bsc";
  double crossover = 0.1, tol = 1e-10;
  std::size_t size = 2, outputs = 2, max_iter = 1'000'000;
  auto* capacity = app.add_subcommand("capacity", "Blahut-Arimoto channel capacity");
  capacity->add_option("--channel", channel, "bsc | z | identity | uniform");
  capacity->add_option("--crossover", crossover, "crossover probability for bsc and z");
  capacity->add_option("--size", size, "inputs for identity and uniform");
  capacity->add_option("--outputs", outputs, "outputs for uniform");
  capacity->add_option("--tol", tol, "stop when upper minus lower bound is below this");
  capacity->add_option("--max-iter", max_iter, "iteration limit");
  capacity->add_option("--out", out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: UsageError: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*predict) {
      const Dataset train = read_dataset(train_path);
      Prediction p;
      const auto kind = learner_kind_from(learner);
      switch (kind) {
        case LearnerKind::Pnml:
          p = std::visit([&](const auto& c) { return pnml_predict(c, train, x); }, make_class(class_name));
          break;
        case LearnerKind::GLambda: {
          const Lambda lam(parse_lambda(lambda_text));
          p = std::visit([&](const auto& c) { return glambda_predict(c, train, x, lam); },
                         make_class(class_name));
          break;
        }
        case LearnerKind::Palg: {
          if (alg == "ml") {
            p = std::visit(
                [&](const auto& c) {
                  using C = std::decay_t<decltype(c)>;
                  return palg_predict(MaxLikelihood<C>{c}, c, train, x);
                },
                make_class(class_name));
          } else if (alg == "smoothed" && class_name == "bernoulli") {
            p = palg_predict(SmoothedBernoulli{beta}, BernoulliClass{}, train, x);
          } else if (alg == "smoothed" && class_name == "threshold") {
            p = palg_predict(SmoothedThreshold{beta}, ThresholdClass{}, train, x);
          } else {
            detail::fail(ErrorCode::InvalidArgument, "unsupported --alg/--class combination");
          }
          break;
        }
        case LearnerKind::TwiceUniversal:
          p = tu_predict(make_bank(split_list(bank_text)), train, x).prediction;
          break;
        case LearnerKind::Mixture: {
          const auto grid = bernoulli_grid(mixture_points);
          const std::vector<double> prior(grid.size(), 1.0 / static_cast<double>(grid.size()));
          p = bayes_mixture_predict(BernoulliClass{}, std::span<const BernoulliTheta>(grid), prior,
                                    train, x);
          break;
        }
      }
      const json j = {{"q", nums(p.probs)}, {"gamma", num(units(p.gamma))}, {"units", units.name()}};
      emit(out, j.dump() + "\n");
    } else if (*tu) {
      const Dataset train = read_dataset(train_path);
      const auto r = tu_predict(make_bank(split_list(bank_text)), train, x);
      json per_class = json::array();
      for (std::size_t i = 0; i < r.per_class.size(); ++i)
        per_class.push_back({{"class", r.class_names[i]},
                             {"q", nums(r.per_class[i].probs)},
                             {"gamma", num(units(r.per_class[i].gamma))}});
      std::vector<double> rbar, regret;
      for (double v : r.rbar) rbar.push_back(units(v));
      for (double v : r.regret) regret.push_back(units(v));
      const json j = {{"q", nums(r.prediction.probs)},
                      {"overhead", num(units(r.overhead))},
                      {"overhead_bound", num(units(tu_overhead_bound(r.class_names.size())))},
                      {"rbar", nums(rbar)},
                      {"regret", nums(regret)},
                      {"tilde_regret", num(units(r.tilde_regret))},
                      {"best_fit_class", r.best_fit_class},
                      {"best_universal_class", r.best_universal_class},
                      {"per_class", per_class},
                      {"units", units.name()}};
      emit(out, j.dump() + "\n");
    } else if (*curve) {
      const auto cfg = resolve_config(curve_opts);
      auto rows = run_regret_curve(cfg);
      for (auto& r : rows) {
        r.mean_gamma = units(r.mean_gamma);
        r.std_gamma = units(r.std_gamma);
      }
      std::ostringstream csv;
      write_curve_csv(csv, rows);
      emit_table(curve_opts, csv.str(),
                 result_sidecar("curve", cfg, {"x", "mean_gamma", "std_gamma", "runs"}), units);
    } else if (*sweep) {
      const auto cfg = resolve_config(sweep_opts);
      std::vector<double> lambdas;
      for (const auto& s : split_list(lambdas_text)) lambdas.push_back(parse_lambda(s));
      auto rows = run_lambda_sweep(cfg, lambdas);
      for (auto& r : rows) r.mean_gamma = units(r.mean_gamma);
      std::ostringstream csv;
      write_sweep_csv(csv, rows);
      json meta = result_sidecar("sweep", cfg, {"lambda", "x", "mean_gamma"});
      meta["lambdas"] = json::array();
      for (double l : lambdas) meta["lambdas"].push_back(lambda_to_json(l));
      emit_table(sweep_opts, csv.str(), meta, units);
    } else if (*loo) {
      ExperimentOptions o;
      o.seed = loo_seed;
      o.out = loo_out;
      const auto cfg = resolve_config(o);
      auto rows = run_loo_decay(loo_class, max_n, cfg.seed, cfg.generator);
      for (auto& r : rows) {
        r.nml_bound = units(r.nml_bound);
        r.pnml_loo = units(r.pnml_loo);
      }
      std::ostringstream csv;
      write_decay_csv(csv, rows);
      json meta = result_sidecar("loo", cfg, {"n", "nml_bound", "pnml_loo"});
      meta["class"] = loo_class;
      meta["max_n"] = max_n;
      emit_table(o, csv.str(), meta, units);
    } else if (*capacity) {
      Channel ch = [&] {
        if (channel == "bsc") return Channel::binary_symmetric(crossover);
        if (channel == "z") return Channel({{1.0, 0.0}, {crossover, 1.0 - crossover}});
        if (channel == "identity") return Channel::identity(size);
        if (channel == "uniform") return Channel::uniform(size, outputs);
        detail::fail(ErrorCode::InvalidArgument, "unknown channel '" + channel + "'");
      }();
      const auto r = ba_capacity(ch, tol, max_iter);
      const json j = {{"capacity", num(units(r.capacity_nats))},
                      {"gap", num(units(r.gap))},
                      {"iterations", r.iterations},
                      {"prior", nums(r.prior)},
                      {"units", units.name()}};
      emit(out, j.dump() + "\n");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return is_validation_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: RuntimeError: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
