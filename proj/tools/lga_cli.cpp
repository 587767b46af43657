// Command-line front end: meta-training, benchmark evaluation, sweeps,
// operator transfer and operator analysis dumps. All results are CSV.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "lga/csv.hpp"
#include "lga/harness.hpp"
#include "lga/metabbo.hpp"
#include "lga/params.hpp"

namespace {

struct GlobalFlags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t workers = 1;
  std::string checkpoint;
};

std::vector<double> parse_grid(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad value '") + item + "' in " + what);
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + " must not be empty");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + lga::format_double(v[i]);
  return s;
}

// GA settings shared by evaluate, sweep, transfer and analyze.
struct GaFlags {
  std::size_t population = 32;
  std::size_t generations = 50;
  double elite_ratio = 0.5;
  double lga_elite_ratio = 1.0;
  double sigma_init = 0.25;
  std::size_t seeds = 10;
  double samr_meta_rate = 1.5;
  std::size_t gesmr_groups = 8;
  std::string tasks = "sphere";
  std::size_t dim = 20;
};

void add_ga_flags(CLI::App* app, GaFlags& f) {
  app->add_option("--tasks", f.tasks, "Comma-separated task ids, optionally with ':dim'")->capture_default_str();
  app->add_option("--dim", f.dim, "Dimension of tasks given without ':dim'")->capture_default_str();
  app->add_option("--population", f.population, "Children per generation (N)")->capture_default_str();
  app->add_option("--generations", f.generations, "Generations per run (T)")->capture_default_str();
  app->add_option("--elite-ratio", f.elite_ratio, "Elite ratio rho; E = ceil(rho N), rho = 0 means E = 1")
      ->capture_default_str();
  app->add_option("--lga-elite-ratio", f.lga_elite_ratio, "Elite ratio of the learned GA")->capture_default_str();
  app->add_option("--sigma-init", f.sigma_init, "Initial mutation rate")->capture_default_str();
  app->add_option("--seeds", f.seeds, "Repetitions per configuration")->capture_default_str();
  app->add_option("--samr-meta-rate", f.samr_meta_rate, "SAMR multiplier")->capture_default_str();
  app->add_option("--gesmr-groups", f.gesmr_groups, "GESMR group count")->capture_default_str();
}

lga::HarnessOptions harness_options(const GaFlags& f, const GlobalFlags& g) {
  lga::HarnessOptions o;
  o.population = f.population;
  o.generations = f.generations;
  o.elite_ratio = f.elite_ratio;
  o.lga_elite_ratio = f.lga_elite_ratio;
  o.sigma_init = f.sigma_init;
  o.seeds = f.seeds;
  o.samr_meta_rate = f.samr_meta_rate;
  o.gesmr_groups = f.gesmr_groups;
  o.seed = g.seed;
  o.workers = g.workers;
  return o;
}

std::optional<lga::LgaParams> load_params(const GlobalFlags& g, bool required) {
  if (g.checkpoint.empty()) {
    if (required) throw std::invalid_argument("--checkpoint is required for the learned GA");
    return std::nullopt;
  }
  return lga::load_checkpoint(g.checkpoint);
}

std::filesystem::path out_path(const GlobalFlags& g, const char* fallback) {
  return g.out.empty() ? std::filesystem::path(fallback) : std::filesystem::path(g.out);
}

lga::bbob::TaskFamily parse_family(const std::string& s) {
  if (s == "small") return lga::bbob::TaskFamily::small();
  if (s == "medium") return lga::bbob::TaskFamily::medium();
  if (s == "large") return lga::bbob::TaskFamily::large();
  lga::bbob::TaskFamily family;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto fn = lga::bbob::parse_function(item);
    if (!fn) throw std::invalid_argument("unknown function '" + item + "' in --family");
    family.functions.push_back(*fn);
  }
  if (family.functions.empty()) throw std::invalid_argument("--family must not be empty");
  return family;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned genetic algorithms: meta-training and benchmarking"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags global;
  app.set_config("--config", "", "INI-style config file; sections name subcommands, flags override it");
  app.add_option("--seed", global.seed, "Master seed")->capture_default_str();
  app.add_option("--out", global.out, "Output CSV path (meta-train: output directory)");
  app.add_option("--workers", global.workers, "Worker threads; results do not depend on it")->capture_default_str();
  app.add_option("--checkpoint", global.checkpoint, "LGA checkpoint (JSON)");

  // meta-train
  auto* meta = app.add_subcommand("meta-train", "Meta-evolve LGA parameters with OpenAI-ES");
  lga::MetaConfig mc;
  std::string objective = std::string(lga::to_string(mc.objective));
  std::string family = "medium";
  meta->add_option("--meta-population", mc.es.population, "Meta-population M (even)")->capture_default_str();
  meta->add_option("--tasks", mc.tasks, "Tasks per meta-generation J")->capture_default_str();
  meta->add_option("--generations", mc.generations, "Meta-generations")->capture_default_str();
  meta->add_option("--inner-population", mc.inner.population, "Inner-loop N")->capture_default_str();
  meta->add_option("--inner-generations", mc.inner.generations, "Inner-loop T")->capture_default_str();
  meta->add_option("--objective", objective, "minN-minT, minN-finalT, meanN-minT or meanN-finalT")
      ->capture_default_str();
  meta->add_option("--family", family, "small, medium, large or a list of function ids")->capture_default_str();
  meta->add_option("--dim-min", mc.family.dim_min, "Smallest task dimension")->capture_default_str();
  meta->add_option("--dim-max", mc.family.dim_max, "Largest task dimension")->capture_default_str();
  meta->add_flag("--noisy", mc.family.noisy, "Multiplicative evaluation noise on meta-training tasks");
  meta->add_option("--mean-decay", mc.es.mean_decay, "Meta-mean decay lambda")->capture_default_str();
  meta->add_option("--lr", mc.es.lr_init, "Initial meta learning rate")->capture_default_str();
  meta->add_option("--sigma-meta", mc.es.sigma_init, "Initial meta perturbation scale")->capture_default_str();
  meta->add_option("--init-scale", mc.init_scale, "Std of the random initial mean (0: all-zero weights)")
      ->capture_default_str();
  bool raw_scores = false;
  meta->add_flag("--raw-scores", raw_scores, "z-score raw task scores instead of their log10");
  meta->add_option("--key-dim", mc.lga.key_dim, "Attention key dimension")->capture_default_str();
  meta->add_option("--heads", mc.lga.heads, "Attention heads")->capture_default_str();
  meta->add_flag("--learn-sampling", mc.lga.sampling, "Also learn the parent sampling operator");
  meta->add_flag("--learn-crossover", mc.lga.crossover, "Also learn the cross-over operator");
  meta->add_option("--eval-every", mc.eval_every, "Meta-generations between probe evaluations")
      ->capture_default_str();
  meta->add_option("--eval-seeds", mc.eval_seeds, "Seeds per probe evaluation")->capture_default_str();
  meta->add_option("--checkpoint-every", mc.checkpoint_every, "Meta-generations between checkpoints")
      ->capture_default_str();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Benchmark algorithms, normalized by the Gaussian GA");
  GaFlags eval_flags;
  std::string eval_algorithms = "gaussian,mr15,samr,gesmr";
  bool tune = false;
  std::size_t tune_seeds = 3;
  std::string rho_grid = join(lga::HarnessOptions{}.rho_grid);
  std::string sigma_grid = join(lga::HarnessOptions{}.sigma_grid);
  add_ga_flags(eval, eval_flags);
  eval->add_option("--algorithms", eval_algorithms, "lga, gaussian, mr15, samr, gesmr")->capture_default_str();
  eval->add_flag("--tune", tune, "Grid-tune elite ratio and sigma_init per algorithm and task first");
  eval->add_option("--tune-seeds", tune_seeds, "Seeds per tuning grid point")->capture_default_str();
  eval->add_option("--rho-grid", rho_grid, "Tuning grid of elite ratios")->capture_default_str();
  eval->add_option("--sigma-grid", sigma_grid, "Tuning grid of sigma_init")->capture_default_str();

  // sweep
  auto* sw = app.add_subcommand("sweep", "Elite ratio x sigma_init grid for each algorithm and task");
  GaFlags sweep_flags;
  sweep_flags.seeds = 5;
  std::string sweep_algorithms = "gaussian";
  std::string sweep_rho = rho_grid;
  std::string sweep_sigma = sigma_grid;
  add_ga_flags(sw, sweep_flags);
  sw->add_option("--algorithms", sweep_algorithms, "lga, gaussian, mr15, samr, gesmr")->capture_default_str();
  sw->add_option("--rho-grid", sweep_rho, "Elite ratios")->capture_default_str();
  sw->add_option("--sigma-grid", sweep_sigma, "Initial mutation rates")->capture_default_str();

  // transfer
  auto* tr = app.add_subcommand("transfer", "Swap learned operators into the Gaussian GA");
  GaFlags transfer_flags;
  transfer_flags.tasks = "mlp-sine";
  add_ga_flags(tr, transfer_flags);

  // analyze
  auto* an = app.add_subcommand("analyze", "Dump selection features, logits and rate multipliers");
  GaFlags analyze_flags;
  analyze_flags.tasks = "sphere:2";
  analyze_flags.population = 16;
  analyze_flags.sigma_init = 0.1;
  add_ga_flags(an, analyze_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (meta->parsed()) {
      mc.objective = lga::parse_objective(objective);
      mc.log_scores = !raw_scores;
      const auto dims = std::make_pair(mc.family.dim_min, mc.family.dim_max);
      const bool noisy = mc.family.noisy;
      mc.family = parse_family(family);
      std::tie(mc.family.dim_min, mc.family.dim_max) = dims;
      mc.family.noisy = noisy;
      mc.seed = global.seed;
      mc.workers = global.workers;
      const auto dir = out_path(global, "meta_run");
      mc.checkpoint_dir = dir;
      mc.log_path = dir / "meta_log.csv";
      const auto result = lga::meta_train(mc, [](const lga::MetaLogRow& row) {
        std::fprintf(stderr, "gen %zu  median %.4f  best %.4f  sigma %.5f\n", row.generation, row.fitness_median,
                     row.fitness_best, row.sigma);
      });
      if (!global.checkpoint.empty()) lga::save_checkpoint(result.mean, global.checkpoint);
      std::cout << "wrote " << mc.log_path.string() << " and checkpoints in " << dir.string() << '\n';
      return 0;
    }

    const bool needs_lga_eval = eval->parsed() && eval_algorithms.find("lga") != std::string::npos;
    const bool needs_lga_sweep = sw->parsed() && sweep_algorithms.find("lga") != std::string::npos;
    const auto params = load_params(global, needs_lga_eval || needs_lga_sweep || tr->parsed() || an->parsed());

    if (eval->parsed()) {
      auto o = harness_options(eval_flags, global);
      o.params = params ? &*params : nullptr;
      o.tune = tune;
      o.tune_seeds = tune_seeds;
      o.rho_grid = parse_grid(rho_grid, "--rho-grid");
      o.sigma_grid = parse_grid(sigma_grid, "--sigma-grid");
      const auto result = lga::evaluate(o, lga::parse_algorithm_list(eval_algorithms),
                                        lga::parse_task_list(eval_flags.tasks, eval_flags.dim));
      const auto path = out_path(global, "evaluate.csv");
      lga::write_evaluate_csv(path, result.rows);
      if (tune) lga::write_tuning_csv(lga::sibling_path(path, "_tuning"), result.tuning);
      std::cout << "wrote " << path.string() << '\n';
    } else if (sw->parsed()) {
      auto o = harness_options(sweep_flags, global);
      o.params = params ? &*params : nullptr;
      o.rho_grid = parse_grid(sweep_rho, "--rho-grid");
      o.sigma_grid = parse_grid(sweep_sigma, "--sigma-grid");
      const auto rows = lga::sweep(o, lga::parse_algorithm_list(sweep_algorithms),
                                   lga::parse_task_list(sweep_flags.tasks, sweep_flags.dim));
      const auto path = out_path(global, "sweep.csv");
      lga::write_sweep_csv(path, rows);
      std::cout << "wrote " << path.string() << '\n';
    } else if (tr->parsed()) {
      auto o = harness_options(transfer_flags, global);
      o.params = &*params;
      const auto rows = lga::transfer(o, lga::parse_task_list(transfer_flags.tasks, transfer_flags.dim));
      const auto path = out_path(global, "transfer.csv");
      lga::write_transfer_csv(path, rows);
      std::cout << "wrote " << path.string() << '\n';
    } else if (an->parsed()) {
      auto o = harness_options(analyze_flags, global);
      o.params = &*params;
      const auto tasks = lga::parse_task_list(analyze_flags.tasks, analyze_flags.dim);
      if (tasks.size() != 1) throw std::invalid_argument("analyze takes exactly one task");
      const auto result = lga::analyze(o, tasks.front());
      const auto path = out_path(global, "analyze.csv");
      const auto mra_path = lga::sibling_path(path, "_mra");
      lga::write_analyze_csv(path, mra_path, result);
      std::cout << "wrote " << path.string() << " and " << mra_path.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
