#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mdcd/benchmark.hpp"
#include "mdcd/dataset.hpp"
#include "mdcd/discovery.hpp"
#include "mdcd/profile.hpp"
#include "mdcd/report_json.hpp"
#include "mdcd/rng.hpp"
#include "mdcd/synth.hpp"

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void handle_sigint(int) { g_interrupted = 1; }

struct CommonFlags {
  int permutations = 499;
  std::string bandwidth_method = "normal_reference";
  double bandwidth_scale = 1.0;
  int max_test_points = 1000;
  std::uint64_t seed = 0;
  int max_levels = 10;
  std::string domain_col = "domain";
  double alpha = 0.05;
  bool no_standardize = false;
  bool split = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--permutations", f.permutations, "Permutation count B for each test");
  cmd->add_option("--bandwidth-method", f.bandwidth_method,
                  "Bandwidth rule: normal_reference | lscv")
      ->check(CLI::IsMember({"normal_reference", "lscv"}));
  cmd->add_option("--bandwidth-scale", f.bandwidth_scale,
                  "Multiplier on the selected bandwidths");
  cmd->add_option("--max-test-points", f.max_test_points,
                  "Per-domain cap on independence-test points (0 = no cap)");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--max-levels", f.max_levels,
                  "Max distinct integer levels for a column to count as discrete");
  cmd->add_option("--domain-col", f.domain_col, "Name of the domain label column");
  cmd->add_option("--alpha", f.alpha, "Significance level echoed in reports");
  cmd->add_flag("--no-standardize", f.no_standardize,
                "Skip pooled standardization of continuous columns");
  cmd->add_flag("--split", f.split,
                "Diagnostic: fit on the first half of each domain, test on the second");
}

mdcd::ScoreConfig score_config(const CommonFlags& f) {
  mdcd::ScoreConfig cfg;
  cfg.permutations = f.permutations;
  cfg.seed = f.seed;
  cfg.bandwidth_method = f.bandwidth_method == "lscv" ? mdcd::BandwidthMethod::lscv
                                                      : mdcd::BandwidthMethod::normal_reference;
  cfg.bandwidth_scale = f.bandwidth_scale;
  cfg.max_test_points = f.max_test_points;
  cfg.standardize = !f.no_standardize;
  cfg.split = f.split;
  cfg.alpha = f.alpha;
  return cfg;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : csv) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> default_candidates(const mdcd::MultiDomainDataset& ds,
                                            const std::string& target) {
  std::vector<std::string> out;
  for (const mdcd::Column& c : ds.columns()) {
    if (c.name != target) out.push_back(c.name);
  }
  return out;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw mdcd::Error("cannot write: " + tmp);
    f << text;
  }
  std::filesystem::rename(tmp, path);
}

void emit_json(const mdcd::ordered_json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_atomic(out_path, text);
  }
}

/// Dumps (domain, x..., gamma...) rows for every dataset row. Conditioner
/// values are reported on the original scale; the profiles come from the same
/// standardized fits the tests use.
void emit_gamma_csv(const mdcd::MultiDomainDataset& ds, const std::string& target,
                    const std::vector<std::string>& subset, const mdcd::ScoreConfig& cfg,
                    const std::string& path) {
  using namespace mdcd;
  std::vector<std::string> needed = subset;
  needed.push_back(target);
  const MultiDomainDataset* data = &ds;
  std::optional<StandardizeResult> storage;
  if (cfg.standardize) {
    storage = standardize(ds, needed);
    data = &storage->dataset;
  }
  std::vector<ConditionalDensityModel> models;
  for (std::size_t e = 0; e < ds.m(); ++e) {
    models.push_back(ConditionalDensityModel::fit(*data, e, target, subset, cfg.fit_options()));
  }
  const std::vector<ProfileSample> samples = profile_samples(models, *data, target, subset);

  std::vector<std::size_t> cond_idx;
  for (const std::string& name : subset) cond_idx.push_back(ds.column_index(name));

  std::ostringstream out;
  out << "domain";
  for (const std::string& name : subset) out << ',' << name;
  for (std::size_t i = 0; i < ds.m(); ++i) out << ",gamma_" << i + 1;
  out << '\n';

  char buf[64];
  std::size_t s = 0;
  for (std::size_t e = 0; e < ds.m(); ++e) {
    const DomainBlock& block = ds.block(e);
    for (std::size_t r = 0; r < block.n_rows; ++r, ++s) {
      out << ds.domain_labels()[e];
      for (std::size_t k : cond_idx) {
        std::snprintf(buf, sizeof(buf), "%.17g", block.columns[k][r]);
        out << ',' << buf;
      }
      for (double v : samples[s].profile.entries) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
      }
      out << '\n';
    }
  }
  write_text_atomic(path, out.str());
}

int run(int argc, char** argv) {
  CLI::App app{"Multi-domain causal discovery: density-profile construction, kernel "
               "independence testing, parent-set search, and benchmark reproduction"};
  app.require_subcommand(1);

  // --- simulate ---------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Generate a seeded synthetic instance");
  std::string sim_mode = "bivariate";
  std::uint64_t sim_seed = 0;
  int sim_n = 1000;
  std::string sim_out;
  double sim_alpha_variance = 0.05;
  double sim_root_shift = 1.0;
  sim->add_option("--mode", sim_mode, "bivariate | multivariate")
      ->check(CLI::IsMember({"bivariate", "multivariate"}));
  sim->add_option("--seed", sim_seed, "Instance seed");
  sim->add_option("--n", sim_n, "Samples per domain")->check(CLI::PositiveNumber);
  sim->add_option("--out", sim_out, "Output prefix (<out>.csv, <out>.truth.json)")->required();
  sim->add_option("--alpha-variance", sim_alpha_variance,
                  "Variance of the mechanism coefficients");
  sim->add_option("--root-shift", sim_root_shift,
                  "Domain-2 shift of the bivariate cause marginal");

  // --- discover ---------------------------------------------------------
  auto* disc = app.add_subcommand("discover", "Run parent-set or direction discovery on a CSV");
  std::string disc_csv;
  std::string disc_target;
  std::string disc_candidates_csv;
  std::string disc_method;
  double disc_c = 0.05;
  bool disc_c_set = false;
  int disc_k = -1;
  std::string disc_emit_gamma;
  CommonFlags disc_flags;
  disc->add_option("csv", disc_csv, "Input CSV path")->required();
  disc->add_option("--target", disc_target, "Target column")->required();
  disc->add_option("--candidates", disc_candidates_csv,
                   "Comma-separated candidate columns (default: all non-domain columns "
                   "except the target)");
  disc->add_option("--method", disc_method, "h1 | h2 | direction")
      ->required()
      ->check(CLI::IsMember({"h1", "h2", "direction"}));
  auto* disc_c_opt = disc->add_option("--c", disc_c, "H1 threshold on L(S)");
  disc->add_option("--k", disc_k, "H2 parent-set size");
  disc->add_option("--emit-gamma", disc_emit_gamma,
                   "Also dump (domain, x..., gamma...) rows to this CSV path");
  add_common_flags(disc, disc_flags);

  // --- score ------------------------------------------------------------
  auto* sc = app.add_subcommand("score", "Score one conditioning subset");
  std::string sc_csv;
  std::string sc_target;
  std::string sc_subset_csv;
  std::string sc_emit_gamma;
  CommonFlags sc_flags;
  sc->add_option("csv", sc_csv, "Input CSV path")->required();
  sc->add_option("--target", sc_target, "Target column")->required();
  sc->add_option("--subset", sc_subset_csv, "Comma-separated conditioning columns");
  sc->add_option("--emit-gamma", sc_emit_gamma,
                 "Also dump (domain, x..., gamma...) rows to this CSV path");
  add_common_flags(sc, sc_flags);

  // --- benchmark --------------------------------------------------------
  auto* bench = app.add_subcommand("benchmark", "Reproduce the synthetic evaluation protocol");
  std::string bench_mode = "bivariate";
  int bench_trials = 100;
  int bench_n = 1000;
  bool bench_tune_c = false;
  double bench_train_fraction = 0.5;
  double bench_c = 0.05;
  std::string bench_out;
  double bench_alpha_variance = 0.05;
  double bench_root_shift = 1.0;
  CommonFlags bench_flags;
  bench->add_option("--mode", bench_mode, "bivariate | multivariate")
      ->check(CLI::IsMember({"bivariate", "multivariate"}));
  bench->add_option("--trials", bench_trials, "Total trial count")->check(CLI::PositiveNumber);
  bench->add_option("--n", bench_n, "Samples per domain")->check(CLI::PositiveNumber);
  bench->add_flag("--tune-c", bench_tune_c,
                  "Tune the threshold on a training split before reporting");
  bench->add_option("--train-fraction", bench_train_fraction,
                    "Fraction of trials used for tuning when --tune-c is set");
  bench->add_option("--c", bench_c, "Threshold used when not tuning");
  bench->add_option("--out", bench_out, "Write the JSON report here instead of stdout");
  bench->add_option("--alpha-variance", bench_alpha_variance,
                    "Variance of the mechanism coefficients");
  bench->add_option("--root-shift", bench_root_shift,
                    "Domain-2 shift of the bivariate cause marginal");
  add_common_flags(bench, bench_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  disc_c_set = disc_c_opt->count() > 0;

  if (sim->parsed()) {
    mdcd::SynthOptions synth;
    synth.alpha_variance = sim_alpha_variance;
    synth.root_shift = sim_root_shift;
    const mdcd::SynthInstance inst =
        sim_mode == "bivariate"
            ? mdcd::gen_bivariate(sim_seed, static_cast<std::size_t>(sim_n), synth)
            : mdcd::gen_multivariate(sim_seed, static_cast<std::size_t>(sim_n), synth);
    mdcd::write_csv(inst.dataset, sim_out + ".csv");
    write_text_atomic(sim_out + ".truth.json", mdcd::truth_to_json(inst).dump(2) + "\n");
    return 0;
  }

  if (disc->parsed()) {
    // Exactly one of (c for h1, k for h2); checked before any computation.
    if (disc_method == "h1" && disc_k >= 0) {
      throw mdcd::ConfigError("--k is an h2 flag; h1 takes --c");
    }
    if (disc_method == "h2" && disc_k < 0) {
      throw mdcd::ConfigError("--method h2 requires --k");
    }
    if (disc_method == "h2" && disc_c_set) {
      throw mdcd::ConfigError("--c is an h1 flag; h2 takes --k");
    }
    if (disc_method == "direction" && (disc_c_set || disc_k >= 0)) {
      throw mdcd::ConfigError("--method direction takes neither --c nor --k");
    }

    mdcd::CsvOptions csv_opts;
    csv_opts.domain_column = disc_flags.domain_col;
    csv_opts.max_levels = disc_flags.max_levels;
    const mdcd::MultiDomainDataset ds = mdcd::load_csv(disc_csv, csv_opts);
    const std::vector<std::string> candidates =
        disc_candidates_csv.empty() ? default_candidates(ds, disc_target)
                                    : split_names(disc_candidates_csv);
    const mdcd::ScoreConfig cfg = score_config(disc_flags);

    if (disc_method == "direction") {
      if (candidates.size() != 1) {
        throw mdcd::ConfigError("--method direction needs exactly one candidate column");
      }
      const mdcd::DirectionResult res =
          mdcd::decide_direction(ds, candidates[0], disc_target, cfg);
      mdcd::ordered_json j = mdcd::direction_to_json(res, candidates[0], disc_target);
      j["settings"] = mdcd::settings_to_json(cfg);
      j["seed"] = cfg.seed;
      emit_json(j, "");
      if (!disc_emit_gamma.empty()) {
        emit_gamma_csv(ds, disc_target, {candidates[0]}, cfg, disc_emit_gamma);
      }
      return 0;
    }

    const mdcd::DiscoveryReport report =
        disc_method == "h1" ? mdcd::h1_parent_set(ds, disc_target, candidates, disc_c, cfg)
                            : mdcd::h2_parent_set(ds, disc_target, candidates, disc_k, cfg);
    emit_json(mdcd::report_to_json(report), "");
    if (!disc_emit_gamma.empty()) {
      if (report.chosen.empty()) {
        std::cerr << "note: chosen set is empty; no gamma file written" << std::endl;
      } else {
        emit_gamma_csv(ds, disc_target, report.chosen, cfg, disc_emit_gamma);
      }
    }
    return 0;
  }

  if (sc->parsed()) {
    mdcd::CsvOptions csv_opts;
    csv_opts.domain_column = sc_flags.domain_col;
    csv_opts.max_levels = sc_flags.max_levels;
    const mdcd::MultiDomainDataset ds = mdcd::load_csv(sc_csv, csv_opts);
    const std::vector<std::string> subset = split_names(sc_subset_csv);
    const mdcd::ScoreConfig cfg = score_config(sc_flags);

    const mdcd::SubsetScore score = mdcd::score_subset(ds, sc_target, subset, cfg);
    mdcd::ordered_json j;
    j["target"] = sc_target;
    j["score"] = mdcd::subset_score_to_json(score);
    j["settings"] = mdcd::settings_to_json(cfg);
    j["seed"] = cfg.seed;

    // Bandwidth echo for auditability.
    if (!subset.empty()) {
      std::vector<std::string> needed = subset;
      needed.push_back(sc_target);
      std::optional<mdcd::StandardizeResult> storage;
      const mdcd::MultiDomainDataset* data = &ds;
      if (cfg.standardize) {
        storage = mdcd::standardize(ds, needed);
        data = &storage->dataset;
      }
      mdcd::ordered_json bws = mdcd::ordered_json::array();
      for (std::size_t e = 0; e < ds.m(); ++e) {
        const auto model =
            mdcd::ConditionalDensityModel::fit(*data, e, sc_target, subset, cfg.fit_options());
        mdcd::ordered_json b;
        b["domain"] = ds.domain_labels()[e];
        b["conditioner"] = model.bandwidths().conditioner;
        b["target"] = model.bandwidths().target;
        bws.push_back(std::move(b));
      }
      j["bandwidths"] = std::move(bws);
    }
    emit_json(j, "");
    if (!sc_emit_gamma.empty()) {
      emit_gamma_csv(ds, sc_target, subset, cfg, sc_emit_gamma);
    }
    return 0;
  }

  // benchmark
  std::signal(SIGINT, handle_sigint);
  mdcd::BenchmarkOptions opts;
  opts.mode = bench_mode == "bivariate" ? mdcd::BenchMode::bivariate
                                        : mdcd::BenchMode::multivariate;
  opts.trials = bench_trials;
  opts.n_per_domain = bench_n;
  opts.seed = bench_flags.seed;
  opts.tune_c = bench_tune_c;
  opts.train_fraction = bench_train_fraction;
  opts.c = bench_c;
  opts.score = score_config(bench_flags);
  opts.synth.alpha_variance = bench_alpha_variance;
  opts.synth.root_shift = bench_root_shift;

  const mdcd::ordered_json result =
      mdcd::run_benchmark(opts, []() { return g_interrupted != 0; });
  emit_json(result, bench_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mdcd::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
