// Experiment driver: train / eval / sample / density / sweep.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gfm/evaluation.hpp"
#include "gfm/train.hpp"

namespace fs = std::filesystem;
using namespace gfm;

namespace {

// Leftover args of the form --key=value become config overrides.
void apply_extras(ExperimentConfig& cfg, const std::vector<std::string>& extras) {
  for (const auto& arg : extras) {
    if (arg.rfind("--", 0) != 0)
      throw ConfigError("unrecognized argument '" + arg + "' (expected --key=value)");
    auto eq = arg.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + arg + "' needs the form --key=value");
    apply_override(cfg, arg.substr(2, eq - 2), arg.substr(eq + 1));
  }
}

ExperimentConfig resolve_config(const std::string& config_path,
                                const std::vector<std::string>& extras) {
  ExperimentConfig cfg =
      config_path.empty() ? ExperimentConfig{} : parse_config_file(config_path);
  apply_extras(cfg, extras);
  if (const char* env = std::getenv("GFM_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  validate(cfg);
  fs::create_directories(cfg.output_dir);
  return cfg;
}

Dataset build_dataset(const ExperimentConfig& cfg) {
  const DatasetConfig& d = cfg.dataset;
  if (d.source == "geodata_csv") return load_geodata_csv(d.path);
  if (d.source == "angles_csv") return load_angles_csv(d.path, cfg.manifold.n);
  return synth_wrapped_mixture(cfg.manifold, d.components, d.concentration, d.n_samples,
                               d.seed);
}

std::string run_tag(const ExperimentConfig& cfg, uint64_t seed) {
  return loss_variant_name(cfg.loss.variant) + "_" + cfg.manifold.name() + "_seed" +
         std::to_string(seed);
}

ModelParams load_checkpoint_for(const ExperimentConfig& cfg, const std::string& path) {
  ModelParams p = load_checkpoint(path);
  if (!(p.manifold.kind == cfg.manifold.kind && p.manifold.n == cfg.manifold.n))
    throw CheckpointError("checkpoint manifold " + p.manifold.name() +
                          " does not match config manifold " + cfg.manifold.name());
  if (p.arch.hidden != cfg.arch.hidden || p.arch.layers != cfg.arch.layers ||
      p.arch.time_embed != cfg.arch.time_embed)
    throw CheckpointError("checkpoint architecture does not match config");
  return p;
}

int cmd_train(const ExperimentConfig& cfg) {
  Dataset full = build_dataset(cfg);
  auto [train_ds, test_ds] = split(full, cfg.dataset.train_fraction, cfg.dataset.seed);
  for (uint64_t seed : cfg.seeds) {
    std::string tag = run_tag(cfg, seed);
    std::ofstream log(fs::path(cfg.output_dir) / (tag + "_train.log"));
    TrainResult res = train_model(cfg, train_ds.points, seed, &log);
    save_checkpoint(res.params, (fs::path(cfg.output_dir) / (tag + ".ckpt")).string());
    std::cout << tag << ": done (" << res.logs.size() << " log rows)\n";
  }
  return 0;
}

int cmd_eval(const ExperimentConfig& cfg, const std::string& ckpt_path) {
  ModelParams params = load_checkpoint_for(cfg, ckpt_path);
  Dataset full = build_dataset(cfg);
  auto [train_ds, test_ds] = split(full, cfg.dataset.train_fraction, cfg.dataset.seed);
  MMDConfig mcfg;
  mcfg.bandwidth = cfg.eval.mmd_kappa;
  std::string variant = loss_variant_name(cfg.loss.variant);
  for (uint64_t seed : cfg.seeds) {
    mcfg.subsample_seed = seed;
    Rng rng(Rng::derive(seed, 0xEA));
    auto rows = nfe_sweep(params, test_ds.points, cfg.eval.nfe_list, rng, mcfg);
    NllSummary nll = test_nll(params, test_ds.points, cfg.eval.nll_steps);
    std::ostringstream out;
    size_t n_used = std::min(test_ds.points.size(), mcfg.max_points);
    for (const auto& row : rows)
      emit_mmd_record(out, variant, cfg.manifold, seed, row.nfe, row.mmd, n_used);
    emit_nll_record(out, variant, cfg.manifold, seed, nll);
    std::string path =
        (fs::path(cfg.output_dir) / ("metrics_" + run_tag(cfg, seed) + ".txt")).string();
    atomic_write(path, out.str());
    std::cout << out.str();
  }
  return 0;
}

int cmd_sample(const ExperimentConfig& cfg, const std::string& ckpt_path, int n_samples,
               int n_steps) {
  ModelParams params = load_checkpoint_for(cfg, ckpt_path);
  Rng rng(Rng::derive(cfg.seeds.front(), 0x5A));
  Dataset out{params.manifold, {}, "samples"};
  for (int i = 0; i < n_samples; ++i)
    out.points.push_back(sample_few_step(params, sample_prior(params.manifold, rng), n_steps));
  std::string path =
      (fs::path(cfg.output_dir) / ("samples_" + run_tag(cfg, cfg.seeds.front()) + ".csv"))
          .string();
  write_dataset_csv(out, path);
  std::cout << "wrote " << n_samples << " samples to " << path << "\n";
  return 0;
}

int cmd_density(const ExperimentConfig& cfg, const std::string& ckpt_path, int resolution) {
  ModelParams params = load_checkpoint_for(cfg, ckpt_path);
  std::ostringstream out;
  write_density_grid(params, resolution, cfg.eval.nll_steps, out);
  std::string path =
      (fs::path(cfg.output_dir) / ("density_" + run_tag(cfg, cfg.seeds.front()) + ".csv"))
          .string();
  atomic_write(path, out.str());
  std::cout << "wrote density grid to " << path << "\n";
  return 0;
}

int cmd_sweep(ExperimentConfig cfg, const std::vector<std::string>& variants) {
  Dataset full = build_dataset(cfg);
  auto [train_ds, test_ds] = split(full, cfg.dataset.train_fraction, cfg.dataset.seed);
  MMDConfig mcfg;
  mcfg.bandwidth = cfg.eval.mmd_kappa;
  std::ostringstream table;
  for (const auto& vname : variants) {
    cfg.loss.variant = parse_loss_variant(vname);
    for (uint64_t seed : cfg.seeds) {
      TrainResult res = train_model(cfg, train_ds.points, seed, nullptr);
      save_checkpoint(res.params,
                      (fs::path(cfg.output_dir) / (run_tag(cfg, seed) + ".ckpt")).string());
      mcfg.subsample_seed = seed;
      Rng rng(Rng::derive(seed, 0xEA));
      auto rows = nfe_sweep(res.params, test_ds.points, cfg.eval.nfe_list, rng, mcfg);
      NllSummary nll = test_nll(res.params, test_ds.points, cfg.eval.nll_steps);
      size_t n_used = std::min(test_ds.points.size(), mcfg.max_points);
      for (const auto& row : rows)
        emit_mmd_record(table, vname, cfg.manifold, seed, row.nfe, row.mmd, n_used);
      emit_nll_record(table, vname, cfg.manifold, seed, nll);
      std::cout << vname << " seed " << seed << ": trained and evaluated\n";
    }
  }
  std::string path = (fs::path(cfg.output_dir) / "sweep_metrics.txt").string();
  atomic_write(path, table.str());
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-step generative flow maps on Riemannian manifolds"};
  app.require_subcommand(1);

  std::string config_path, ckpt_path;
  int n_samples = 1000, n_steps = 1, resolution = 100;
  std::vector<std::string> variants{"rfm", "glsd", "gesd", "gpsd", "gmf"};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "config file");
    sub->allow_extras();
  };

  CLI::App* train = app.add_subcommand("train", "run the training loop");
  add_common(train);
  CLI::App* eval = app.add_subcommand("eval", "MMD sweep + NLL for a checkpoint");
  add_common(eval);
  eval->add_option("--checkpoint", ckpt_path, "checkpoint path")->required();
  CLI::App* sample = app.add_subcommand("sample", "draw few-step samples");
  add_common(sample);
  sample->add_option("--checkpoint", ckpt_path)->required();
  sample->add_option("-n,--n-samples", n_samples);
  sample->add_option("--steps", n_steps);
  CLI::App* density = app.add_subcommand("density", "log-density grid CSV");
  add_common(density);
  density->add_option("--checkpoint", ckpt_path)->required();
  density->add_option("--resolution", resolution);
  CLI::App* sweep = app.add_subcommand("sweep", "train+eval over variant x seed");
  add_common(sweep);
  sweep->add_option("--variants", variants)->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    ExperimentConfig cfg = resolve_config(config_path, sub->remaining());
    if (sub == train) return cmd_train(cfg);
    if (sub == eval) return cmd_eval(cfg, ckpt_path);
    if (sub == sample) return cmd_sample(cfg, ckpt_path, n_samples, n_steps);
    if (sub == density) return cmd_density(cfg, ckpt_path, resolution);
    if (sub == sweep) return cmd_sweep(cfg, variants);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
