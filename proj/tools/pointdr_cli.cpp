// Command-line front end: augment / simulate / train / eval over
// SemanticKITTI-format scans or the built-in toy benchmark.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pointdr/augment.hpp"
#include "pointdr/checkpoint.hpp"
#include "pointdr/errors.hpp"
#include "pointdr/io.hpp"
#include "pointdr/kernels.hpp"
#include "pointdr/label_map.hpp"
#include "pointdr/metrics.hpp"
#include "pointdr/rng.hpp"
#include "pointdr/toy.hpp"
#include "pointdr/trainer.hpp"
#include "pointdr/weather.hpp"

namespace fs = std::filesystem;
using namespace pointdr;

namespace {

constexpr std::uint64_t kEvalWeatherStream = 0xe7a1;

struct CommonOpts {
  std::string labelmap;
};

const LabelMap& resolve_labelmap(const CommonOpts& opts, LabelMap& storage) {
  if (opts.labelmap.empty()) return LabelMap::semantic_kitti();
  storage = LabelMap::load(opts.labelmap);
  return storage;
}

// A data directory holds scan.bin files with sibling scan.label files.
// Stems are sorted so the dataset order is stable.
std::vector<PointCloud> load_directory(const fs::path& dir, const LabelMap& map,
                                       bool require_labels) {
  if (!fs::is_directory(dir)) {
    throw std::invalid_argument(dir.string() + " is not a directory");
  }
  std::vector<fs::path> bins;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bin") {
      bins.push_back(entry.path());
    }
  }
  std::sort(bins.begin(), bins.end());
  if (bins.empty()) {
    throw std::invalid_argument("no .bin scans found in " + dir.string());
  }
  std::vector<PointCloud> scans;
  scans.reserve(bins.size());
  for (const fs::path& bin : bins) {
    PointCloud cloud = read_scan(bin);
    fs::path label = bin;
    label.replace_extension(".label");
    if (fs::exists(label)) {
      cloud.labels = read_labels(label, map);
      if (cloud.labels.size() != cloud.size()) {
        throw FormatError(bin.string() + ": label count does not match scan");
      }
    } else if (require_labels) {
      throw std::invalid_argument("missing label file for " + bin.string());
    }
    // An optional .weather sidecar tags the scan's condition.
    fs::path wpath = bin;
    wpath.replace_extension(".weather");
    if (fs::exists(wpath)) {
      std::ifstream in(wpath);
      std::string name;
      in >> name;
      const auto w = weather_from_name(name);
      if (!w.has_value()) {
        throw FormatError(wpath.string() + ": unknown weather tag '" + name + "'");
      }
      cloud.weather = w;
    }
    scans.push_back(std::move(cloud));
  }
  return scans;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw FormatError("short write to " + path.string());
}

int cmd_augment(const std::string& in, const std::string& out,
                const std::string& view, std::uint64_t seed,
                const std::string& labels_in, const std::string& labels_out,
                const CommonOpts& common) {
  LabelMap storage = LabelMap::semantic_kitti();
  const LabelMap& map = resolve_labelmap(common, storage);
  PointCloud cloud = read_scan(in);
  if (!labels_in.empty()) {
    cloud.labels = read_labels(labels_in, map);
    if (cloud.labels.size() != cloud.size()) {
      throw std::invalid_argument("label count does not match scan");
    }
  }
  const AugmentConfig cfg;
  std::string prov = "view = " + view + "\nseed = " + std::to_string(seed) + "\n";
  PointCloud result;
  if (view == "weak") {
    AppliedOps ops;
    result = weak_view(cloud, cfg, seed, &ops);
    prov += "rotation_deg = " + std::to_string(ops.rotation_deg) + "\n" +
            "scale = " + std::to_string(ops.scale) + "\n";
  } else {
    StrongView sv = strong_view(cloud, cfg, seed);
    result = std::move(sv.cloud);
    const AppliedOps& ops = sv.ops;
    prov += "rotation_deg = " + std::to_string(ops.rotation_deg) + "\n" +
            "scale = " + std::to_string(ops.scale) + "\n" +
            "dropout = " + std::to_string(ops.dropout ? 1 : 0) + "\n";
    if (ops.dropout) {
      prov += "dropout_frac = " + std::to_string(ops.dropout_frac) + "\n" +
              "dropped = " + std::to_string(ops.dropped) + "\n";
    }
    prov += "noise = " + std::to_string(ops.noise ? 1 : 0) + "\n";
    if (ops.noise) {
      prov += "noise_count = " + std::to_string(ops.noise_count) + "\n";
    }
    prov += "flip_x = " + std::to_string(ops.flip_x ? 1 : 0) + "\n" +
            "flip_y = " + std::to_string(ops.flip_y ? 1 : 0) + "\n" +
            "jitter = " + std::to_string(ops.jitter ? 1 : 0) + "\n";
  }
  write_scan(result, out);
  write_text(out + ".prov", prov);
  if (!labels_out.empty()) {
    if (!result.has_labels()) {
      throw std::invalid_argument("--out-labels requires --labels");
    }
    write_labels(result.labels, labels_out, map);
  }
  std::cout << view << " view: " << cloud.size() << " -> " << result.size()
            << " points, provenance in " << out << ".prov\n";
  return 0;
}

int cmd_simulate(const std::string& mode_name, const std::string& in,
                 const std::string& labels_in, std::uint64_t seed,
                 const std::string& out_prefix, const CommonOpts& common) {
  LabelMap storage = LabelMap::semantic_kitti();
  const LabelMap& map = resolve_labelmap(common, storage);
  const auto mode = weather_from_name(mode_name);
  if (!mode.has_value()) {
    throw std::invalid_argument("unknown weather mode: " + mode_name);
  }
  PointCloud cloud = read_scan(in);
  cloud.labels = read_labels(labels_in, map);
  if (cloud.labels.size() != cloud.size()) {
    throw std::invalid_argument("label count does not match scan");
  }
  const PointCloud corrupted = corrupt(cloud, WeatherConfig::preset(*mode), seed);
  write_scan(corrupted, out_prefix + ".bin");
  write_labels(corrupted.labels, out_prefix + ".label", map);
  write_text(out_prefix + ".weather", std::string(weather_name(*mode)) + "\n");
  std::cout << mode_name << ": " << cloud.size() << " -> " << corrupted.size()
            << " points, written to " << out_prefix << ".{bin,label,weather}\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& data,
              const std::string& out, const std::string& curve_path,
              const CommonOpts& common) {
  TrainConfig cfg;
  if (!config_path.empty()) cfg = parse_train_config(config_path);

  std::vector<PointCloud> dataset;
  if (data == "toy") {
    dataset = generate_toy(cfg.toy, ToySplit::train, cfg.seed);
  } else {
    LabelMap storage = LabelMap::semantic_kitti();
    const LabelMap& map = resolve_labelmap(common, storage);
    dataset = load_directory(data, map, /*require_labels=*/true);
  }

  std::cout << "training " << (cfg.pipeline == Pipeline::pointdr ? "pointdr" : "ce")
            << " on " << dataset.size() << " scans, " << cfg.epochs
            << " epochs, kernels=" << kern::backend_name(kern::active_backend())
            << "\n";
  TrainRun run = train(cfg, dataset);
  save_checkpoint(out, run.state.model, run.state.bank);
  const std::string curve_file =
      curve_path.empty() ? out + ".curve.csv" : curve_path;
  write_text(curve_file, curve_csv(run.curve));
  const EpochStats& last = run.curve.back();
  std::cout << "final epoch: ce=" << last.ce << " ct=" << last.ct
            << " total=" << last.total << "\ncheckpoint: " << out
            << "\ncurve: " << curve_file << "\n";
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& data,
             const std::string& out, std::uint64_t seed,
             const CommonOpts& common) {
  LabelMap storage = LabelMap::semantic_kitti();
  const LabelMap& map = resolve_labelmap(common, storage);
  const Checkpoint cp = load_checkpoint(ckpt);

  std::vector<PointCloud> scans;
  if (data == "toy") {
    // Clean validation scenes plus one corrupted copy per weather mode.
    TrainConfig defaults;
    const auto val = generate_toy(defaults.toy, ToySplit::val, seed);
    scans = val;
    const Weather modes[] = {Weather::dense_fog, Weather::light_fog,
                             Weather::rain, Weather::snow};
    for (const Weather mode : modes) {
      for (std::size_t i = 0; i < val.size(); ++i) {
        scans.push_back(corrupt(val[i], WeatherConfig::preset(mode),
                                derive_seed(seed, kEvalWeatherStream,
                                            (static_cast<std::uint64_t>(mode) << 32) | i)));
      }
    }
  } else {
    scans = load_directory(data, map, /*require_labels=*/true);
  }

  const auto groups = evaluate_by_weather(cp.model, scans);
  std::vector<std::string_view> names;
  for (std::size_t c = 0; c < cp.model.config().num_classes; ++c) {
    names.push_back(map.class_name(static_cast<TrainId>(c)));
  }
  std::cout << render_report_text(groups, names);
  write_text(out, render_report_csv(groups, names));
  std::cout << "report: " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain-randomized contrastive training for LiDAR point-cloud "
               "semantic segmentation"};
  app.require_subcommand(1);
  CommonOpts common;
  app.add_option("--labelmap", common.labelmap,
                 "label map file (default: built-in SemanticKITTI)");

  auto* aug = app.add_subcommand("augment", "write one randomized view of a scan");
  std::string aug_in, aug_out, aug_view = "weak", aug_labels, aug_labels_out;
  std::uint64_t aug_seed = 0;
  aug->add_option("--in", aug_in, "input scan (.bin)")->required();
  aug->add_option("--out", aug_out, "output scan (.bin)")->required();
  aug->add_option("--seed", aug_seed, "random seed")->required();
  aug->add_option("--view", aug_view, "weak|strong")
      ->check(CLI::IsMember({"weak", "strong"}));
  aug->add_option("--labels", aug_labels, "input labels (.label)");
  aug->add_option("--out-labels", aug_labels_out, "output labels (.label)");

  auto* sim = app.add_subcommand("simulate", "corrupt a labeled scan with synthetic weather");
  std::string sim_mode, sim_in, sim_labels, sim_prefix;
  std::uint64_t sim_seed = 0;
  sim->add_option("--mode", sim_mode, "dense_fog|light_fog|rain|snow|clear")->required();
  sim->add_option("--in", sim_in, "input scan (.bin)")->required();
  sim->add_option("--labels", sim_labels, "input labels (.label)")->required();
  sim->add_option("--seed", sim_seed, "random seed")->required();
  sim->add_option("--out-prefix", sim_prefix, "output prefix")->required();

  auto* tr = app.add_subcommand("train", "train a model");
  std::string tr_config, tr_data = "toy", tr_out, tr_curve;
  tr->add_option("--config", tr_config, "key = value config file");
  tr->add_option("--data", tr_data, "data directory, or 'toy'");
  tr->add_option("--out", tr_out, "output checkpoint")->required();
  tr->add_option("--curve", tr_curve, "loss curve CSV (default <out>.curve.csv)");

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string ev_ckpt, ev_data = "toy", ev_out;
  std::uint64_t ev_seed = 1;
  ev->add_option("--ckpt", ev_ckpt, "checkpoint file")->required();
  ev->add_option("--data", ev_data, "data directory, or 'toy'");
  ev->add_option("--out", ev_out, "report CSV")->required();
  ev->add_option("--seed", ev_seed, "seed for toy corruption");

  CLI11_PARSE(app, argc, argv);

  try {
    if (aug->parsed()) {
      return cmd_augment(aug_in, aug_out, aug_view, aug_seed, aug_labels,
                         aug_labels_out, common);
    }
    if (sim->parsed()) {
      return cmd_simulate(sim_mode, sim_in, sim_labels, sim_seed, sim_prefix, common);
    }
    if (tr->parsed()) {
      return cmd_train(tr_config, tr_data, tr_out, tr_curve, common);
    }
    if (ev->parsed()) {
      return cmd_eval(ev_ckpt, ev_data, ev_out, ev_seed, common);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
