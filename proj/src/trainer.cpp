#include "pointdr/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "pointdr/errors.hpp"
#include "pointdr/kernels.hpp"
#include "pointdr/rng.hpp"
#include "pointdr/voxel.hpp"

namespace pointdr {
namespace {

constexpr std::uint64_t kModelStream = 0x3017;
constexpr std::uint64_t kAugStream = 0x0a06;
constexpr std::uint64_t kShuffleStream = 0x5f1e;

double scheduled_lr(const TrainConfig& cfg, std::uint64_t step,
                    std::uint64_t total) {
  if (cfg.schedule == Schedule::poly) {
    return poly_lr(cfg.lr, step, total, cfg.poly_power);
  }
  return cfg.lr;
}

void append_view_features(const PointCloud& view, double voxel_size,
                          std::vector<double>& feats,
                          std::vector<TrainId>& labels) {
  const VoxelGrid grid(view, voxel_size);
  const auto f = featurize(view, grid);
  feats.insert(feats.end(), f.begin(), f.end());
  labels.insert(labels.end(), view.labels.begin(), view.labels.end());
}

// --- config text format ---------------------------------------------------

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return std::isspace(c) == 0; };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": bad number '" + value + "'");
  }
  if (used != value.size()) {
    throw std::invalid_argument("config key " + key + ": bad number '" + value + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  // stoull would wrap "-3" around instead of failing.
  if (value.empty() || value[0] == '-' || value[0] == '+') {
    throw std::invalid_argument("config key " + key + ": bad integer '" + value + "'");
  }
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": bad integer '" + value + "'");
  }
  if (used != value.size()) {
    throw std::invalid_argument("config key " + key + ": bad integer '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw std::invalid_argument("config key " + key + ": bad boolean '" + value + "'");
}

std::vector<std::size_t> parse_size_list(const std::string& key,
                                         const std::string& value) {
  std::vector<std::size_t> out;
  if (trim(value).empty()) return out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(static_cast<std::size_t>(parse_u64(key, trim(item))));
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs == 0) throw std::invalid_argument("epochs must be > 0");
  if (batch_scans == 0) throw std::invalid_argument("batch_scans must be > 0");
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw std::invalid_argument("lr must be non-negative");
  }
  if (!(poly_power > 0.0) || !std::isfinite(poly_power)) {
    throw std::invalid_argument("poly_power must be positive");
  }
  if (!(lambda_ct >= 0.0) || !std::isfinite(lambda_ct)) {
    throw std::invalid_argument("lambda_ct must be non-negative");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("tau must be positive");
  }
  SgdConfig{momentum, weight_decay}.validate();
  if (!(bank_momentum >= 0.0 && bank_momentum < 1.0)) {
    throw std::invalid_argument("bank_momentum outside [0, 1)");
  }
  model.validate();
  augment.validate();
  toy.validate();
}

TrainConfig parse_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_train_config_text(ss.str(), path.string());
}

TrainConfig parse_train_config_text(std::string_view text,
                                    std::string_view origin) {
  TrainConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(std::string(origin) + ":" +
                                  std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "pipeline") {
      if (value == "pointdr") {
        cfg.pipeline = Pipeline::pointdr;
      } else if (value == "ce") {
        cfg.pipeline = Pipeline::ce_only;
      } else {
        throw std::invalid_argument("config key pipeline: expected pointdr|ce");
      }
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, value);
    } else if (key == "epochs") {
      cfg.epochs = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "batch_scans") {
      cfg.batch_scans = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "lr") {
      cfg.lr = parse_double(key, value);
    } else if (key == "momentum") {
      cfg.momentum = parse_double(key, value);
    } else if (key == "weight_decay") {
      cfg.weight_decay = parse_double(key, value);
    } else if (key == "schedule") {
      if (value == "poly") {
        cfg.schedule = Schedule::poly;
      } else if (value == "constant") {
        cfg.schedule = Schedule::constant;
      } else {
        throw std::invalid_argument("config key schedule: expected poly|constant");
      }
    } else if (key == "poly_power") {
      cfg.poly_power = parse_double(key, value);
    } else if (key == "lambda_ct") {
      cfg.lambda_ct = parse_double(key, value);
    } else if (key == "tau") {
      cfg.tau = parse_double(key, value);
    } else if (key == "bank_momentum") {
      cfg.bank_momentum = parse_double(key, value);
    } else if (key == "use_bank") {
      cfg.use_bank = parse_bool(key, value);
    } else if (key == "strong_gates") {
      cfg.strong_gates = parse_bool(key, value);
    } else if (key == "embed_dim") {
      cfg.model.embed_dim = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "encoder_hidden") {
      cfg.model.encoder_hidden = parse_size_list(key, value);
    } else if (key == "num_classes") {
      cfg.model.num_classes = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "voxel_size") {
      cfg.model.voxel_size = parse_double(key, value);
    } else if (key == "rotation_min") {
      cfg.augment.rotation_deg.lo = parse_double(key, value);
    } else if (key == "rotation_max") {
      cfg.augment.rotation_deg.hi = parse_double(key, value);
    } else if (key == "scale_min") {
      cfg.augment.scale.lo = parse_double(key, value);
    } else if (key == "scale_max") {
      cfg.augment.scale.hi = parse_double(key, value);
    } else if (key == "dropout_prob") {
      cfg.augment.dropout_prob = parse_double(key, value);
    } else if (key == "dropout_min") {
      cfg.augment.dropout_frac.lo = parse_double(key, value);
    } else if (key == "dropout_max") {
      cfg.augment.dropout_frac.hi = parse_double(key, value);
    } else if (key == "noise_prob") {
      cfg.augment.noise_prob = parse_double(key, value);
    } else if (key == "noise_min") {
      cfg.augment.noise_count_min = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "noise_max") {
      cfg.augment.noise_count_max = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "flip_prob") {
      cfg.augment.flip_prob = parse_double(key, value);
    } else if (key == "jitter_prob") {
      cfg.augment.jitter_prob = parse_double(key, value);
    } else if (key == "jitter_min") {
      cfg.augment.jitter.lo = parse_double(key, value);
    } else if (key == "jitter_max") {
      cfg.augment.jitter.hi = parse_double(key, value);
    } else if (key == "toy_train_scenes") {
      cfg.toy.train_scenes = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "toy_val_scenes") {
      cfg.toy.val_scenes = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "toy_ground_points") {
      cfg.toy.ground_points = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "toy_vehicles") {
      cfg.toy.vehicles = static_cast<std::size_t>(parse_u64(key, value));
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

std::string serialize_train_config(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "pipeline = " << (cfg.pipeline == Pipeline::pointdr ? "pointdr" : "ce") << "\n"
      << "seed = " << cfg.seed << "\n"
      << "epochs = " << cfg.epochs << "\n"
      << "batch_scans = " << cfg.batch_scans << "\n"
      << "lr = " << cfg.lr << "\n"
      << "momentum = " << cfg.momentum << "\n"
      << "weight_decay = " << cfg.weight_decay << "\n"
      << "schedule = " << (cfg.schedule == Schedule::poly ? "poly" : "constant") << "\n"
      << "poly_power = " << cfg.poly_power << "\n"
      << "lambda_ct = " << cfg.lambda_ct << "\n"
      << "tau = " << cfg.tau << "\n"
      << "bank_momentum = " << cfg.bank_momentum << "\n"
      << "use_bank = " << (cfg.use_bank ? 1 : 0) << "\n"
      << "strong_gates = " << (cfg.strong_gates ? 1 : 0) << "\n"
      << "embed_dim = " << cfg.model.embed_dim << "\n"
      << "encoder_hidden = ";
  for (std::size_t i = 0; i < cfg.model.encoder_hidden.size(); ++i) {
    out << (i > 0 ? "," : "") << cfg.model.encoder_hidden[i];
  }
  out << "\n"
      << "num_classes = " << cfg.model.num_classes << "\n"
      << "voxel_size = " << cfg.model.voxel_size << "\n"
      << "rotation_min = " << cfg.augment.rotation_deg.lo << "\n"
      << "rotation_max = " << cfg.augment.rotation_deg.hi << "\n"
      << "scale_min = " << cfg.augment.scale.lo << "\n"
      << "scale_max = " << cfg.augment.scale.hi << "\n"
      << "dropout_prob = " << cfg.augment.dropout_prob << "\n"
      << "dropout_min = " << cfg.augment.dropout_frac.lo << "\n"
      << "dropout_max = " << cfg.augment.dropout_frac.hi << "\n"
      << "noise_prob = " << cfg.augment.noise_prob << "\n"
      << "noise_min = " << cfg.augment.noise_count_min << "\n"
      << "noise_max = " << cfg.augment.noise_count_max << "\n"
      << "flip_prob = " << cfg.augment.flip_prob << "\n"
      << "jitter_prob = " << cfg.augment.jitter_prob << "\n"
      << "jitter_min = " << cfg.augment.jitter.lo << "\n"
      << "jitter_max = " << cfg.augment.jitter.hi << "\n"
      << "toy_train_scenes = " << cfg.toy.train_scenes << "\n"
      << "toy_val_scenes = " << cfg.toy.val_scenes << "\n"
      << "toy_ground_points = " << cfg.toy.ground_points << "\n"
      << "toy_vehicles = " << cfg.toy.vehicles << "\n";
  return out.str();
}

// --- training -------------------------------------------------------------

TrainState::TrainState(const TrainConfig& cfg, std::size_t dataset_size)
    : model(cfg.model, derive_seed(cfg.seed, kModelStream)),
      bank(cfg.model.embed_dim, cfg.model.num_classes, cfg.bank_momentum),
      opt(SgdConfig{cfg.momentum, cfg.weight_decay}) {
  const std::size_t per_epoch =
      dataset_size == 0 ? 0 : (dataset_size + cfg.batch_scans - 1) / cfg.batch_scans;
  total_steps = cfg.epochs * per_epoch;
  if (total_steps == 0) total_steps = 1;
}

std::uint64_t scan_seed(const TrainConfig& cfg, std::size_t epoch,
                        std::size_t dataset_index) {
  return derive_seed(cfg.seed, kAugStream,
                     (static_cast<std::uint64_t>(epoch) << 32) | dataset_index);
}

LossBreakdown train_step(TrainState& state, const TrainConfig& cfg,
                         std::span<const BatchItem> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const std::size_t classes = cfg.model.num_classes;
  const std::size_t dim = cfg.model.embed_dim;
  const bool contrastive =
      cfg.pipeline == Pipeline::pointdr && cfg.lambda_ct != 0.0;

  std::vector<double> weak_feats, strong_feats;
  std::vector<TrainId> weak_labels, strong_labels;
  const AugmentConfig strong_cfg =
      cfg.strong_gates ? cfg.augment : cfg.augment.without_strong_ops();
  for (const BatchItem& item : batch) {
    if (item.scan == nullptr) throw std::invalid_argument("null scan in batch");
    if (!item.scan->has_labels()) {
      throw std::invalid_argument("training scans must be labeled");
    }
    const PointCloud weak =
        weak_view(*item.scan, cfg.augment, derive_seed(item.scan_seed, 0));
    append_view_features(weak, cfg.model.voxel_size, weak_feats, weak_labels);
    if (contrastive) {
      const StrongView strong =
          strong_view(*item.scan, strong_cfg, derive_seed(item.scan_seed, 1));
      append_view_features(strong.cloud, cfg.model.voxel_size, strong_feats,
                           strong_labels);
    }
  }

  const std::size_t wn = weak_labels.size();
  const ForwardPass weak_pass = state.model.forward(weak_feats, wn);
  const CrossEntropyResult ce =
      softmax_cross_entropy(weak_pass.logits(), wn, classes, weak_labels);

  state.model.zero_grad();
  state.model.backward(weak_pass, {}, ce.grad);

  double ct_loss = 0.0;
  if (contrastive) {
    const std::size_t sn = strong_labels.size();
    const ForwardPass strong_pass = state.model.forward(strong_feats, sn);
    const ClassAverage avg =
        class_average(weak_pass.embeddings(), wn, dim, weak_labels, classes);
    PrototypeView keys;
    if (cfg.use_bank) {
      state.bank.update(avg);  // no gradient flows into the bank
      keys = state.bank.view();
    } else {
      keys = avg.view();
    }
    ContrastiveResult ct = contrastive_loss(strong_pass.embeddings(), sn, dim,
                                            strong_labels, keys, cfg.tau);
    ct_loss = ct.loss;
    kern::ops().scale(ct.grad.data(), ct.grad.size(), cfg.lambda_ct);
    state.model.backward(strong_pass, ct.grad, {});
  }

  const double lr = scheduled_lr(cfg, state.step, state.total_steps);
  state.opt.step(state.model, lr);
  state.step += 1;

  return combine_losses(ce.loss, ct_loss, contrastive ? cfg.lambda_ct : 0.0);
}

TrainRun train(const TrainConfig& cfg, std::span<const PointCloud> dataset) {
  cfg.validate();
  if (dataset.empty()) throw std::invalid_argument("empty training dataset");
  TrainState state(cfg, dataset.size());
  std::vector<EpochStats> curve;
  curve.reserve(cfg.epochs);

  std::vector<std::uint32_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0u);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream, epoch));
    shuffle_rng.shuffle(order);

    EpochStats stats;
    stats.epoch = epoch;
    std::size_t steps = 0;
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_scans) {
      std::vector<BatchItem> batch;
      const std::size_t e = std::min(order.size(), b + cfg.batch_scans);
      for (std::size_t i = b; i < e; ++i) {
        batch.push_back({&dataset[order[i]], scan_seed(cfg, epoch, order[i])});
      }
      stats.lr = scheduled_lr(cfg, state.step, state.total_steps);
      const LossBreakdown lb = train_step(state, cfg, batch);
      stats.ce += lb.ce;
      stats.ct += lb.ct;
      stats.total += lb.total;
      steps += 1;
    }
    stats.ce /= static_cast<double>(steps);
    stats.ct /= static_cast<double>(steps);
    stats.total /= static_cast<double>(steps);
    curve.push_back(stats);
  }
  return TrainRun{std::move(state), std::move(curve)};
}

std::string curve_csv(std::span<const EpochStats> curve) {
  std::string out = "epoch,ce,ct,total,lr\n";
  char buf[160];
  for (const EpochStats& e : curve) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,%.9g\n", e.epoch, e.ce,
                  e.ct, e.total, e.lr);
    out += buf;
  }
  return out;
}

// --- evaluation -----------------------------------------------------------

EvalReport evaluate(const Model& model, std::span<const PointCloud> scans) {
  EvalReport report(model.config().num_classes);
  for (const PointCloud& scan : scans) {
    if (!scan.has_labels()) {
      throw std::invalid_argument("evaluation scans must be labeled");
    }
    if (scan.points.empty()) continue;
    const VoxelGrid grid(scan, model.config().voxel_size);
    const auto feats = featurize(scan, grid);
    const ForwardPass pass = model.forward(feats, scan.size());
    const auto preds =
        argmax_labels(pass.logits(), scan.size(), model.config().num_classes);
    report.accumulate(preds, scan.labels);
  }
  return report;
}

std::vector<std::pair<std::string, EvalReport>> evaluate_by_weather(
    const Model& model, std::span<const PointCloud> scans) {
  constexpr std::array<Weather, 5> kOrder = {Weather::clear, Weather::dense_fog,
                                             Weather::light_fog, Weather::rain,
                                             Weather::snow};
  std::vector<std::pair<std::string, EvalReport>> groups;
  for (const Weather w : kOrder) {
    std::vector<PointCloud> subset;
    for (const PointCloud& scan : scans) {
      if (scan.weather.value_or(Weather::clear) == w) subset.push_back(scan);
    }
    if (subset.empty()) continue;
    groups.emplace_back(std::string(weather_name(w)), evaluate(model, subset));
  }
  return groups;
}

}  // namespace pointdr
