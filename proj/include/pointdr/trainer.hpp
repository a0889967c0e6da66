#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pointdr/augment.hpp"
#include "pointdr/bank.hpp"
#include "pointdr/losses.hpp"
#include "pointdr/metrics.hpp"
#include "pointdr/model.hpp"
#include "pointdr/optimizer.hpp"
#include "pointdr/toy.hpp"

namespace pointdr {

enum class Pipeline { ce_only, pointdr };
enum class Schedule { constant, poly };

// Flat training configuration. parse_train_config reads it from a
// `key = value` text file; unknown keys are rejected. The contrastive branch
// (strong views, bank maintenance, contrastive loss) runs only when the
// pipeline is pointdr AND lambda_ct is non-zero, so a pointdr run with
// lambda_ct = 0 follows the exact arithmetic of a ce_only run.
struct TrainConfig {
  Pipeline pipeline = Pipeline::pointdr;
  std::uint64_t seed = 1;
  std::size_t epochs = 20;
  std::size_t batch_scans = 2;

  double lr = 0.05;
  double momentum = 0.9;
  double weight_decay = 0.0;
  Schedule schedule = Schedule::poly;
  double poly_power = 0.9;

  double lambda_ct = 0.1;
  double tau = 0.07;
  double bank_momentum = 0.99;
  bool use_bank = true;      // false: keys are the batch's weak class means
  bool strong_gates = true;  // false: the strong view degenerates to weak

  ModelConfig model;
  AugmentConfig augment;
  ToyConfig toy;

  void validate() const;
};

TrainConfig parse_train_config(const std::filesystem::path& path);
TrainConfig parse_train_config_text(std::string_view text,
                                    std::string_view origin = "<config>");
std::string serialize_train_config(const TrainConfig& cfg);

// Mutable training state. Seeding is positional: the model draws from the
// config seed, and every scan's augmentation seed is derived from
// (config seed, epoch, dataset index), so runs are reproducible and the
// ce_only pipeline sees the same weak views as pointdr.
struct TrainState {
  Model model;
  MemoryBank bank;
  SgdOptimizer opt;
  std::uint64_t step = 0;
  std::uint64_t total_steps = 0;

  TrainState(const TrainConfig& cfg, std::size_t dataset_size);
};

struct BatchItem {
  const PointCloud* scan = nullptr;
  std::uint64_t scan_seed = 0;
};

std::uint64_t scan_seed(const TrainConfig& cfg, std::size_t epoch,
                        std::size_t dataset_index);

// One optimizer step over a batch: weak views feed the classification loss,
// and, on the contrastive branch, weak class means update the bank before
// the strong embeddings are scored against it.
LossBreakdown train_step(TrainState& state, const TrainConfig& cfg,
                         std::span<const BatchItem> batch);

struct EpochStats {
  std::size_t epoch = 0;
  double ce = 0.0;     // means over the epoch's steps
  double ct = 0.0;
  double total = 0.0;
  double lr = 0.0;     // learning rate applied at the epoch's last step
};

struct TrainRun {
  TrainState state;
  std::vector<EpochStats> curve;
};

TrainRun train(const TrainConfig& cfg, std::span<const PointCloud> dataset);

// "epoch,ce,ct,total,lr" CSV.
std::string curve_csv(std::span<const EpochStats> curve);

// Argmax evaluation of labeled scans.
EvalReport evaluate(const Model& model, std::span<const PointCloud> scans);

// Groups scans by weather tag (untagged scans count as clear), in a fixed
// order: clear, dense_fog, light_fog, rain, snow; empty groups are dropped.
std::vector<std::pair<std::string, EvalReport>> evaluate_by_weather(
    const Model& model, std::span<const PointCloud> scans);

}  // namespace pointdr
