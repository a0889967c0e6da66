#pragma once

#include <filesystem>

#include "pointdr/bank.hpp"
#include "pointdr/model.hpp"

namespace pointdr {

// Binary checkpoint, little-endian throughout:
//   magic "PDRC", version u32
//   feature_dim u32, embed_dim u32, num_classes u32
//   hidden-layer count u32, then each hidden width u32
//   voxel_size f64
//   feature-scale count u32, then each divisor f64
//   bank momentum f64
//   parameters as float32 in tensor order (encoder, projector, classifier;
//   w row-major then b per layer)
//   bank matrix as float32, D x C column-major, then C init-flag bytes
// Parameters are held in double precision in memory; serialization rounds
// to float32. Trailing or missing bytes raise FormatError.

struct Checkpoint {
  Model model;
  MemoryBank bank;
};

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const MemoryBank& bank);

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pointdr
