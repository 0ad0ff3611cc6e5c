#pragma once

// JSON checkpoints: model shape, pipeline settings, channel scales and every
// tensor as a row-major array.

#include <string>
#include <vector>

#include "splinecolloc/surrogate/mpnn.hpp"
#include "splinecolloc/surrogate/train.hpp"

namespace splinecolloc::surrogate {

struct Checkpoint {
  MpnnParams params;
  PipelineConfig pipeline;
  Variant variant = Variant::E2e;
  std::vector<double> channel_scale;
};

std::string checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace splinecolloc::surrogate
