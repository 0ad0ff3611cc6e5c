#pragma once

// Adam training of the surrogate in three variants: post (sample-point loss
// only, OSC applied afterwards), e2e (full composite loss) and e2e-adaptive
// (full loss with collocation points moved between windows).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "splinecolloc/surrogate/mpnn.hpp"
#include "splinecolloc/surrogate/pipeline.hpp"
#include "splinecolloc/trajectory.hpp"

namespace splinecolloc::surrogate {

enum class Variant { Post, E2e, E2eAdaptive };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct TrainConfig {
  Variant variant = Variant::E2e;
  MpnnConfig model;
  PipelineConfig pipeline;
  std::size_t epochs = 200;
  std::size_t batch = 8;
  /// Rollouts drawn per epoch (without replacement from a seeded
  /// permutation of all training rollouts); 0 means all of them.
  std::size_t samples_per_epoch = 8;
  double learning_rate = 1e-3;
  double lr_decay = 0.85;
  std::size_t lr_decay_every = 500;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double divergence_limit = 1e6;
  /// Trajectories at the end of the dataset held out for evaluation.
  std::size_t eval_trajectories = 2;
  /// Rollout start frames used per evaluation trajectory.
  std::size_t eval_starts = 4;
  std::uint64_t seed = 0;
  /// 0 reads SPLINECOLLOC_THREADS (default 1).
  std::size_t threads = 0;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  LossTerms loss;
};

struct TrainResult {
  MpnnParams params;
  std::vector<double> channel_scale;
  std::vector<EpochMetrics> history;
  /// Mean per-rollout loss on the held-out rollouts after training.
  LossTerms eval;
};

/// Per-channel scale 1 / RMS over the dataset.
std::vector<double> channel_scales(const std::vector<datagen::Trajectory>& data);

/// Gradients of one rollout's training loss with respect to every tensor.
struct SampleGradient {
  LossTerms loss;
  std::vector<Matrix> grads;
};
SampleGradient sample_gradient(const Pipeline& pipe, const MpnnParams& p, Variant v,
                               const datagen::Trajectory& ref, std::size_t start);

TrainResult train(const std::vector<datagen::Trajectory>& data, const TrainConfig& cfg);

/// Mean loss over the evaluation rollouts of `data` (the held-out tail).
LossTerms evaluate(const Pipeline& pipe, const MpnnParams& p,
                   const std::vector<datagen::Trajectory>& data, const TrainConfig& cfg);

/// PipelineConfig with `adaptive` set from the variant.
PipelineConfig pipeline_for(const TrainConfig& cfg);

void write_metrics_csv(const std::vector<EpochMetrics>& history, std::ostream& out);

/// SPLINECOLLOC_THREADS, at least 1.
std::size_t thread_budget();

}  // namespace splinecolloc::surrogate
