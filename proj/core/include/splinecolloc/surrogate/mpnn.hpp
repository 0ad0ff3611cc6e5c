#pragma once

// Encoder-processor-decoder message passing network on collocation grids.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "splinecolloc/osc2d.hpp"
#include "splinecolloc/surrogate/tape.hpp"

namespace splinecolloc::surrogate {

/// Directed graph with edges sorted by destination and, within one
/// destination, by (dx, dy). The order therefore does not depend on how the
/// nodes are numbered, which makes message aggregation exactly
/// permutation-equivariant.
struct GridGraph {
  std::vector<Eigen::Vector2d> nodes;
  std::shared_ptr<const std::vector<std::size_t>> src;
  std::shared_ptr<const std::vector<std::size_t>> dst;
  /// edges x 3: dx, dy, distance (source minus destination).
  Matrix edge_features;

  std::size_t node_count() const noexcept { return nodes.size(); }
  std::size_t edge_count() const noexcept { return src->size(); }
};

/// Both directions of every undirected pair.
GridGraph make_graph(std::vector<Eigen::Vector2d> nodes,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
/// 4-neighbour connectivity on the tensor structure of a layout.
GridGraph grid_graph(const osc::PointLayout& layout);

struct Linear {
  Matrix W;  // in x out
  Matrix b;  // 1 x out
};

struct Mlp {
  std::vector<Linear> layers;
};

struct MpnnConfig {
  std::size_t channels = 1;
  std::size_t hidden = 64;
  std::size_t processors = 3;
  std::size_t layers = 3;
};

struct MpnnParams {
  MpnnConfig config;
  Mlp encoder;                 // channels + 2 -> hidden
  std::vector<Mlp> edge_mlps;  // 2 hidden + 3 -> hidden
  std::vector<Mlp> node_mlps;  // 2 hidden -> hidden
  Mlp decoder;                 // hidden -> channels

  static MpnnParams zeros(const MpnnConfig& cfg);
  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static MpnnParams glorot(const MpnnConfig& cfg, std::uint64_t seed);

  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  std::vector<std::string> tensor_names() const;
  std::size_t parameter_count() const;
};

/// Parameters recorded as tape leaves, in tensors() order.
struct BoundParams {
  const MpnnParams* params = nullptr;
  std::vector<Var> vars;
};

/// Trainable leaves receive gradients; otherwise they are recorded as
/// constants.
BoundParams bind(Tape& tape, const MpnnParams& p, bool trainable = true);

/// state: nodes x channels. Returns state + decoder output.
Var mpnn_step(Tape& tape, const BoundParams& p, const GridGraph& g, Var state);
Matrix mpnn_step(const MpnnParams& p, const GridGraph& g, const Matrix& state);

/// steps + 1 frames, the first being `initial`.
std::vector<Matrix> rollout(const MpnnParams& p, const GridGraph& g, const Matrix& initial,
                            std::size_t steps);

}  // namespace splinecolloc::surrogate
