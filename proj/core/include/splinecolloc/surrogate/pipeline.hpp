#pragma once

// Rollout of the network on a coarse collocation layout, space-time OSC of
// the predicted frames, and the composite loss L = L_s + L_i.
//
// A rollout covers `windows` windows of `steps` network steps. Each network
// step advances `stride` reference frames. Inside a window the predicted
// frames are fitted in time (one spline per point and channel), evaluated at
// every reference frame of the window, fitted in space and compared with the
// fine reference grid. With adaptation on, the layout moves between windows
// and the next window starts from the predicted surface sampled at the moved
// points.

#include <cstddef>
#include <memory>
#include <vector>

#include "splinecolloc/adaptive.hpp"
#include "splinecolloc/osc1d.hpp"
#include "splinecolloc/osc2d.hpp"
#include "splinecolloc/surrogate/mpnn.hpp"
#include "splinecolloc/surrogate/tape.hpp"
#include "splinecolloc/trajectory.hpp"

namespace splinecolloc::surrogate {

struct PipelineConfig {
  /// Uniform cells per axis of the collocation layout (2 cells + 2 points).
  std::size_t cells = 5;
  std::size_t steps = 3;
  std::size_t stride = 2;
  std::size_t time_order = 3;
  std::size_t windows = 2;
  bool adaptive = false;
  /// Adapt after every n-th window.
  std::size_t adapt_every = 1;
  /// 0 selects half the smallest cell width.
  double beta = 0.0;
  /// A moved layout whose interpolation system is this much worse
  /// conditioned than the uniform one has its displacements halved (up to
  /// five times) before it is used; failing that, the layout stays put.
  double max_condition_growth = 100.0;
  /// Use every n-th fine grid point (per axis) for L_i.
  std::size_t fine_stride = 1;
  bool interp_loss = true;

  /// Reference frames covered by one rollout.
  std::size_t span() const noexcept { return windows * steps * stride; }
};

struct LossTerms {
  double L = 0.0;
  double L_s = 0.0;
  double L_i = 0.0;
};

struct LossVars {
  Var L, L_s, L_i;
  LossTerms values;
  /// Layout used by each window.
  std::vector<osc::PointLayout> layouts;
};

class Pipeline {
 public:
  /// channel_scale[c] multiplies reference channel c before it meets the
  /// network.
  Pipeline(PipelineConfig cfg, std::vector<double> channel_scale);

  const PipelineConfig& config() const noexcept { return cfg_; }
  const std::vector<double>& channel_scale() const noexcept { return scale_; }
  const osc::PointLayout& base_layout() const noexcept { return base_space_->layout(); }
  const GridGraph& base_graph() const noexcept { return base_graph_; }
  const osc::InterpSystem& time_system() const noexcept { return *time_; }

  /// Records the rollout starting at reference frame `start` on the tape.
  LossVars forward(Tape& tape, const BoundParams& p, const datagen::Trajectory& ref,
                   std::size_t start) const;
  LossTerms evaluate(const MpnnParams& p, const datagen::Trajectory& ref, std::size_t start) const;

  /// Composite loss of given predicted frames (steps + 1 of them, nodes x
  /// channels, first = initial) for a single window on the base layout.
  LossTerms window_loss(const std::vector<Matrix>& pred, const datagen::Trajectory& ref,
                        std::size_t start) const;

  /// Scaled reference values at the layout points: points x channels.
  Matrix reference_at(const datagen::Trajectory& ref, const osc::PointLayout& layout,
                      std::size_t frame) const;

 private:
  struct Window {
    Var coeffs;  // space coefficients, points x (channels * frames)
    bool has_coeffs = false;
  };
  Window window_terms(Tape& tape, const std::vector<Var>& frames,
                      const std::shared_ptr<const osc::Surface2dSystem>& space,
                      const datagen::Trajectory& ref, std::size_t f0, std::vector<Var>& li_terms,
                      bool need_coeffs, Var* time_coeffs) const;

  PipelineConfig cfg_;
  std::vector<double> scale_;
  std::shared_ptr<const osc::InterpSystem> time_;
  std::shared_ptr<const std::vector<std::size_t>> time_rows_;
  std::shared_ptr<const SparseMatrix> time_eval_;  // frames x time unknowns
  std::shared_ptr<const osc::Surface2dSystem> moved_system(
      const std::shared_ptr<const osc::Surface2dSystem>& from, const osc::PointLayout& to) const;

  std::shared_ptr<const osc::Surface2dSystem> base_space_;
  double base_condition_ = 0.0;
  GridGraph base_graph_;
};

}  // namespace splinecolloc::surrogate
