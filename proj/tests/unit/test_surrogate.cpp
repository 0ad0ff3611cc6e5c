#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "splinecolloc/datagen.hpp"
#include "splinecolloc/errors.hpp"
#include "splinecolloc/surrogate/checkpoint.hpp"
#include "splinecolloc/surrogate/mpnn.hpp"
#include "splinecolloc/surrogate/pipeline.hpp"
#include "splinecolloc/surrogate/train.hpp"

using namespace splinecolloc;
using namespace splinecolloc::surrogate;

namespace {

std::vector<double> uniform(std::size_t cells) {
  std::vector<double> v(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) v[i] = static_cast<double>(i) / static_cast<double>(cells);
  return v;
}

MpnnConfig small_model(std::size_t channels = 1) {
  MpnnConfig m;
  m.channels = channels;
  m.hidden = 8;
  return m;
}

void randomize_biases(MpnnParams& p, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (auto* t : p.tensors())
    if (t->rows() == 1)
      for (Eigen::Index i = 0; i < t->size(); ++i) t->data()[i] = u(rng);
}

// Spatially constant, linear in time, zero-Neumann walls: every stage of the
// pipeline represents it exactly.
datagen::Trajectory ramp_trajectory(std::size_t frames) {
  std::vector<double> times(frames);
  std::iota(times.begin(), times.end(), 0.0);
  datagen::Trajectory t(times, {"u"}, 16, 16, {}, datagen::Boundary::NeumannZero);
  for (std::size_t f = 0; f < frames; ++f) t.frame(f, 0).setConstant(0.5 + 0.1 * static_cast<double>(f));
  return t;
}

PipelineConfig toy_pipeline() {
  PipelineConfig pc;
  pc.cells = 3;
  pc.steps = 2;
  pc.stride = 2;
  pc.time_order = 2;
  pc.windows = 1;
  return pc;
}

datagen::Trajectory toy_heat() {
  return datagen::heat_solve(datagen::gaussian_bumps(16, 3), {0.01, 0.1, 8, 0.25});
}

}  // namespace

TEST(Mpnn, ZeroWeightsAreIdentity) {
  const auto g = grid_graph(osc::PointLayout::tensor(uniform(3), uniform(3)));
  const auto p = MpnnParams::zeros(small_model(2));
  Matrix s = Matrix::Random(static_cast<Eigen::Index>(g.node_count()), 2);
  EXPECT_EQ(mpnn_step(p, g, s), s);
  for (const auto& f : rollout(p, g, s, 4)) EXPECT_EQ(f, s);
}

TEST(Mpnn, ShapesAndFiniteness) {
  const auto g = grid_graph(osc::PointLayout::tensor(uniform(2), uniform(4)));
  const auto p = MpnnParams::glorot(small_model(2), 1);
  const Matrix s = Matrix::Random(static_cast<Eigen::Index>(g.node_count()), 2);
  const Matrix out = mpnn_step(p, g, s);
  EXPECT_EQ(out.rows(), s.rows());
  EXPECT_EQ(out.cols(), 2);
  EXPECT_TRUE(out.allFinite());
  EXPECT_THROW(mpnn_step(p, g, Matrix::Zero(3, 2)), DimensionMismatch);
  EXPECT_EQ(p.tensor_names().size(), p.tensors().size());
}

TEST(Mpnn, GraphStructure) {
  const auto l = osc::PointLayout::tensor(uniform(2), uniform(2));
  const auto g = grid_graph(l);
  const std::size_t n = l.nx_points();
  EXPECT_EQ(g.node_count(), n * n);
  EXPECT_EQ(g.edge_count(), 4 * n * (n - 1));
  for (std::size_t e = 1; e < g.edge_count(); ++e) EXPECT_LE((*g.dst)[e - 1], (*g.dst)[e]);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Eigen::Vector2d d = g.nodes[(*g.src)[e]] - g.nodes[(*g.dst)[e]];
    EXPECT_EQ(g.edge_features(static_cast<Eigen::Index>(e), 0), d.x());
    EXPECT_EQ(g.edge_features(static_cast<Eigen::Index>(e), 1), d.y());
  }
}

TEST(Mpnn, PermutationEquivariance) {
  const auto l = osc::PointLayout::tensor(uniform(2), uniform(3));
  const auto g = grid_graph(l);
  const std::size_t n = g.node_count();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(4));
  std::vector<std::size_t> where(n);
  for (std::size_t k = 0; k < n; ++k) where[perm[k]] = k;

  std::vector<Eigen::Vector2d> nodes(n);
  for (std::size_t k = 0; k < n; ++k) nodes[k] = g.nodes[perm[k]];
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    if ((*g.src)[e] < (*g.dst)[e]) pairs.emplace_back(where[(*g.src)[e]], where[(*g.dst)[e]]);
  const auto gp = make_graph(nodes, pairs);
  ASSERT_EQ(gp.edge_count(), g.edge_count());

  auto p = MpnnParams::glorot(small_model(2), 3);
  randomize_biases(p, 2);
  const Matrix s = Matrix::Random(static_cast<Eigen::Index>(n), 2);
  Matrix sp(s.rows(), s.cols());
  for (std::size_t k = 0; k < n; ++k) sp.row(static_cast<Eigen::Index>(k)) = s.row(static_cast<Eigen::Index>(perm[k]));
  const Matrix out = mpnn_step(p, g, s), outp = mpnn_step(p, gp, sp);
  for (std::size_t k = 0; k < n; ++k)
    for (Eigen::Index c = 0; c < 2; ++c)
      EXPECT_EQ(outp(static_cast<Eigen::Index>(k), c), out(static_cast<Eigen::Index>(perm[k]), c));
}

TEST(Mpnn, RolloutMatchesRepeatedSteps) {
  const auto g = grid_graph(osc::PointLayout::tensor(uniform(3), uniform(3)));
  const auto p = MpnnParams::glorot(small_model(), 5);
  const Matrix s = Matrix::Random(static_cast<Eigen::Index>(g.node_count()), 1);
  const auto r = rollout(p, g, s, 3);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[1], mpnn_step(p, g, s));
  EXPECT_EQ(r[3], mpnn_step(p, g, mpnn_step(p, g, mpnn_step(p, g, s))));
  EXPECT_THROW(rollout(p, g, s, 0), InvalidArgument);
}

TEST(Pipeline, ExactPredictionHasZeroLoss) {
  const auto ref = ramp_trajectory(9);
  Pipeline pipe(toy_pipeline(), {1.0});
  std::vector<Matrix> pred;
  for (std::size_t k = 0; k <= 2; ++k) pred.push_back(pipe.reference_at(ref, pipe.base_layout(), k * 2));
  const auto t = pipe.window_loss(pred, ref, 0);
  EXPECT_EQ(t.L_s, 0.0);
  EXPECT_LT(t.L_i, 1e-24);
  EXPECT_EQ(t.L, t.L_s + t.L_i);
}

TEST(Pipeline, LossIsQuadraticInError) {
  const auto ref = ramp_trajectory(9);
  Pipeline pipe(toy_pipeline(), {1.0});
  std::vector<Matrix> one, two;
  for (std::size_t k = 0; k <= 2; ++k) {
    const Matrix exact = pipe.reference_at(ref, pipe.base_layout(), k * 2);
    const Matrix e = 0.01 * Matrix::Random(exact.rows(), exact.cols());
    one.push_back(exact + e);
    two.push_back(exact + 2 * e);
  }
  const auto a = pipe.window_loss(one, ref, 0), b = pipe.window_loss(two, ref, 0);
  EXPECT_NEAR(b.L_s / a.L_s, 4.0, 1e-9);
  EXPECT_NEAR(b.L_i / a.L_i, 4.0, 1e-6);
  EXPECT_NEAR(b.L / a.L, 4.0, 1e-6);
}

TEST(Pipeline, CompositeLossDecomposes) {
  const auto ref = toy_heat();
  auto pc = toy_pipeline();
  pc.windows = 2;
  Pipeline pipe(pc, {1.0});
  const auto p = MpnnParams::glorot(small_model(), 7);
  const auto t = pipe.evaluate(p, ref, 0);
  EXPECT_GT(t.L_s, 0.0);
  EXPECT_GT(t.L_i, 0.0);
  EXPECT_EQ(t.L, t.L_s + t.L_i);
  EXPECT_THROW(pipe.evaluate(p, ref, 1), InvalidArgument);
}

TEST(Pipeline, AdaptiveRolloutMovesPointsInsideCells) {
  const auto ref = toy_heat();
  auto pc = toy_pipeline();
  pc.windows = 2;
  pc.adaptive = true;
  Pipeline pipe(pc, {1.0});
  Tape tape;
  const auto p = MpnnParams::glorot(small_model(), 7);
  const auto bp = bind(tape, p);
  const auto out = pipe.forward(tape, bp, ref, 0);
  ASSERT_EQ(out.layouts.size(), 2u);
  const auto& a = out.layouts[0];
  const auto& b = out.layouts[1];
  const double beta = adaptive::default_beta(a);
  bool moved = false;
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    EXPECT_LE((b.points[k] - a.points[k]).norm(), beta * (1 + 1e-12));
    moved = moved || b.points[k] != a.points[k];
  }
  EXPECT_TRUE(moved);
  EXPECT_TRUE(std::isfinite(out.values.L));
}

TEST(Train, SamplePointGradientIgnoresSolves) {
  const auto ref = toy_heat();
  Pipeline pipe(toy_pipeline(), {1.0});
  auto p = MpnnParams::glorot(small_model(), 7);
  randomize_biases(p, 5);
  const auto sg = sample_gradient(pipe, p, Variant::Post, ref, 0);

  // Same loss built by hand with no spline nodes on the tape.
  Tape tape;
  const auto bp = bind(tape, p);
  const auto& layout = pipe.base_layout();
  Var state = tape.constant(pipe.reference_at(ref, layout, 0));
  std::vector<Var> terms;
  for (std::size_t k = 1; k <= 2; ++k) {
    state = mpnn_step(tape, bp, pipe.base_graph(), state);
    terms.push_back(tape.sum_squared_error(state, pipe.reference_at(ref, layout, 2 * k)));
  }
  const Var ls = tape.add(terms[0], terms[1]);
  tape.backward(ls);
  EXPECT_DOUBLE_EQ(sg.loss.L_s, tape.value(ls)(0, 0));
  for (std::size_t k = 0; k < bp.vars.size(); ++k)
    EXPECT_LT((sg.grads[k] - tape.grad(bp.vars[k])).cwiseAbs().maxCoeff(), 1e-12) << p.tensor_names()[k];
}

TEST(Train, EndToEndGradientMatchesFiniteDifferencesOnSample) {
  const auto ref = toy_heat();
  Pipeline pipe(toy_pipeline(), {1.0});
  auto p = MpnnParams::glorot(small_model(), 7);
  randomize_biases(p, 5);
  const auto sg = sample_gradient(pipe, p, Variant::E2e, ref, 0);
  double gmax = 0;
  for (const auto& g : sg.grads) gmax = std::max(gmax, g.cwiseAbs().maxCoeff());
  auto ts = p.tensors();
  for (std::size_t k = 0; k < ts.size(); ++k)
    for (Eigen::Index i = 0; i < ts[k]->size(); i += 13) {
      const double orig = ts[k]->data()[i], h = 1e-5;
      ts[k]->data()[i] = orig + h;
      const double lp = pipe.evaluate(p, ref, 0).L;
      ts[k]->data()[i] = orig - h;
      const double lm = pipe.evaluate(p, ref, 0).L;
      ts[k]->data()[i] = orig;
      const double fd = (lp - lm) / (2 * h), ad = sg.grads[k].data()[i];
      EXPECT_LE(std::abs(fd - ad) / std::max({std::abs(fd), std::abs(ad), 1e-6 * gmax}), 1e-4)
          << p.tensor_names()[k] << "[" << i << "]";
    }
}

TEST(Train, ConstantFieldIsLearned) {
  std::vector<datagen::Trajectory> data;
  for (int i = 0; i < 3; ++i) {
    datagen::Trajectory t(std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8}, {"u"}, 16, 16, {},
                          datagen::Boundary::NeumannZero);
    for (std::size_t f = 0; f < t.frames(); ++f) t.frame(f, 0).setConstant(0.2 + 0.3 * i);
    data.push_back(std::move(t));
  }
  TrainConfig cfg;
  cfg.model = small_model();
  cfg.pipeline = toy_pipeline();
  cfg.epochs = 50;
  cfg.eval_trajectories = 1;
  cfg.eval_starts = 2;
  cfg.learning_rate = 1e-2;
  const auto r = train(data, cfg);
  ASSERT_EQ(r.history.size(), 50u);
  EXPECT_LT(r.history.back().loss.L, 1e-2 * r.history.front().loss.L);
  EXPECT_LT(r.eval.L, 1e-2 * r.history.front().loss.L);
}

TEST(Train, DeterministicForFixedSeed) {
  datagen::DatasetConfig dc;
  dc.trajectories = 3;
  dc.grid = 16;
  dc.heat.steps = 10;
  const auto data = datagen::generate_dataset(dc);
  TrainConfig cfg;
  cfg.model = small_model();
  cfg.pipeline = toy_pipeline();
  cfg.epochs = 3;
  cfg.eval_trajectories = 1;
  cfg.threads = 1;
  const auto a = train(data, cfg), b = train(data, cfg);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t e = 0; e < a.history.size(); ++e) EXPECT_EQ(a.history[e].loss.L, b.history[e].loss.L);
  for (std::size_t k = 0; k < a.params.tensors().size(); ++k) EXPECT_EQ(*a.params.tensors()[k], *b.params.tensors()[k]);
  cfg.threads = 2;
  const auto c = train(data, cfg);
  for (std::size_t e = 0; e < a.history.size(); ++e) EXPECT_EQ(a.history[e].loss.L, c.history[e].loss.L);
}

TEST(Train, VariantNames) {
  for (auto v : {Variant::Post, Variant::E2e, Variant::E2eAdaptive}) EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_THROW(parse_variant("posthoc"), InvalidArgument);
}

TEST(Checkpoint, RoundTrip) {
  Checkpoint c;
  c.params = MpnnParams::glorot(small_model(2), 9);
  randomize_biases(c.params, 1);
  c.pipeline = toy_pipeline();
  c.pipeline.adaptive = true;
  c.variant = Variant::E2eAdaptive;
  c.channel_scale = {0.25, 1.0 / 3.0};
  const auto path = (std::filesystem::temp_directory_path() / "splinecolloc_ckpt_test.json").string();
  save_checkpoint(c, path);
  const auto d = load_checkpoint(path);
  std::remove(path.c_str());
  EXPECT_EQ(d.variant, c.variant);
  EXPECT_EQ(d.channel_scale, c.channel_scale);
  EXPECT_EQ(d.pipeline.cells, c.pipeline.cells);
  EXPECT_EQ(d.pipeline.adaptive, true);
  EXPECT_EQ(d.params.config.hidden, 8u);
  for (std::size_t k = 0; k < c.params.tensors().size(); ++k) EXPECT_EQ(*d.params.tensors()[k], *c.params.tensors()[k]);
}

TEST(Checkpoint, BadInputRejected) {
  EXPECT_THROW(load_checkpoint("/nonexistent/ckpt.json"), IoError);
  EXPECT_THROW(checkpoint_from_json("{not json"), IoError);
  EXPECT_THROW(checkpoint_from_json(R"({"format":"other","version":1})"), IoError);
}
