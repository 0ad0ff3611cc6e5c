#include "splinecolloc/surrogate/pipeline.hpp"

#include <numeric>

#include "splinecolloc/errors.hpp"

namespace splinecolloc::surrogate {

namespace {

std::vector<double> uniform_breakpoints(std::size_t cells) {
  std::vector<double> bp(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    bp[i] = static_cast<double>(i) / static_cast<double>(cells);
  return bp;
}

std::shared_ptr<const abd::AbdFactorization> factorization_of(
    const std::shared_ptr<const osc::Surface2dSystem>& s) {
  return {s, &s->factorization()};
}

std::shared_ptr<const std::vector<std::size_t>> identity_rows(std::size_t n) {
  auto rows = std::make_shared<std::vector<std::size_t>>(n);
  std::iota(rows->begin(), rows->end(), std::size_t{0});
  return rows;
}

// Rows map points (x, y) to surface values through the 16 Hermite weights.
std::shared_ptr<const SparseMatrix> surface_eval(const osc::Surface2dSystem& s,
                                                 const std::vector<Eigen::Vector2d>& pts) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(16 * pts.size());
  for (std::size_t r = 0; r < pts.size(); ++r) {
    const auto ew = s.eval_weights(pts[r].x(), pts[r].y());
    for (int k = 0; k < 16; ++k)
      if (ew.weight[k] != 0.0)
        trip.emplace_back(static_cast<int>(r), static_cast<int>(ew.index[k]), ew.weight[k]);
  }
  auto m = std::make_shared<SparseMatrix>(static_cast<Eigen::Index>(pts.size()),
                                          static_cast<Eigen::Index>(s.unknowns()));
  m->setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg, std::vector<double> channel_scale)
    : cfg_(cfg), scale_(std::move(channel_scale)) {
  if (cfg_.steps < 1 || cfg_.stride < 1 || cfg_.windows < 1 || cfg_.cells < 1 ||
      cfg_.fine_stride < 1 || cfg_.adapt_every < 1)
    throw InvalidArgument("PipelineConfig: steps, stride, windows, cells, fine_stride and "
                          "adapt_every must be positive");
  if (cfg_.time_order < 2 || (cfg_.steps - 1) % (cfg_.time_order - 1) != 0)
    throw InvalidArgument("PipelineConfig: steps + 1 frames must equal 2 + k (time_order - 1)");
  if (cfg_.adaptive && cfg_.steps * cfg_.stride < 2)
    throw InvalidArgument("PipelineConfig: adaptation needs a window of at least two frames");
  if (scale_.empty()) throw InvalidArgument("Pipeline: need at least one channel");

  std::vector<double> times(cfg_.steps + 1);
  for (std::size_t k = 0; k <= cfg_.steps; ++k) times[k] = static_cast<double>(k * cfg_.stride);
  time_ = std::make_shared<osc::InterpSystem>(times, cfg_.time_order);
  time_rows_ = std::make_shared<std::vector<std::size_t>>(time_->sample_rows());

  const std::size_t nt = cfg_.steps * cfg_.stride;
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t tau = 1; tau <= nt; ++tau) {
    const auto ew = time_->eval_weights(static_cast<double>(tau));
    for (std::size_t j = 0; j < ew.w.size(); ++j)
      trip.emplace_back(static_cast<int>(tau - 1), static_cast<int>(ew.offset + j), ew.w[j]);
  }
  auto te = std::make_shared<SparseMatrix>(static_cast<Eigen::Index>(nt),
                                           static_cast<Eigen::Index>(time_->unknowns()));
  te->setFromTriplets(trip.begin(), trip.end());
  time_eval_ = std::move(te);

  const auto bp = uniform_breakpoints(cfg_.cells);
  base_space_ = std::make_shared<osc::Surface2dSystem>(osc::PointLayout::tensor(bp, bp));
  base_condition_ = abd::condition_estimate(base_space_->matrix(), base_space_->factorization());
  base_graph_ = grid_graph(base_space_->layout());
}

std::shared_ptr<const osc::Surface2dSystem> Pipeline::moved_system(
    const std::shared_ptr<const osc::Surface2dSystem>& from, const osc::PointLayout& to) const {
  osc::PointLayout layout = to;
  for (int attempt = 0; attempt < 6; ++attempt) {
    try {
      auto sys = std::make_shared<const osc::Surface2dSystem>(layout);
      if (abd::condition_estimate(sys->matrix(), sys->factorization()) <=
          cfg_.max_condition_growth * base_condition_)
        return sys;
    } catch (const SingularMatrix&) {
    }
    for (std::size_t k = 0; k < layout.points.size(); ++k)
      layout.points[k] = 0.5 * (layout.points[k] + from->layout().points[k]);
  }
  return from;
}

Matrix Pipeline::reference_at(const datagen::Trajectory& ref, const osc::PointLayout& layout,
                              std::size_t frame) const {
  if (ref.channel_count() != scale_.size())
    throw DimensionMismatch("Pipeline: trajectory channel count differs from the model's");
  Matrix out(static_cast<Eigen::Index>(layout.points.size()),
             static_cast<Eigen::Index>(scale_.size()));
  for (std::size_t c = 0; c < scale_.size(); ++c) {
    const datagen::GridSampler sample(ref, frame, c);
    for (std::size_t k = 0; k < layout.points.size(); ++k)
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) =
          scale_[c] * sample(layout.points[k].x(), layout.points[k].y());
  }
  return out;
}

Pipeline::Window Pipeline::window_terms(Tape& tape, const std::vector<Var>& frames,
                                        const std::shared_ptr<const osc::Surface2dSystem>& space,
                                        const datagen::Trajectory& ref, std::size_t f0,
                                        std::vector<Var>& li_terms, bool need_coeffs,
                                        Var* time_coeffs) const {
  Window w;
  if (!cfg_.interp_loss && !need_coeffs) return w;
  const auto n = static_cast<Eigen::Index>(space->points());
  const auto ch = static_cast<Eigen::Index>(scale_.size());
  const auto nt = static_cast<Eigen::Index>(cfg_.steps * cfg_.stride);

  std::vector<Var> rows;
  for (Var f : frames) rows.push_back(tape.reshape(f, 1, n * ch));
  const Var T = tape.osc_solve(tape.concat_rows(rows),
                               {time_, &time_->factorization()}, time_rows_);
  if (time_coeffs) *time_coeffs = T;
  const Var V = tape.sparse_map(T, time_eval_);  // nt x (n ch)
  const Var W = tape.reshape(tape.transpose(V), n, ch * nt);
  w.coeffs = tape.osc_solve(W, factorization_of(space), identity_rows(space->points()));
  w.has_coeffs = true;

  if (cfg_.interp_loss) {
    std::vector<Eigen::Vector2d> fine;
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t j = 0; j < ref.ny(); j += cfg_.fine_stride)
      for (std::size_t i = 0; i < ref.nx(); i += cfg_.fine_stride) {
        fine.emplace_back(ref.x(i), ref.y(j));
        cells.emplace_back(j, i);
      }
    Matrix target(static_cast<Eigen::Index>(fine.size()), ch * nt);
    for (Eigen::Index c = 0; c < ch; ++c)
      for (Eigen::Index tau = 1; tau <= nt; ++tau) {
        const auto frame = ref.frame(f0 + static_cast<std::size_t>(tau), static_cast<std::size_t>(c));
        for (std::size_t r = 0; r < fine.size(); ++r)
          target(static_cast<Eigen::Index>(r), c * nt + tau - 1) =
              scale_[static_cast<std::size_t>(c)] *
              frame(static_cast<Eigen::Index>(cells[r].first),
                    static_cast<Eigen::Index>(cells[r].second));
      }
    li_terms.push_back(
        tape.sum_squared_error(tape.sparse_map(w.coeffs, surface_eval(*space, fine)), target));
  }
  return w;
}

LossVars Pipeline::forward(Tape& tape, const BoundParams& p, const datagen::Trajectory& ref,
                           std::size_t start) const {
  if (p.params->config.channels != scale_.size())
    throw DimensionMismatch("Pipeline: model channel count differs from the data's");
  if (start + cfg_.span() >= ref.frames())
    throw InvalidArgument("Pipeline: rollout runs past the end of the trajectory");

  auto space = base_space_;
  GridGraph graph = base_graph_;
  LossVars out;
  std::vector<Var> ls_terms, li_terms;
  Var state = tape.constant(reference_at(ref, space->layout(), start));
  const std::size_t nt = cfg_.steps * cfg_.stride;

  for (std::size_t w = 0; w < cfg_.windows; ++w) {
    out.layouts.push_back(space->layout());
    const std::size_t f0 = start + w * nt;
    std::vector<Var> frames{state};
    for (std::size_t k = 1; k <= cfg_.steps; ++k) {
      frames.push_back(mpnn_step(tape, p, graph, frames.back()));
      ls_terms.push_back(tape.sum_squared_error(
          frames.back(), reference_at(ref, space->layout(), f0 + k * cfg_.stride)));
    }
    const bool last = w + 1 == cfg_.windows;
    const bool adapt = cfg_.adaptive && !last && (w + 1) % cfg_.adapt_every == 0;
    Var T;
    const Window win = window_terms(tape, frames, space, ref, f0, li_terms, adapt, &T);
    if (last) break;
    if (!adapt) {
      state = frames.back();
      continue;
    }

    // Rate of change of channel 0 one reference frame before the window end.
    const auto ch = static_cast<Eigen::Index>(scale_.size());
    const auto ew = time_->eval_weights(static_cast<double>(nt - 1), 1);
    Eigen::VectorXd rate = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->points()));
    const Matrix& tc = tape.value(T);
    for (std::size_t j = 0; j < ew.w.size(); ++j)
      for (Eigen::Index k = 0; k < rate.size(); ++k)
        rate(k) += ew.w[j] * tc(static_cast<Eigen::Index>(ew.offset + j), k * ch);
    adaptive::AdaptiveConfig acfg;
    acfg.beta = cfg_.beta;
    const auto moved = adaptive::adapt_points(space->layout(), space->fit(rate), acfg);
    const auto next = moved_system(space, moved);

    Matrix select = Matrix::Zero(ch * static_cast<Eigen::Index>(nt), ch);
    for (Eigen::Index c = 0; c < ch; ++c) select(c * static_cast<Eigen::Index>(nt) + nt - 1, c) = 1.0;
    const Var at_points = tape.sparse_map(win.coeffs, surface_eval(*space, next->layout().points));
    state = tape.matmul(at_points, tape.constant(std::move(select)));
    space = next;
    graph = grid_graph(space->layout());
  }

  auto total = [&](const std::vector<Var>& terms) {
    if (terms.empty()) return tape.constant(Matrix::Zero(1, 1));
    Var acc = terms.front();
    for (std::size_t k = 1; k < terms.size(); ++k) acc = tape.add(acc, terms[k]);
    return acc;
  };
  out.L_s = total(ls_terms);
  out.L_i = total(li_terms);
  out.L = tape.add(out.L_s, out.L_i);
  out.values = {tape.value(out.L)(0, 0), tape.value(out.L_s)(0, 0), tape.value(out.L_i)(0, 0)};
  return out;
}

LossTerms Pipeline::evaluate(const MpnnParams& p, const datagen::Trajectory& ref,
                             std::size_t start) const {
  Tape tape;
  const BoundParams bp = bind(tape, p, false);
  return forward(tape, bp, ref, start).values;
}

LossTerms Pipeline::window_loss(const std::vector<Matrix>& pred, const datagen::Trajectory& ref,
                                std::size_t start) const {
  if (pred.size() != cfg_.steps + 1)
    throw DimensionMismatch("window_loss: need steps + 1 predicted frames");
  if (start + cfg_.steps * cfg_.stride >= ref.frames())
    throw InvalidArgument("window_loss: window runs past the end of the trajectory");
  Tape tape;
  std::vector<Var> frames, ls, li;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    frames.push_back(tape.constant(pred[k]));
    if (k > 0)
      ls.push_back(tape.sum_squared_error(
          frames.back(), reference_at(ref, base_space_->layout(), start + k * cfg_.stride)));
  }
  window_terms(tape, frames, base_space_, ref, start, li, false, nullptr);
  LossTerms t;
  for (Var v : ls) t.L_s += tape.value(v)(0, 0);
  for (Var v : li) t.L_i += tape.value(v)(0, 0);
  t.L = t.L_s + t.L_i;
  return t;
}

}  // namespace splinecolloc::surrogate
