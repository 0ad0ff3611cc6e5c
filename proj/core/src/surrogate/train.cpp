#include "splinecolloc/surrogate/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <random>
#include <thread>

#include "splinecolloc/errors.hpp"

namespace splinecolloc::surrogate {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Post: return "post";
    case Variant::E2e: return "e2e";
    case Variant::E2eAdaptive: return "e2e-adaptive";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::Post, Variant::E2e, Variant::E2eAdaptive})
    if (variant_name(v) == name) return v;
  throw InvalidArgument("unknown variant '" + name + "' (expected post, e2e or e2e-adaptive)");
}

std::size_t thread_budget() {
  if (const char* env = std::getenv("SPLINECOLLOC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

std::vector<double> channel_scales(const std::vector<datagen::Trajectory>& data) {
  if (data.empty()) throw InvalidArgument("channel_scales: empty dataset");
  const std::size_t ch = data.front().channel_count();
  std::vector<double> sum(ch, 0.0), count(ch, 0.0);
  for (const auto& t : data) {
    if (t.channel_count() != ch) throw DimensionMismatch("dataset trajectories differ in channels");
    for (std::size_t f = 0; f < t.frames(); ++f)
      for (std::size_t c = 0; c < ch; ++c) {
        sum[c] += t.frame(f, c).squaredNorm();
        count[c] += static_cast<double>(t.ny() * t.nx());
      }
  }
  std::vector<double> scale(ch);
  for (std::size_t c = 0; c < ch; ++c) {
    const double rms = std::sqrt(sum[c] / count[c]);
    scale[c] = rms > 1e-300 ? 1.0 / rms : 1.0;
  }
  return scale;
}

PipelineConfig pipeline_for(const TrainConfig& cfg) {
  PipelineConfig p = cfg.pipeline;
  p.adaptive = cfg.variant == Variant::E2eAdaptive;
  return p;
}

SampleGradient sample_gradient(const Pipeline& pipe, const MpnnParams& p, Variant v,
                               const datagen::Trajectory& ref, std::size_t start) {
  Tape tape;
  const BoundParams bp = bind(tape, p);
  const LossVars lv = pipe.forward(tape, bp, ref, start);
  tape.backward(v == Variant::Post ? lv.L_s : lv.L);
  SampleGradient out;
  out.loss = lv.values;
  out.grads.reserve(bp.vars.size());
  for (Var var : bp.vars) out.grads.push_back(tape.grad(var));
  return out;
}

namespace {

struct Rollout {
  std::size_t traj;
  std::size_t start;
};

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& f) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::size_t training_count(const std::vector<datagen::Trajectory>& data, const TrainConfig& cfg) {
  if (data.size() <= cfg.eval_trajectories)
    throw InvalidArgument("train: dataset has no trajectories left after the evaluation split");
  return data.size() - cfg.eval_trajectories;
}

std::vector<Rollout> eval_rollouts(const std::vector<datagen::Trajectory>& data,
                                   const TrainConfig& cfg, std::size_t span) {
  const std::size_t first = cfg.eval_trajectories ? data.size() - cfg.eval_trajectories : 0;
  std::vector<Rollout> out;
  for (std::size_t t = first; t < data.size(); ++t) {
    if (data[t].frames() <= span) continue;
    const std::size_t last = data[t].frames() - span - 1;
    const std::size_t n = std::max<std::size_t>(1, cfg.eval_starts);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t s = n == 1 ? 0 : k * last / (n - 1);
      if (out.empty() || out.back().traj != t || out.back().start != s) out.push_back({t, s});
    }
  }
  if (out.empty()) throw InvalidArgument("evaluate: trajectories too short for one rollout");
  return out;
}

}  // namespace

LossTerms evaluate(const Pipeline& pipe, const MpnnParams& p,
                   const std::vector<datagen::Trajectory>& data, const TrainConfig& cfg) {
  const auto rollouts = eval_rollouts(data, cfg, pipe.config().span());
  std::vector<LossTerms> terms(rollouts.size());
  parallel_for(rollouts.size(), cfg.threads ? cfg.threads : thread_budget(), [&](std::size_t i) {
    terms[i] = pipe.evaluate(p, data[rollouts[i].traj], rollouts[i].start);
  });
  LossTerms mean;
  for (const auto& t : terms) {
    mean.L += t.L;
    mean.L_s += t.L_s;
    mean.L_i += t.L_i;
  }
  const double n = static_cast<double>(terms.size());
  return {mean.L / n, mean.L_s / n, mean.L_i / n};
}

TrainResult train(const std::vector<datagen::Trajectory>& data, const TrainConfig& cfg) {
  if (cfg.batch < 1) throw InvalidArgument("train: batch must be positive");
  if (!(cfg.learning_rate > 0.0)) throw InvalidArgument("train: learning rate must be positive");
  const std::size_t n_train = training_count(data, cfg);
  const std::vector<datagen::Trajectory> train_set(data.begin(), data.begin() + n_train);

  TrainResult result;
  result.channel_scale = channel_scales(train_set);
  MpnnConfig model = cfg.model;
  model.channels = data.front().channel_count();
  result.params = MpnnParams::glorot(model, cfg.seed);
  const Pipeline pipe(pipeline_for(cfg), result.channel_scale);
  const std::size_t span = pipe.config().span();

  std::vector<Rollout> pool;
  for (std::size_t t = 0; t < n_train; ++t)
    for (std::size_t s = 0; s + span < train_set[t].frames(); ++s) pool.push_back({t, s});
  if (pool.empty()) throw InvalidArgument("train: trajectories too short for one rollout");

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(pool.size());
  std::size_t cursor = order.size();
  auto next_rollout = [&]() {
    if (cursor == order.size()) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    return pool[order[cursor++]];
  };

  auto tensors = result.params.tensors();
  std::vector<Matrix> m1, m2;
  for (const Matrix* t : tensors) {
    m1.push_back(Matrix::Zero(t->rows(), t->cols()));
    m2.push_back(Matrix::Zero(t->rows(), t->cols()));
  }
  const std::size_t threads = cfg.threads ? cfg.threads : thread_budget();
  const std::size_t per_epoch = cfg.samples_per_epoch ? cfg.samples_per_epoch : pool.size();
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate *
                      std::pow(cfg.lr_decay, static_cast<double>((epoch - 1) / cfg.lr_decay_every));
    LossTerms epoch_loss;
    for (std::size_t done = 0; done < per_epoch;) {
      const std::size_t b = std::min(cfg.batch, per_epoch - done);
      std::vector<Rollout> batch(b);
      for (auto& r : batch) r = next_rollout();
      std::vector<SampleGradient> grads(b);
      parallel_for(b, threads, [&](std::size_t i) {
        grads[i] = sample_gradient(pipe, result.params, cfg.variant, train_set[batch[i].traj],
                                   batch[i].start);
      });
      for (std::size_t i = 0; i < b; ++i) {
        const LossTerms& l = grads[i].loss;
        if (!std::isfinite(l.L) || l.L > cfg.divergence_limit)
          throw NumericalInstability("train: loss " + std::to_string(l.L) + " at epoch " +
                                     std::to_string(epoch) + " exceeds the divergence limit");
        epoch_loss.L += l.L;
        epoch_loss.L_s += l.L_s;
        epoch_loss.L_i += l.L_i;
      }
      ++step;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < tensors.size(); ++k) {
        Matrix g = grads[0].grads[k];
        for (std::size_t i = 1; i < b; ++i) g += grads[i].grads[k];
        g /= static_cast<double>(b);
        m1[k] = cfg.beta1 * m1[k] + (1 - cfg.beta1) * g;
        m2[k] = cfg.beta2 * m2[k] + (1 - cfg.beta2) * g.cwiseProduct(g);
        tensors[k]->array() -=
            lr * (m1[k].array() / c1) / ((m2[k].array() / c2).sqrt() + cfg.epsilon);
      }
      done += b;
    }
    const double n = static_cast<double>(per_epoch);
    result.history.push_back({epoch, {epoch_loss.L / n, epoch_loss.L_s / n, epoch_loss.L_i / n}});
  }
  result.eval = evaluate(pipe, result.params, data, cfg);
  return result;
}

void write_metrics_csv(const std::vector<EpochMetrics>& history, std::ostream& out) {
  const auto prec = out.precision(10);
  out << "epoch,L,L_s,L_i\n";
  for (const auto& h : history)
    out << h.epoch << ',' << h.loss.L << ',' << h.loss.L_s << ',' << h.loss.L_i << '\n';
  out.precision(prec);
}

}  // namespace splinecolloc::surrogate
