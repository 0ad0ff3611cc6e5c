#include "splinecolloc/surrogate/mpnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>

#include "splinecolloc/errors.hpp"

namespace splinecolloc::surrogate {

GridGraph make_graph(std::vector<Eigen::Vector2d> nodes,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  struct Edge {
    std::size_t s, d;
    double dx, dy;
  };
  std::vector<Edge> edges;
  edges.reserve(2 * pairs.size());
  for (auto [a, b] : pairs) {
    if (a >= nodes.size() || b >= nodes.size() || a == b)
      throw InvalidArgument("make_graph: bad node pair");
    for (auto [s, d] : {std::pair{a, b}, std::pair{b, a}}) {
      const Eigen::Vector2d delta = nodes[s] - nodes[d];
      edges.push_back({s, d, delta.x(), delta.y()});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
    return std::tie(l.d, l.dx, l.dy) < std::tie(r.d, r.dx, r.dy);
  });
  GridGraph g;
  g.nodes = std::move(nodes);
  auto src = std::make_shared<std::vector<std::size_t>>();
  auto dst = std::make_shared<std::vector<std::size_t>>();
  g.edge_features.resize(static_cast<Eigen::Index>(edges.size()), 3);
  std::vector<std::size_t> degree(g.nodes.size(), 0);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    src->push_back(edges[k].s);
    dst->push_back(edges[k].d);
    ++degree[edges[k].d];
    const auto r = static_cast<Eigen::Index>(k);
    g.edge_features(r, 0) = edges[k].dx;
    g.edge_features(r, 1) = edges[k].dy;
    g.edge_features(r, 2) = std::hypot(edges[k].dx, edges[k].dy);
  }
  if (std::any_of(degree.begin(), degree.end(), [](std::size_t d) { return d < 2; }))
    throw InvalidArgument("make_graph: every node needs at least two neighbours");
  g.src = std::move(src);
  g.dst = std::move(dst);
  return g;
}

GridGraph grid_graph(const osc::PointLayout& layout) {
  const std::size_t nx = layout.nx_points(), ny = layout.ny_points();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      if (i + 1 < nx) pairs.emplace_back(k, k + 1);
      if (j + 1 < ny) pairs.emplace_back(k, k + nx);
    }
  return make_graph(layout.points, pairs);
}

// --- parameters --------------------------------------------------------------

namespace {

Mlp make_mlp(std::size_t in, std::size_t hidden, std::size_t out, std::size_t layers) {
  Mlp m;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t a = l == 0 ? in : hidden;
    const std::size_t b = l + 1 == layers ? out : hidden;
    m.layers.push_back({Matrix::Zero(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)),
                        Matrix::Zero(1, static_cast<Eigen::Index>(b))});
  }
  return m;
}

template <class P, class F>
void visit(P& p, F&& f) {
  auto mlp = [&](auto& m, const std::string& name) {
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      f(m.layers[l].W, name + "." + std::to_string(l) + ".W");
      f(m.layers[l].b, name + "." + std::to_string(l) + ".b");
    }
  };
  mlp(p.encoder, "encoder");
  for (std::size_t k = 0; k < p.edge_mlps.size(); ++k) {
    mlp(p.edge_mlps[k], "processor" + std::to_string(k) + ".edge");
    mlp(p.node_mlps[k], "processor" + std::to_string(k) + ".node");
  }
  mlp(p.decoder, "decoder");
}

}  // namespace

MpnnParams MpnnParams::zeros(const MpnnConfig& cfg) {
  if (cfg.channels == 0 || cfg.hidden == 0 || cfg.layers == 0)
    throw InvalidArgument("MpnnConfig: channels, hidden and layers must be positive");
  MpnnParams p;
  p.config = cfg;
  p.encoder = make_mlp(cfg.channels + 2, cfg.hidden, cfg.hidden, cfg.layers);
  for (std::size_t k = 0; k < cfg.processors; ++k) {
    p.edge_mlps.push_back(make_mlp(2 * cfg.hidden + 3, cfg.hidden, cfg.hidden, cfg.layers));
    p.node_mlps.push_back(make_mlp(2 * cfg.hidden, cfg.hidden, cfg.hidden, cfg.layers));
  }
  p.decoder = make_mlp(cfg.hidden, cfg.hidden, cfg.channels, cfg.layers);
  return p;
}

MpnnParams MpnnParams::glorot(const MpnnConfig& cfg, std::uint64_t seed) {
  MpnnParams p = zeros(cfg);
  std::mt19937_64 rng(seed);
  for (Matrix* t : p.tensors()) {
    if (t->rows() == 1) continue;  // biases stay zero
    const double a = std::sqrt(6.0 / static_cast<double>(t->rows() + t->cols()));
    std::uniform_real_distribution<double> u(-a, a);
    for (Eigen::Index i = 0; i < t->size(); ++i) t->data()[i] = u(rng);
  }
  return p;
}

std::vector<Matrix*> MpnnParams::tensors() {
  std::vector<Matrix*> out;
  visit(*this, [&](Matrix& m, const std::string&) { out.push_back(&m); });
  return out;
}

std::vector<const Matrix*> MpnnParams::tensors() const {
  std::vector<const Matrix*> out;
  visit(*this, [&](const Matrix& m, const std::string&) { out.push_back(&m); });
  return out;
}

std::vector<std::string> MpnnParams::tensor_names() const {
  std::vector<std::string> out;
  visit(*this, [&](const Matrix&, const std::string& n) { out.push_back(n); });
  return out;
}

std::size_t MpnnParams::parameter_count() const {
  std::size_t n = 0;
  for (const Matrix* t : tensors()) n += static_cast<std::size_t>(t->size());
  return n;
}

BoundParams bind(Tape& tape, const MpnnParams& p, bool trainable) {
  BoundParams b;
  b.params = &p;
  for (const Matrix* t : p.tensors())
    b.vars.push_back(trainable ? tape.parameter(*t) : tape.constant(*t));
  return b;
}

// --- forward -----------------------------------------------------------------

namespace {

Var mlp_forward(Tape& tape, const std::vector<Var>& vars, std::size_t& next, std::size_t layers,
                Var x) {
  for (std::size_t l = 0; l < layers; ++l) {
    x = tape.add_bias(tape.matmul(x, vars[next]), vars[next + 1]);
    next += 2;
    if (l + 1 < layers) x = tape.relu(x);
  }
  return x;
}

}  // namespace

Var mpnn_step(Tape& tape, const BoundParams& bp, const GridGraph& g, Var state) {
  const MpnnConfig& cfg = bp.params->config;
  const Matrix& s = tape.value(state);
  if (static_cast<std::size_t>(s.rows()) != g.node_count() ||
      static_cast<std::size_t>(s.cols()) != cfg.channels)
    throw DimensionMismatch("mpnn_step: state must be nodes x channels");
  // Coordinates mapped from [0, 1] to [-1, 1].
  Matrix coords(static_cast<Eigen::Index>(g.node_count()), 2);
  for (std::size_t k = 0; k < g.node_count(); ++k)
    coords.row(static_cast<Eigen::Index>(k)) = (2.0 * g.nodes[k].array() - 1.0).transpose();

  std::size_t next = 0;
  const Var input = tape.concat_cols({state, tape.constant(std::move(coords))});
  Var h = mlp_forward(tape, bp.vars, next, cfg.layers, input);
  const Var edges = tape.constant(g.edge_features);
  for (std::size_t k = 0; k < cfg.processors; ++k) {
    const Var to = tape.gather_rows(h, g.dst);
    const Var from = tape.gather_rows(h, g.src);
    const Var msg = mlp_forward(tape, bp.vars, next, cfg.layers, tape.concat_cols({to, from, edges}));
    const Var agg = tape.scatter_add_rows(msg, g.dst, g.node_count());
    h = tape.add(h, mlp_forward(tape, bp.vars, next, cfg.layers, tape.concat_cols({h, agg})));
  }
  const Var delta = mlp_forward(tape, bp.vars, next, cfg.layers, h);
  return tape.add(state, delta);
}

Matrix mpnn_step(const MpnnParams& p, const GridGraph& g, const Matrix& state) {
  Tape tape;
  const BoundParams bp = bind(tape, p, false);
  return tape.value(mpnn_step(tape, bp, g, tape.constant(state)));
}

std::vector<Matrix> rollout(const MpnnParams& p, const GridGraph& g, const Matrix& initial,
                            std::size_t steps) {
  if (steps < 1) throw InvalidArgument("rollout: need at least one step");
  std::vector<Matrix> out{initial};
  for (std::size_t k = 0; k < steps; ++k) out.push_back(mpnn_step(p, g, out.back()));
  return out;
}

}  // namespace splinecolloc::surrogate
