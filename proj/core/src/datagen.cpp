#include "splinecolloc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "splinecolloc/errors.hpp"

namespace splinecolloc::datagen {

namespace {

const double kPi = std::acos(-1.0);

void check_square(const RowMatrix& m, const char* who) {
  if (m.rows() < 4 || m.rows() != m.cols())
    throw InvalidArgument(std::string(who) + ": need a square grid of at least 4x4");
  if (!m.allFinite()) throw InvalidArgument(std::string(who) + ": non-finite initial data");
}

}  // namespace

RowMatrix gaussian_bumps(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> centre(0.25, 0.75), width(0.05, 0.15), amp(0.5, 1.0);
  const int bumps = count(rng);
  RowMatrix u = RowMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double h = 1.0 / static_cast<double>(n);
  for (int b = 0; b < bumps; ++b) {
    const double cx = centre(rng), cy = centre(rng), s = width(rng), a = amp(rng);
    for (Eigen::Index j = 0; j < u.rows(); ++j) {
      const double y = (static_cast<double>(j) + 0.5) * h;
      for (Eigen::Index i = 0; i < u.cols(); ++i) {
        const double x = (static_cast<double>(i) + 0.5) * h;
        u(j, i) += a * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * s * s));
      }
    }
  }
  return u;
}

RowMatrix eigenmode(std::size_t n) {
  RowMatrix u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double h = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < u.rows(); ++j)
    for (Eigen::Index i = 0; i < u.cols(); ++i)
      u(j, i) = std::sin(kPi * (static_cast<double>(i) + 0.5) * h) *
                std::sin(kPi * (static_cast<double>(j) + 0.5) * h);
  return u;
}

// --- Laplacians --------------------------------------------------------------

RowMatrix laplacian_dirichlet2(const RowMatrix& u) {
  const Eigen::Index n = u.rows(), m = u.cols();
  const double h2 = 1.0 / (static_cast<double>(m) * static_cast<double>(m));
  const double k2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  auto at = [&](Eigen::Index j, Eigen::Index i) {
    double s = 1.0;
    if (i < 0) { i = -i - 1; s = -s; }
    if (i >= m) { i = 2 * m - i - 1; s = -s; }
    if (j < 0) { j = -j - 1; s = -s; }
    if (j >= n) { j = 2 * n - j - 1; s = -s; }
    return s * u(j, i);
  };
  RowMatrix out(n, m);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double c = u(j, i);
      out(j, i) = (at(j, i - 1) - 2 * c + at(j, i + 1)) / h2 +
                  (at(j - 1, i) - 2 * c + at(j + 1, i)) / k2;
    }
  }
  return out;
}

RowMatrix laplacian_neumann4(const RowMatrix& w) {
  const Eigen::Index n = w.rows(), m = w.cols();
  const double ix2 = static_cast<double>(m) * static_cast<double>(m);
  const double iy2 = static_cast<double>(n) * static_cast<double>(n);
  auto reflect = [](Eigen::Index k, Eigen::Index len) {
    if (k < 0) k = -k - 1;
    if (k >= len) k = 2 * len - k - 1;
    return k;
  };
  static constexpr double c[5] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
  RowMatrix out(n, m);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      double sx = 0.0, sy = 0.0;
      for (int d = -2; d <= 2; ++d) {
        sx += c[d + 2] * w(j, reflect(i + d, m));
        sy += c[d + 2] * w(reflect(j + d, n), i);
      }
      out(j, i) = sx * ix2 + sy * iy2;
    }
  }
  return out;
}

// --- heat --------------------------------------------------------------------

Trajectory heat_solve(const RowMatrix& initial, const HeatConfig& cfg) {
  check_square(initial, "heat_solve");
  if (!(cfg.diffusivity > 0.0) || !(cfg.frame_dt > 0.0) || !(cfg.substep_safety > 0.0) ||
      cfg.substep_safety > 1.0)
    throw InvalidArgument("heat_solve: diffusivity, frame_dt and substep_safety in (0, 1] required");
  const auto n = static_cast<std::size_t>(initial.rows());
  const double h = 1.0 / static_cast<double>(n);
  const double dt_max = cfg.substep_safety * h * h / (4.0 * cfg.diffusivity);
  const auto sub = static_cast<std::size_t>(std::ceil(cfg.frame_dt / dt_max - 1e-12));
  const double dt = cfg.frame_dt / static_cast<double>(sub);

  std::vector<double> times(cfg.steps + 1);
  for (std::size_t k = 0; k <= cfg.steps; ++k) times[k] = static_cast<double>(k) * cfg.frame_dt;
  Trajectory traj(std::move(times), {"u"}, n, n, Domain{}, Boundary::DirichletZero);

  RowMatrix u = initial;
  traj.frame(0, 0) = u;
  const double bound = 1e6 * std::max(1.0, u.cwiseAbs().maxCoeff());
  for (std::size_t k = 1; k <= cfg.steps; ++k) {
    for (std::size_t s = 0; s < sub; ++s) u += (dt * cfg.diffusivity) * laplacian_dirichlet2(u);
    if (!u.allFinite() || u.cwiseAbs().maxCoeff() > bound)
      throw NumericalInstability("heat_solve: solution blew up at frame " + std::to_string(k));
    traj.frame(k, 0) = u;
  }
  return traj;
}

// --- wave --------------------------------------------------------------------

double wave_energy(const RowMatrix& w, const RowMatrix& v, double c) {
  const double area = 1.0 / static_cast<double>(w.rows() * w.cols());
  const RowMatrix lw = laplacian_neumann4(w);
  return area * (0.5 * v.squaredNorm() - 0.5 * c * c * w.cwiseProduct(lw).sum());
}

Trajectory wave_solve(const RowMatrix& w0, const RowMatrix& v0, const WaveConfig& cfg) {
  check_square(w0, "wave_solve");
  if (v0.rows() != w0.rows() || v0.cols() != w0.cols())
    throw DimensionMismatch("wave_solve: w0 and v0 differ in shape");
  if (!(cfg.c > 0.0) || cfg.k < 0.0 || !(cfg.frame_dt > 0.0))
    throw InvalidArgument("wave_solve: need c > 0, k >= 0, frame_dt > 0");
  if (!(cfg.courant > 0.0) || cfg.courant > kWaveCourantLimit) {
    throw InvalidArgument("wave_solve: Courant number " + std::to_string(cfg.courant) +
                          " violates c*dt/h <= " + std::to_string(kWaveCourantLimit));
  }
  const auto n = static_cast<std::size_t>(w0.rows());
  const double h = 1.0 / static_cast<double>(n);
  const double dt_max = cfg.courant * h / cfg.c;
  const auto sub = static_cast<std::size_t>(std::ceil(cfg.frame_dt / dt_max - 1e-12));
  const double dt = cfg.frame_dt / static_cast<double>(sub);

  std::vector<double> times(cfg.steps + 1);
  for (std::size_t k = 0; k <= cfg.steps; ++k) times[k] = static_cast<double>(k) * cfg.frame_dt;
  Trajectory traj(std::move(times), {"w", "v"}, n, n, Domain{}, Boundary::NeumannZero);

  RowMatrix w = w0, v = v0;
  traj.frame(0, 0) = w;
  traj.frame(0, 1) = v;
  const double c2 = cfg.c * cfg.c;
  const double damp_lo = 1.0 - 0.25 * cfg.k * dt;
  const double damp_hi = 1.0 / (1.0 + 0.25 * cfg.k * dt);
  RowMatrix acc = c2 * laplacian_neumann4(w);
  const double bound = 1e6 * std::max(1.0, std::max(w.cwiseAbs().maxCoeff(), v.cwiseAbs().maxCoeff()));
  for (std::size_t k = 1; k <= cfg.steps; ++k) {
    for (std::size_t s = 0; s < sub; ++s) {
      v = (damp_lo * v + (0.5 * dt) * acc) * damp_hi;
      w += dt * v;
      acc = c2 * laplacian_neumann4(w);
      v = (damp_lo * v + (0.5 * dt) * acc) * damp_hi;
    }
    if (!w.allFinite() || w.cwiseAbs().maxCoeff() > bound)
      throw NumericalInstability("wave_solve: solution blew up at frame " + std::to_string(k));
    traj.frame(k, 0) = w;
    traj.frame(k, 1) = v;
  }
  return traj;
}

// --- datasets ----------------------------------------------------------------

std::vector<Trajectory> generate_dataset(const DatasetConfig& cfg, std::size_t threads) {
  std::vector<Trajectory> out(cfg.trajectories);
  auto make = [&](std::size_t i) {
    const RowMatrix ic = gaussian_bumps(cfg.grid, cfg.seed + i);
    if (cfg.kind == DatasetKind::Heat) {
      out[i] = heat_solve(ic, cfg.heat);
    } else {
      out[i] = wave_solve(ic, RowMatrix::Zero(ic.rows(), ic.cols()), cfg.wave);
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, cfg.trajectories));
  if (threads == 1) {
    for (std::size_t i = 0; i < cfg.trajectories; ++i) make(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < cfg.trajectories; i += threads) make(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// --- analytic fields ---------------------------------------------------------

std::vector<std::string> analytic_field_names() {
  return {"1d-linear", "1d-nonlinear", "2d-linear", "2d-nonlinear"};
}

AnalyticField analytic_field(const std::string& name, std::size_t resolution) {
  AnalyticField f;
  f.name = name;
  if (name == "1d-linear") {
    f.exact = [](double x, double) { return x * x * x * x - 2 * x * x * x + 1.16 * x * x - 0.16 * x; };
  } else if (name == "1d-nonlinear") {
    f.exact = [](double x, double) { return std::sin(3 * kPi * x); };
  } else if (name == "2d-linear") {
    f.dims = 2;
    f.exact = [](double x, double y) {
      return x * x * y * y - x * x * y - x * y * y + x * y;
    };
  } else if (name == "2d-nonlinear") {
    f.dims = 2;
    f.exact = [](double x, double y) { return std::sin(3 * kPi * x) * std::sin(3 * kPi * y); };
  } else {
    throw InvalidArgument("unknown analytic field '" + name +
                          "' (expected 1d-linear, 1d-nonlinear, 2d-linear or 2d-nonlinear)");
  }
  if (resolution < 2) throw InvalidArgument("analytic_field: resolution must be at least 2");
  f.xs.resize(resolution);
  for (std::size_t i = 0; i < resolution; ++i)
    f.xs[i] = static_cast<double>(i) / static_cast<double>(resolution - 1);
  f.ys = f.dims == 2 ? f.xs : std::vector<double>{0.0};
  f.values.resize(static_cast<Eigen::Index>(f.ys.size()), static_cast<Eigen::Index>(f.xs.size()));
  for (std::size_t j = 0; j < f.ys.size(); ++j)
    for (std::size_t i = 0; i < f.xs.size(); ++i)
      f.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = f.exact(f.xs[i], f.ys[j]);
  return f;
}

}  // namespace splinecolloc::datagen
