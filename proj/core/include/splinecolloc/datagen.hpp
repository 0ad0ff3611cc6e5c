#pragma once

// Reference data: finite-difference heat and damped-wave solvers on
// cell-centred grids over [0, 1]^2, plus the analytic test functions used by
// the interpolation comparison.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "splinecolloc/abd.hpp"
#include "splinecolloc/trajectory.hpp"

namespace splinecolloc::datagen {

// --- initial conditions ------------------------------------------------------

/// Sum of 1-3 positive Gaussian bumps with seeded random centres and widths.
RowMatrix gaussian_bumps(std::size_t n, std::uint64_t seed);
/// sin(pi x) sin(pi y) sampled at cell centres.
RowMatrix eigenmode(std::size_t n);

// --- heat --------------------------------------------------------------------

/// u_t = D (u_xx + u_yy), u = 0 on the boundary. Five-point Laplacian with
/// odd reflection at the walls, explicit Euler sub-steps of at most
/// substep_safety * h^2 / (4 D).
struct HeatConfig {
  double diffusivity = 1.0;
  double frame_dt = 0.001;
  std::size_t steps = 100;
  double substep_safety = 0.25;
};

/// Returns steps + 1 frames (channel "u"). Throws NumericalInstability if the
/// solution blows up.
Trajectory heat_solve(const RowMatrix& initial, const HeatConfig& cfg);

// --- damped wave -------------------------------------------------------------

/// w_tt = c^2 (w_xx + w_yy) - k w_t with zero-Neumann walls and the
/// fourth-order 5x5 cross Laplacian. Velocity Verlet with the damping term
/// treated by the implicit midpoint rule.
struct WaveConfig {
  double c = 330.0;
  double k = 50.0;
  double frame_dt = 5e-5;
  std::size_t steps = 20;
  /// Internal step as a fraction of h / c.
  double courant = 0.5;
};

/// c * dt / h must not exceed this; the fourth-order stencil with Verlet is
/// stable up to sqrt(3/8), which is below 1/sqrt(2).
inline constexpr double kWaveCourantLimit = 0.6123724356957945;

/// Returns steps + 1 frames with channels "w" and "v". Throws InvalidArgument
/// when the Courant number exceeds kWaveCourantLimit.
Trajectory wave_solve(const RowMatrix& w0, const RowMatrix& v0, const WaveConfig& cfg);

/// Discrete energy 1/2 sum v^2 + 1/2 c^2 sum w (-L w), scaled by the cell area.
double wave_energy(const RowMatrix& w, const RowMatrix& v, double c);

/// The fourth-order 5x5 cross Laplacian with even reflection at the walls.
RowMatrix laplacian_neumann4(const RowMatrix& w);
/// The five-point Laplacian with odd reflection at the walls.
RowMatrix laplacian_dirichlet2(const RowMatrix& u);

// --- datasets ----------------------------------------------------------------

enum class DatasetKind { Heat, Wave };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::Heat;
  std::size_t trajectories = 8;
  std::size_t grid = 64;
  std::uint64_t seed = 0;
  HeatConfig heat{0.01, 0.1, 50, 0.25};
  WaveConfig wave{};
};

/// Trajectory i is generated from seed + i, so the result does not depend on
/// the number of worker threads.
std::vector<Trajectory> generate_dataset(const DatasetConfig& cfg, std::size_t threads = 1);

// --- analytic fields ---------------------------------------------------------

struct AnalyticField {
  std::string name;
  int dims = 1;
  std::function<double(double, double)> exact;
  /// Uniform samples on [0, 1] (per axis); values(j, i) = exact(xs[i], ys[j]).
  /// For 1D fields ys = {0} and values has one row.
  std::vector<double> xs;
  std::vector<double> ys;
  RowMatrix values;
};

/// Names: 1d-linear, 1d-nonlinear, 2d-linear, 2d-nonlinear.
AnalyticField analytic_field(const std::string& name, std::size_t resolution);
std::vector<std::string> analytic_field_names();

}  // namespace splinecolloc::datagen
