#pragma once

// Field trajectories on cell-centred uniform grids and their file format.
//
// .sctraj layout (all little-endian):
//   char[8]   magic "SCTRAJ01"
//   uint32    version (1)
//   uint32    frames, channels, ny, nx
//   uint32    boundary (0 = Dirichlet zero, 1 = zero Neumann)
//   float64   x0, x1, y0, y1
//   float64   times[frames]
//   channels x { uint32 length; char name[length] }
//   float64   data[frames][channels][ny][nx]

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "splinecolloc/abd.hpp"

namespace splinecolloc::datagen {

struct Domain {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  bool operator==(const Domain&) const = default;
};

enum class Boundary : std::uint32_t { DirichletZero = 0, NeumannZero = 1 };

class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<double> times, std::vector<std::string> channels, std::size_t ny,
             std::size_t nx, Domain domain = {}, Boundary boundary = Boundary::DirichletZero);

  std::size_t frames() const noexcept { return times_.size(); }
  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t nx() const noexcept { return nx_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<std::string>& channels() const noexcept { return channels_; }
  const Domain& domain() const noexcept { return domain_; }
  Boundary boundary() const noexcept { return boundary_; }
  std::size_t channel_index(const std::string& name) const;

  double hx() const noexcept { return (domain_.x1 - domain_.x0) / static_cast<double>(nx_); }
  double hy() const noexcept { return (domain_.y1 - domain_.y0) / static_cast<double>(ny_); }
  /// Cell-centre coordinates.
  double x(std::size_t i) const noexcept { return domain_.x0 + (static_cast<double>(i) + 0.5) * hx(); }
  double y(std::size_t j) const noexcept { return domain_.y0 + (static_cast<double>(j) + 0.5) * hy(); }

  /// ny x nx view of one frame and channel.
  Eigen::Map<RowMatrix> frame(std::size_t f, std::size_t channel);
  Eigen::Map<const RowMatrix> frame(std::size_t f, std::size_t channel) const;

  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const Trajectory&) const = default;

 private:
  std::vector<double> times_;
  std::vector<std::string> channels_;
  std::size_t ny_ = 0, nx_ = 0;
  Domain domain_;
  Boundary boundary_ = Boundary::DirichletZero;
  std::vector<double> data_;
};

void write_trajectory(const Trajectory& t, std::ostream& out);
Trajectory read_trajectory(std::istream& in);
void save_trajectory(const Trajectory& t, const std::string& path);
Trajectory load_trajectory(const std::string& path);

/// Long-format CSV: frame,time,channel,j,i,x,y,value.
void write_trajectory_csv(const Trajectory& t, std::ostream& out);

/// Bicubic (Catmull-Rom) interpolation of one frame at arbitrary points, with
/// ghost cells that respect the trajectory's boundary condition.
class GridSampler {
 public:
  GridSampler(const Trajectory& t, std::size_t frame, std::size_t channel);
  double operator()(double x, double y) const;

 private:
  double ghost(long j, long i) const;

  Eigen::Map<const RowMatrix> grid_;
  Domain domain_;
  Boundary boundary_;
  double hx_, hy_;
};

}  // namespace splinecolloc::datagen
