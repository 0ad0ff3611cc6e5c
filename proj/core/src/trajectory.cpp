#include "splinecolloc/trajectory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "splinecolloc/errors.hpp"

namespace splinecolloc::datagen {

static_assert(std::endian::native == std::endian::little,
              "trajectory I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'C', 'T', 'R', 'A', 'J', '0', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("trajectory file truncated");
  return v;
}

}  // namespace

Trajectory::Trajectory(std::vector<double> times, std::vector<std::string> channels,
                       std::size_t ny, std::size_t nx, Domain domain, Boundary boundary)
    : times_(std::move(times)), channels_(std::move(channels)), ny_(ny), nx_(nx),
      domain_(domain), boundary_(boundary) {
  if (ny_ == 0 || nx_ == 0) throw InvalidArgument("Trajectory: empty grid");
  if (channels_.empty()) throw InvalidArgument("Trajectory: need at least one channel");
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1]))
      throw InvalidArgument("Trajectory: times must be strictly increasing");
  }
  if (!(domain_.x1 > domain_.x0 && domain_.y1 > domain_.y0))
    throw InvalidArgument("Trajectory: empty domain");
  data_.assign(times_.size() * channels_.size() * ny_ * nx_, 0.0);
}

std::size_t Trajectory::channel_index(const std::string& name) const {
  const auto it = std::find(channels_.begin(), channels_.end(), name);
  if (it == channels_.end()) throw InvalidArgument("Trajectory: no channel named '" + name + "'");
  return static_cast<std::size_t>(it - channels_.begin());
}

Eigen::Map<RowMatrix> Trajectory::frame(std::size_t f, std::size_t channel) {
  if (f >= frames() || channel >= channel_count())
    throw InvalidArgument("Trajectory: frame or channel out of range");
  return {data_.data() + (f * channel_count() + channel) * ny_ * nx_,
          static_cast<Eigen::Index>(ny_), static_cast<Eigen::Index>(nx_)};
}

Eigen::Map<const RowMatrix> Trajectory::frame(std::size_t f, std::size_t channel) const {
  if (f >= frames() || channel >= channel_count())
    throw InvalidArgument("Trajectory: frame or channel out of range");
  return {data_.data() + (f * channel_count() + channel) * ny_ * nx_,
          static_cast<Eigen::Index>(ny_), static_cast<Eigen::Index>(nx_)};
}

void write_trajectory(const Trajectory& t, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(t.frames()));
  put(out, static_cast<std::uint32_t>(t.channel_count()));
  put(out, static_cast<std::uint32_t>(t.ny()));
  put(out, static_cast<std::uint32_t>(t.nx()));
  put(out, static_cast<std::uint32_t>(t.boundary()));
  put(out, t.domain().x0);
  put(out, t.domain().x1);
  put(out, t.domain().y0);
  put(out, t.domain().y1);
  for (double v : t.times()) put(out, v);
  for (const auto& c : t.channels()) {
    put(out, static_cast<std::uint32_t>(c.size()));
    out.write(c.data(), static_cast<std::streamsize>(c.size()));
  }
  out.write(reinterpret_cast<const char*>(t.data().data()),
            static_cast<std::streamsize>(t.data().size() * sizeof(double)));
  if (!out) throw IoError("failed writing trajectory");
}

Trajectory read_trajectory(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw IoError("not a trajectory file (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion)
    throw IoError("unsupported trajectory version " + std::to_string(version));
  const auto frames = get<std::uint32_t>(in);
  const auto channels = get<std::uint32_t>(in);
  const auto ny = get<std::uint32_t>(in);
  const auto nx = get<std::uint32_t>(in);
  const auto boundary = get<std::uint32_t>(in);
  if (boundary > 1) throw IoError("unknown boundary kind in trajectory file");
  Domain d;
  d.x0 = get<double>(in);
  d.x1 = get<double>(in);
  d.y0 = get<double>(in);
  d.y1 = get<double>(in);
  std::vector<double> times(frames);
  for (auto& v : times) v = get<double>(in);
  std::vector<std::string> names(channels);
  for (auto& n : names) {
    const auto len = get<std::uint32_t>(in);
    if (len > 4096) throw IoError("implausible channel name length in trajectory file");
    n.resize(len);
    in.read(n.data(), len);
    if (!in) throw IoError("trajectory file truncated");
  }
  Trajectory t(std::move(times), std::move(names), ny, nx, d, static_cast<Boundary>(boundary));
  for (std::size_t f = 0; f < t.frames(); ++f) {
    for (std::size_t c = 0; c < t.channel_count(); ++c) {
      auto m = t.frame(f, c);
      in.read(reinterpret_cast<char*>(m.data()),
              static_cast<std::streamsize>(ny * nx * sizeof(double)));
      if (!in) throw IoError("trajectory file truncated");
    }
  }
  return t;
}

void save_trajectory(const Trajectory& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_trajectory(t, out);
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trajectory file '" + path + "'");
  return read_trajectory(in);
}

void write_trajectory_csv(const Trajectory& t, std::ostream& out) {
  const auto prec = out.precision(17);
  out << "frame,time,channel,j,i,x,y,value\n";
  for (std::size_t f = 0; f < t.frames(); ++f)
    for (std::size_t c = 0; c < t.channel_count(); ++c) {
      const auto m = t.frame(f, c);
      for (std::size_t j = 0; j < t.ny(); ++j)
        for (std::size_t i = 0; i < t.nx(); ++i)
          out << f << ',' << t.times()[f] << ',' << t.channels()[c] << ',' << j << ',' << i << ','
              << t.x(i) << ',' << t.y(j) << ','
              << m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) << '\n';
    }
  out.precision(prec);
}

// --- sampler -----------------------------------------------------------------

GridSampler::GridSampler(const Trajectory& t, std::size_t frame, std::size_t channel)
    : grid_(t.frame(frame, channel)), domain_(t.domain()), boundary_(t.boundary()),
      hx_(t.hx()), hy_(t.hy()) {}

double GridSampler::ghost(long j, long i) const {
  const long ny = grid_.rows(), nx = grid_.cols();
  double sign = 1.0;
  auto reflect = [&](long k, long n) {
    if (k < 0) { k = -k - 1; sign = -sign; }
    if (k >= n) { k = 2 * n - k - 1; sign = -sign; }
    return k;
  };
  j = reflect(j, ny);
  i = reflect(i, nx);
  const double v = grid_(j, i);
  return boundary_ == Boundary::DirichletZero ? sign * v : v;
}

namespace {

std::array<double, 4> catmull_rom(double t) {
  const double t2 = t * t, t3 = t2 * t;
  return {-0.5 * t + t2 - 0.5 * t3, 1.0 - 2.5 * t2 + 1.5 * t3, 0.5 * t + 2.0 * t2 - 1.5 * t3,
          -0.5 * t2 + 0.5 * t3};
}

}  // namespace

double GridSampler::operator()(double x, double y) const {
  if (!(x >= domain_.x0 && x <= domain_.x1 && y >= domain_.y0 && y <= domain_.y1))
    throw DomainError("GridSampler: point outside the trajectory domain");
  const double xi = (x - domain_.x0) / hx_ - 0.5;
  const double yj = (y - domain_.y0) / hy_ - 0.5;
  const auto i0 = static_cast<long>(std::floor(xi));
  const auto j0 = static_cast<long>(std::floor(yj));
  const auto wx = catmull_rom(xi - static_cast<double>(i0));
  const auto wy = catmull_rom(yj - static_cast<double>(j0));
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += wx[a] * ghost(j0 - 1 + b, i0 - 1 + a);
    acc += wy[b] * row;
  }
  return acc;
}

}  // namespace splinecolloc::datagen
