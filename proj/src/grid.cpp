#include "qnd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qnd/error.hpp"

namespace qnd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::GridTooNarrow: return "grid too narrow";
    case ErrorKind::GridMismatch: return "grid mismatch";
    case ErrorKind::NonpositiveVariance: return "nonpositive variance";
    case ErrorKind::NonpositiveWidth: return "nonpositive width";
    case ErrorKind::DegeneratePhase: return "degenerate phase";
    case ErrorKind::NullOutcome: return "null outcome";
    case ErrorKind::ResourceLimit: return "resource limit";
    case ErrorKind::InvalidBracket: return "invalid bracket";
    case ErrorKind::NonFiniteObjective: return "non-finite objective";
    case ErrorKind::NoSignChange: return "no sign change";
    case ErrorKind::OutOfRangePhase: return "out-of-range phase";
    case ErrorKind::ZeroCount: return "zero count";
    case ErrorKind::InvalidArgument: return "invalid argument";
  }
  return "unknown error";
}

Grid::Grid(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points), step_(0.0) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    std::ostringstream msg;
    msg << "grid requires x_min < x_max (got " << x_min << ", " << x_max << ")";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  if (n_points < kMinPoints) {
    throw Error(ErrorKind::InvalidArgument,
                "grid requires at least 16 points (got " + std::to_string(n_points) + ")");
  }
  step_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

Grid Grid::centered(double center, double half_width, std::size_t n_points) {
  return Grid(center - half_width, center + half_width, n_points);
}

std::vector<double> Grid::points() const {
  std::vector<double> xs(n_);
  for (std::size_t k = 0; k < n_; ++k) xs[k] = (*this)[k];
  return xs;
}

bool Grid::matches(const Grid& other, double rel_tol) const {
  if (n_ != other.n_) return false;
  const double tol = rel_tol * std::max(step_, other.step_);
  return std::abs(x_min_ - other.x_min_) <= tol && std::abs(x_max_ - other.x_max_) <= tol;
}

Grid Grid::affine(double scale, double shift) const {
  if (!(scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid rescale factor must be positive");
  return Grid(scale * x_min_ + shift, scale * x_max_ + shift, n_);
}

double trapezoid_weight(const Grid& grid, std::size_t k) {
  return (k == 0 || k + 1 == grid.size()) ? 0.5 * grid.step() : grid.step();
}

namespace {

template <typename T>
T trapezoid_impl(const Grid& grid, std::span<const T> values) {
  if (values.size() != grid.size()) {
    throw Error(ErrorKind::GridMismatch, "sample count does not match grid size");
  }
  T interior{};
  for (std::size_t k = 1; k + 1 < values.size(); ++k) interior += values[k];
  return grid.step() * (interior + 0.5 * (values.front() + values.back()));
}

template <typename T>
T interpolate_impl(const Grid& grid, std::span<const T> values, double x) {
  const std::size_t n = grid.size();
  if (!(x >= grid.x_min()) || !(x <= grid.x_max())) return T{};
  const double u = (x - grid.x_min()) / grid.step();
  // Stencil of four nodes [j-1, j+2] around the containing cell, clamped
  // inside the grid near the edges.
  auto j = static_cast<std::ptrdiff_t>(std::floor(u));
  j = std::clamp<std::ptrdiff_t>(j, 1, static_cast<std::ptrdiff_t>(n) - 3);
  const double t = u - static_cast<double>(j);
  if (t == 0.0) return values[static_cast<std::size_t>(j)];
  // Lagrange basis on offsets -1, 0, 1, 2.
  const double wm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
  const auto base = static_cast<std::size_t>(j - 1);
  return wm1 * values[base] + w0 * values[base + 1] + w1 * values[base + 2] +
         w2 * values[base + 3];
}

}  // namespace

double trapezoid(const Grid& grid, std::span<const double> values) {
  return trapezoid_impl(grid, values);
}

cplx trapezoid(const Grid& grid, std::span<const cplx> values) {
  return trapezoid_impl(grid, values);
}

double interpolate(const Grid& grid, std::span<const double> values, double x) {
  return interpolate_impl(grid, values, x);
}

cplx interpolate(const Grid& grid, std::span<const cplx> values, double x) {
  return interpolate_impl(grid, values, x);
}

}  // namespace qnd
