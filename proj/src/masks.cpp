#include <cmath>
#include <numbers>
#include <random>

#include "parseval/inverse.hpp"

namespace parseval {

namespace {

constexpr Index kCartesianBand = 4;

void require_2d(const Grid& grid) {
  if (grid.dims() != 2) throw DimensionError("sampling masks live on 2-D grids, got " + grid.str());
}

}  // namespace

Index SamplingMask::count() const {
  Index c = 0;
  for (auto s : selected) c += s ? 1 : 0;
  return c;
}

std::vector<Index> SamplingMask::indices() const {
  std::vector<Index> out;
  for (std::size_t k = 0; k < selected.size(); ++k) {
    if (selected[k]) out.push_back(static_cast<Index>(k));
  }
  return out;
}

bool SamplingMask::conjugate_symmetric() const {
  for (Index k = 0; k < grid.count(); ++k) {
    if (selected[static_cast<std::size_t>(k)] != selected[static_cast<std::size_t>(grid.site(-grid.coords(k)))]) {
      return false;
    }
  }
  return true;
}

void SamplingMask::validate() const {
  require_2d(grid);
  if (static_cast<Index>(selected.size()) != grid.count()) throw DimensionError("mask size differs from its grid");
  if (count() == 0) throw ValueError("sampling mask selects no bins");
}

SamplingMask make_mask(const MaskSpec& spec, const Grid& grid) {
  require_2d(grid);
  SamplingMask m{grid, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.count()), 0)};
  const Index rows = grid.size(0);
  const Index cols = grid.size(1);
  auto mark = [&](Index r, Index c) { m.selected[static_cast<std::size_t>(grid.site({r, c}))] = 1; };

  switch (spec.scheme) {
    case MaskSpec::Scheme::random: {
      if (!(spec.rate > 0.0 && spec.rate <= 1.0)) throw ValueError("random mask rate must lie in (0, 1]");
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (auto& s : m.selected) s = u(rng) < spec.rate ? 1 : 0;
      break;
    }
    case MaskSpec::Scheme::radial: {
      if (spec.lines < 1) throw ValueError("radial mask needs at least one line");
      const Index radius = std::max(rows, cols);
      for (int l = 0; l < spec.lines; ++l) {
        const double theta = std::numbers::pi * l / spec.lines;
        // Half-pixel steps so that no rasterized cell along the line is skipped.
        for (Index t = -radius; t <= radius; ++t) {
          const double r = 0.5 * static_cast<double>(t);
          mark(static_cast<Index>(std::round(r * std::sin(theta))), static_cast<Index>(std::round(r * std::cos(theta))));
        }
      }
      break;
    }
    case MaskSpec::Scheme::cartesian: {
      if (spec.acceleration < 1) throw ValueError("cartesian acceleration must be at least 1");
      for (Index r = 0; r < rows; ++r) {
        if (r % spec.acceleration == 0) {
          for (Index c = 0; c < cols; ++c) mark(r, c);
        }
      }
      for (Index r = -kCartesianBand / 2; r < kCartesianBand / 2; ++r) {
        for (Index c = 0; c < cols; ++c) mark(r, c);
      }
      break;
    }
  }
  mark(0, 0);
  if (spec.conjugate_symmetric) {
    auto copy = m.selected;
    for (Index k = 0; k < grid.count(); ++k) {
      if (copy[static_cast<std::size_t>(k)]) m.selected[static_cast<std::size_t>(grid.site(-grid.coords(k)))] = 1;
    }
  }
  m.validate();
  return m;
}

}  // namespace parseval
