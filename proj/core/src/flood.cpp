#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "kornkit/error.hpp"
#include "kornkit/transport.hpp"

namespace kornkit {

bool IndexBox::contains(const Index3& ijk, int dim) const {
  for (int a = 0; a < dim; ++a) {
    if (ijk[a] < lo[a] || ijk[a] > hi[a]) return false;
  }
  return true;
}

std::size_t IndexBox::count(int dim) const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(std::max(0, hi[a] - lo[a] + 1));
  return n;
}

VoxelDomain::VoxelDomain(GridSpec grid) : grid_(grid), mask_(grid.point_count(), 0) {}

VoxelDomain VoxelDomain::full(const GridSpec& grid) {
  VoxelDomain d(grid);
  std::fill(d.mask_.begin(), d.mask_.end(), 1);
  return d;
}

VoxelDomain VoxelDomain::union_of(const GridSpec& grid, const std::vector<IndexBox>& boxes) {
  VoxelDomain d(grid);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    const Index3 ijk = grid.multi_index(p);
    for (const IndexBox& b : boxes) {
      if (b.contains(ijk, grid.dim)) {
        d.mask_[p] = 1;
        break;
      }
    }
  }
  return d;
}

bool VoxelDomain::contains(const Index3& ijk) const {
  for (int a = 0; a < grid_.dim; ++a) {
    if (ijk[a] < 0 || ijk[a] >= grid_.shape[a]) return false;
  }
  return mask_[grid_.index(ijk)] != 0;
}

std::size_t VoxelDomain::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

namespace {

struct Rect {
  std::size_t area = 0;
  int r0 = 0, r1 = 0, c0 = 0, c1 = 0;  // inclusive
};

// Largest all-true rectangle of a rows x cols row-major matrix.
Rect maximal_rectangle(const std::vector<std::uint8_t>& cells, int rows, int cols) {
  Rect best;
  std::vector<int> heights(static_cast<std::size_t>(cols), 0);
  std::vector<int> stack;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      auto& hgt = heights[static_cast<std::size_t>(c)];
      hgt = cells[static_cast<std::size_t>(r * cols + c)] ? hgt + 1 : 0;
    }
    stack.clear();
    for (int c = 0; c <= cols; ++c) {
      const int cur = (c == cols) ? 0 : heights[static_cast<std::size_t>(c)];
      while (!stack.empty() && heights[static_cast<std::size_t>(stack.back())] >= cur) {
        const int top = stack.back();
        stack.pop_back();
        const int hgt = heights[static_cast<std::size_t>(top)];
        const int left = stack.empty() ? 0 : stack.back() + 1;
        const auto area = static_cast<std::size_t>(hgt) * static_cast<std::size_t>(c - left);
        if (area > best.area) best = {area, r - hgt + 1, r, left, c - 1};
      }
      stack.push_back(c);
    }
  }
  return best;
}

struct Candidate {
  Rect rect;
  int axis = 0;
  int dir = 1;
  int layer = 0;
  int other[2] = {0, 0};
  int other_count = 0;
};

Index3 step(Index3 ijk, int axis, int delta) {
  ijk[axis] += delta;
  return ijk;
}

bool inside_grid(const GridSpec& g, const Index3& ijk) {
  for (int a = 0; a < g.dim; ++a) {
    if (ijk[a] < 0 || ijk[a] >= g.shape[a]) return false;
  }
  return true;
}

void require_connected(const VoxelDomain& domain, const IndexBox& seed) {
  const GridSpec& g = domain.grid();
  std::vector<std::uint8_t> seen(g.point_count(), 0);
  std::deque<Index3> queue{seed.lo};
  seen[g.index(seed.lo)] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const Index3 cur = queue.front();
    queue.pop_front();
    for (int a = 0; a < g.dim; ++a) {
      for (int delta : {-1, 1}) {
        const Index3 nb = step(cur, a, delta);
        if (!domain.contains(nb)) continue;
        const std::size_t q = g.index(nb);
        if (seen[q]) continue;
        seen[q] = 1;
        ++reached;
        queue.push_back(nb);
      }
    }
  }
  if (reached != domain.count()) {
    throw Error(ErrorKind::DisconnectedDomain,
                std::to_string(domain.count() - reached) + " domain points unreachable from the seed");
  }
}

double box_max(const VectorField& f, const IndexBox& box) {
  const GridSpec& g = f.grid();
  double m = 0.0;
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    if (!box.contains(g.multi_index(p), g.dim)) continue;
    for (int c = 0; c < f.components(); ++c) m = std::max(m, std::abs(f(p, c)));
  }
  return m;
}

VectorField restrict_field(const VectorField& f, const CoefficientTensorField& sub_g, const IndexBox& box) {
  VectorField out(sub_g.grid(), f.components());
  for (std::size_t p = 0; p < out.size(); ++p) {
    Index3 ijk = sub_g.grid().multi_index(p);
    for (int a = 0; a < sub_g.grid().dim; ++a) ijk[a] += box.lo[a];
    const std::size_t q = f.grid().index(ijk);
    for (int c = 0; c < f.components(); ++c) out(p, c) = f(q, c);
  }
  return out;
}

}  // namespace

FloodReport flood_propagate(const VoxelDomain& domain, const IndexBox& seed, const CoefficientTensorField& g,
                            const VectorField& zeta, const FloodSettings& settings) {
  const GridSpec& grid = domain.grid();
  const int dim = grid.dim;
  if (!(g.grid() == grid) || !(zeta.grid() == grid)) {
    throw Error(ErrorKind::DimensionMismatch, "domain, G and zeta must share one grid");
  }
  if (zeta.components() != dim) throw Error(ErrorKind::DimensionMismatch, "zeta must have N components");
  if (settings.overlap_cells < 1) throw Error(ErrorKind::InvalidArgument, "overlap_cells must be >= 1");

  for (int a = 0; a < dim; ++a) {
    if (seed.lo[a] > seed.hi[a] || seed.lo[a] < 0 || seed.hi[a] >= grid.shape[a]) {
      throw Error(ErrorKind::SeedOutsideDomain, "seed box leaves the grid");
    }
  }
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    const Index3 ijk = grid.multi_index(p);
    if (seed.contains(ijk, dim) && !domain.contains(p)) {
      throw Error(ErrorKind::SeedOutsideDomain, "seed box contains points outside the domain");
    }
  }
  require_connected(domain, seed);

  FloodReport rep;
  rep.domain_points = domain.count();
  double scale = 0.0;
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    if (!domain.contains(p)) continue;
    for (int c = 0; c < dim; ++c) scale = std::max(scale, std::abs(zeta(p, c)));
  }
  rep.tolerance = settings.tolerance > 0.0 ? settings.tolerance : kVanishTolerance * (1.0 + scale);

  rep.seed_max = box_max(zeta, seed);
  rep.seed_ok = rep.seed_max <= rep.tolerance;
  if (!rep.seed_ok) {
    rep.verdict = "zeta does not vanish on the seed region";
    return rep;
  }

  std::vector<std::uint8_t> covered(grid.point_count(), 0);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    if (seed.contains(grid.multi_index(p), dim)) covered[p] = 1;
  }
  auto is_covered = [&](const Index3& ijk) { return inside_grid(grid, ijk) && covered[grid.index(ijk)]; };

  for (;;) {
    std::optional<Candidate> best;
    for (int axis = 0; axis < dim; ++axis) {
      int other[2] = {0, 0};
      int other_count = 0;
      for (int a = 0; a < dim; ++a) {
        if (a != axis) other[other_count++] = a;
      }
      const int rows = grid.shape[other[0]];
      const int cols = other_count > 1 ? grid.shape[other[1]] : 1;
      for (int dir : {1, -1}) {
        std::vector<std::vector<std::uint8_t>> layers(static_cast<std::size_t>(grid.shape[axis]));
        for (std::size_t p = 0; p < grid.point_count(); ++p) {
          if (!covered[p]) continue;
          const Index3 ijk = grid.multi_index(p);
          const Index3 next = step(ijk, axis, dir);
          if (!domain.contains(next) || covered[grid.index(next)]) continue;
          bool backed = true;
          for (int k = 1; backed && k <= settings.overlap_cells; ++k) backed = is_covered(step(ijk, axis, -k * dir));
          if (!backed) continue;
          auto& layer = layers[static_cast<std::size_t>(ijk[axis])];
          if (layer.empty()) layer.assign(static_cast<std::size_t>(rows * cols), 0);
          const int c = other_count > 1 ? ijk[other[1]] : 0;
          layer[static_cast<std::size_t>(ijk[other[0]] * cols + c)] = 1;
        }
        for (int l = 0; l < grid.shape[axis]; ++l) {
          const auto& layer = layers[static_cast<std::size_t>(l)];
          if (layer.empty()) continue;
          const Rect r = maximal_rectangle(layer, rows, cols);
          if (!best || r.area > best->rect.area) {
            best = Candidate{r, axis, dir, l, {other[0], other[1]}, other_count};
          }
        }
      }
    }
    if (!best) break;

    const Candidate& cand = *best;
    IndexBox box;
    box.lo[cand.other[0]] = cand.rect.r0;
    box.hi[cand.other[0]] = cand.rect.r1;
    if (cand.other_count > 1) {
      box.lo[cand.other[1]] = cand.rect.c0;
      box.hi[cand.other[1]] = cand.rect.c1;
    }
    const int start = cand.layer - settings.overlap_cells * cand.dir;
    int end = cand.layer;
    for (;;) {
      const int next = end + cand.dir;
      if (next < 0 || next >= grid.shape[cand.axis]) break;
      bool all_in = true;
      for (int r = cand.rect.r0; all_in && r <= cand.rect.r1; ++r) {
        for (int c = cand.rect.c0; all_in && c <= cand.rect.c1; ++c) {
          Index3 ijk{0, 0, 0};
          ijk[cand.axis] = next;
          ijk[cand.other[0]] = r;
          if (cand.other_count > 1) ijk[cand.other[1]] = c;
          all_in = domain.contains(ijk);
        }
      }
      if (!all_in) break;
      end = next;
    }
    box.lo[cand.axis] = std::min(start, end);
    box.hi[cand.axis] = std::max(start, end);

    CoveringCuboid cub;
    cub.box = box;
    cub.axis = cand.axis;
    cub.forward = cand.dir > 0;

    const CoefficientTensorField sub_g = g.restrict_to(box.lo, box.hi);
    const VectorField sub_zeta = restrict_field(zeta, sub_g, box);
    const VectorField zero_face(face_grid(sub_g.grid(), cand.axis), dim);
    const VectorField propagated = propagate_along(sub_g, zero_face, settings.steps, cand.axis, cub.forward);
    cub.zeta_max = sub_zeta.max_abs();
    cub.propagated_max = propagated.max_abs();
    double mismatch = 0.0;
    for (std::size_t k = 0; k < sub_zeta.data().size(); ++k) {
      mismatch = std::max(mismatch, std::abs(sub_zeta.data()[k] - propagated.data()[k]));
    }
    bool stencil_ok = true;
    for (int a = 0; a < dim; ++a) stencil_ok = stencil_ok && sub_g.grid().shape[a] >= 3;
    if (stencil_ok) cub.residual = system_residual(sub_zeta, sub_g, rep.tolerance);
    cub.pass = mismatch <= rep.tolerance && cub.propagated_max <= rep.tolerance &&
               (!cub.residual || cub.residual->pass);

    for (std::size_t p = 0; p < grid.point_count(); ++p) {
      if (!covered[p] && box.contains(grid.multi_index(p), dim)) {
        covered[p] = 1;
        ++cub.newly_covered;
      }
    }
    rep.chain.push_back(cub);
    if (!cub.pass) {
      rep.first_failure = rep.chain.size() - 1;
      break;
    }
  }

  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    if (covered[p] && domain.contains(p)) ++rep.covered_points;
  }
  if (rep.first_failure) {
    rep.verdict = "zeta does not vanish on covering cuboid " + std::to_string(*rep.first_failure);
  } else if (rep.covered_points != rep.domain_points) {
    rep.verdict = "covering stalled with " + std::to_string(rep.domain_points - rep.covered_points) +
                  " domain points uncovered";
  } else {
    rep.pass = true;
    rep.verdict = "zeta vanishes on the whole domain";
  }
  return rep;
}

}  // namespace kornkit
