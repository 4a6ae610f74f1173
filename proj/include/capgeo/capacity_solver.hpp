// Variational p-capacity of a body by minimizing the discrete p-Dirichlet
// energy on a truncated exterior domain.
//
// Grid: tensor-product Cartesian grid over [-R, R]^n around the body center,
// uniform in a core block that contains the body and smoothly graded outside
// it. Nodes inside the body carry u = 1, nodes with |x - c| >= R carry u = 0.
//
// Energy: in every cell, the average over the cell corners of |g_c|^p, where
// g_c collects the forward differences along the cell edges incident to
// corner c. Where an edge leaves the exterior domain the difference is taken
// to the boundary crossing (cut edge), and cut cells are weighted by the
// volume fraction that lies in the domain. The energy is strictly convex in
// the free nodal values.
//
// Bodies symmetric under the coordinate reflections through their center are
// solved on one orthant with natural boundary conditions on the mirror planes.
#pragma once

#include "capgeo/body.hpp"
#include "capgeo/capacity_formulas.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace capgeo {

struct SolverConfig {
  int grid = 96;                 // cells per axis over [-R, R]
  double box_radius = 0.0;       // R; 0 selects box_factor * circumradius
  double box_factor = 5.0;       // default R in units of the circumradius
  double tol = 1e-8;             // relative energy change over `stall_window` iterations
  int stall_window = 50;
  int max_iter = 20000;
  bool graded = true;            // graded grid outside the core block
  double core_factor = 1.35;     // core half-width in units of the circumradius
  double core_fraction = 0.55;   // share of cells spent on the core block
  bool use_symmetry = true;      // orthant solve for reflection-symmetric bodies
  bool richardson = true;        // second solve at grid/2 and extrapolation
  double richardson_order = 2.0;
  double min_cut_fraction = 0.02;  // smallest relative cut-edge length
  double boundary_floor = 0.03;    // relative boundary error per (n - p) h / inradius
};

/// Tensor-product node coordinates for one axis: x = center + X(xi), xi = k / M.
/// X is linear on the core block and grows exponentially (smoothly joined) outside.
class AxisMap {
 public:
  AxisMap(double box_radius, double core_length, double core_fraction, bool graded)
      : box_radius_(box_radius), core_fraction_(core_fraction) {
    if (!graded || box_radius * core_fraction <= core_length) {
      uniform_ = true;
      return;
    }
    // X(xi) = a * int_0^xi exp(lambda * w * softplus((s - f) / w)) ds with X(f) = L, X(1) = R
    double lo = 0.0, hi = 200.0;
    for (int it = 0; it < 200; ++it) {
      lambda_ = 0.5 * (lo + hi);
      scale_ = core_length / integral(core_fraction_);
      if (scale_ * integral(1.0) > box_radius)
        hi = lambda_;
      else
        lo = lambda_;
    }
    lambda_ = 0.5 * (lo + hi);
    scale_ = core_length / integral(core_fraction_);
    stretch_ = box_radius / (scale_ * integral(1.0));  // fixes X(1) = R exactly
  }

  bool uniform() const { return uniform_; }

  double operator()(double xi) const {
    if (uniform_) return box_radius_ * xi;
    return stretch_ * scale_ * integral(xi);
  }

 private:
  static constexpr double kWidth = 0.06;

  double density(double s) const {
    const double z = (s - core_fraction_) / kWidth;
    const double sp = z > 30.0 ? z : std::log1p(std::exp(z));
    return std::exp(lambda_ * kWidth * sp);
  }

  // composite Simpson on [0, xi]
  double integral(double xi) const {
    const int m = 4096;
    const double h = xi / m;
    double s = density(0.0) + density(xi);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * density(i * h);
    return s * h / 3.0;
  }

  double box_radius_;
  double core_fraction_;
  bool uniform_ = false;
  double lambda_ = 0.0;
  double scale_ = 1.0;
  double stretch_ = 1.0;
};

enum class NodeState : std::uint8_t { free = 0, inside = 1, outer = 2 };

/// Converged equilibrium potential on the full box (orthant solves are mirrored).
struct PotentialField {
  int dim = 0;
  double p = 0.0;
  double box_radius = 0.0;
  Point center;
  std::vector<std::vector<double>> axes;  // node coordinates per axis
  std::vector<double> values;             // first axis fastest
  std::vector<NodeState> state;
  std::string body_descriptor;
  double raw_energy = 0.0;          // truncated discrete energy of this field
  double corrected_capacity = 0.0;  // truncation-corrected capacity of this grid

  /// Value a of the untruncated equilibrium potential on the outer sphere, from the
  /// equivalent-ball model: the untruncated potential is approximately a + (1 - a) u.
  double far_value() const {
    const double r_e = equivalent_shell_radius(dim, p, raw_energy, box_radius);
    return std::pow(box_radius / r_e, (p - dim) / (p - 1.0));
  }

  std::size_t count(int a) const { return axes[static_cast<std::size_t>(a)].size(); }
  std::size_t index(std::span<const std::size_t> idx) const {
    std::size_t k = 0, stride = 1;
    for (int a = 0; a < dim; ++a) {
      k += idx[static_cast<std::size_t>(a)] * stride;
      stride *= count(a);
    }
    return k;
  }
  double min_spacing() const {
    double h = 1e300;
    for (const auto& ax : axes)
      for (std::size_t i = 0; i + 1 < ax.size(); ++i) h = std::min(h, ax[i + 1] - ax[i]);
    return h;
  }
  double max_spacing() const {
    double h = 0.0;
    for (const auto& ax : axes)
      for (std::size_t i = 0; i + 1 < ax.size(); ++i) h = std::max(h, ax[i + 1] - ax[i]);
    return h;
  }
};

/// Record of one grid solve.
struct GridSolve {
  int grid = 0;
  double raw = 0.0;        // symmetry-completed truncated discrete energy
  double corrected = 0.0;  // truncation-corrected
  int iterations = 0;
  bool converged = false;
  double final_relative_change = 0.0;
  double seconds = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  double surface_spacing = 0.0;  // grid spacing at the body boundary
  double far_field_spread = 0.0;  // (max - min) / mean of u over the sphere of radius R/2
  bool orthant = false;
  bool energy_monotone = false;  // energy never increased across accepted iterations
};

struct PCapacityEstimate {
  int n = 0;
  double p = 0.0;
  std::string body_descriptor;
  double raw = 0.0;        // truncated discrete energy on the finest grid
  double corrected = 0.0;  // truncation-corrected value on the finest grid
  double value = 0.0;      // best estimate (Richardson-extrapolated when available)
  double lower = 0.0;
  double upper = 0.0;
  double normalized = 0.0;       // value / (((p-1)/(n-p))^{1-p} sigma)
  double capacity_radius = 0.0;  // C*
  double box_radius = 0.0;
  double h = 0.0;                // finest spacing at the boundary
  double circumscribed_correction = 0.0;  // raw * ball / shell at the circumscribed radius
  double truncation_uncertainty = 0.0;
  double discretization_uncertainty = 0.0;
  double convergence_uncertainty = 0.0;
  double inscribed_bound = 0.0;      // cap of the inscribed center ball
  double circumscribed_bound = 0.0;  // cap of the circumscribed center ball
  std::vector<GridSolve> solves;     // coarse first
  bool extrapolated = false;

  double half_width() const { return 0.5 * (upper - lower); }
  double relative_half_width() const { return half_width() / value; }
};

namespace detail {

inline bool reflection_symmetric(const Body& b) {
  return b.kind() != BodyKind::radial_graph && !b.is_rotated();
}

// Half-extent of the body along each coordinate axis, measured from its center.
inline std::vector<double> axis_extents(const Body& b) {
  const int n = b.dim();
  if (reflection_symmetric(b)) {
    if (b.kind() == BodyKind::ball) return std::vector<double>(static_cast<std::size_t>(n), b.ball_radius());
    return std::vector<double>(b.semi_axes().data(), b.semi_axes().data() + n);
  }
  std::vector<double> ext(static_cast<std::size_t>(n), 0.0);
  for (const Point& d : Body::sphere_directions(n, 20000)) {
    const Point x = b.radial_distance(d) * d;
    for (int a = 0; a < n; ++a) ext[static_cast<std::size_t>(a)] = std::max(ext[static_cast<std::size_t>(a)], std::abs(x[a]));
  }
  const double rc = b.circumradius();
  for (auto& e : ext) e = std::min(1.02 * e, rc);
  return ext;
}

template <int D>
class ExteriorProblem {
 public:
  ExteriorProblem(const Body& body, double p, double box_radius, std::array<std::vector<double>, D> coords, bool orthant,
                  double min_cut_fraction)
      : body_(body), p_(p), box_radius_(box_radius), coords_(std::move(coords)), orthant_(orthant) {
    total_ = 1;
    for (int a = 0; a < D; ++a) {
      dims_[a] = static_cast<int>(coords_[a].size());
      stride_[a] = static_cast<int>(total_);
      total_ *= static_cast<std::size_t>(dims_[a]);
    }
    symmetry_factor_ = orthant_ ? double(1 << D) : 1.0;
    classify_nodes();
    classify_cells(min_cut_fraction);
  }

  std::size_t size() const { return total_; }
  const std::vector<NodeState>& state() const { return state_; }
  double symmetry_factor() const { return symmetry_factor_; }
  const std::array<std::vector<double>, D>& coords() const { return coords_; }
  int dims(int a) const { return dims_[a]; }
  int stride(int a) const { return stride_[a]; }

  Point node_point(std::size_t k) const {
    Point x(D);
    for (int a = 0; a < D; ++a) {
      x[a] = coords_[a][k % static_cast<std::size_t>(dims_[a])];
      k /= static_cast<std::size_t>(dims_[a]);
    }
    return x;
  }

  /// Energy (symmetry-completed) and optionally its gradient and a Jacobi
  /// preconditioner; gradient and preconditioner vanish on fixed nodes.
  double evaluate(const std::vector<double>& u, std::vector<double>* grad, std::vector<double>* diag) const {
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
    if (diag) std::fill(diag->begin(), diag->end(), 0.0);
    double e = 0.0;
    if constexpr (D == 3)
      e = regular_cells_3d(u, grad, diag);
    else
      e = regular_cells_2d(u, grad, diag);
    e += cut_cells(u, grad, diag);
    if (grad)
      for (std::size_t k = 0; k < total_; ++k)
        if (state_[k] != NodeState::free) (*grad)[k] = 0.0;
    if (diag)
      for (std::size_t k = 0; k < total_; ++k)
        if (state_[k] != NodeState::free || (*diag)[k] <= 0.0) (*diag)[k] = 1.0;
    const double f = symmetry_factor_;
    if (grad)
      for (auto& g : *grad) g *= f;
    if (diag)
      for (auto& g : *diag) g *= f;
    return e * f;
  }

  /// Multilinear interpolation of nodal values at world point x (mirrored into the orthant).
  double interpolate(const std::vector<double>& u, const Point& x) const {
    std::array<int, D> i0;
    std::array<double, D> t;
    for (int a = 0; a < D; ++a) {
      const auto& c = coords_[a];
      double xa = x[a];
      if (orthant_) xa = c[0] + std::abs(xa - c[0]);
      xa = std::clamp(xa, c.front(), c.back());
      const auto it = std::upper_bound(c.begin(), c.end(), xa);
      const int i = std::clamp(static_cast<int>(it - c.begin()) - 1, 0, dims_[a] - 2);
      i0[a] = i;
      t[a] = (xa - c[static_cast<std::size_t>(i)]) / (c[static_cast<std::size_t>(i + 1)] - c[static_cast<std::size_t>(i)]);
    }
    double v = 0.0;
    for (int c = 0; c < (1 << D); ++c) {
      double w = 1.0;
      std::size_t k = 0;
      for (int a = 0; a < D; ++a) {
        const int bit = (c >> a) & 1;
        w *= bit ? t[a] : 1.0 - t[a];
        k += static_cast<std::size_t>((i0[a] + bit) * stride_[a]);
      }
      v += w * u[k];
    }
    return v;
  }

  double boundary_spacing() const {
    // mean edge length (cube root of the cell volume) of the cells cut by the body boundary
    double h = 0.0;
    int count = 0;
    for (const auto& c : cut_cells_)
      if (c.inner) {
        h += c.spacing;
        ++count;
      }
    return count ? h / count : 0.0;
  }

 private:
  struct CutCorner {
    int node;
    std::array<int, D> neighbor;       // -1: fixed value at the boundary crossing
    std::array<double, D> inv_length;  // 1 / edge length to neighbor or crossing
    std::array<double, D> fixed_value;
    double weight;  // domain volume attributed to this corner
  };
  struct CutCell {
    int first, count;
    bool inner;
    double spacing;
  };

  // pow(g2, (p-2)/2) with the p = 2 shortcut; zero gradient gives zero.
  double stiffness(double g2) const {
    if (p_ == 2.0) return 1.0;
    return g2 > 0.0 ? std::pow(g2, 0.5 * (p_ - 2.0)) : 0.0;
  }
  double precond_stiffness(double g2) const {
    if (p_ == 2.0) return 1.0;
    return std::pow(g2 + 1e-12, 0.5 * (p_ - 2.0));
  }

  bool in_domain(const Point& x) const {
    return !body_.contains(x) && (x - body_.center()).squaredNorm() < box_radius_ * box_radius_;
  }

  void classify_nodes() {
    state_.assign(total_, NodeState::free);
    for (std::size_t k = 0; k < total_; ++k) {
      const Point x = node_point(k);
      if (body_.contains(x))
        state_[k] = NodeState::inside;
      else if ((x - body_.center()).squaredNorm() >= box_radius_ * box_radius_)
        state_[k] = NodeState::outer;
    }
  }

  // Fraction t in (0, 1] of the way from free point a to fixed point b where the domain ends.
  double crossing(const Point& a, const Point& b) const {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 48; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (in_domain(a + mid * (b - a)))
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Lengths of the domain part of the segment [a, b] in its first and second half, as fractions of the segment.
  std::array<double, 2> segment_halves(const Point& a, const Point& b) const {
    constexpr int samples = 8;
    std::array<double, 2> out{0.0, 0.0};
    auto add = [&](double t0, double t1) {
      out[0] += std::max(0.0, std::min(t1, 0.5) - t0);
      out[1] += std::max(0.0, t1 - std::max(t0, 0.5));
    };
    double prev_t = 0.0;
    bool prev_in = in_domain(a);
    double start = prev_in ? 0.0 : -1.0;
    for (int s = 1; s <= samples; ++s) {
      const double t = double(s) / samples;
      const bool cur_in = in_domain(a + t * (b - a));
      if (cur_in != prev_in) {
        double lo = prev_t, hi = t;
        for (int it = 0; it < 30; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (in_domain(a + mid * (b - a)) == prev_in)
            lo = mid;
          else
            hi = mid;
        }
        const double x = 0.5 * (lo + hi);
        if (prev_in)
          add(start, x);
        else
          start = x;
      }
      prev_t = t;
      prev_in = cur_in;
    }
    if (prev_in) add(start, 1.0);
    return out;
  }

  // Domain volume fractions of the 2^D subcells (corner c owns the subcell at c) from
  // exact crossings along transverse columns.
  std::array<double, (1 << D)> subcell_fractions(const Point& lo, const Point& hi) const {
    constexpr int m = 8;  // columns per transverse axis, m / 2 per subcell
    int columns = 1;
    for (int a = 0; a < D - 1; ++a) columns *= m;
    std::array<double, (1 << D)> frac{};
    for (int c = 0; c < columns; ++c) {
      Point a = lo, b = hi;
      int rem = c, sub = 0;
      for (int ax = 0; ax < D - 1; ++ax) {
        const int k = rem % m;
        rem /= m;
        if (k >= m / 2) sub |= 1 << ax;
        a[ax] = b[ax] = lo[ax] + (k + 0.5) / m * (hi[ax] - lo[ax]);
      }
      a[D - 1] = lo[D - 1];
      b[D - 1] = hi[D - 1];
      const auto halves = segment_halves(a, b);
      frac[static_cast<std::size_t>(sub)] += halves[0];
      frac[static_cast<std::size_t>(sub | (1 << (D - 1)))] += halves[1];
    }
    // each subcell sees columns / 2^{D-1} columns, each half as long as the cell
    for (auto& f : frac) f *= double(1 << (D - 1)) * 2.0 / columns;
    return frac;
  }

  // First exit of the segment a -> b from the domain as a fraction of its length, and the
  // boundary value there; nullopt when the whole segment stays in the domain.
  std::optional<std::pair<double, double>> first_exit(const Point& a, const Point& b) const {
    constexpr int samples = 8;
    double prev = 0.0;
    for (int k = 1; k <= samples; ++k) {
      const double t = double(k) / samples;
      if (in_domain(a + t * (b - a))) {
        prev = t;
        continue;
      }
      double lo = prev, hi = t;
      for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (in_domain(a + mid * (b - a)))
          lo = mid;
        else
          hi = mid;
      }
      const Point x = a + hi * (b - a);
      return std::make_pair(0.5 * (lo + hi), body_.contains(x) ? 1.0 : 0.0);
    }
    return std::nullopt;
  }

  // Conservative test whether the boundary of the domain can meet the box [lo, hi].
  bool may_meet_boundary(const Point& lo, const Point& hi) const {
    const Point c = body_.center();
    double near2 = 0.0, far2 = 0.0;
    for (int a = 0; a < D; ++a) {
      const double d = std::max({lo[a] - c[a], 0.0, c[a] - hi[a]});
      const double f = std::max(std::abs(lo[a] - c[a]), std::abs(hi[a] - c[a]));
      near2 += d * d;
      far2 += f * f;
    }
    return near2 <= circumradius_ * circumradius_ || far2 >= box_radius_ * box_radius_;
  }

  void classify_cells(double min_cut) {
    circumradius_ = body_.circumradius() * (1.0 + 1e-9);
    std::array<int, D> cdims;
    std::size_t cells = 1;
    for (int a = 0; a < D; ++a) {
      cdims[a] = dims_[a] - 1;
      cells *= static_cast<std::size_t>(cdims[a]);
    }
    regular_.assign(cells, 0);
    for (std::size_t ci = 0; ci < cells; ++ci) {
      std::array<int, D> idx;
      std::size_t rem = ci;
      int base = 0;
      for (int a = 0; a < D; ++a) {
        idx[a] = static_cast<int>(rem % static_cast<std::size_t>(cdims[a]));
        rem /= static_cast<std::size_t>(cdims[a]);
        base += idx[a] * stride_[a];
      }
      int n_free = 0;
      for (int c = 0; c < (1 << D); ++c)
        if (state_[static_cast<std::size_t>(corner(base, c))] == NodeState::free) ++n_free;
      if (n_free == 0) continue;
      Point lo(D), hi(D);
      std::array<double, D> h;
      for (int a = 0; a < D; ++a) {
        lo[a] = coords_[a][static_cast<std::size_t>(idx[a])];
        hi[a] = coords_[a][static_cast<std::size_t>(idx[a] + 1)];
        h[a] = hi[a] - lo[a];
      }
      if (n_free == (1 << D) && !may_meet_boundary(lo, hi)) {
        regular_[ci] = 1;
        continue;
      }
      double vol = 1.0;
      for (int a = 0; a < D; ++a) vol *= h[a];
      CutCell cell{static_cast<int>(cut_corners_.size()), 0, false, std::pow(vol, 1.0 / D)};
      bool any_exit = n_free < (1 << D);
      for (int c = 0; c < (1 << D); ++c) {
        const int node = corner(base, c);
        if (state_[static_cast<std::size_t>(node)] != NodeState::free) continue;
        CutCorner cc{};
        cc.node = node;
        const Point xa = node_point(static_cast<std::size_t>(node));
        for (int a = 0; a < D; ++a) {
          const int other = corner(base, c ^ (1 << a));
          const auto exit = first_exit(xa, node_point(static_cast<std::size_t>(other)));
          if (!exit && state_[static_cast<std::size_t>(other)] == NodeState::free) {
            cc.neighbor[a] = other;
            cc.inv_length[a] = 1.0 / h[a];
            cc.fixed_value[a] = 0.0;
          } else {
            const double t = exit ? exit->first : 1.0;
            const double v = exit ? exit->second : (state_[static_cast<std::size_t>(other)] == NodeState::inside ? 1.0 : 0.0);
            cc.neighbor[a] = -1;
            cc.inv_length[a] = 1.0 / (std::max(t, min_cut) * h[a]);
            cc.fixed_value[a] = v;
            any_exit = true;
            if (v == 1.0) cell.inner = true;
          }
        }
        cut_corners_.push_back(cc);
        ++cell.count;
      }
      const auto fractions = subcell_fractions(lo, hi);
      double full = 0.0;
      for (const double f : fractions) full += f / (1 << D);
      if (!any_exit && full >= 1.0) {
        cut_corners_.resize(static_cast<std::size_t>(cell.first));
        regular_[ci] = 1;
        continue;
      }
      // each corner owns the domain part of its subcell; fixed corners hand theirs to free edge neighbours
      std::array<double, (1 << D)> sub{}, share{};
      for (int c = 0; c < (1 << D); ++c) sub[c] = vol / (1 << D) * fractions[static_cast<std::size_t>(c)];
      auto is_free = [&](int c) { return state_[static_cast<std::size_t>(corner(base, c))] == NodeState::free; };
      for (int c = 0; c < (1 << D); ++c) {
        if (is_free(c)) {
          share[c] += sub[c];
          continue;
        }
        int nf = 0;
        for (int ax = 0; ax < D; ++ax) nf += is_free(c ^ (1 << ax));
        for (int q = 0; q < (1 << D); ++q) {
          if (!is_free(q)) continue;
          if (nf == 0)
            share[q] += sub[c] / n_free;
          else if (std::popcount(static_cast<unsigned>(q ^ c)) == 1)
            share[q] += sub[c] / nf;
        }
      }
      for (int c = 0, q = cell.first; c < (1 << D); ++c)
        if (is_free(c)) cut_corners_[static_cast<std::size_t>(q++)].weight = share[c];
      cut_cells_.push_back(cell);
    }
  }

  int corner(int base, int c) const {
    int k = base;
    for (int a = 0; a < D; ++a)
      if (c & (1 << a)) k += stride_[a];
    return k;
  }

  double cut_cells(const std::vector<double>& u, std::vector<double>* grad, std::vector<double>* diag) const {
    double e = 0.0;
    for (const auto& cell : cut_cells_) {
      for (int q = cell.first; q < cell.first + cell.count; ++q) {
        const auto& cc = cut_corners_[static_cast<std::size_t>(q)];
        const double uc = u[static_cast<std::size_t>(cc.node)];
        std::array<double, D> d;
        double g2 = 0.0;
        for (int a = 0; a < D; ++a) {
          const double v = cc.neighbor[a] >= 0 ? u[static_cast<std::size_t>(cc.neighbor[a])] : cc.fixed_value[a];
          d[a] = (v - uc) * cc.inv_length[a];
          g2 += d[a] * d[a];
        }
        const double s = stiffness(g2);
        e += cc.weight * s * g2;
        if (grad) {
          const double w = cc.weight * p_ * s;
          for (int a = 0; a < D; ++a) {
            const double f = w * d[a] * cc.inv_length[a];
            (*grad)[static_cast<std::size_t>(cc.node)] -= f;
            if (cc.neighbor[a] >= 0) (*grad)[static_cast<std::size_t>(cc.neighbor[a])] += f;
          }
        }
        if (diag) {
          const double w = cc.weight * p_ * precond_stiffness(g2);
          for (int a = 0; a < D; ++a) {
            const double l2 = cc.inv_length[a] * cc.inv_length[a];
            (*diag)[static_cast<std::size_t>(cc.node)] += w * l2;
            if (cc.neighbor[a] >= 0) (*diag)[static_cast<std::size_t>(cc.neighbor[a])] += w * l2;
          }
        }
      }
    }
    return e;
  }

  double regular_cells_2d(const std::vector<double>& u, std::vector<double>* grad, std::vector<double>* diag) const {
    double e = 0.0;
    const int nx = dims_[0] - 1, ny = dims_[1] - 1, sy = stride_[1];
    for (int j = 0; j < ny; ++j) {
      const double hy = coords_[1][j + 1] - coords_[1][j];
      for (int i = 0; i < nx; ++i) {
        if (!regular_[static_cast<std::size_t>(i + nx * j)]) continue;
        const double hx = coords_[0][i + 1] - coords_[0][i];
        const double w = 0.25 * hx * hy;
        const std::size_t n00 = static_cast<std::size_t>(i + sy * j), n10 = n00 + 1, n01 = n00 + sy, n11 = n01 + 1;
        // edge differences: x-edges at y=0,1; y-edges at x=0,1
        const double ex0 = (u[n10] - u[n00]) / hx, ex1 = (u[n11] - u[n01]) / hx;
        const double ey0 = (u[n01] - u[n00]) / hy, ey1 = (u[n11] - u[n10]) / hy;
        const double g00 = ex0 * ex0 + ey0 * ey0, g10 = ex0 * ex0 + ey1 * ey1;
        const double g01 = ex1 * ex1 + ey0 * ey0, g11 = ex1 * ex1 + ey1 * ey1;
        const double s00 = stiffness(g00), s10 = stiffness(g10), s01 = stiffness(g01), s11 = stiffness(g11);
        e += w * (s00 * g00 + s10 * g10 + s01 * g01 + s11 * g11);
        if (grad) {
          auto& gr = *grad;
          const double c = w * p_;
          const double fx0 = c * (s00 + s10) * ex0 / hx, fx1 = c * (s01 + s11) * ex1 / hx;
          const double fy0 = c * (s00 + s01) * ey0 / hy, fy1 = c * (s10 + s11) * ey1 / hy;
          gr[n10] += fx0;
          gr[n00] -= fx0;
          gr[n11] += fx1;
          gr[n01] -= fx1;
          gr[n01] += fy0;
          gr[n00] -= fy0;
          gr[n11] += fy1;
          gr[n10] -= fy1;
        }
        if (diag) {
          auto& dg = *diag;
          const double c = w * p_;
          const double t00 = precond_stiffness(g00), t10 = precond_stiffness(g10);
          const double t01 = precond_stiffness(g01), t11 = precond_stiffness(g11);
          const double kx0 = c * (t00 + t10) / (hx * hx), kx1 = c * (t01 + t11) / (hx * hx);
          const double ky0 = c * (t00 + t01) / (hy * hy), ky1 = c * (t10 + t11) / (hy * hy);
          dg[n00] += kx0 + ky0;
          dg[n10] += kx0 + ky1;
          dg[n01] += kx1 + ky0;
          dg[n11] += kx1 + ky1;
        }
      }
    }
    return e;
  }

  double regular_cells_3d(const std::vector<double>& u, std::vector<double>* grad, std::vector<double>* diag) const {
    double e = 0.0;
    const int nx = dims_[0] - 1, ny = dims_[1] - 1, nz = dims_[2] - 1;
    const int sy = stride_[1], sz = stride_[2];
    for (int k = 0; k < nz; ++k) {
      const double hz = coords_[2][k + 1] - coords_[2][k];
      for (int j = 0; j < ny; ++j) {
        const double hy = coords_[1][j + 1] - coords_[1][j];
        for (int i = 0; i < nx; ++i) {
          if (!regular_[static_cast<std::size_t>(i + nx * (j + ny * k))]) continue;
          const double hx = coords_[0][i + 1] - coords_[0][i];
          const double w = 0.125 * hx * hy * hz;
          std::size_t n[8];
          n[0] = static_cast<std::size_t>(i + sy * j + sz * k);
          n[1] = n[0] + 1;
          n[2] = n[0] + sy;
          n[3] = n[2] + 1;
          n[4] = n[0] + sz;
          n[5] = n[1] + sz;
          n[6] = n[2] + sz;
          n[7] = n[3] + sz;
          // x-edges (0-1, 2-3, 4-5, 6-7), y-edges (0-2, 1-3, 4-6, 5-7), z-edges (0-4, 1-5, 2-6, 3-7)
          const double ex[4] = {(u[n[1]] - u[n[0]]) / hx, (u[n[3]] - u[n[2]]) / hx, (u[n[5]] - u[n[4]]) / hx,
                                (u[n[7]] - u[n[6]]) / hx};
          const double ey[4] = {(u[n[2]] - u[n[0]]) / hy, (u[n[3]] - u[n[1]]) / hy, (u[n[6]] - u[n[4]]) / hy,
                                (u[n[7]] - u[n[5]]) / hy};
          const double ez[4] = {(u[n[4]] - u[n[0]]) / hz, (u[n[5]] - u[n[1]]) / hz, (u[n[6]] - u[n[2]]) / hz,
                                (u[n[7]] - u[n[3]]) / hz};
          // corner c = (bx, by, bz): x-edge index by + 2bz, y-edge bx + 2bz, z-edge bx + 2by
          double g[8], s[8];
          for (int c = 0; c < 8; ++c) {
            const int bx = c & 1, by = (c >> 1) & 1, bz = (c >> 2) & 1;
            const double a = ex[by + 2 * bz], b = ey[bx + 2 * bz], d = ez[bx + 2 * by];
            g[c] = a * a + b * b + d * d;
            s[c] = stiffness(g[c]);
            e += w * s[c] * g[c];
          }
          if (grad) {
            auto& gr = *grad;
            const double cw = w * p_;
            // x-edge m joins corners (2m', 2m'+1) with m' = by + 2bz
            for (int m = 0; m < 4; ++m) {
              const int c0 = 2 * m;  // bx = 0 corner with (by, bz) = (m & 1, m >> 1)
              const double f = cw * (s[c0] + s[c0 + 1]) * ex[m] / hx;
              gr[n[c0 + 1]] += f;
              gr[n[c0]] -= f;
            }
            for (int m = 0; m < 4; ++m) {
              const int bx = m & 1, bz = m >> 1;
              const int c0 = bx + 4 * bz, c1 = c0 + 2;
              const double f = cw * (s[c0] + s[c1]) * ey[m] / hy;
              gr[n[c1]] += f;
              gr[n[c0]] -= f;
            }
            for (int m = 0; m < 4; ++m) {
              const int c0 = m, c1 = m + 4;  // (bx, by) = (m & 1, m >> 1)
              const double f = cw * (s[c0] + s[c1]) * ez[m] / hz;
              gr[n[c1]] += f;
              gr[n[c0]] -= f;
            }
          }
          if (diag) {
            auto& dg = *diag;
            const double cw = w * p_;
            double t[8];
            for (int c = 0; c < 8; ++c) t[c] = precond_stiffness(g[c]);
            const double ix = 1.0 / (hx * hx), iy = 1.0 / (hy * hy), iz = 1.0 / (hz * hz);
            for (int m = 0; m < 4; ++m) {
              const int c0 = 2 * m;
              const double kx = cw * (t[c0] + t[c0 + 1]) * ix;
              dg[n[c0]] += kx;
              dg[n[c0 + 1]] += kx;
              const int bx = m & 1, bz = m >> 1;
              const int d0 = bx + 4 * bz;
              const double ky = cw * (t[d0] + t[d0 + 2]) * iy;
              dg[n[d0]] += ky;
              dg[n[d0 + 2]] += ky;
              const double kz = cw * (t[m] + t[m + 4]) * iz;
              dg[n[m]] += kz;
              dg[n[m + 4]] += kz;
            }
          }
        }
      }
    }
    return e;
  }

  const Body& body_;
  double p_;
  double box_radius_;
  std::array<std::vector<double>, D> coords_;
  bool orthant_;
  std::array<int, D> dims_{};
  std::array<int, D> stride_{};
  std::size_t total_ = 0;
  double symmetry_factor_ = 1.0;
  std::vector<NodeState> state_;
  double circumradius_ = 0.0;
  std::vector<std::uint8_t> regular_;
  std::vector<CutCorner> cut_corners_;
  std::vector<CutCell> cut_cells_;
};

struct MinimizeResult {
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  double relative_change = 0.0;
  std::vector<double> history;  // energy after each accepted iteration
};

/// Preconditioned nonlinear conjugate gradients (Polak-Ribiere+) with a
/// safeguarded secant line search on the directional derivative. Only
/// energy-decreasing steps are accepted.
template <class Problem>
MinimizeResult minimize_energy(const Problem& prob, std::vector<double>& u, double tol, int window, int max_iter) {
  const std::size_t n = u.size();
  std::vector<double> g(n), diag(n), r(n), z(n), z_old(n), d(n), trial(n), g_trial(n);
  MinimizeResult res;
  double e = prob.evaluate(u, &g, &diag);
  res.history.push_back(e);
  for (std::size_t k = 0; k < n; ++k) {
    r[k] = -g[k];
    z[k] = r[k] / diag[k];
    d[k] = z[k];
  }
  auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
  };
  double rz = dot(r, z);
  double alpha_guess = 1.0;
  int since_precond = 0;
  for (int it = 1; it <= max_iter; ++it) {
    double slope0 = -dot(r, d);
    if (!(slope0 < 0.0)) {
      d = z;
      slope0 = -dot(r, d);
      if (!(slope0 < 0.0)) {
        res.converged = true;
        break;
      }
    }
    // line search on phi'(alpha) = g(u + alpha d) . d
    auto probe = [&](double alpha, double& slope) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = u[k] + alpha * d[k];
      const double et = prob.evaluate(trial, &g_trial, nullptr);
      slope = dot(g_trial, d);
      return et;
    };
    double lo = 0.0, slo = slope0, hi = -1.0, shi = 0.0;
    double best_alpha = 0.0, best_e = e, best_slope = slope0;
    std::vector<double> best_g;
    double alpha = alpha_guess;
    for (int ls = 0; ls < 8; ++ls) {
      double s = 0.0;
      const double et = probe(alpha, s);
      if (std::isfinite(et) && et < best_e) {
        best_e = et;
        best_alpha = alpha;
        best_slope = s;
        best_g = g_trial;
      }
      if (s < 0.0 && std::isfinite(et)) {
        lo = alpha;
        slo = s;
      } else {
        hi = alpha;
        shi = s;
      }
      if (std::isfinite(et) && et <= e && std::abs(s) <= 0.1 * std::abs(slope0)) break;
      if (hi < 0.0) {
        // extrapolate with the secant, at most 4x
        const double sec = (slo - slope0) != 0.0 ? lo - slo * lo / (slo - slope0) : 4.0 * lo;
        alpha = std::clamp(sec, 1.5 * lo, 4.0 * lo);
      } else if (!std::isfinite(shi)) {
        alpha = 0.5 * (lo + hi);
      } else {
        const double sec = lo - slo * (hi - lo) / (shi - slo);
        alpha = std::clamp(sec, lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
      }
    }
    if (best_alpha == 0.0) {
      // no decrease along d: restart from the preconditioned gradient once
      if (since_precond == 0) {
        res.converged = true;
        break;
      }
      d = z;
      since_precond = 0;
      alpha_guess = 1e-3 * alpha_guess;
      continue;
    }
    (void)best_slope;
    for (std::size_t k = 0; k < n; ++k) u[k] += best_alpha * d[k];
    const double e_old = e;
    e = best_e;
    alpha_guess = best_alpha;
    res.history.push_back(e);
    res.iterations = it;
    // new gradient; refresh the preconditioner every 10 iterations
    if (it % 10 == 0)
      prob.evaluate(u, &g, &diag);
    else
      g = best_g;
    z_old = z;
    const double rz_old = rz;
    double rz_mix = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      r[k] = -g[k];
      z[k] = r[k] / diag[k];
      rz_mix += r[k] * z_old[k];
    }
    rz = dot(r, z);
    const double beta = std::max(0.0, (rz - rz_mix) / rz_old);
    for (std::size_t k = 0; k < n; ++k) d[k] = z[k] + beta * d[k];
    ++since_precond;
    (void)e_old;
    const auto h = res.history.size();
    if (h > static_cast<std::size_t>(window)) {
      const double ref = res.history[h - 1 - static_cast<std::size_t>(window)];
      res.relative_change = (ref - e) / std::abs(e);
      if (res.relative_change < tol) {
        res.converged = true;
        break;
      }
    }
  }
  res.energy = e;
  return res;
}

// Nodal values on the index lattice of one grid, used to seed a finer solve.
struct LatticeSolution {
  int dim = 0;
  bool orthant = false;
  int half = 0;  // cells per half axis
  std::vector<double> values;
};

template <int D>
std::array<std::vector<double>, D> lattice_coords(const Point& center, const std::vector<AxisMap>& maps, int half,
                                                  bool orthant) {
  std::array<std::vector<double>, D> c;
  for (int a = 0; a < D; ++a) {
    const AxisMap& map = maps[static_cast<std::size_t>(a)];
    if (orthant) {
      for (int k = 0; k <= half; ++k) c[a].push_back(center[a] + map(double(k) / half));
    } else {
      for (int k = -half; k <= half; ++k) c[a].push_back(center[a] + (k < 0 ? -map(double(-k) / half) : map(double(k) / half)));
    }
  }
  return c;
}

// Radial shell profile through the body's own radial function.
template <int D>
std::vector<double> initial_guess(const ExteriorProblem<D>& prob, const Body& body, double p, double big_r) {
  const double gamma = (p - D) / (p - 1.0);
  std::vector<double> u(prob.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto s = prob.state()[k];
    if (s != NodeState::free) {
      u[k] = s == NodeState::inside ? 1.0 : 0.0;
      continue;
    }
    const Point d = prob.node_point(k) - body.center();
    const double r = d.norm();
    const double rho = body.radial_distance(d);
    const double top = std::pow(r / rho, gamma) - std::pow(big_r / rho, gamma);
    const double bottom = 1.0 - std::pow(big_r / rho, gamma);
    u[k] = std::clamp(top / bottom, 0.0, 1.0);
  }
  return u;
}

// Multilinear interpolation of a coarse lattice solution in the reference coordinate xi.
template <int D>
void seed_from_coarse(const ExteriorProblem<D>& prob, int half, bool orthant, const LatticeSolution& coarse,
                      std::vector<double>& u) {
  const int cn = orthant ? coarse.half + 1 : 2 * coarse.half + 1;
  const double ratio = double(coarse.half) / half;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (prob.state()[k] != NodeState::free) continue;
    std::array<int, D> i0;
    std::array<double, D> t;
    std::size_t rem = k;
    for (int a = 0; a < D; ++a) {
      const int idx = static_cast<int>(rem % static_cast<std::size_t>(prob.dims(a)));
      rem /= static_cast<std::size_t>(prob.dims(a));
      const double f = orthant ? idx * ratio : (idx - half) * ratio + coarse.half;
      i0[a] = std::min(static_cast<int>(std::floor(f)), cn - 2);
      t[a] = f - i0[a];
    }
    double v = 0.0;
    for (int c = 0; c < (1 << D); ++c) {
      double w = 1.0;
      std::size_t ci = 0, stride = 1;
      for (int a = 0; a < D; ++a) {
        const int bit = (c >> a) & 1;
        w *= bit ? t[a] : 1.0 - t[a];
        ci += static_cast<std::size_t>(i0[a] + bit) * stride;
        stride *= static_cast<std::size_t>(cn);
      }
      if (w != 0.0) v += w * coarse.values[ci];
    }
    u[k] = std::clamp(v, 0.0, 1.0);
  }
}

template <int D>
PotentialField make_field(const ExteriorProblem<D>& prob, const std::vector<double>& u, bool orthant, const Body& body,
                          double p, double big_r) {
  PotentialField f;
  f.dim = D;
  f.p = p;
  f.box_radius = big_r;
  f.center = body.center();
  f.body_descriptor = body.descriptor();
  std::array<int, D> src_dims;
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) {
    const auto& c = prob.coords()[a];
    src_dims[a] = static_cast<int>(c.size());
    std::vector<double> ax;
    if (orthant) {
      for (std::size_t i = c.size() - 1; i > 0; --i) ax.push_back(2.0 * c[0] - c[i]);
    }
    ax.insert(ax.end(), c.begin(), c.end());
    total *= ax.size();
    f.axes.push_back(std::move(ax));
  }
  f.values.resize(total);
  f.state.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k, src = 0, stride = 1;
    for (int a = 0; a < D; ++a) {
      const int n_a = static_cast<int>(f.axes[static_cast<std::size_t>(a)].size());
      int i = static_cast<int>(rem % static_cast<std::size_t>(n_a));
      rem /= static_cast<std::size_t>(n_a);
      if (orthant) i = std::abs(i - (src_dims[a] - 1));
      src += static_cast<std::size_t>(i) * stride;
      stride *= static_cast<std::size_t>(src_dims[a]);
    }
    f.values[k] = u[src];
    f.state[k] = prob.state()[src];
  }
  return f;
}

struct GridOutcome {
  GridSolve record;
  LatticeSolution lattice;
  std::optional<PotentialField> field;
};

template <int D>
GridOutcome solve_on_grid(const Body& body, double p, const SolverConfig& cfg, int grid, double big_r,
                          const LatticeSolution* coarse, bool want_field) {
  const auto start = std::chrono::steady_clock::now();
  const bool orthant = cfg.use_symmetry && reflection_symmetric(body);
  const int half = grid / 2;
  std::vector<AxisMap> maps;
  for (const double e : axis_extents(body)) maps.emplace_back(big_r, cfg.core_factor * e, cfg.core_fraction, cfg.graded);
  ExteriorProblem<D> prob(body, p, big_r, lattice_coords<D>(body.center(), maps, half, orthant), orthant,
                          cfg.min_cut_fraction);
  std::vector<double> u = initial_guess(prob, body, p, big_r);
  if (coarse && coarse->orthant == orthant && coarse->dim == D) seed_from_coarse(prob, half, orthant, *coarse, u);
  const MinimizeResult mr = minimize_energy(prob, u, cfg.tol, cfg.stall_window, cfg.max_iter);
  if (!mr.converged)
    throw NumericalError("solve_p_capacity: no convergence within " + std::to_string(cfg.max_iter) +
                         " iterations (relative change " + std::to_string(mr.relative_change) + ")");
  double excursion = 0.0;
  for (const double v : u) excursion = std::max({excursion, -v, v - 1.0});
  if (excursion > 1e-6)
    throw NumericalError("solve_p_capacity: potential left [0, 1] by " + std::to_string(excursion));
  GridOutcome out;
  auto& r = out.record;
  r.grid = grid;
  r.raw = mr.energy;
  r.corrected = ball_capacity(D, p, equivalent_shell_radius(D, p, mr.energy, big_r));
  r.iterations = mr.iterations;
  r.converged = mr.converged;
  r.final_relative_change = mr.relative_change;
  r.orthant = orthant;
  r.energy_monotone = std::adjacent_find(mr.history.begin(), mr.history.end(), std::less<double>()) == mr.history.end();
  r.surface_spacing = prob.boundary_spacing();
  {
    double lo = 1e300, hi = -1e300, mean = 0.0;
    const auto dirs = Body::sphere_directions(D, 400);
    for (const Point& d : dirs) {
      const double v = prob.interpolate(u, body.center() + 0.5 * big_r * d);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v / static_cast<double>(dirs.size());
    }
    r.far_field_spread = mean > 0.0 ? (hi - lo) / mean : 0.0;
  }
  r.h_min = 1e300;
  r.h_max = 0.0;
  for (const auto& ax : prob.coords())
    for (std::size_t i = 0; i + 1 < ax.size(); ++i) {
      r.h_min = std::min(r.h_min, ax[i + 1] - ax[i]);
      r.h_max = std::max(r.h_max, ax[i + 1] - ax[i]);
    }
  out.lattice = {D, orthant, half, u};
  if (want_field) {
    out.field = make_field(prob, u, orthant, body, p, big_r);
    out.field->raw_energy = r.raw;
    out.field->corrected_capacity = r.corrected;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline GridOutcome solve_on_grid(const Body& body, double p, const SolverConfig& cfg, int grid, double big_r,
                                 const LatticeSolution* coarse, bool want_field) {
  if (body.dim() == 2) return solve_on_grid<2>(body, p, cfg, grid, big_r, coarse, want_field);
  if (body.dim() == 3) return solve_on_grid<3>(body, p, cfg, grid, big_r, coarse, want_field);
  throw InvalidArgument("solve_p_capacity: capacity solves support n = 2 and n = 3 only");
}

inline double resolve_box_radius(const Body& body, const SolverConfig& cfg) {
  const double rc = body.circumradius();
  const double big_r = cfg.box_radius > 0.0 ? cfg.box_radius : cfg.box_factor * rc;
  // clearance of two diameters between the body and the box
  if (big_r < 5.0 * rc * (1.0 - 1e-12))
    throw InvalidArgument("solve_p_capacity: box radius " + format_number(big_r) + " leaves less than two diameters of clearance");
  return big_r;
}

inline void check_solver_p(int n, double p) {
  check_p_range(n, p);
  if (p < 1.05 || p > n - 0.05)
    throw InvalidArgument("solve_p_capacity: p = " + format_number(p) + " outside [1.05, n - 0.05]");
}

}  // namespace detail

struct CapacitySolve {
  PCapacityEstimate estimate;
  std::optional<PotentialField> field;
};

/// Solve on `cfg.grid` (and on cfg.grid / 2 for Richardson extrapolation) and bracket cap_p(body).
inline CapacitySolve solve_p_capacity_with_field(const Body& body, double p, const SolverConfig& cfg = {},
                                                 bool want_field = true) {
  const int n = body.dim();
  detail::check_solver_p(n, p);
  if (n != 2 && n != 3) throw InvalidArgument("solve_p_capacity: capacity solves support n = 2 and n = 3 only");
  if (cfg.grid < 8 || cfg.grid % 4 != 0) throw InvalidArgument("solve_p_capacity: grid must be a multiple of 4, at least 8");
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || cfg.stall_window < 1) throw InvalidArgument("solve_p_capacity: bad tolerance settings");
  const double big_r = detail::resolve_box_radius(body, cfg);

  CapacitySolve out;
  auto& est = out.estimate;
  est.n = n;
  est.p = p;
  est.body_descriptor = body.descriptor();
  est.box_radius = big_r;
  const double r_in = body.inradius(), r_out = body.circumradius();
  est.inscribed_bound = ball_capacity(n, p, r_in);
  est.circumscribed_bound = ball_capacity(n, p, r_out);

  std::optional<detail::GridOutcome> coarse;
  if (cfg.richardson) {
    coarse = detail::solve_on_grid(body, p, cfg, cfg.grid / 2, big_r, nullptr, false);
    est.solves.push_back(coarse->record);
  }
  auto fine = detail::solve_on_grid(body, p, cfg, cfg.grid, big_r, coarse ? &coarse->lattice : nullptr, want_field);
  est.solves.push_back(fine.record);
  out.field = std::move(fine.field);

  const auto& f = fine.record;
  est.raw = f.raw;
  est.corrected = f.corrected;
  est.h = f.surface_spacing > 0.0 ? f.surface_spacing : f.h_min;

  // truncation: the equivalent-ball correction is exact for balls; the residual
  // scales with the squared far-field anisotropy
  est.circumscribed_correction = f.raw * ball_capacity(n, p, r_out) / annulus_capacity(n, p, r_out, big_r);
  est.truncation_uncertainty =
      std::abs(f.raw - f.corrected) * f.far_field_spread * f.far_field_spread * (r_out / big_r);
  est.convergence_uncertainty = 10.0 * std::max(f.final_relative_change, 0.0) * f.corrected;

  double value = f.corrected;
  double disc = 0.0;
  if (coarse) {
    const double ratio = 2.0;
    const double d = f.corrected - coarse->record.corrected;
    value = f.corrected + d / (std::pow(ratio, cfg.richardson_order) - 1.0);
    // first-order-safe spread: the order-1 extrapolation distance
    disc = std::abs(d) / (ratio - 1.0);
    est.extrapolated = true;
  } else {
    disc = f.corrected * (n - p) * 0.5 * est.h / r_in;
  }
  // residual boundary error left by a two-grid estimate when the grid errors cancel
  disc += cfg.boundary_floor * f.corrected * (n - p) * est.h / r_in;
  est.value = value;
  est.discretization_uncertainty = disc;
  const double half = disc + est.truncation_uncertainty + est.convergence_uncertainty;
  // the inscribed and circumscribed balls bound the truth; the bracket is
  // clamped to them and then widened to hold the reported estimates
  est.lower = std::clamp(value - half, est.inscribed_bound, est.circumscribed_bound);
  est.upper = std::clamp(value + half, est.inscribed_bound, est.circumscribed_bound);
  est.lower = std::min({est.lower, est.corrected, value});
  est.upper = std::max({est.upper, est.corrected, value});
  est.normalized = normalized_capacity(n, p, est.value);
  est.capacity_radius = capacity_radius(n, p, est.value);
  return out;
}

inline PCapacityEstimate solve_p_capacity(const Body& body, double p, const SolverConfig& cfg = {}) {
  return solve_p_capacity_with_field(body, p, cfg, false).estimate;
}

}  // namespace capgeo
