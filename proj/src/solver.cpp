#include "thinobs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thinobs {

HalfPoint WeightedGrid::point(int a, int i, int j) const {
  const double xn = nor_extent[0] + i * h;
  const double xp = j * h;
  if (n == 2) return HalfPoint({tan_extent[0] + a * h}, xn, xp);
  return HalfPoint(xn, xp);
}

void WeightedGrid::unpack(std::size_t idx, int& a, int& i, int& j) const {
  const std::size_t na = count_tan(), ni = count_nor();
  a = static_cast<int>(idx % na);
  i = static_cast<int>((idx / na) % ni);
  j = static_cast<int>(idx / (na * ni));
}

HalfPoint WeightedGrid::point(std::size_t idx) const {
  int a, i, j;
  unpack(idx, a, i, j);
  return point(a, i, j);
}

bool WeightedGrid::on_outer_boundary(int a, int i, int j) const {
  if (i == 0 || i == count_nor() - 1 || j == count_vert() - 1) return true;
  return n == 2 && (a == 0 || a == count_tan() - 1);
}

namespace {

void check_multiple(double len, double h, const char* what) {
  const double q = len / h;
  if (!(len > 0.0) || std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, q))
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " extent must be a positive multiple of h");
  if (std::round(q) + 1 < 8) throw Error(ErrorCode::GridTooCoarse, std::string(what) + " axis has fewer than 8 nodes");
}

double power_integral(double a, double b, double q) {
  // int_a^b t^q dt, q > -1
  return (std::pow(b, q + 1.0) - std::pow(a, q + 1.0)) / (q + 1.0);
}

}  // namespace

WeightedGrid make_grid(int n, double h, FracOrder s, std::array<double, 2> nor_extent, double height,
                       std::array<double, 2> tan_extent) {
  if (n != 1 && n != 2) throw Error(ErrorCode::InvalidArgument, "thin-space dimension must be 1 or 2");
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
  WeightedGrid g;
  g.n = n;
  g.h = h;
  g.s = s;
  g.nor_extent = nor_extent;
  g.tan_extent = tan_extent;
  g.height = height;
  check_multiple(nor_extent[1] - nor_extent[0], h, "x_n");
  check_multiple(height, h, "x_{n+1}");
  if (n == 2) check_multiple(tan_extent[1] - tan_extent[0], h, "x_1");
  return g;
}

Stencil build_stencil(const ProblemSpec& spec) {
  const WeightedGrid& g = spec.grid;
  const int nj = g.count_vert();
  const double h = g.h, p = 1.0 - 2.0 * g.s;
  const double area_tan = std::pow(h, g.n - 1);  // tangential extent of a side face
  const double area_top = std::pow(h, g.n);
  Stencil st;
  st.horizontal.resize(nj);
  st.vertical.resize(nj - 1);
  for (int j = 0; j < nj; ++j) {
    const double lo = std::max(0.0, (j - 0.5) * h), hi = std::min(g.height, (j + 0.5) * h);
    if (spec.face_weight == FaceWeight::Midpoint) {
      const double mid = 0.5 * (lo + hi);
      st.horizontal[j] = area_tan * std::pow(mid, p) * (hi - lo) / h;
    } else {
      st.horizontal[j] = area_tan * power_integral(lo, hi, p) / h;
    }
  }
  for (int j = 0; j + 1 < nj; ++j) {
    if (spec.face_weight == FaceWeight::Midpoint) {
      st.vertical[j] = area_top * std::pow((j + 0.5) * h, p) / h;
    } else {
      st.vertical[j] = area_top / power_integral(j * h, (j + 1) * h, -p);
    }
  }
  st.load.assign(g.size(), 0.0);
  if (spec.f) {
    const double q = spec.form == LoadForm::Weighted3 ? 3.0 - 2.0 * g.s : p;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      int a, i, j;
      g.unpack(idx, a, i, j);
      const double lo = std::max(0.0, (j - 0.5) * h), hi = std::min(g.height, (j + 0.5) * h);
      st.load[idx] = spec.f(g.point(a, i, j)) * area_top * power_integral(lo, hi, q) / h;
    }
  }
  return st;
}

namespace {

struct Layout {
  int na, ni, nj;
  std::size_t sa, si, sj;  // strides
};

Layout layout_of(const WeightedGrid& g) {
  Layout l{g.count_tan(), g.count_nor(), g.count_vert(), 1, 0, 0};
  l.si = l.na;
  l.sj = static_cast<std::size_t>(l.na) * l.ni;
  return l;
}

// Neighbour sum and diagonal of node (a,i,j); Dirichlet neighbours enter through values.
inline void local_row(const Layout& L, const Stencil& st, int n, const std::vector<double>& u, int a, int i, int j,
                      double& nsum, double& diag) {
  const std::size_t idx = j * L.sj + i * L.si + a;
  const double ch = st.horizontal[j];
  nsum = ch * (u[idx - L.si] + u[idx + L.si]);
  diag = 2.0 * ch;
  if (n == 2) {
    nsum += ch * (u[idx - 1] + u[idx + 1]);
    diag += 2.0 * ch;
  }
  const double cu = st.vertical[j];
  nsum += cu * u[idx + L.sj];
  diag += cu;
  if (j > 0) {
    const double cd = st.vertical[j - 1];
    nsum += cd * u[idx - L.sj];
    diag += cd;
  }
}

double discrete_energy(const Layout& L, const Stencil& st, int n, const std::vector<double>& u) {
  double e = 0.0;
  for (int j = 0; j < L.nj; ++j)
    for (int i = 0; i < L.ni; ++i)
      for (int a = 0; a < L.na; ++a) {
        const std::size_t idx = j * L.sj + i * L.si + a;
        if (i + 1 < L.ni) e += 0.5 * st.horizontal[j] * std::pow(u[idx + L.si] - u[idx], 2);
        if (n == 2 && a + 1 < L.na) e += 0.5 * st.horizontal[j] * std::pow(u[idx + 1] - u[idx], 2);
        if (j + 1 < L.nj) e += 0.5 * st.vertical[j] * std::pow(u[idx + L.sj] - u[idx], 2);
        e += st.load[idx] * u[idx];
      }
  return e;
}

void fill_dirichlet(const ProblemSpec& spec, std::vector<double>& u) {
  const WeightedGrid& g = spec.grid;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    int a, i, j;
    g.unpack(idx, a, i, j);
    if (g.on_outer_boundary(a, i, j)) u[idx] = spec.dirichlet(g.point(a, i, j));
  }
}

std::vector<double> obstacle_values(const ProblemSpec& spec) {
  const WeightedGrid& g = spec.grid;
  std::vector<double> phi(g.thin_size(), -std::numeric_limits<double>::infinity());
  if (!spec.obstacle) return phi;
  for (std::size_t idx = 0; idx < g.thin_size(); ++idx) phi[idx] = spec.obstacle(g.point(idx));
  return phi;
}

void validate_spec(const ProblemSpec& spec) {
  if (!spec.dirichlet) throw Error(ErrorCode::InvalidArgument, "Dirichlet data required");
  const WeightedGrid& g = spec.grid;
  if (g.count_nor() < 8 || g.count_vert() < 8 || (g.n == 2 && g.count_tan() < 8))
    throw Error(ErrorCode::GridTooCoarse, "fewer than 8 nodes per axis");
  if (spec.obstacle) {
    for (std::size_t idx = 0; idx < g.thin_size(); ++idx) {
      int a, i, j;
      g.unpack(idx, a, i, j);
      if (!g.on_outer_boundary(a, i, j)) continue;
      const HalfPoint p = g.point(idx);
      if (spec.obstacle(p) > spec.dirichlet(p) + 1e-12)
        throw Error(ErrorCode::InvalidArgument, "obstacle exceeds the boundary data");
    }
  }
}

// Fills flux, contact mask, residual statistics and energy from the nodal values.
void finalize(const ProblemSpec& spec, const Stencil& st, DiscreteSolution& sol) {
  const WeightedGrid& g = spec.grid;
  const Layout L = layout_of(g);
  const double area_top = std::pow(g.h, g.n);
  sol.flux.assign(g.thin_size(), 0.0);
  sol.contact_mask.assign(g.thin_size(), 0);
  ResidualStats rs;
  for (int j = 0; j < L.nj; ++j)
    for (int i = 0; i < L.ni; ++i)
      for (int a = 0; a < L.na; ++a) {
        if (g.on_outer_boundary(a, i, j)) continue;
        const std::size_t idx = j * L.sj + i * L.si + a;
        double nsum, diag;
        local_row(L, st, g.n, sol.values, a, i, j, nsum, diag);
        const double r = nsum - st.load[idx] - diag * sol.values[idx];  // (b - Au)_p
        if (j == 0) {
          const double gap = sol.values[idx] - sol.obstacle[idx];
          const double d = r / area_top;
          sol.flux[idx] = d;
          const bool contact = std::isfinite(sol.obstacle[idx]) && gap <= 0.0;
          sol.contact_mask[idx] = contact ? 1 : 0;
          if (std::isfinite(sol.obstacle[idx])) {
            rs.obstacle_violation = std::max(rs.obstacle_violation, std::max(-gap, 0.0));
            rs.positive_flux = std::max(rs.positive_flux, std::max(d, 0.0));
            rs.complementarity = std::max(rs.complementarity, std::abs(d * std::max(gap, 0.0)));
          }
          if (!contact) rs.equation = std::max(rs.equation, std::abs(r) / diag);
        } else {
          rs.equation = std::max(rs.equation, std::abs(r) / diag);
        }
      }
  sol.residuals = rs;
  sol.comp_residual = std::max({rs.obstacle_violation, rs.positive_flux, rs.complementarity});
  sol.energy = discrete_energy(L, st, g.n, sol.values);
}

}  // namespace

AssembledSystem assemble(const ProblemSpec& spec) {
  validate_spec(spec);
  const WeightedGrid& g = spec.grid;
  const Stencil st = build_stencil(spec);
  const Layout L = layout_of(g);
  AssembledSystem sys;
  sys.node_to_unknown.assign(g.size(), -1);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    int a, i, j;
    g.unpack(idx, a, i, j);
    if (!g.on_outer_boundary(a, i, j)) {
      sys.node_to_unknown[idx] = static_cast<long>(sys.unknown_nodes.size());
      sys.unknown_nodes.push_back(idx);
    }
  }
  const std::size_t m = sys.unknown_nodes.size();
  std::vector<double> boundary(g.size(), 0.0);
  fill_dirichlet(spec, boundary);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m * (g.n == 2 ? 7 : 5));
  sys.b = Eigen::VectorXd::Zero(m);
  sys.cell_load = Eigen::VectorXd::Map(st.load.data(), st.load.size());
  for (std::size_t row = 0; row < m; ++row) {
    const std::size_t idx = sys.unknown_nodes[row];
    int a, i, j;
    g.unpack(idx, a, i, j);
    double diag = 0.0;
    auto link = [&](std::size_t nb, double c) {
      diag += c;
      const long col = sys.node_to_unknown[nb];
      if (col >= 0) trip.emplace_back(row, col, -c);
      else sys.b[row] += c * boundary[nb];
    };
    link(idx - L.si, st.horizontal[j]);
    link(idx + L.si, st.horizontal[j]);
    if (g.n == 2) {
      link(idx - 1, st.horizontal[j]);
      link(idx + 1, st.horizontal[j]);
    }
    link(idx + L.sj, st.vertical[j]);
    if (j > 0) link(idx - L.sj, st.vertical[j - 1]);
    trip.emplace_back(row, row, diag);
    sys.b[row] -= st.load[idx];
  }
  sys.A.resize(m, m);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

DiscreteSolution evaluate_iterate(const ProblemSpec& spec, std::vector<double> values) {
  validate_spec(spec);
  if (values.size() != spec.grid.size()) throw Error(ErrorCode::InvalidArgument, "value count does not match grid");
  const Stencil st = build_stencil(spec);
  DiscreteSolution sol;
  sol.grid = spec.grid;
  sol.values = std::move(values);
  sol.obstacle = obstacle_values(spec);
  finalize(spec, st, sol);
  return sol;
}

DiscreteSolution sample_solution(const WeightedGrid& grid, const PointFn& field) {
  ProblemSpec spec;
  spec.grid = grid;
  spec.dirichlet = field;
  spec.obstacle = [](const HalfPoint&) { return 0.0; };
  std::vector<double> values(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) values[idx] = field(grid.point(idx));
  return evaluate_iterate(spec, std::move(values));
}

DiscreteSolution solve_vi(const ProblemSpec& spec, double tol, int max_iter, const SolveOptions& opts) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  validate_spec(spec);
  const WeightedGrid& g = spec.grid;
  const Stencil st = build_stencil(spec);
  const Layout L = layout_of(g);
  const double omega = opts.auto_omega ? 2.0 / (1.0 + std::sin(M_PI * g.h)) : opts.omega;
  if (!(omega > 0.0 && omega < 2.0)) throw Error(ErrorCode::InvalidArgument, "relaxation parameter must lie in (0,2)");

  DiscreteSolution sol;
  sol.grid = g;
  sol.omega = omega;
  sol.obstacle = obstacle_values(spec);
  if (opts.initial) {
    if (opts.initial->size() != g.size()) throw Error(ErrorCode::InvalidArgument, "initial guess has wrong size");
    sol.values = *opts.initial;
  } else {
    sol.values.assign(g.size(), 0.0);
  }
  fill_dirichlet(spec, sol.values);
  for (std::size_t idx = 0; idx < g.thin_size(); ++idx) sol.values[idx] = std::max(sol.values[idx], sol.obstacle[idx]);

  std::vector<double>& u = sol.values;
  const int check_every = std::max(1, opts.check_every);
  double prev_energy = opts.check_energy ? discrete_energy(L, st, g.n, u) : 0.0;
  if (opts.check_energy) sol.energy_history.push_back(prev_energy);

  int it = 0;
  for (; it < max_iter; ++it) {
    for (int color = 0; color < 2; ++color) {
#pragma omp parallel for schedule(static)
      for (int j = 0; j < L.nj - 1; ++j) {
        for (int i = 1; i < L.ni - 1; ++i) {
          const int a0 = g.n == 2 ? 1 : 0, a1 = g.n == 2 ? L.na - 1 : 1;
          for (int a = a0; a < a1; ++a) {
            if (((a + i + j) & 1) != color) continue;
            const std::size_t idx = j * L.sj + i * L.si + a;
            double nsum, diag;
            local_row(L, st, g.n, u, a, i, j, nsum, diag);
            const double gs = (nsum - st.load[idx]) / diag;
            double next = u[idx] + omega * (gs - u[idx]);
            if (j == 0) next = std::max(next, sol.obstacle[idx]);
            u[idx] = next;
          }
        }
      }
    }
    if (opts.check_energy) {
      const double e = discrete_energy(L, st, g.n, u);
      if (e > prev_energy + 1e-12 * std::max(1.0, std::abs(prev_energy)))
        throw Error(ErrorCode::SolverFailure, "energy increased during a sweep");
      prev_energy = e;
      sol.energy_history.push_back(e);
    }
    if ((it + 1) % check_every == 0) {
      finalize(spec, st, sol);
      if (sol.residuals.equation <= tol && sol.comp_residual <= tol) {
        sol.iterations = it + 1;
        return sol;
      }
    }
  }
  finalize(spec, st, sol);
  sol.iterations = it;
  if (sol.residuals.equation <= tol && sol.comp_residual <= tol) return sol;
  throw NotConverged("no convergence after " + std::to_string(max_iter) + " sweeps (equation residual " +
                         std::to_string(sol.residuals.equation) + ", complementarity " +
                         std::to_string(sol.comp_residual) + ")",
                     sol);
}

ComplementarityReport complementarity_report(const DiscreteSolution& sol) {
  ComplementarityReport rep{0.0, 0.0, 0.0};
  for (std::size_t idx = 0; idx < sol.obstacle.size(); ++idx) {
    if (!std::isfinite(sol.obstacle[idx])) continue;
    const double gap = sol.values[idx] - sol.obstacle[idx];
    const double d = sol.flux[idx];
    rep.max_violation = std::max(rep.max_violation, std::max(-gap, 0.0));
    rep.max_positive_flux = std::max(rep.max_positive_flux, std::max(d, 0.0));
    rep.max_product = std::max(rep.max_product, std::abs(d * std::max(gap, 0.0)));
  }
  return rep;
}

}  // namespace thinobs
