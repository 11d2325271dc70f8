#pragma once

#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <limits>
#include <vector>

#include "thinobs/closed_forms.hpp"

namespace thinobs {

// Uniform grid on [x1 range] x [x_n range] x [0, height]; the x_1 axis exists only for n = 2.
struct WeightedGrid {
  int n = 1;
  double h = 1.0 / 32;
  double s = 0.5;
  std::array<double, 2> tan_extent{-1.0, 1.0};
  std::array<double, 2> nor_extent{-1.0, 1.0};
  double height = 1.0;

  int count_tan() const { return n == 2 ? static_cast<int>(std::lround((tan_extent[1] - tan_extent[0]) / h)) + 1 : 1; }
  int count_nor() const { return static_cast<int>(std::lround((nor_extent[1] - nor_extent[0]) / h)) + 1; }
  int count_vert() const { return static_cast<int>(std::lround(height / h)) + 1; }
  std::size_t size() const {
    return static_cast<std::size_t>(count_tan()) * count_nor() * count_vert();
  }
  std::size_t index(int a, int i, int j) const {
    return (static_cast<std::size_t>(j) * count_nor() + i) * count_tan() + a;
  }
  // Thin nodes are the first count_tan()*count_nor() entries.
  std::size_t thin_size() const { return static_cast<std::size_t>(count_tan()) * count_nor(); }
  HalfPoint point(int a, int i, int j) const;
  HalfPoint point(std::size_t idx) const;
  void unpack(std::size_t idx, int& a, int& i, int& j) const;
  bool on_outer_boundary(int a, int i, int j) const;
};

// Validates spacing, extents and the minimum resolution (GridTooCoarse).
WeightedGrid make_grid(int n, double h, FracOrder s, std::array<double, 2> nor_extent = {-1.0, 1.0},
                       double height = 1.0, std::array<double, 2> tan_extent = {-1.0, 1.0});

enum class LoadForm { Weighted3 /* x^{3-2s} f */, Weighted1 /* x^{1-2s} f */ };
enum class FaceWeight { Midpoint, CellIntegrated };

using PointFn = std::function<double(const HalfPoint&)>;

struct ProblemSpec {
  WeightedGrid grid;
  PointFn f;          // empty means f = 0
  LoadForm form = LoadForm::Weighted3;
  PointFn obstacle;   // empty means unconstrained
  PointFn dirichlet;  // required
  FaceWeight face_weight = FaceWeight::CellIntegrated;
};

// Face conductances per vertical level.
struct Stencil {
  std::vector<double> horizontal;  // faces between neighbours at level j
  std::vector<double> vertical;    // faces between levels j and j+1
  std::vector<double> load;        // nodal load, already cell integrated
};

Stencil build_stencil(const ProblemSpec& spec);

struct AssembledSystem {
  Eigen::SparseMatrix<double> A;  // SPD on the unknowns
  Eigen::VectorXd b;
  std::vector<std::size_t> unknown_nodes;  // unknown index -> grid node
  std::vector<long> node_to_unknown;       // -1 for Dirichlet nodes
  Eigen::VectorXd cell_load;               // integral of the load over each node's dual cell
};

AssembledSystem assemble(const ProblemSpec& spec);

struct ResidualStats {
  double obstacle_violation = 0.0;
  double positive_flux = 0.0;
  double complementarity = 0.0;
  double equation = 0.0;  // max |(b - Au)_p| / A_pp over nodes that must satisfy the equation
};

struct DiscreteSolution {
  WeightedGrid grid;
  std::vector<double> values;     // all nodes
  std::vector<double> obstacle;   // thin nodes; -inf when unconstrained
  std::vector<double> flux;       // thin nodes: discrete x_{n+1}^{1-2s} d_{n+1} w
  std::vector<char> contact_mask; // thin nodes
  double energy = 0.0;
  double comp_residual = 0.0;
  ResidualStats residuals;
  int iterations = 0;
  double omega = 0.0;
  std::vector<double> energy_history;
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, DiscreteSolution best)
      : Error(ErrorCode::NotConverged, what), best_(std::move(best)) {}
  const DiscreteSolution& best() const noexcept { return best_; }

 private:
  DiscreteSolution best_;
};

struct SolveOptions {
  double omega = 1.5;
  bool auto_omega = false;     // 2 / (1 + sin(pi h))
  bool check_energy = false;   // verify monotone energy after every sweep
  int check_every = 10;
  const std::vector<double>* initial = nullptr;
};

DiscreteSolution solve_vi(const ProblemSpec& spec, double tol, int max_iter, const SolveOptions& opts = {});

// Residuals, flux, energy and contact mask of an arbitrary nodal field for this spec.
DiscreteSolution evaluate_iterate(const ProblemSpec& spec, std::vector<double> values);

// Samples a closed-form field on the grid, with obstacle 0 on the thin space.
DiscreteSolution sample_solution(const WeightedGrid& grid, const PointFn& field);

struct ComplementarityReport {
  double max_violation;
  double max_positive_flux;
  double max_product;
};

ComplementarityReport complementarity_report(const DiscreteSolution& sol);

}  // namespace thinobs
