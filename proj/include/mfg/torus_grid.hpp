#pragma once

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <utility>

namespace mfg {

/// Uniform periodic grid on the unit torus T^d, d in {1,2,3}.
///
/// Nodes are indexed lexicographically: node = i0 + n*i1 + n^2*i2 with
/// coordinates (i0*h, i1*h, i2*h), h = 1/n, period 1 per axis. There are
/// no ghost cells; neighbor lookups wrap via modular arithmetic.
class TorusGrid {
public:
  TorusGrid(int dim, int n) : dim_(dim), n_(n) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("TorusGrid: dim must be 1, 2 or 3");
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("TorusGrid: n must be even and >= 4");
    size_ = 1;
    for (int k = 0; k < 3; ++k) {
      strides_[k] = (k < dim) ? size_ : 0;
      if (k < dim) size_ *= n;
    }
  }

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  long size() const { return size_; }
  double spacing() const { return 1.0 / n_; }

  /// Quadrature weight of a single node. size() * cell_volume() == 1 exactly.
  double cell_volume() const { return 1.0 / static_cast<double>(size_); }

  long stride(int axis) const { return strides_[axis]; }

  /// Index of the node reached from `node` by `offset` steps along `axis`,
  /// with periodic wrap. |offset| may exceed n.
  long neighbor(long node, int axis, int offset) const {
    const long s = strides_[axis];
    const long i = (node / s) % n_;
    long j = (i + offset) % n_;
    if (j < 0) j += n_;
    return node + (j - i) * s;
  }

  double coord(long node, int axis) const {
    const long i = (node / strides_[axis]) % n_;
    return static_cast<double>(i) * spacing();
  }

  bool operator==(const TorusGrid& o) const { return dim_ == o.dim_ && n_ == o.n_; }
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }

private:
  int dim_;
  int n_;
  long size_;
  std::array<long, 3> strides_;
};

/// Real-valued function on the nodes of a TorusGrid, stored lexicographically.
struct ScalarField {
  TorusGrid grid;
  Eigen::ArrayXd values;

  ScalarField() : grid(1, 4), values(Eigen::ArrayXd::Zero(4)) {}
  ScalarField(TorusGrid g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("ScalarField: size mismatch");
  }

  static ScalarField zero(const TorusGrid& g) { return {g, Eigen::ArrayXd::Zero(g.size())}; }
  static ScalarField constant(const TorusGrid& g, double c) {
    return {g, Eigen::ArrayXd::Constant(g.size(), c)};
  }
};

/// d-component vector field; all components live on one grid.
struct VectorField {
  TorusGrid grid;
  std::array<Eigen::ArrayXd, 3> comp;  // comp[k] used for k < grid.dim()

  VectorField() : VectorField(TorusGrid(1, 4)) {}
  explicit VectorField(TorusGrid g) : grid(g) {
    for (int k = 0; k < grid.dim(); ++k) comp[k] = Eigen::ArrayXd::Zero(grid.size());
  }

  static VectorField zero(const TorusGrid& g) { return VectorField(g); }

  /// Pointwise Euclidean magnitude |F(x)|.
  ScalarField magnitude() const;
};

/// Evaluates f(x0,x1,x2) at every node; unused coordinates are passed as 0.
template <class F>
ScalarField map_coords(const TorusGrid& g, F&& f) {
  Eigen::ArrayXd v(g.size());
  for (long j = 0; j < g.size(); ++j) {
    double x[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < g.dim(); ++k) x[k] = g.coord(j, k);
    v[j] = f(x[0], x[1], x[2]);
  }
  return {g, std::move(v)};
}

/// Copy of `v` translated by `offset` nodes along `axis`:
/// out[x] = v[x + offset*h*e_axis].
Eigen::ArrayXd shifted(const TorusGrid& g, const Eigen::ArrayXd& v, int axis, int offset);

/// Deterministic compensated (Neumaier) sum of all entries.
double compensated_sum(const Eigen::ArrayXd& v);

/// Centered difference gradient, component i: (f(x+h e_i) - f(x-h e_i)) / (2h).
VectorField gradient(const ScalarField& f);

/// Sum over components of the centered difference; exactly the negative
/// transpose of `gradient` under the h^d-weighted inner product.
ScalarField divergence(const VectorField& F);

/// (2*dim+1)-point stencil; symmetric with zero row sums.
ScalarField laplacian(const ScalarField& f);

/// h^dim * sum of values, compensated summation, deterministic.
double integrate(const ScalarField& f);

/// (integrate(|f|^p))^(1/p); sup-norm for p = infinity. Rejects p < 1.
double lp_norm(const ScalarField& f, double p);

/// f - integrate(f).
ScalarField mean_zero_project(const ScalarField& f);

/// h^d-weighted inner product sum_x a(x) b(x) h^d.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& A, const VectorField& B);

}  // namespace mfg
