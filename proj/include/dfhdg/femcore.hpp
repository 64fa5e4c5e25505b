#pragma once

// Reference-element polynomial bases, quadrature rules and affine maps on
// triangles and segments.
//
// The reference triangle is {(0,0), (1,0), (0,1)}; the reference segment is
// [0,1]. Everything is templated on the scalar type so the same tables can be
// built in extended precision when a test wants an independent check.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace dfhdg {

using Real = double;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Number of polynomials of total degree <= k in two variables.
constexpr int dim_pk(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

/// Exponent pairs (a, b) of x^a y^b, ordered by total degree then by
/// decreasing power of x.
inline std::vector<std::pair<int, int>> monomial_exponents(int k) {
  std::vector<std::pair<int, int>> e;
  e.reserve(dim_pk(k));
  for (int d = 0; d <= k; ++d)
    for (int b = 0; b <= d; ++b) e.emplace_back(d - b, b);
  return e;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

enum class Domain { triangle, segment };

inline constexpr int kMaxQuadratureDegree = 60;

class QuadratureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Scalar>
struct QuadRule {
  using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using WeightVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Domain domain = Domain::triangle;
  PointMatrix points;  // one row per point; 2 columns (triangle) or 1 (segment)
  WeightVector weights;
  int exact_degree = 0;

  Eigen::Index size() const { return weights.size(); }
};

namespace detail {

// Golub-Welsch nodes and weights on [-1,1] for the Jacobi weight
// (1-x)^alpha (1+x)^beta. alpha, beta are small nonnegative integers here.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>
gauss_jacobi(int n, Scalar alpha, Scalar beta) {
  using VecS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using std::sqrt;
  using std::tgamma;
  MatS jacobi = MatS::Zero(n, n);
  const Scalar ab = alpha + beta;
  for (int i = 0; i < n; ++i) {
    const Scalar two_n_ab = Scalar(2 * i) + ab;
    if (i == 0)
      jacobi(0, 0) = (beta - alpha) / (ab + Scalar(2));
    else
      jacobi(i, i) = (beta * beta - alpha * alpha) / (two_n_ab * (two_n_ab + Scalar(2)));
    if (i + 1 < n) {
      const Scalar j = Scalar(i + 1);
      const Scalar t = Scalar(2) * j + ab;
      const Scalar off = sqrt(Scalar(4) * j * (j + alpha) * (j + beta) * (j + ab) /
                              (t * t * (t + Scalar(1)) * (t - Scalar(1))));
      jacobi(i, i + 1) = off;
      jacobi(i + 1, i) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatS> eig(jacobi);
  const Scalar mu0 = std::pow(Scalar(2), ab + Scalar(1)) * Scalar(tgamma(double(alpha) + 1)) *
                     Scalar(tgamma(double(beta) + 1)) / Scalar(tgamma(double(ab) + 2));
  VecS nodes = eig.eigenvalues();
  VecS weights = mu0 * eig.eigenvectors().row(0).transpose().array().square();
  return {nodes, weights};
}

}  // namespace detail

/// Quadrature rule on the reference domain that is exact for all polynomials
/// of total degree <= required_degree. Triangle rules are collapsed
/// (Duffy) products of Gauss-Legendre and Gauss-Jacobi(1,0) rules.
template <typename Scalar = Real>
QuadRule<Scalar> make_quadrature(Domain domain, int required_degree) {
  if (required_degree < 0) throw QuadratureError("quadrature degree must be nonnegative");
  if (required_degree > kMaxQuadratureDegree)
    throw QuadratureError("quadrature degree " + std::to_string(required_degree) +
                          " exceeds the maximum supported degree " +
                          std::to_string(kMaxQuadratureDegree));
  const int n = (required_degree + 2) / 2;  // 2n-1 >= degree
  QuadRule<Scalar> rule;
  rule.domain = domain;
  rule.exact_degree = 2 * n - 1;
  auto [gl_x, gl_w] = detail::gauss_jacobi<Scalar>(n, Scalar(0), Scalar(0));
  if (domain == Domain::segment) {
    rule.points = ((gl_x.array() + Scalar(1)) / Scalar(2)).matrix();
    rule.weights = gl_w / Scalar(2);
    return rule;
  }
  auto [gj_x, gj_w] = detail::gauss_jacobi<Scalar>(n, Scalar(1), Scalar(0));
  rule.points.resize(n * n, 2);
  rule.weights.resize(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Scalar a = gl_x(i), b = gj_x(j);
      const int q = i * n + j;
      rule.points(q, 0) = (Scalar(1) + a) * (Scalar(1) - b) / Scalar(4);
      rule.points(q, 1) = (Scalar(1) + b) / Scalar(2);
      rule.weights(q) = gl_w(i) * gj_w(j) / Scalar(8);
    }
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Bases
// ---------------------------------------------------------------------------

enum class BasisKind { orthonormal, nodal };

/// Polynomial basis of P_k on the reference triangle, stored as coefficients
/// over the monomials x^a y^b.
template <typename Scalar = Real>
class CellBasis {
 public:
  using MatS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VecS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  CellBasis(int degree, BasisKind kind) : degree_(degree), kind_(kind) {
    if (degree < 0) throw std::invalid_argument("basis degree must be nonnegative");
    exponents_ = monomial_exponents(degree);
    const int n = dim();
    if (kind == BasisKind::orthonormal) {
      // Modified Gram-Schmidt in the exact L2(reference) inner product, run in
      // long double: the monomial Gram matrix is badly conditioned by k = 4.
      using Wide = std::conditional_t<(sizeof(Scalar) > sizeof(long double)), Scalar, long double>;
      using MatW = Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic>;
      MatW gram(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          gram(i, j) = CellBasis<Wide>::monomial_integral(exponents_[i].first + exponents_[j].first,
                                                          exponents_[i].second + exponents_[j].second);
      MatW c = MatW::Identity(n, n);
      for (int i = 0; i < n; ++i) {
        for (int sweep = 0; sweep < 2; ++sweep)
          for (int j = 0; j < i; ++j) {
            const Wide proj = c.row(i) * gram * c.row(j).transpose();
            c.row(i) -= proj * c.row(j);
          }
        using std::sqrt;
        const Wide norm = sqrt(Wide(c.row(i) * gram * c.row(i).transpose()));
        c.row(i) /= norm;
      }
      coeffs_ = c.template cast<Scalar>();
    } else {
      // Lagrange basis on the equispaced lattice (centroid for k = 0).
      MatS vandermonde(n, n);
      const auto nodes = lattice_nodes();
      for (int i = 0; i < n; ++i) vandermonde.row(i) = monomials(nodes.row(i).transpose()).transpose();
      coeffs_ = vandermonde.inverse().transpose();
    }
  }

  int degree() const { return degree_; }
  int dim() const { return dim_pk(degree_); }
  BasisKind kind() const { return kind_; }

  /// Lattice points used by the nodal variant; one row per node.
  MatS lattice_nodes() const {
    const int n = dim();
    MatS nodes(n, 2);
    if (degree_ == 0) {
      nodes << Scalar(1) / Scalar(3), Scalar(1) / Scalar(3);
      return nodes;
    }
    int row = 0;
    for (int d = 0; d <= degree_; ++d)
      for (int b = 0; b <= d; ++b) {
        nodes(row, 0) = Scalar(d - b) / Scalar(degree_);
        nodes(row, 1) = Scalar(b) / Scalar(degree_);
        ++row;
      }
    return nodes;
  }

  VecS monomials(const Eigen::Matrix<Scalar, 2, 1>& xi) const {
    VecS m(dim());
    for (int i = 0; i < dim(); ++i) m(i) = ipow(xi(0), exponents_[i].first) * ipow(xi(1), exponents_[i].second);
    return m;
  }

  VecS values(const Eigen::Matrix<Scalar, 2, 1>& xi) const { return coeffs_ * monomials(xi); }

  /// Reference gradients, one row per basis function.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> gradients(const Eigen::Matrix<Scalar, 2, 1>& xi) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 2> dm(dim(), 2);
    for (int i = 0; i < dim(); ++i) {
      const auto [a, b] = exponents_[i];
      dm(i, 0) = a == 0 ? Scalar(0) : Scalar(a) * ipow(xi(0), a - 1) * ipow(xi(1), b);
      dm(i, 1) = b == 0 ? Scalar(0) : Scalar(b) * ipow(xi(0), a) * ipow(xi(1), b - 1);
    }
    return coeffs_ * dm;
  }

  /// Values at every row of `points`: result(q, i) = phi_i(point_q).
  MatS tabulate(const MatS& points) const {
    MatS out(points.rows(), dim());
    for (Eigen::Index q = 0; q < points.rows(); ++q)
      out.row(q) = values(points.row(q).transpose().template head<2>()).transpose();
    return out;
  }

  const MatS& coefficients() const { return coeffs_; }

  /// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
  static Scalar monomial_integral(int a, int b) {
    Scalar r(1);
    for (int i = 1; i <= a; ++i) r *= Scalar(i);
    for (int i = 1; i <= b; ++i) r *= Scalar(i);
    for (int i = 1; i <= a + b + 2; ++i) r /= Scalar(i);
    return r;
  }

 private:
  static Scalar ipow(Scalar x, int e) {
    Scalar r(1);
    for (int i = 0; i < e; ++i) r *= x;
    return r;
  }

  int degree_;
  BasisKind kind_;
  std::vector<std::pair<int, int>> exponents_;
  MatS coeffs_;  // coeffs_(i, j): weight of monomial j in basis function i
};

/// L2([0,1])-orthonormal shifted Legendre basis of P_k on the segment.
template <typename Scalar = Real>
class EdgeBasis {
 public:
  using VecS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit EdgeBasis(int degree) : degree_(degree) {
    if (degree < 0) throw std::invalid_argument("basis degree must be nonnegative");
  }

  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }

  VecS values(Scalar t) const {
    VecS v(dim());
    const Scalar x = Scalar(2) * t - Scalar(1);
    Scalar p0(1), p1 = x;
    for (int n = 0; n <= degree_; ++n) {
      Scalar pn;
      if (n == 0)
        pn = p0;
      else if (n == 1)
        pn = p1;
      else {
        pn = (Scalar(2 * n - 1) * x * p1 - Scalar(n - 1) * p0) / Scalar(n);
        p0 = p1;
        p1 = pn;
      }
      using std::sqrt;
      v(n) = sqrt(Scalar(2 * n + 1)) * pn;
    }
    return v;
  }

 private:
  int degree_;
};

template <typename Scalar = Real>
CellBasis<Scalar> make_cell_basis(int k, BasisKind kind = BasisKind::orthonormal) {
  return CellBasis<Scalar>(k, kind);
}

template <typename Scalar = Real>
EdgeBasis<Scalar> make_edge_basis(int k) {
  return EdgeBasis<Scalar>(k);
}

// ---------------------------------------------------------------------------
// Affine maps
// ---------------------------------------------------------------------------

/// x = origin + jacobian * xi, mapping the reference triangle onto a cell.
struct AffineMap {
  Vec2 origin = Vec2::Zero();
  Mat2 jacobian = Mat2::Identity();
  Real det = 1.0;
  Mat2 inverse = Mat2::Identity();
  Mat2 inverse_transpose = Mat2::Identity();  // gradient push-forward

  static AffineMap from_vertices(const Vec2& a, const Vec2& b, const Vec2& c) {
    AffineMap map;
    map.origin = a;
    map.jacobian.col(0) = b - a;
    map.jacobian.col(1) = c - a;
    map.det = map.jacobian.determinant();
    map.inverse = map.jacobian.inverse();
    map.inverse_transpose = map.inverse.transpose();
    return map;
  }

  Vec2 to_physical(const Vec2& xi) const { return origin + jacobian * xi; }
  Vec2 to_reference(const Vec2& x) const { return inverse * (x - origin); }
  /// Physical gradients from reference gradients (one row per function).
  Eigen::MatrixX2d push_gradients(const Eigen::MatrixX2d& ref) const { return ref * inverse; }
};

/// x = start + t * (end - start), t in [0,1].
struct EdgeMap {
  Vec2 start = Vec2::Zero();
  Vec2 end = Vec2::UnitX();

  Real length() const { return (end - start).norm(); }
  Vec2 to_physical(Real t) const { return start + t * (end - start); }
};

}  // namespace dfhdg
