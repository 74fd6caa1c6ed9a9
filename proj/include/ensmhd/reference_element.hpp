#pragma once

#include <Eigen/Core>

#include <vector>

namespace ensmhd {

/// Symmetric quadrature rule on the reference triangle {(x,y): x,y >= 0,
/// x+y <= 1}. Points are barycentric triples; weights sum to the reference
/// area 1/2.
template <typename Scalar>
struct QuadratureRule {
  std::vector<Eigen::Matrix<Scalar, 3, 1>> points;
  std::vector<Scalar> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

namespace detail {

template <typename Scalar>
void add_orbit3(QuadratureRule<Scalar>& rule, Scalar a, Scalar w) {
  const Scalar b = Scalar(1) - Scalar(2) * a;
  for (const auto& p : {Eigen::Matrix<Scalar, 3, 1>(a, a, b), Eigen::Matrix<Scalar, 3, 1>(a, b, a),
                        Eigen::Matrix<Scalar, 3, 1>(b, a, a)}) {
    rule.points.push_back(p);
    rule.weights.push_back(w / Scalar(2));
  }
}

template <typename Scalar>
void add_orbit6(QuadratureRule<Scalar>& rule, Scalar a, Scalar b, Scalar w) {
  const Scalar c = Scalar(1) - a - b;
  const Scalar perm[6][3] = {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}};
  for (const auto& p : perm) {
    rule.points.emplace_back(p[0], p[1], p[2]);
    rule.weights.push_back(w / Scalar(2));
  }
}

}  // namespace detail

/// Six-point rule, exact for degree 4 (Dunavant).
template <typename Scalar = double>
QuadratureRule<Scalar> quadrature_degree4() {
  QuadratureRule<Scalar> rule;
  rule.degree = 4;
  detail::add_orbit3<Scalar>(rule, Scalar(0.445948490915965), Scalar(0.223381589678011));
  detail::add_orbit3<Scalar>(rule, Scalar(0.091576213509771), Scalar(0.109951743655322));
  return rule;
}

/// Twelve-point rule, exact for degree 6 (Dunavant).
template <typename Scalar = double>
QuadratureRule<Scalar> quadrature_degree6() {
  QuadratureRule<Scalar> rule;
  rule.degree = 6;
  detail::add_orbit3<Scalar>(rule, Scalar(0.249286745170910), Scalar(0.116786275726379));
  detail::add_orbit3<Scalar>(rule, Scalar(0.063089014491502), Scalar(0.050844906370207));
  detail::add_orbit6<Scalar>(rule, Scalar(0.053145049844817), Scalar(0.310352451033784),
                             Scalar(0.082851075618374));
  return rule;
}

// Local P2 numbering: vertices 0,1,2 then the midpoints of the edges opposite
// vertices 0,1,2, i.e. edges (1,2), (2,0), (0,1).

template <typename Scalar>
Eigen::Matrix<Scalar, 6, 1> p2_values(const Eigen::Matrix<Scalar, 3, 1>& l) {
  Eigen::Matrix<Scalar, 6, 1> phi;
  for (int i = 0; i < 3; ++i) phi(i) = l(i) * (Scalar(2) * l(i) - Scalar(1));
  phi(3) = Scalar(4) * l(1) * l(2);
  phi(4) = Scalar(4) * l(2) * l(0);
  phi(5) = Scalar(4) * l(0) * l(1);
  return phi;
}

/// Physical gradients of the six P2 basis functions (one per column), given
/// the barycentric coordinates and the physical gradients of the barycentric
/// functions (one per column).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 6> p2_gradients(const Eigen::Matrix<Scalar, 3, 1>& l,
                                         const Eigen::Matrix<Scalar, 2, 3>& dl) {
  Eigen::Matrix<Scalar, 2, 6> g;
  for (int i = 0; i < 3; ++i) g.col(i) = (Scalar(4) * l(i) - Scalar(1)) * dl.col(i);
  g.col(3) = Scalar(4) * (l(1) * dl.col(2) + l(2) * dl.col(1));
  g.col(4) = Scalar(4) * (l(2) * dl.col(0) + l(0) * dl.col(2));
  g.col(5) = Scalar(4) * (l(0) * dl.col(1) + l(1) * dl.col(0));
  return g;
}

/// Affine map data of one triangle.
template <typename Scalar>
struct TriangleGeometry {
  Eigen::Matrix<Scalar, 2, 3> corners;
  Eigen::Matrix<Scalar, 2, 3> grad_lambda;  // physical gradients of barycentrics
  Scalar area;

  explicit TriangleGeometry(const Eigen::Matrix<Scalar, 2, 3>& p) : corners(p) {
    const Eigen::Matrix<Scalar, 2, 1> e1 = p.col(1) - p.col(0);
    const Eigen::Matrix<Scalar, 2, 1> e2 = p.col(2) - p.col(0);
    const Scalar det = e1.x() * e2.y() - e1.y() * e2.x();
    area = det / Scalar(2);
    // grad(lambda_1) and grad(lambda_2) are the rows of J^{-1}.
    grad_lambda.col(1) << e2.y() / det, -e2.x() / det;
    grad_lambda.col(2) << -e1.y() / det, e1.x() / det;
    grad_lambda.col(0) = -grad_lambda.col(1) - grad_lambda.col(2);
  }

  Eigen::Matrix<Scalar, 2, 1> point(const Eigen::Matrix<Scalar, 3, 1>& l) const { return corners * l; }
};

}  // namespace ensmhd
