#pragma once

#include <complex>
#include <vector>

namespace convpot {

/// Nodes and weights on a reference interval.
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Results are cached per n.
const Rule1D& gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^alpha (1+x)^beta,
/// alpha, beta > -1 (Golub-Welsch). Cached per (n, alpha, beta).
const Rule1D& gauss_jacobi(int n, double alpha, double beta);

/// Rule on [0, h] absorbing the endpoint factor t^gamma at t = 0:
/// sum w_i f(t_i) ~ int_0^h t^gamma f(t) dt.
Rule1D left_singular_rule(int n, double gamma, double h);

struct PlanarNode {
  std::complex<double> z;
  double w;
};

/// Collapsed (conical product) Gauss rule on a triangle, exact for
/// polynomials in (x, y) of total degree <= degree. All weights positive.
std::vector<PlanarNode> triangle_rule(std::complex<double> a, std::complex<double> b,
                                      std::complex<double> c, int degree);

/// Polar rule on the ellipse centered at `center` with semi-axes a, b rotated
/// by `rotation`, exact for polynomials of total degree <= degree.
std::vector<PlanarNode> ellipse_rule(std::complex<double> center, double a, double b,
                                     double rotation, int degree);

}  // namespace convpot
