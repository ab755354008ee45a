#pragma once

#include <complex>
#include <vector>

namespace bailout {

/// One quadrature node of a Bromwich inversion: f(t) ~ sum Re(weight * F(s)).
struct InversionNode {
  std::complex<double> s;
  std::complex<double> weight;
};

/// Fixed-Talbot inversion of a Laplace transform whose singularities lie on
/// the closed negative real half-axis.
///
/// The contour is s(u) = r u (cot u + i), u in (-pi, pi), with r = 2M/(5t),
/// discretized with M trapezoidal nodes. Node positions scale with 1/t while
/// the products s*t do not, so the contour shape is precomputed once.
class FixedTalbot {
 public:
  explicit FixedTalbot(int terms = 20);

  int terms() const { return terms_; }

  /// Fills `out` with the M nodes for evaluation time t > 0.
  void nodes(double t, std::vector<InversionNode>& out) const;

  template <typename Transform>
  double invert(Transform&& transform, double t) const {
    std::vector<InversionNode> buf;
    nodes(t, buf);
    double sum = 0.0;
    for (const auto& n : buf) sum += (n.weight * transform(n.s)).real();
    return sum;
  }

 private:
  int terms_;
  std::vector<std::complex<double>> shape_;   // s_k * t
  std::vector<std::complex<double>> factor_;  // exp(s_k t) (1 + i sigma_k) / M
};

}  // namespace bailout
