#include "bailout/laplace_inversion.hpp"

#include <cmath>
#include <numbers>

#include "bailout/errors.hpp"

namespace bailout {

FixedTalbot::FixedTalbot(int terms) : terms_(terms) {
  if (terms_ < 4) throw DomainError("FixedTalbot: need at least 4 terms");
  const double m = terms_;
  const double rt = 0.4 * m;  // r * t
  shape_.resize(terms_);
  factor_.resize(terms_);
  shape_[0] = rt;
  factor_[0] = 0.5 * std::exp(rt) / m;
  for (int k = 1; k < terms_; ++k) {
    const double u = k * std::numbers::pi / m;
    const double cot = 1.0 / std::tan(u);
    const std::complex<double> st(rt * u * cot, rt * u);
    const double sigma = u + (u * cot - 1.0) * cot;
    shape_[k] = st;
    factor_[k] = std::exp(st) * std::complex<double>(1.0, sigma) / m;
  }
}

void FixedTalbot::nodes(double t, std::vector<InversionNode>& out) const {
  if (!(t > 0)) throw DomainError("FixedTalbot: evaluation point must be > 0");
  const double r = 0.4 * terms_ / t;
  out.resize(terms_);
  for (int k = 0; k < terms_; ++k) {
    out[k].s = shape_[k] / t;
    out[k].weight = r * factor_[k];
  }
}

}  // namespace bailout
