#pragma once

#include <cmath>
#include <sstream>
#include <string_view>

#include "bailout/errors.hpp"

namespace bailout::roots {

struct BisectionOptions {
  double abs_tol = 1e-12;
  int max_iter = 400;
};

/// Bisection for a sign change of `f` on [lo, hi].
///
/// `f_lo` and `f_hi` are the function values at the ends, passed in so that
/// callers may supply limits (e.g. -inf at an open endpoint) instead of a
/// direct evaluation. Iterates until the bracket is narrower than
/// `opts.abs_tol` or cannot be split further in double precision.
template <typename F>
double bisect(F&& f, double lo, double hi, double f_lo, double f_hi,
              std::string_view what, BisectionOptions opts = {}) {
  if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0) == (f_hi > 0)) {
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    std::ostringstream msg;
    msg << what << ": no sign change on bracket [" << lo << ", " << hi
        << "], f = (" << f_lo << ", " << f_hi << ")";
    throw NumericalError(msg.str());
  }
  const bool rising = f_hi > 0;
  for (int i = 0; i < opts.max_iter && hi - lo > opts.abs_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == rising) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <typename F>
double bisect(F&& f, double lo, double hi, std::string_view what,
              BisectionOptions opts = {}) {
  return bisect(f, lo, hi, f(lo), f(hi), what, opts);
}

/// Grows `hi` geometrically (distance from `anchor` doubled) until
/// `pred(hi)` holds. Throws once `hi` would exceed `cap`.
template <typename Pred>
double expand_until(Pred&& pred, double anchor, double hi, double cap,
                    std::string_view what) {
  while (!pred(hi)) {
    const double next = anchor + 2.0 * (hi - anchor);
    if (!(next <= cap)) {
      std::ostringstream msg;
      msg << what << ": bracket expansion exceeded cap " << cap
          << " (last upper end " << hi << ")";
      throw NumericalError(msg.str());
    }
    hi = next;
  }
  return hi;
}

}  // namespace bailout::roots
