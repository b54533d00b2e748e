#ifndef ERW_SRC_STEP_RULE_HPP_
#define ERW_SRC_STEP_RULE_HPP_

// Shared by the scalar and lane kernels. Both translation units are compiled
// with -ffp-contract=off so the comparison rounds identically everywhere.

namespace erw::detail {

// u < 1/2 + half_drift * s / n, multiplied through by n > 0.
inline bool step_up(double u, double n, double s, double half_drift) {
  return u * n < 0.5 * n + half_drift * s;
}

// First step of an untrained walk.
inline bool first_step_up(double u) { return u < 0.5; }

}  // namespace erw::detail

#endif  // ERW_SRC_STEP_RULE_HPP_
