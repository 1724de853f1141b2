#pragma once

namespace subpop {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura, AS 241 / PPND16). Relative accuracy
/// about 1e-16 on (0, 1). Returns -inf at 0 and +inf at 1; throws
/// PreconditionError outside [0, 1] or on NaN.
double normal_quantile(double p);

}  // namespace subpop
