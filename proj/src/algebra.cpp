#include "fundtone/algebra.hpp"

#include <cmath>
#include <numbers>

namespace fundtone {

double lambda_r_constant(int c, int n, int r, double inf_sr, double sup_sr_next) {
    if (c != 0 && c != 1 && c != -1) {
        throw DomainError("curvature sign must be 1, 0 or -1");
    }
    if (c != 1) {
        return lambda_r_flat_or_hyperbolic<double>(n, r, inf_sr, sup_sr_next);
    }
    if (r < 0 || r > n - 1) {
        throw DomainError("r must lie in [0, n-1]");
    }
    if (!(inf_sr > 0.0) || !(sup_sr_next >= 0.0)) {
        throw DomainError("extrinsic radius constant requires inf S_r > 0 and sup S_{r+1} >= 0");
    }
    const double x = (r + 1) * sup_sr_next / ((n - r) * inf_sr);
    // arccot(x) in (0, pi/2] for x >= 0.
    return std::atan2(1.0, x);
}

}  // namespace fundtone
