#pragma once

// Dimension-generic algebra of principal-curvature spectra: elementary
// symmetric functions, Newton tensor eigenvalues and the extrinsic-radius
// constants. Templated on the scalar so it can run in exact arithmetic.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "fundtone/errors.hpp"

namespace fundtone {

/// Principal curvatures k_1..k_n of a hypersurface at one point.
template <typename T = double>
struct CurvatureSpectrum {
    std::vector<T> kappas;

    int n() const noexcept { return static_cast<int>(kappas.size()); }
};

/// S_0..S_n, the coefficients of prod_i (1 + k_i t).
template <typename T>
std::vector<T> symmetric_functions(std::span<const T> kappas) {
    const std::size_t n = kappas.size();
    std::vector<T> s(n + 1, T(0));
    s[0] = T(1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = i + 1; r >= 1; --r) {
            s[r] = s[r] + kappas[i] * s[r - 1];
        }
    }
    return s;
}

template <typename T>
std::vector<T> symmetric_functions(const CurvatureSpectrum<T>& spec) {
    return symmetric_functions<T>(std::span<const T>(spec.kappas));
}

/// Eigenvalues of the Newton tensor P_r in the principal frame, via
/// mu_i^0 = 1, mu_i^r = S_r - k_i mu_i^{r-1}.
template <typename T>
std::vector<T> newton_eigenvalues(std::span<const T> kappas, int r) {
    const int n = static_cast<int>(kappas.size());
    if (r < 0 || r > n - 1) {
        throw DomainError("Newton tensor index r must lie in [0, n-1]");
    }
    const std::vector<T> s = symmetric_functions<T>(kappas);
    std::vector<T> mu(kappas.size(), T(1));
    for (int k = 1; k <= r; ++k) {
        for (std::size_t i = 0; i < mu.size(); ++i) {
            mu[i] = s[k] - kappas[i] * mu[i];
        }
    }
    return mu;
}

template <typename T>
std::vector<T> newton_eigenvalues(const CurvatureSpectrum<T>& spec, int r) {
    return newton_eigenvalues<T>(std::span<const T>(spec.kappas), r);
}

/// (n - r) inf S_r / ((r + 1) sup S_{r+1}); the c in {0, -1} constant.
template <typename T>
T lambda_r_flat_or_hyperbolic(int n, int r, const T& inf_sr, const T& sup_sr_next) {
    if (r < 0 || r > n - 1) {
        throw DomainError("r must lie in [0, n-1]");
    }
    if (!(inf_sr > T(0)) || !(sup_sr_next > T(0))) {
        throw DomainError("extrinsic radius constant requires inf S_r > 0 and sup S_{r+1} > 0");
    }
    return (T(n - r) * inf_sr) / (T(r + 1) * sup_sr_next);
}

/// Lower bound for the extrinsic radius of a closed hypersurface with H_{r+1} > 0.
/// For c = 1 this is arccot((r+1) sup S_{r+1} / ((n-r) inf S_r)); a zero
/// sup S_{r+1} is accepted there and gives pi/2.
double lambda_r_constant(int c, int n, int r, double inf_sr, double sup_sr_next);

}  // namespace fundtone
