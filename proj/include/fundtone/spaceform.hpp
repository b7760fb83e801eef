#pragma once

#include <Eigen/Core>

namespace fundtone {

using Vec = Eigen::VectorXd;

/// A point of a space-form model, stored in embedding coordinates.
struct AmbientPoint {
    Vec coords;
};

/// Simply connected space form of constant curvature c in {1, 0, -1}.
///
/// Models:
///   c =  0  Euclidean space R^{n+1}, coordinates as-is;
///   c =  1  unit sphere in R^{n+2}, <x,x> = 1;
///   c = -1  upper sheet of the hyperboloid in Minkowski R^{n+2} with
///           signature (-,+,...,+), <x,x> = -1 and x_0 > 0.
///
/// All members are const; a SpaceForm can be shared freely across threads.
class SpaceForm {
public:
    static constexpr double kConstraintTol = 1e-12;

    /// `ambient_dim` is the intrinsic dimension n+1 of the space form.
    explicit SpaceForm(int curvature, int ambient_dim = 3);

    static SpaceForm euclidean(int ambient_dim = 3) { return SpaceForm(0, ambient_dim); }
    static SpaceForm sphere(int ambient_dim = 3) { return SpaceForm(1, ambient_dim); }
    static SpaceForm hyperbolic(int ambient_dim = 3) { return SpaceForm(-1, ambient_dim); }

    int curvature() const noexcept { return c_; }
    int ambient_dim() const noexcept { return dim_; }
    /// Length of the coordinate vectors of the model.
    int embedding_dim() const noexcept { return c_ == 0 ? dim_ : dim_ + 1; }

    /// Inner product of the embedding space (Minkowski for c = -1).
    double inner(const Vec& a, const Vec& b) const;
    double norm(const Vec& tangent) const;

    bool is_valid(const AmbientPoint& p, double tol = kConstraintTol) const;
    /// Throws InvalidPointError when the model constraint is violated.
    void validate(const AmbientPoint& p, double tol = kConstraintTol) const;
    /// Nearest point of the model (radial normalization for c = +-1).
    AmbientPoint project(const Vec& x) const;

    /// Geodesic distance, clamping the inner product into the valid domain.
    double distance(const AmbientPoint& p, const AmbientPoint& q) const;

    /// Orthogonal projection of an embedding vector onto T_x.
    Vec tangent_project(const AmbientPoint& x, const Vec& v) const;
    /// Initial velocity of the unit-speed-scaled geodesic from x to y (length = distance).
    Vec log(const AmbientPoint& x, const AmbientPoint& y) const;
    AmbientPoint exp(const AmbientPoint& x, const Vec& v) const;

    /// Hessian comparison function: coth(rho), 1/rho or cot(rho).
    double hessian_comparison(double rho) const;
    /// rho * hessian_comparison(rho); >= 1 for c <= 0 and <= 1 for c = 1.
    double rho_times_v(double rho) const;

private:
    void check_rho(double rho) const;

    int c_;
    int dim_;
};

}  // namespace fundtone
