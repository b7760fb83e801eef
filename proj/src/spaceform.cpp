#include "fundtone/spaceform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fundtone/errors.hpp"

namespace fundtone {

SpaceForm::SpaceForm(int curvature, int ambient_dim) : c_(curvature), dim_(ambient_dim) {
    if (c_ != -1 && c_ != 0 && c_ != 1) {
        throw DomainError("space form curvature must be one of {1, 0, -1}");
    }
    if (dim_ < 2) {
        throw DomainError("space form dimension must be at least 2");
    }
}

double SpaceForm::inner(const Vec& a, const Vec& b) const {
    if (c_ == -1) {
        return a.dot(b) - 2.0 * a[0] * b[0];
    }
    return a.dot(b);
}

double SpaceForm::norm(const Vec& tangent) const {
    return std::sqrt(std::max(0.0, inner(tangent, tangent)));
}

bool SpaceForm::is_valid(const AmbientPoint& p, double tol) const {
    if (p.coords.size() != embedding_dim() || !p.coords.allFinite()) {
        return false;
    }
    switch (c_) {
        case 0:
            return true;
        case 1:
            return std::abs(p.coords.squaredNorm() - 1.0) <= tol;
        default:
            return p.coords[0] > 0.0 && std::abs(inner(p.coords, p.coords) + 1.0) <= tol * p.coords.squaredNorm();
    }
}

void SpaceForm::validate(const AmbientPoint& p, double tol) const {
    if (!is_valid(p, tol)) {
        std::ostringstream os;
        os << "point (" << p.coords.transpose() << ") violates the constraint of the c=" << c_ << " model";
        throw InvalidPointError(os.str());
    }
}

AmbientPoint SpaceForm::project(const Vec& x) const {
    if (x.size() != embedding_dim()) {
        throw InvalidPointError("coordinate vector has the wrong length for this model");
    }
    switch (c_) {
        case 0:
            return {x};
        case 1: {
            const double n = x.norm();
            if (n == 0.0) {
                throw InvalidPointError("cannot project the origin onto the sphere");
            }
            return {x / n};
        }
        default: {
            const double q = inner(x, x);
            if (q < 0.0 && x[0] > 0.0) {
                return {x / std::sqrt(-q)};
            }
            Vec lifted = x;
            lifted[0] = std::sqrt(1.0 + x.tail(x.size() - 1).squaredNorm());
            return {lifted};
        }
    }
}

double SpaceForm::distance(const AmbientPoint& p, const AmbientPoint& q) const {
    validate(p, 1e-9);
    validate(q, 1e-9);
    switch (c_) {
        case 0:
            return (q.coords - p.coords).norm();
        case 1: {
            // acos is ill-conditioned near 1; use the chord for short distances.
            const double chord = (q.coords - p.coords).norm();
            if (chord < 1.0) {
                return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
            }
            return std::acos(std::clamp(p.coords.dot(q.coords), -1.0, 1.0));
        }
        default: {
            const Vec d = q.coords - p.coords;
            const double chord2 = inner(d, d);
            if (chord2 < 1.0) {
                return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, chord2)));
            }
            return std::acosh(std::max(1.0, -inner(p.coords, q.coords)));
        }
    }
}

Vec SpaceForm::tangent_project(const AmbientPoint& x, const Vec& v) const {
    switch (c_) {
        case 0:
            return v;
        case 1:
            return v - v.dot(x.coords) * x.coords;
        default:
            return v + inner(v, x.coords) * x.coords;
    }
}

Vec SpaceForm::log(const AmbientPoint& x, const AmbientPoint& y) const {
    if (c_ == 0) {
        return y.coords - x.coords;
    }
    const double d = distance(x, y);
    Vec u = tangent_project(x, y.coords - x.coords);
    const double un = norm(u);
    if (un < 1e-300 || d == 0.0) {
        return Vec::Zero(x.coords.size());
    }
    return (d / un) * u;
}

AmbientPoint SpaceForm::exp(const AmbientPoint& x, const Vec& v) const {
    if (c_ == 0) {
        return {x.coords + v};
    }
    const double t = norm(v);
    if (t < 1e-300) {
        return x;
    }
    if (c_ == 1) {
        return project(std::cos(t) * x.coords + (std::sin(t) / t) * v);
    }
    return project(std::cosh(t) * x.coords + (std::sinh(t) / t) * v);
}

void SpaceForm::check_rho(double rho) const {
    if (!(rho > 0.0)) {
        throw DomainError("hessian comparison requires rho > 0");
    }
    if (c_ == 1 && !(rho < std::numbers::pi / 2.0)) {
        throw DomainError("hessian comparison on the sphere requires rho < pi/2");
    }
}

double SpaceForm::hessian_comparison(double rho) const {
    check_rho(rho);
    switch (c_) {
        case 0:
            return 1.0 / rho;
        case 1:
            return 1.0 / std::tan(rho);
        default:
            return 1.0 / std::tanh(rho);
    }
}

double SpaceForm::rho_times_v(double rho) const {
    check_rho(rho);
    switch (c_) {
        case 0:
            return 1.0;
        case 1:
            return rho / std::tan(rho);
        default:
            return rho / std::tanh(rho);
    }
}

}  // namespace fundtone
