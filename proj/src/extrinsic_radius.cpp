// Minimal enclosing geodesic ball of a vertex set.
//
// In all three models a geodesic ball is cut out by a linear condition on the
// embedding coordinates, so the move-to-front Welzl scheme applies with a
// model-specific "smallest ball through a support set" primitive:
//   c =  0  center in the affine hull of the support, equidistant;
//   c =  1  center along sum(alpha_j p_j) with <center, p_j> constant;
//   c = -1  same with the Minkowski product.
// On the sphere the scheme is exact only for sets inside an open hemisphere;
// otherwise a monotone descent toward the farthest point takes over.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <list>
#include <numbers>
#include <random>

#include "fundtone/errors.hpp"
#include "fundtone/geometry.hpp"

namespace fundtone {

namespace {

struct Ball {
    Vec center;
    double radius = -1.0;  // < 0: empty
    bool valid = false;
};

class EnclosingBall {
public:
    EnclosingBall(const SpaceForm& sf, std::vector<Vec> pts) : sf_(sf), pts_(std::move(pts)) {}

    Ball solve() {
        std::list<int> order;
        std::vector<int> idx(pts_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            idx[i] = static_cast<int>(i);
        }
        std::mt19937_64 rng(0x5eed);
        std::shuffle(idx.begin(), idx.end(), rng);
        order.assign(idx.begin(), idx.end());
        std::vector<int> support;
        Ball ball{};
        mtf(order, order.end(), support, ball);
        return ball;
    }

    double dist(const Vec& center, const Vec& q) const {
        return sf_.distance(AmbientPoint{center}, AmbientPoint{q});
    }

private:
    bool contains(const Ball& b, const Vec& q) const {
        if (!b.valid) {
            return false;
        }
        return dist(b.center, q) <= b.radius + 1e-12 * std::max(1.0, b.radius);
    }

    Ball from_support(const std::vector<int>& s) const {
        Ball b;
        if (s.empty()) {
            return b;
        }
        const int k = static_cast<int>(s.size());
        if (sf_.curvature() == 0) {
            const Vec& p0 = pts_[s[0]];
            if (k == 1) {
                return {p0, 0.0, true};
            }
            Eigen::MatrixXd A(k - 1, k - 1);
            Eigen::VectorXd rhs(k - 1);
            for (int i = 1; i < k; ++i) {
                const Vec di = pts_[s[i]] - p0;
                rhs[i - 1] = di.squaredNorm();
                for (int j = 1; j < k; ++j) {
                    A(i - 1, j - 1) = 2.0 * di.dot(pts_[s[j]] - p0);
                }
            }
            const Eigen::VectorXd beta = A.completeOrthogonalDecomposition().solve(rhs);
            Vec c = p0;
            for (int i = 1; i < k; ++i) {
                c += beta[i - 1] * (pts_[s[i]] - p0);
            }
            double r = 0.0;
            for (int i : s) {
                r = std::max(r, (pts_[i] - c).norm());
            }
            return {c, r, c.allFinite()};
        }
        Eigen::MatrixXd gram(k, k);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                gram(i, j) = sf_.inner(pts_[s[i]], pts_[s[j]]);
            }
        }
        const double target = sf_.curvature() == 1 ? 1.0 : -1.0;
        const Eigen::VectorXd alpha = gram.completeOrthogonalDecomposition().solve(Eigen::VectorXd::Constant(k, target));
        Vec y = Vec::Zero(pts_[s[0]].size());
        for (int i = 0; i < k; ++i) {
            y += alpha[i] * pts_[s[i]];
        }
        const double q = sf_.inner(y, y);
        if (!y.allFinite() || (sf_.curvature() == 1 && !(q > 0.0)) ||
            (sf_.curvature() == -1 && !(q < 0.0 && y[0] > 0.0))) {
            return b;
        }
        const Vec c = y / std::sqrt(std::abs(q));
        double r = 0.0;
        for (int i : s) {
            r = std::max(r, dist(c, pts_[i]));
        }
        return {c, r, true};
    }

    void mtf(std::list<int>& order, std::list<int>::iterator end, std::vector<int>& support, Ball& ball) {
        ball = from_support(support);
        if (support.size() == 4) {
            return;
        }
        for (auto it = order.begin(); it != end;) {
            auto cur = it++;
            if (!contains(ball, pts_[*cur])) {
                support.push_back(*cur);
                mtf(order, cur, support, ball);
                support.pop_back();
                order.splice(order.begin(), order, cur);
            }
        }
    }

    const SpaceForm& sf_;
    std::vector<Vec> pts_;
};

double max_distance(const SpaceForm& sf, const AmbientPoint& x, const std::vector<AmbientPoint>& pts, int* arg) {
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = sf.distance(x, pts[i]);
        if (d > best) {
            best = d;
            if (arg) {
                *arg = static_cast<int>(i);
            }
        }
    }
    return best;
}

// Step toward the current farthest point, halving the step whenever the
// maximum distance does not decrease.
ExtrinsicRadius descend(const SpaceForm& sf, AmbientPoint x, const std::vector<AmbientPoint>& pts) {
    int far = 0;
    double value = max_distance(sf, x, pts, &far);
    double step = 0.25 * value;
    while (step > 1e-10) {
        const Vec dir = sf.log(x, pts[far]);
        const double len = sf.norm(dir);
        if (len == 0.0) {
            break;
        }
        const AmbientPoint trial = sf.exp(x, (std::min(step, len) / len) * dir);
        int trial_far = 0;
        const double trial_value = max_distance(sf, trial, pts, &trial_far);
        if (trial_value < value) {
            x = trial;
            value = trial_value;
            far = trial_far;
        } else {
            step *= 0.5;
        }
    }
    return {value, x};
}

}  // namespace

ExtrinsicRadius extrinsic_radius(const TriMesh& mesh) {
    if (mesh.num_vertices() == 0) {
        throw DomainError("extrinsic radius of an empty mesh");
    }
    if (!mesh.is_closed()) {
        throw DomainError("extrinsic radius requires a closed mesh");
    }
    const SpaceForm& sf = mesh.space();
    std::vector<Vec> coords;
    coords.reserve(mesh.num_vertices());
    for (const auto& v : mesh.vertices()) {
        coords.push_back(v.coords);
    }
    EnclosingBall solver(sf, coords);
    const Ball ball = solver.solve();

    bool exact = ball.valid;
    if (exact && sf.curvature() == 1) {
        exact = ball.radius < std::numbers::pi / 2.0 - 1e-9;
    }
    if (exact) {
        const AmbientPoint center = sf.project(ball.center);
        const double r = max_distance(sf, center, mesh.vertices(), nullptr);
        exact = r <= ball.radius + 1e-9;
        if (exact) {
            return {r, center};
        }
    }

    // Descent from the better of: the vertex with the smallest maximum
    // distance, and the (signed) least-spread directions of the point cloud.
    std::vector<AmbientPoint> starts;
    {
        int best = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const double val = max_distance(sf, mesh.vertex(v), mesh.vertices(), nullptr);
            if (val < best_val) {
                best_val = val;
                best = v;
            }
        }
        starts.push_back(mesh.vertex(best));
    }
    if (sf.curvature() == 1) {
        Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(sf.embedding_dim(), sf.embedding_dim());
        for (const auto& c : coords) {
            scatter += c * c.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scatter);
        const Vec least = es.eigenvectors().col(0);
        starts.push_back(sf.project(least));
        starts.push_back(sf.project(-least));
    }
    ExtrinsicRadius best{std::numeric_limits<double>::infinity(), starts.front()};
    for (const auto& s : starts) {
        const ExtrinsicRadius r = descend(sf, s, mesh.vertices());
        if (r.radius < best.radius) {
            best = r;
        }
    }
    return best;
}

}  // namespace fundtone
