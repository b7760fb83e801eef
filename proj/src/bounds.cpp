#include "fundtone/bounds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

#include "fundtone/errors.hpp"

namespace fundtone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoundEntry {
    BoundName bound;
    std::string_view name;
};

constexpr std::array<BoundEntry, 8> kBounds{{
    {BoundName::Barta, "barta"},
    {BoundName::Thm32I, "thm32_i"},
    {BoundName::Thm32II, "thm32_ii"},
    {BoundName::Thm32III, "thm32_iii"},
    {BoundName::LambdaRConst, "lambda_r_const"},
    {BoundName::ComparisonRs, "comparison_rs"},
    {BoundName::PhiSandwich, "phi_sandwich"},
    {BoundName::Cheeger, "cheeger"},
}};

void check_r(int r, int n) {
    if (r < 0 || r > n - 1) {
        std::ostringstream os;
        os << "r=" << r << " out of range [0, " << n - 1 << "]";
        throw DomainError(os.str());
    }
}

std::vector<double> lumped_masses(const TriMesh& mesh) {
    std::vector<double> m(mesh.num_vertices(), 0.0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const double a = mesh.face_area(f) / 3.0;
        for (int v : mesh.faces()[f]) {
            m[v] += a;
        }
    }
    return m;
}

nlohmann::json number(double x) {
    if (!std::isfinite(x)) {
        return nullptr;
    }
    return round_significant(x);
}

}  // namespace

std::string_view bound_name(BoundName b) {
    for (const auto& e : kBounds) {
        if (e.bound == b) {
            return e.name;
        }
    }
    return "unknown";
}

BoundName parse_bound_name(std::string_view name) {
    for (const auto& e : kBounds) {
        if (e.name == name) {
            return e.bound;
        }
    }
    throw DomainError("unknown bound name '" + std::string(name) + "'");
}

const std::vector<BoundName>& all_bound_names() {
    static const std::vector<BoundName> names = [] {
        std::vector<BoundName> out;
        for (const auto& e : kBounds) {
            out.push_back(e.bound);
        }
        return out;
    }();
    return names;
}

BoundReport make_report(BoundName bound, std::string config, std::map<std::string, double> inputs,
                        double bound_value, std::optional<double> computed, int mesh_level, double allowance) {
    BoundReport rep;
    rep.bound = bound;
    rep.config = std::move(config);
    rep.inputs = std::move(inputs);
    rep.bound_value = bound_value;
    rep.computed_lambda = computed;
    rep.mesh_level = mesh_level;
    rep.tolerance = 1e-6 + allowance;
    if (computed) {
        rep.margin = *computed - bound_value;
        rep.pass = rep.margin >= -rep.tolerance * std::abs(*computed);
        rep.status = rep.pass ? "pass" : "fail";
    } else {
        rep.margin = std::numeric_limits<double>::quiet_NaN();
        rep.pass = true;
        rep.status = "info";
    }
    return rep;
}

BoundReport skipped_report(BoundName bound, std::string config, std::map<std::string, double> inputs,
                           int mesh_level, std::string reason) {
    BoundReport rep;
    rep.bound = bound;
    rep.config = std::move(config);
    rep.inputs = std::move(inputs);
    rep.bound_value = std::numeric_limits<double>::quiet_NaN();
    rep.margin = std::numeric_limits<double>::quiet_NaN();
    rep.mesh_level = mesh_level;
    rep.pass = true;
    rep.status = "skipped";
    rep.reason = std::move(reason);
    return rep;
}

double round_significant(double x, int digits) {
    if (!std::isfinite(x) || x == 0.0) {
        return x;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return std::strtod(buf, nullptr);
}

nlohmann::json to_json(const BoundReport& r) {
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [k, v] : r.inputs) {
        inputs[k] = number(v);
    }
    nlohmann::json j = {
        {"bound_name", std::string(bound_name(r.bound))},
        {"config", r.config},
        {"inputs", inputs},
        {"bound_value", number(r.bound_value)},
        {"computed_lambda", r.computed_lambda ? number(*r.computed_lambda) : nlohmann::json(nullptr)},
        {"margin", number(r.margin)},
        {"pass", r.pass},
        {"mesh_level", r.mesh_level},
        {"tolerance", number(r.tolerance)},
        {"status", r.status},
    };
    if (!r.reason.empty()) {
        j["reason"] = r.reason;
    }
    return j;
}

std::string csv_header() { return "config,bound_name,mesh_level,bound_value,computed_lambda,margin,status"; }

std::string csv_row(const BoundReport& r) {
    auto fmt = [](double x) {
        if (!std::isfinite(x)) {
            return std::string();
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", x);
        return std::string(buf);
    };
    std::ostringstream os;
    os << r.config << ',' << bound_name(r.bound) << ',' << r.mesh_level << ',' << fmt(r.bound_value) << ','
       << (r.computed_lambda ? fmt(*r.computed_lambda) : std::string()) << ',' << fmt(r.margin) << ',' << r.status;
    return os.str();
}

VertexVectorField VertexVectorField::from_frame(const CurvatureField& cf,
                                                const std::vector<Eigen::Vector2d>& components) {
    if (static_cast<int>(components.size()) != cf.size()) {
        throw DomainError("vector field size does not match the curvature field");
    }
    VertexVectorField X;
    X.vectors.reserve(components.size());
    for (int v = 0; v < cf.size(); ++v) {
        if (!components[v].allFinite()) {
            throw DomainError("vector field has non-finite components");
        }
        X.vectors.push_back(components[v][0] * cf.at(v).e1 + components[v][1] * cf.at(v).e2);
    }
    return X;
}

std::vector<Eigen::Vector2d> VertexVectorField::frame_components(const SpaceForm& sf,
                                                                 const CurvatureField& cf) const {
    std::vector<Eigen::Vector2d> out(vectors.size());
    for (std::size_t v = 0; v < vectors.size(); ++v) {
        const auto& c = cf.at(static_cast<int>(v));
        out[v] = {sf.inner(vectors[v], c.e1), sf.inner(vectors[v], c.e2)};
    }
    return out;
}

EdgeField EdgeField::zero(const TriMesh& mesh) {
    EdgeField X;
    X.edges_ = mesh.edges();
    X.values_.assign(X.edges_.size(), 0.0);
    return X;
}

EdgeField EdgeField::log_gradient(const TriMesh& mesh, const Eigen::VectorXd& f) {
    if (f.size() != mesh.num_vertices()) {
        throw DomainError("potential size does not match the mesh");
    }
    std::vector<int> bad;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!mesh.boundary_flags()[v] && !(f[v] > 0.0)) {
            bad.push_back(v);
        }
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "potential is not positive at " << bad.size() << " interior vertices (first: " << bad.front() << ")";
        throw DomainError(os.str());
    }
    EdgeField X = zero(mesh);
    for (std::size_t e = 0; e < X.edges_.size(); ++e) {
        const auto [a, b] = X.edges_[e];
        const bool pa = f[a] > 0.0;
        const bool pb = f[b] > 0.0;
        if (pa && pb) {
            X.values_[e] = std::log(f[a]) - std::log(f[b]);
        } else if (pa) {
            X.values_[e] = kInf;
        } else if (pb) {
            X.values_[e] = -kInf;
        }
    }
    return X;
}

EdgeField EdgeField::from_vector_field(const TriMesh& mesh, const VertexVectorField& field) {
    if (static_cast<int>(field.vectors.size()) != mesh.num_vertices()) {
        throw DomainError("vector field size does not match the mesh");
    }
    const SpaceForm& sf = mesh.space();
    const auto& bnd = mesh.boundary_flags();
    EdgeField X = zero(mesh);
    for (std::size_t e = 0; e < X.edges_.size(); ++e) {
        const auto [a, b] = X.edges_[e];
        const double from_a = sf.inner(field.vectors[a], sf.log(mesh.vertex(a), mesh.vertex(b)));
        const double from_b = -sf.inner(field.vectors[b], sf.log(mesh.vertex(b), mesh.vertex(a)));
        if (bnd[a] == bnd[b]) {
            X.values_[e] = bnd[a] ? 0.0 : 0.5 * (from_a + from_b);
        } else {
            // Test functions vanish on the boundary: infinite toward it.
            X.values_[e] = bnd[a] ? -kInf : kInf;
        }
    }
    return X;
}

double EdgeField::value(int i, int j) const {
    const auto key = std::minmax(i, j);
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair<int, int>(key.first, key.second));
    if (it == edges_.end() || *it != std::pair<int, int>(key.first, key.second)) {
        throw DomainError("no such edge");
    }
    const double x = values_[static_cast<std::size_t>(it - edges_.begin())];
    return i < j ? x : -x;
}

BartaResult barta_bound(const TriMesh& mesh, const PhiField& phi, const EdgeField& X) {
    const auto& bnd = mesh.boundary_flags();
    if (!phi.is_identity()) {
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            if (!bnd[v] && !(phi.eigenvalues(v)[0] > 0.0)) {
                std::ostringstream os;
                os << "Phi is not positive definite at vertex " << v;
                throw EllipticityError(os.str());
            }
        }
    }
    const OperatorPair op = assemble(mesh, phi);
    const auto m = lumped_masses(mesh);
    BartaResult res;
    res.value = kInf;
    res.min_weight = kInf;
    res.per_vertex.assign(mesh.num_vertices(), std::numeric_limits<double>::quiet_NaN());
    std::vector<double> acc(mesh.num_vertices(), 0.0);
    for (int k = 0; k < op.K.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(op.K, k); it; ++it) {
            const int i = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            if (i == j) {
                continue;
            }
            const double w = -it.value();
            res.min_weight = std::min(res.min_weight, w);
            if (!bnd[i]) {
                acc[i] += w * (1.0 - std::exp(-X.value(i, j)));
            }
        }
    }
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (bnd[v]) {
            continue;
        }
        res.per_vertex[v] = acc[v] / m[v];
        if (res.per_vertex[v] < res.value || res.vertex < 0) {
            res.value = res.per_vertex[v];
            res.vertex = v;
        }
    }
    if (res.vertex < 0) {
        throw DomainError("mesh has no interior vertex");
    }
    res.certified = res.min_weight >= 0.0;
    return res;
}

BartaResult barta_bound(const TriMesh& mesh, const PhiField& phi, const VertexVectorField& X) {
    return barta_bound(mesh, phi, EdgeField::from_vector_field(mesh, X));
}

EdgeField canonical_edge_field(const TriMesh& mesh, const AmbientPoint& p, double R) {
    return EdgeField::log_gradient(mesh, canonical_potential(mesh, p, R));
}

Eigen::VectorXd canonical_potential(const TriMesh& mesh, const AmbientPoint& p, double R) {
    if (!(R > 0.0)) {
        throw DomainError("ball radius must be positive");
    }
    Eigen::VectorXd f(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const double rho = mesh.space().distance(p, mesh.vertex(v));
        f[v] = mesh.boundary_flags()[v] && rho >= R * (1.0 - 1e-9) ? 0.0 : R * R - rho * rho;
    }
    return f;
}

VertexVectorField canonical_test_field(const TriMesh& mesh, const CurvatureField& cf, const AmbientPoint& p,
                                       double R) {
    if (!(R > 0.0)) {
        throw DomainError("ball radius must be positive");
    }
    const SpaceForm& sf = mesh.space();
    VertexVectorField X;
    X.vectors.resize(mesh.num_vertices());
    std::vector<int> bad;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const AmbientPoint& x = mesh.vertex(v);
        const double rho = sf.distance(p, x);
        // boundary vertices on the rim count as outside, whatever the rounding
        const bool on_rim = mesh.boundary_flags()[v] && rho >= R * (1.0 - 1e-9);
        if (!(rho < R) || on_rim) {
            if (!mesh.boundary_flags()[v]) {
                bad.push_back(v);
            }
            X.vectors[v] = Vec::Zero(sf.embedding_dim());
            continue;
        }
        // rho grad rho = -log_x(p); project out the surface normal.
        Vec g = -sf.log(x, p);
        const Vec& eta = cf.at(v).normal;
        g -= sf.inner(g, eta) * eta;
        X.vectors[v] = (2.0 / (R * R - rho * rho)) * g;
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "interior vertices outside the open ball B(p, " << R << "):";
        for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i) {
            os << ' ' << bad[i];
        }
        if (bad.size() > 10) {
            os << " ... (" << bad.size() << " in total)";
        }
        throw DomainError(os.str());
    }
    return X;
}

Thm32Result thm32_bound(int c, int r, double R, double inf_sr, double h_next, int n) {
    if (c != 0 && c != 1 && c != -1) {
        throw DomainError("curvature sign must be 1, 0 or -1");
    }
    check_r(r, n);
    if (!(R > 0.0)) {
        throw DomainError("ball radius must be positive");
    }
    if (!(inf_sr > 0.0)) {
        throw DomainError("inf S_r must be positive");
    }
    if (!(h_next >= 0.0)) {
        throw DomainError("h_{r+1} must be non-negative");
    }
    const double guard = 1e-9;
    Thm32Result res;
    if (c == 1) {
        res.item = BoundName::Thm32I;
        res.window = std::atan2((n - r) * inf_sr, (r + 1) * h_next);
        res.bound = 2.0 / R * ((n - r) * inf_sr / std::tan(R) - (r + 1) * h_next);
    } else if (h_next > 0.0) {
        res.item = BoundName::Thm32II;
        res.window = (n - r) * inf_sr / ((r + 1) * h_next);
        res.bound = 2.0 / (R * R) * ((n - r) * inf_sr - (r + 1) * R * h_next);
    } else {
        res.item = BoundName::Thm32III;
        res.window = kInf;
        res.bound = 2.0 * (n - r) * inf_sr / (R * R);
    }
    res.admissible = R < res.window - guard * std::max(1.0, std::isfinite(res.window) ? res.window : 1.0);
    return res;
}

double lr_eigenvalue(const TriMesh& mesh, const CurvatureField& cf, int r, ProblemKind kind,
                    const EigenOptions& opts) {
    const auto el = check_ellipticity(mesh, cf, r);
    if (!el.elliptic) {
        std::ostringstream os;
        os << "L_" << r << " is not elliptic: smallest Newton eigenvalue " << el.margin;
        throw EllipticityError(os.str());
    }
    OperatorPair op = assemble(mesh, PhiField::newton(cf, r));
    if (kind == ProblemKind::Dirichlet) {
        op = apply_dirichlet(op, mesh);
    }
    return smallest_eigenpairs(op, 1, kind, opts).eigenvalues[0];
}

ComparisonResult comparison_bound(const TriMesh& mesh, const CurvatureField& cf, int r, int s, ProblemKind kind,
                                  double tol, const EigenOptions& opts) {
    ComparisonResult res;
    const auto er = spectral_extrema(mesh, cf, r);
    const auto es = spectral_extrema(mesh, cf, s);
    if (!(er.mu > 0.0)) {
        throw EllipticityError("P_" + std::to_string(r) + " is not positive definite");
    }
    if (!(es.mu > 0.0)) {
        throw EllipticityError("P_" + std::to_string(s) + " is not positive definite");
    }
    res.mu_r = er.mu;
    res.nu_s = es.nu;
    res.factor = er.mu / es.nu;
    res.lhs = lr_eigenvalue(mesh, cf, r, kind, opts);
    res.lambda_s = lr_eigenvalue(mesh, cf, s, kind, opts);
    res.rhs = res.factor * res.lambda_s;
    res.pass = res.lhs >= res.rhs * (1.0 - tol);
    return res;
}

SandwichResult phi_sandwich(const TriMesh& mesh, const PhiField& phi, ProblemKind kind, double tol,
                            const EigenOptions& opts) {
    const auto ex = phi_extrema(phi);
    if (!(ex.mu > 0.0)) {
        throw EllipticityError("Phi is not positive definite");
    }
    auto solve = [&](const PhiField& field) {
        OperatorPair op = assemble(mesh, field);
        if (kind == ProblemKind::Dirichlet) {
            op = apply_dirichlet(op, mesh);
        }
        return smallest_eigenpairs(op, 1, kind, opts).eigenvalues[0];
    };
    SandwichResult res;
    res.mu = ex.mu;
    res.nu = ex.nu;
    res.lambda_phi = solve(phi);
    res.lambda_delta = solve(PhiField::identity(mesh.num_vertices()));
    res.pass = res.nu * res.lambda_delta >= res.lambda_phi * (1.0 - tol) &&
               res.lambda_phi >= res.mu * res.lambda_delta * (1.0 - tol);
    return res;
}

CheegerSweep cheeger_sweep(const TriMesh& mesh, const Eigen::VectorXd& u) {
    if (u.size() != mesh.num_vertices()) {
        throw DomainError("function size does not match the mesh");
    }
    std::vector<double> values(u.data(), u.data() + u.size());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const double scale = std::max(std::abs(values.front()), std::abs(values.back()));
    if (values.size() < 2 || values.back() - values.front() <= 1e-14 * std::max(1.0, scale)) {
        throw DomainError("sweep needs a non-constant function");
    }
    struct FaceData {
        std::array<Eigen::Vector2d, 3> p;
        std::array<double, 3> u;
        double area;
        double lo, hi;
    };
    std::vector<FaceData> faces;
    faces.reserve(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& t = mesh.faces()[f];
        const PlanarTriangle tri = layout_triangle(mesh.edge_length(t[0], t[1]), mesh.edge_length(t[0], t[2]),
                                                   mesh.edge_length(t[1], t[2]));
        FaceData d{tri.p, {u[t[0]], u[t[1]], u[t[2]]}, tri.area, 0.0, 0.0};
        d.lo = std::min({d.u[0], d.u[1], d.u[2]});
        d.hi = std::max({d.u[0], d.u[1], d.u[2]});
        faces.push_back(d);
    }
    const double total = mesh.total_area();
    CheegerSweep best;
    best.h_hat = kInf;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        const double t = 0.5 * (values[k] + values[k + 1]);
        double below = 0.0;
        double length = 0.0;
        int cut = 0;
        for (const FaceData& d : faces) {
            if (d.hi <= t) {
                below += d.area;
                continue;
            }
            if (d.lo >= t) {
                continue;
            }
            ++cut;
            std::array<int, 3> o{0, 1, 2};
            std::sort(o.begin(), o.end(), [&](int a, int b) { return d.u[a] < d.u[b]; });
            const double ua = d.u[o[0]];
            const double ub = d.u[o[1]];
            const double uc = d.u[o[2]];
            auto cross = [&](int i, int j) {
                const double s = (t - d.u[i]) / (d.u[j] - d.u[i]);
                return Eigen::Vector2d(d.p[i] + s * (d.p[j] - d.p[i]));
            };
            const Eigen::Vector2d q0 = cross(o[0], o[2]);
            if (t <= ub) {
                below += d.area * (t - ua) * (t - ua) / ((ub - ua) * (uc - ua));
                length += (q0 - cross(o[0], o[1])).norm();
            } else {
                below += d.area * (1.0 - (uc - t) * (uc - t) / ((uc - ua) * (uc - ub)));
                length += (q0 - cross(o[1], o[2])).norm();
            }
        }
        const double above = total - below;
        const double ratio = length / std::min(below, above);
        if (ratio < best.h_hat) {
            best = {ratio, t, length, below, above, cut};
        }
    }
    return best;
}

BoundReport cheeger_lower_bound_check(const TriMesh& mesh, const CurvatureField& cf, int r,
                                      std::optional<double> h_exact, int mesh_level, std::string config,
                                      const EigenOptions& opts) {
    if (!mesh.is_closed()) {
        throw DomainError("Cheeger check requires a closed mesh");
    }
    const double mu = spectral_extrema(mesh, cf, r).mu;
    if (!(mu > 0.0)) {
        throw EllipticityError("P_" + std::to_string(r) + " is not positive definite");
    }
    const double lambda = lr_eigenvalue(mesh, cf, r, ProblemKind::Closed, opts);
    const OperatorPair lap = assemble(mesh, PhiField::identity(mesh.num_vertices()));
    const auto fiedler = smallest_eigenpairs(lap, 1, ProblemKind::Closed, opts);
    const CheegerSweep sweep = cheeger_sweep(mesh, fiedler.eigenfunctions.col(0));
    std::map<std::string, double> inputs{{"r", r}, {"mu", mu}, {"h_hat", sweep.h_hat}};
    if (h_exact) {
        inputs["h_exact"] = *h_exact;
        return make_report(BoundName::Cheeger, std::move(config), std::move(inputs), mu * *h_exact * *h_exact / 4.0,
                           lambda, mesh_level);
    }
    inputs["lambda"] = lambda;
    return make_report(BoundName::Cheeger, std::move(config), std::move(inputs), mu * sweep.h_hat * sweep.h_hat / 4.0,
                       std::nullopt, mesh_level);
}

}  // namespace fundtone
