#include "fundtone/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "fundtone/algebra.hpp"
#include "fundtone/errors.hpp"

namespace fundtone {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kJ01 = 2.404825557695773;

// Declared discretization allowances (relative).
constexpr double kBartaAllowance = 0.05;
constexpr double kRadiusAllowance = 1e-3;

constexpr std::array<std::pair<Check, std::string_view>, 6> kCheckNames{{
    {Check::Thm32, "thm32"},
    {Check::Barta, "barta"},
    {Check::LambdaR, "lambda_r"},
    {Check::Comparison, "comparison"},
    {Check::Sandwich, "sandwich"},
    {Check::Cheeger, "cheeger"},
}};

Check parse_check(std::string_view name) {
    for (const auto& [c, n] : kCheckNames) {
        if (n == name) {
            return c;
        }
    }
    throw IoError("suite: unknown check \"" + std::string(name) + "\"");
}

bool has(const SuiteConfig& cfg, Check c) { return std::find(cfg.checks.begin(), cfg.checks.end(), c) != cfg.checks.end(); }

std::string label(const SuiteConfig& cfg, const std::string& suffix) { return cfg.name + "/" + suffix; }

std::string r_label(int r) { return "r" + std::to_string(r); }

nlohmann::json number(double x) {
    if (!std::isfinite(x)) {
        return nullptr;
    }
    return round_significant(x);
}

nlohmann::json optional_number(const std::optional<double>& x) { return x ? number(*x) : nlohmann::json(nullptr); }

std::string fmt(double x) {
    if (!std::isfinite(x)) {
        return {};
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// Per-level state of a configuration: the surface and cached eigenvalues.
class Context {
public:
    Context(const SuiteConfig& cfg, int level, const VerifyOptions& opts)
        : cfg_(cfg), level_(level), opts_(opts), surface_(builtin_surface(cfg.family, cfg.params, level)) {
        kind_ = surface_.mesh.is_closed() ? ProblemKind::Closed : ProblemKind::Dirichlet;
    }

    const TriMesh& mesh() const { return surface_.mesh; }
    const CurvatureField& cf() const { return surface_.curvature; }
    ProblemKind kind() const { return kind_; }
    int level() const { return level_; }
    int c() const { return surface_.mesh.space().curvature(); }
    const EigenOptions& eigen() const { return opts_.eigen; }

    bool elliptic(int r) const { return check_ellipticity(mesh(), cf(), r).elliptic; }

    double lambda(int r) {
        auto it = lambda_.find(r);
        if (it == lambda_.end()) {
            it = lambda_.emplace(r, lr_eigenvalue(mesh(), cf(), r, kind_, opts_.eigen)).first;
        }
        return it->second;
    }

    AmbientPoint center() const {
        if (cfg_.ball_center) {
            AmbientPoint p{*cfg_.ball_center};
            mesh().space().validate(p, 1e-9);
            return p;
        }
        if (surface_.pole) {
            return *surface_.pole;
        }
        throw IoError("suite: configuration " + cfg_.name + " needs a ball center");
    }

    double radius() const {
        if (!cfg_.ball_radius) {
            throw IoError("suite: configuration " + cfg_.name + " needs a ball radius");
        }
        return *cfg_.ball_radius;
    }

private:
    const SuiteConfig& cfg_;
    int level_;
    const VerifyOptions& opts_;
    Surface surface_;
    ProblemKind kind_;
    std::map<int, double> lambda_;
};

void run_thm32(const SuiteConfig& cfg, Context& ctx, int r, std::vector<BoundReport>& out) {
    const std::string name = label(cfg, r_label(r));
    const AmbientPoint p = ctx.center();
    const double R = ctx.radius();
    std::map<std::string, double> inputs{{"c", ctx.c()}, {"r", r}, {"R", R}};
    if (ctx.kind() != ProblemKind::Dirichlet) {
        throw IoError("suite: ball bounds of " + cfg.name + " need a surface with boundary");
    }
    if (!ctx.elliptic(r)) {
        out.push_back(skipped_report(BoundName::Thm32III, name, inputs, ctx.level(), "ellipticity"));
        return;
    }
    const SpaceForm& sf = ctx.mesh().space();
    for (const auto& v : ctx.mesh().vertices()) {
        if (sf.distance(p, v) > R * (1.0 + 1e-9)) {
            out.push_back(skipped_report(BoundName::Thm32III, name, inputs, ctx.level(), "outside ball"));
            return;
        }
    }
    const double inf_sr = inf_symmetric_function(ctx.cf(), r);
    const double h = local_curvature_sup(ctx.mesh(), ctx.cf(), p, R, r);
    inputs["inf_S_r"] = inf_sr;
    inputs["h_next"] = h;
    const Thm32Result t = thm32_bound(ctx.c(), r, R, inf_sr, h);
    inputs["window"] = t.window;
    if (!t.admissible) {
        out.push_back(skipped_report(t.item, name, inputs, ctx.level(), "window"));
        return;
    }
    out.push_back(make_report(t.item, name, inputs, t.bound, ctx.lambda(r), ctx.level()));
}

void run_barta(const SuiteConfig& cfg, Context& ctx, int r, std::vector<BoundReport>& out) {
    const AmbientPoint p = ctx.center();
    const double R = ctx.radius();
    std::map<std::string, double> inputs{{"r", r}, {"R", R}};
    if (ctx.kind() != ProblemKind::Dirichlet) {
        throw IoError("suite: Barta checks of " + cfg.name + " need a surface with boundary");
    }
    if (!ctx.elliptic(r)) {
        out.push_back(skipped_report(BoundName::Barta, label(cfg, r_label(r)), inputs, ctx.level(), "ellipticity"));
        return;
    }
    const PhiField phi = PhiField::newton(ctx.cf(), r);
    const double lambda = ctx.lambda(r);

    const BartaResult canon = barta_bound(ctx.mesh(), phi, canonical_edge_field(ctx.mesh(), p, R));
    auto with_result = [&](const BartaResult& b) {
        auto in = inputs;
        in["certified"] = b.certified ? 1.0 : 0.0;
        in["min_weight"] = b.min_weight;
        in["vertex"] = b.vertex;
        return in;
    };
    out.push_back(make_report(BoundName::Barta, label(cfg, r_label(r) + "/canonical"), with_result(canon),
                              canon.value, lambda, ctx.level(), kBartaAllowance));

    // X0 = -grad log v with v the first eigenfunction of the lumped problem.
    const OperatorPair op = apply_dirichlet(assemble(ctx.mesh(), phi, {.lumped_mass = true}), ctx.mesh());
    const EigenResult eig = smallest_eigenpairs(op, 1, ProblemKind::Dirichlet, ctx.eigen());
    const Eigen::VectorXd v = op.reinsert(eig.eigenfunctions.col(0));
    const std::string eq_name = label(cfg, r_label(r) + "/eigenfunction");
    BartaResult eq;
    try {
        eq = barta_bound(ctx.mesh(), phi, EdgeField::log_gradient(ctx.mesh(), v));
    } catch (const DomainError&) {
        out.push_back(skipped_report(BoundName::Barta, eq_name, inputs, ctx.level(), "eigenfunction not positive"));
        return;
    }
    auto in = with_result(eq);
    in["lambda_lumped"] = eig.eigenvalues[0];
    in["ratio"] = eq.value / lambda;
    out.push_back(make_report(BoundName::Barta, eq_name, in, eq.value, lambda, ctx.level(), kBartaAllowance));
}

void run_lambda_r(const SuiteConfig& cfg, Context& ctx, int r, std::vector<BoundReport>& out) {
    const std::string name = label(cfg, r_label(r));
    std::map<std::string, double> inputs{{"c", ctx.c()}, {"r", r}};
    if (ctx.kind() != ProblemKind::Closed) {
        throw IoError("suite: radius constants of " + cfg.name + " need a closed surface");
    }
    const double inf_sr = inf_symmetric_function(ctx.cf(), r);
    const double inf_next = inf_symmetric_function(ctx.cf(), r + 1);
    const double sup_next = sup_symmetric_function(ctx.cf(), r + 1);
    inputs["inf_S_r"] = inf_sr;
    inputs["sup_S_next"] = sup_next;
    // H_{r+1} > 0, or H_{r+1} = 0 in the sphere.
    const bool minimal = ctx.c() == 1 && std::max(std::abs(inf_next), std::abs(sup_next)) <= 1e-12;
    if (!(inf_sr > 0.0) || (!(inf_next > 0.0) && !minimal)) {
        out.push_back(skipped_report(BoundName::LambdaRConst, name, inputs, ctx.level(), "precondition"));
        return;
    }
    const double bound = lambda_r_constant(ctx.c(), 2, r, inf_sr, minimal ? 0.0 : sup_next);
    const double re = extrinsic_radius(ctx.mesh()).radius;
    out.push_back(make_report(BoundName::LambdaRConst, name, inputs, bound, re, ctx.level(), kRadiusAllowance));
}

void run_comparison(const SuiteConfig& cfg, Context& ctx, std::vector<BoundReport>& out) {
    for (int r : cfg.r_values) {
        for (int s : cfg.r_values) {
            if (r == s) {
                continue;
            }
            const std::string name = label(cfg, r_label(r) + "s" + std::to_string(s));
            std::map<std::string, double> inputs{{"r", r}, {"s", s}};
            if (!ctx.elliptic(r) || !ctx.elliptic(s)) {
                out.push_back(skipped_report(BoundName::ComparisonRs, name, inputs, ctx.level(), "ellipticity"));
                continue;
            }
            const double mu_r = spectral_extrema(ctx.mesh(), ctx.cf(), r).mu;
            const double nu_s = spectral_extrema(ctx.mesh(), ctx.cf(), s).nu;
            inputs["mu"] = mu_r;
            inputs["nu"] = nu_s;
            inputs["factor"] = mu_r / nu_s;
            inputs["lambda_s"] = ctx.lambda(s);
            out.push_back(make_report(BoundName::ComparisonRs, name, inputs, mu_r / nu_s * ctx.lambda(s),
                                      ctx.lambda(r), ctx.level()));
        }
    }
}

PhiField make_phi(const PhiSpec& spec, const CurvatureField& cf) {
    switch (spec.type) {
        case PhiSpec::Type::Newton:
            return PhiField::newton(cf, spec.r);
        case PhiSpec::Type::Scalar:
            return PhiField::custom(cf, std::vector<Eigen::Matrix2d>(cf.size(), spec.scalar * Eigen::Matrix2d::Identity()));
        case PhiSpec::Type::Diagonal:
            return PhiField::custom(
                cf, std::vector<Eigen::Matrix2d>(cf.size(), Eigen::Vector2d(spec.diagonal[0], spec.diagonal[1]).asDiagonal()));
    }
    throw DomainError("unknown tensor field type");
}

void run_sandwich(const SuiteConfig& cfg, Context& ctx, std::vector<BoundReport>& out) {
    if (!cfg.phi) {
        throw IoError("suite: sandwich check of " + cfg.name + " needs a tensor field");
    }
    const PhiField phi = make_phi(*cfg.phi, ctx.cf());
    const PhiExtrema ex = phi_extrema(phi);
    std::map<std::string, double> inputs{{"mu", ex.mu}, {"nu", ex.nu}};
    if (!(ex.mu > 0.0)) {
        out.push_back(skipped_report(BoundName::PhiSandwich, label(cfg, "lower"), inputs, ctx.level(), "ellipticity"));
        out.push_back(skipped_report(BoundName::PhiSandwich, label(cfg, "upper"), inputs, ctx.level(), "ellipticity"));
        return;
    }
    const SandwichResult s = phi_sandwich(ctx.mesh(), phi, ctx.kind(), 1e-6, ctx.eigen());
    inputs["lambda_delta"] = s.lambda_delta;
    inputs["lambda_phi"] = s.lambda_phi;
    out.push_back(make_report(BoundName::PhiSandwich, label(cfg, "lower"), inputs, s.mu * s.lambda_delta, s.lambda_phi,
                              ctx.level()));
    out.push_back(make_report(BoundName::PhiSandwich, label(cfg, "upper"), inputs, s.lambda_phi, s.nu * s.lambda_delta,
                              ctx.level()));
}

void run_cheeger(const SuiteConfig& cfg, Context& ctx, int r, std::vector<BoundReport>& out) {
    const std::string name = label(cfg, r_label(r));
    if (ctx.kind() != ProblemKind::Closed) {
        throw IoError("suite: Cheeger check of " + cfg.name + " needs a closed surface");
    }
    if (!ctx.elliptic(r)) {
        out.push_back(skipped_report(BoundName::Cheeger, name, {{"r", r}}, ctx.level(), "ellipticity"));
        return;
    }
    out.push_back(cheeger_lower_bound_check(ctx.mesh(), ctx.cf(), r, cfg.h_exact, ctx.level(), name, ctx.eigen()));
}

void validate_config(const SuiteConfig& cfg) {
    if (cfg.name.empty()) {
        throw IoError("suite: configuration without a name");
    }
    if (cfg.levels.empty()) {
        throw IoError("suite: configuration " + cfg.name + " has no levels");
    }
    for (int l : cfg.levels) {
        if (l < 0 || l > 7) {
            throw IoError("suite: level " + std::to_string(l) + " of " + cfg.name + " out of range [0, 7]");
        }
    }
    if (cfg.r_values.empty()) {
        throw IoError("suite: configuration " + cfg.name + " has no r values");
    }
    for (int r : cfg.r_values) {
        if (r < 0 || r > 1) {
            throw IoError("suite: r=" + std::to_string(r) + " of " + cfg.name + " out of range [0, 1]");
        }
    }
    if (cfg.ball_radius && !(*cfg.ball_radius > 0.0)) {
        throw IoError("suite: ball radius of " + cfg.name + " must be positive");
    }
    if (cfg.h_exact && !(*cfg.h_exact > 0.0)) {
        throw IoError("suite: h_exact of " + cfg.name + " must be positive");
    }
    if (cfg.phi && cfg.phi->type == PhiSpec::Type::Newton && (cfg.phi->r < 0 || cfg.phi->r > 1)) {
        throw IoError("suite: tensor field of " + cfg.name + " has r out of range [0, 1]");
    }
}

}  // namespace

std::string_view check_name(Check c) {
    for (const auto& [k, n] : kCheckNames) {
        if (k == c) {
            return n;
        }
    }
    return "?";
}

VerificationSuite default_suite() {
    VerificationSuite s;
    s.suite_name = "default";
    s.json_path = "verify.json";
    s.csv_path = "verify.csv";
    s.margins_path = "margins.csv";

    auto add = [&](SuiteConfig c) { s.configs.push_back(std::move(c)); };
    const std::vector<int> ball_levels{2, 3, 4};

    {
        SuiteConfig c;
        c.name = "disk";
        c.family = Family::PlaneDisk;
        c.levels = ball_levels;
        c.checks = {Check::Thm32, Check::Barta};
        c.ball_radius = 1.0;
        add(c);
    }
    {
        // Unit-sphere cap cut out by the extrinsic ball of radius 0.5 around the pole.
        SuiteConfig c;
        c.name = "sphere_cap";
        c.family = Family::SphereCap;
        c.params.angle = 2.0 * std::asin(0.25);
        c.levels = ball_levels;
        c.r_values = {0, 1};
        c.checks = {Check::Thm32, Check::Barta, Check::Comparison};
        c.ball_radius = 0.5;
        add(c);
    }
    {
        SuiteConfig c;
        c.name = "spherical_cap";
        c.family = Family::SphericalCap;
        c.params.angle = kPi / 4;
        c.levels = ball_levels;
        c.checks = {Check::Thm32, Check::Barta};
        c.ball_radius = kPi / 4;
        add(c);
    }
    {
        // Cap of the unit-radius distance sphere of H^3 inside the ball of radius 0.5.
        SuiteConfig c;
        c.name = "h3_cap";
        c.family = Family::GeodesicCapH3;
        c.params.radius = 1.0;
        const double ch = std::cosh(1.0);
        const double sh = std::sinh(1.0);
        c.params.angle = std::acos((ch * ch - std::cosh(0.5)) / (sh * sh));
        c.levels = ball_levels;
        c.r_values = {0, 1};
        c.checks = {Check::Thm32, Check::Barta, Check::Comparison};
        c.ball_radius = 0.5;
        add(c);
    }
    for (double rho : {0.5, 1.0, 2.0}) {
        SuiteConfig c;
        char buf[32];
        std::snprintf(buf, sizeof buf, "sphere_%g", rho);
        c.name = buf;
        c.family = Family::RoundSphere;
        c.params.radius = rho;
        c.r_values = {0, 1};
        c.checks = {Check::LambdaR, Check::Comparison, Check::Cheeger};
        c.h_exact = 1.0 / rho;
        add(c);
    }
    {
        SuiteConfig c;
        c.name = "s3_sphere";
        c.family = Family::GeodesicSphereS3;
        c.params.radius = 1.0;
        c.r_values = {0, 1};
        c.checks = {Check::LambdaR, Check::Comparison, Check::Cheeger};
        c.h_exact = 1.0 / std::sin(1.0);
        add(c);
    }
    {
        SuiteConfig c;
        c.name = "great_sphere";
        c.family = Family::GeodesicSphereS3;
        c.params.radius = kPi / 2;
        c.checks = {Check::LambdaR, Check::Cheeger};
        c.h_exact = 1.0;
        add(c);
    }
    {
        SuiteConfig c;
        c.name = "h3_sphere";
        c.family = Family::GeodesicSphereH3;
        c.params.radius = 1.0;
        c.r_values = {0, 1};
        c.checks = {Check::LambdaR, Check::Comparison, Check::Cheeger};
        c.h_exact = 1.0 / std::sinh(1.0);
        add(c);
    }
    {
        SuiteConfig c;
        c.name = "ellipsoid_1_1_1.5";
        c.family = Family::Ellipsoid;
        c.params.axis_c = 1.5;
        c.r_values = {0, 1};
        c.checks = {Check::LambdaR, Check::Comparison, Check::Sandwich, Check::Cheeger};
        c.phi = PhiSpec{};
        add(c);
    }
    {
        SuiteConfig c;
        c.name = "ellipsoid_1_1_2";
        c.family = Family::Ellipsoid;
        c.params.axis_c = 2.0;
        c.checks = {Check::Sandwich};
        c.phi = PhiSpec{};
        add(c);
    }
    {
        SuiteConfig c;
        c.name = "disk_diag";
        c.family = Family::PlaneDisk;
        c.checks = {Check::Sandwich};
        c.phi = PhiSpec{PhiSpec::Type::Diagonal, 0, 1.0, {1.0, 2.0}};
        add(c);
    }
    {
        SuiteConfig c;
        c.name = "sphere_scalar3";
        c.family = Family::RoundSphere;
        c.checks = {Check::Sandwich};
        c.phi = PhiSpec{PhiSpec::Type::Scalar, 0, 3.0, {1.0, 1.0}};
        add(c);
    }
    {
        SuiteConfig c;
        c.name = "torus";
        c.family = Family::Torus;
        c.checks = {Check::LambdaR, Check::Cheeger};
        add(c);
    }
    return s;
}

VerificationSuite parse_suite(const nlohmann::json& doc) {
    try {
        VerificationSuite s;
        if (!doc.is_object()) {
            throw IoError("suite: top level must be an object");
        }
        s.suite_name = doc.value("suite_name", std::string("suite"));
        if (doc.contains("outputs")) {
            const auto& o = doc.at("outputs");
            s.json_path = o.value("json", std::string());
            s.csv_path = o.value("csv", std::string());
            s.margins_path = o.value("margins", std::string());
        }
        const auto& list = doc.at("configurations");
        if (!list.is_array() || list.empty()) {
            throw IoError("suite: \"configurations\" must be a non-empty array");
        }
        for (const auto& j : list) {
            SuiteConfig c;
            c.name = j.at("name").get<std::string>();
            try {
                c.family = parse_family(j.at("family").get<std::string>());
            } catch (const DomainError& e) {
                throw IoError(std::string("suite: ") + e.what());
            }
            if (j.contains("params")) {
                for (const auto& [key, value] : j.at("params").items()) {
                    if (key == "radius") {
                        c.params.radius = value.get<double>();
                    } else if (key == "axes") {
                        const auto axes = value.get<std::vector<double>>();
                        if (axes.size() != 3) {
                            throw IoError("suite: \"axes\" needs three values");
                        }
                        c.params.axis_a = axes[0];
                        c.params.axis_b = axes[1];
                        c.params.axis_c = axes[2];
                    } else if (key == "major") {
                        c.params.major = value.get<double>();
                    } else if (key == "minor") {
                        c.params.minor = value.get<double>();
                    } else if (key == "angle") {
                        c.params.angle = value.get<double>();
                    } else if (key == "rings") {
                        c.params.rings = value.get<int>();
                    } else {
                        throw IoError("suite: unknown parameter \"" + key + "\" in " + c.name);
                    }
                }
            }
            if (j.contains("levels")) {
                c.levels = j.at("levels").get<std::vector<int>>();
            }
            if (j.contains("r")) {
                c.r_values = j.at("r").is_array() ? j.at("r").get<std::vector<int>>()
                                                  : std::vector<int>{j.at("r").get<int>()};
            }
            for (const auto& name : j.at("checks")) {
                c.checks.push_back(parse_check(name.get<std::string>()));
            }
            if (j.contains("ball")) {
                const auto& b = j.at("ball");
                c.ball_radius = b.at("radius").get<double>();
                if (b.contains("center")) {
                    const auto xs = b.at("center").get<std::vector<double>>();
                    c.ball_center = Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
                }
            }
            if (j.contains("h_exact")) {
                c.h_exact = j.at("h_exact").get<double>();
            }
            if (j.contains("phi")) {
                const auto& p = j.at("phi");
                PhiSpec spec;
                const auto type = p.at("type").get<std::string>();
                if (type == "newton") {
                    spec.type = PhiSpec::Type::Newton;
                    spec.r = p.at("r").get<int>();
                } else if (type == "scalar") {
                    spec.type = PhiSpec::Type::Scalar;
                    spec.scalar = p.at("value").get<double>();
                } else if (type == "diagonal") {
                    spec.type = PhiSpec::Type::Diagonal;
                    const auto d = p.at("values").get<std::vector<double>>();
                    if (d.size() != 2) {
                        throw IoError("suite: diagonal tensor field needs two values");
                    }
                    spec.diagonal = {d[0], d[1]};
                } else {
                    throw IoError("suite: unknown tensor field type \"" + type + "\"");
                }
                c.phi = spec;
            }
            if (j.contains("ambient_c")) {
                // Checked against the family on a coarse mesh.
                const int want = j.at("ambient_c").get<int>();
                const int got = builtin_surface(c.family, c.params, 0).mesh.space().curvature();
                if (want != got) {
                    throw IoError("suite: " + c.name + " declares ambient_c=" + std::to_string(want) + " but " +
                                  std::string(family_name(c.family)) + " lives in c=" + std::to_string(got));
                }
            }
            validate_config(c);
            s.configs.push_back(std::move(c));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("suite: ") + e.what());
    }
}

VerificationSuite read_suite_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open suite file " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("suite file " + path + ": " + e.what());
    }
    return parse_suite(doc);
}

nlohmann::json suite_to_json(const VerificationSuite& suite) {
    nlohmann::json configs = nlohmann::json::array();
    for (const auto& c : suite.configs) {
        nlohmann::json j;
        j["name"] = c.name;
        j["family"] = std::string(family_name(c.family));
        const auto& p = c.params;
        j["params"] = {{"radius", p.radius}, {"axes", {p.axis_a, p.axis_b, p.axis_c}}, {"major", p.major},
                       {"minor", p.minor},   {"angle", p.angle},                          {"rings", p.rings}};
        j["levels"] = c.levels;
        j["r"] = c.r_values;
        j["checks"] = nlohmann::json::array();
        for (Check k : c.checks) {
            j["checks"].push_back(std::string(check_name(k)));
        }
        if (c.ball_radius) {
            j["ball"]["radius"] = *c.ball_radius;
            if (c.ball_center) {
                j["ball"]["center"] = std::vector<double>(c.ball_center->data(), c.ball_center->data() + c.ball_center->size());
            }
        }
        if (c.h_exact) {
            j["h_exact"] = *c.h_exact;
        }
        if (c.phi) {
            switch (c.phi->type) {
                case PhiSpec::Type::Newton:
                    j["phi"] = {{"type", "newton"}, {"r", c.phi->r}};
                    break;
                case PhiSpec::Type::Scalar:
                    j["phi"] = {{"type", "scalar"}, {"value", c.phi->scalar}};
                    break;
                case PhiSpec::Type::Diagonal:
                    j["phi"] = {{"type", "diagonal"}, {"values", {c.phi->diagonal[0], c.phi->diagonal[1]}}};
                    break;
            }
        }
        configs.push_back(j);
    }
    return {{"suite_name", suite.suite_name},
            {"outputs", {{"json", suite.json_path}, {"csv", suite.csv_path}, {"margins", suite.margins_path}}},
            {"configurations", configs}};
}

int worker_count_from_env() {
    const char* v = std::getenv("FUNDTONE_WORKERS");
    if (!v || !*v) {
        return 1;
    }
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) {
        throw IoError(std::string("FUNDTONE_WORKERS must be a positive integer, got \"") + v + "\"");
    }
    return static_cast<int>(std::min<long>(n, 256));
}

std::vector<BoundReport> run_config(const SuiteConfig& cfg, int level, const VerifyOptions& options) {
    Context ctx(cfg, level, options);
    std::vector<BoundReport> out;
    for (int r : cfg.r_values) {
        if (has(cfg, Check::Thm32)) {
            run_thm32(cfg, ctx, r, out);
        }
        if (has(cfg, Check::Barta)) {
            run_barta(cfg, ctx, r, out);
        }
        if (has(cfg, Check::LambdaR)) {
            run_lambda_r(cfg, ctx, r, out);
        }
        if (has(cfg, Check::Cheeger)) {
            run_cheeger(cfg, ctx, r, out);
        }
    }
    if (has(cfg, Check::Comparison)) {
        run_comparison(cfg, ctx, out);
    }
    if (has(cfg, Check::Sandwich)) {
        run_sandwich(cfg, ctx, out);
    }
    if (options.mutate) {
        for (auto& rep : out) {
            if (rep.bound == *options.mutate && rep.status != "skipped") {
                rep = make_report(rep.bound, rep.config, rep.inputs, 10.0 * rep.bound_value, rep.computed_lambda,
                                  rep.mesh_level, rep.tolerance - 1e-6);
            }
        }
    }
    return out;
}

std::vector<BoundReport> run_verify(const VerificationSuite& suite, const VerifyOptions& options) {
    std::vector<std::pair<const SuiteConfig*, int>> jobs;
    for (const auto& cfg : suite.configs) {
        validate_config(cfg);
        const auto& levels = options.levels ? *options.levels : cfg.levels;
        for (int l : levels) {
            jobs.emplace_back(&cfg, l);
        }
    }
    std::vector<std::vector<BoundReport>> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                results[i] = run_config(*jobs[i].first, jobs[i].second, options);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(options.workers, static_cast<int>(jobs.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    // First failing job in suite order, independent of scheduling.
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    std::vector<BoundReport> all;
    for (auto& r : results) {
        all.insert(all.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    }
    return all;
}

bool all_pass(const std::vector<BoundReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.status != "fail"; });
}

nlohmann::json reports_json(const std::vector<BoundReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        arr.push_back(to_json(r));
    }
    return arr;
}

std::string reports_csv(const std::vector<BoundReport>& reports) {
    std::string s = csv_header() + "\n";
    for (const auto& r : reports) {
        s += csv_row(r) + "\n";
    }
    return s;
}

std::string margin_table(const std::vector<BoundReport>& reports) {
    std::string s = "config,level,bound,lambda,margin\n";
    for (const auto& r : reports) {
        if (!r.computed_lambda || r.status == "skipped") {
            continue;
        }
        s += r.config + "/" + std::string(bound_name(r.bound)) + "," + std::to_string(r.mesh_level) + "," +
             fmt(r.bound_value) + "," + fmt(*r.computed_lambda) + "," + fmt(r.margin) + "\n";
    }
    return s;
}

std::optional<double> reference_eigenvalue(Family family, const SurfaceParams& p, int r, ProblemKind kind) {
    if (r < 0 || r > 1) {
        return std::nullopt;
    }
    // Umbilic closed surfaces: P_1 = kappa Id, so L_1 = kappa Delta.
    auto closed_sphere = [&](double intrinsic_radius, double kappa) -> std::optional<double> {
        if (kind != ProblemKind::Closed) {
            return std::nullopt;
        }
        const double lap = 2.0 / (intrinsic_radius * intrinsic_radius);
        return r == 0 ? lap : kappa * lap;
    };
    switch (family) {
        case Family::RoundSphere:
            return closed_sphere(p.radius, 1.0 / p.radius);
        case Family::GeodesicSphereS3:
            return closed_sphere(std::sin(p.radius), 1.0 / std::tan(p.radius));
        case Family::GeodesicSphereH3:
            return closed_sphere(std::sinh(p.radius), 1.0 / std::tanh(p.radius));
        case Family::PlaneDisk:
            if (kind == ProblemKind::Dirichlet && r == 0) {
                return kJ01 * kJ01 / (p.radius * p.radius);
            }
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

namespace {

void fill_orders(RefineStudy& study) {
    auto& rows = study.rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (study.reference) {
            rows[i].error = std::abs(rows[i].value - *study.reference);
            if (i > 0 && *rows[i].error > 0.0) {
                rows[i].ratio = *rows[i - 1].error / *rows[i].error;
            }
        } else if (i >= 2) {
            const double d1 = rows[i - 1].value - rows[i - 2].value;
            const double d2 = rows[i].value - rows[i - 1].value;
            if (d2 != 0.0) {
                rows[i].ratio = d1 / d2;
            }
        }
        if (rows[i].ratio && *rows[i].ratio > 0.0 && i > 0) {
            // Every level halves the mesh size.
            const double steps = rows[i].level - rows[i - 1].level;
            rows[i].order = std::log2(*rows[i].ratio) / steps;
        }
    }
}

void check_levels(const std::vector<int>& levels) {
    if (levels.size() < 3) {
        throw DomainError("a refinement study needs at least three levels");
    }
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (levels[i] <= levels[i - 1]) {
            throw DomainError("refinement levels must be increasing");
        }
    }
}

}  // namespace

RefineStudy refine_eigenvalue(Family family, const SurfaceParams& params, int r, ProblemKind kind,
                              const std::vector<int>& levels, const EigenOptions& eigen) {
    check_levels(levels);
    RefineStudy study;
    study.quantity = "lambda_1(L_" + std::to_string(r) + ")";
    study.reference = reference_eigenvalue(family, params, r, kind);
    for (int l : levels) {
        const Surface s = builtin_surface(family, params, l);
        RefineRow row;
        row.level = l;
        row.vertices = s.mesh.num_vertices();
        row.h_max = s.mesh.max_edge_length();
        row.value = lr_eigenvalue(s.mesh, s.curvature, r, kind, eigen);
        study.rows.push_back(row);
    }
    fill_orders(study);
    return study;
}

RefineStudy refine_curvature(Family family, const SurfaceParams& params, const std::vector<int>& levels) {
    check_levels(levels);
    RefineStudy study;
    study.quantity = "max_kappa_error";
    study.reference = 0.0;
    for (int l : levels) {
        const Surface s = builtin_surface(family, params, l);
        const CurvatureField est = estimate_curvature(s.mesh);
        double err = 0.0;
        for (int v = 0; v < s.mesh.num_vertices(); ++v) {
            if (s.mesh.boundary_flags()[v]) {
                continue;
            }
            err = std::max({err, std::abs(est.at(v).kappa1 - s.curvature.at(v).kappa1),
                            std::abs(est.at(v).kappa2 - s.curvature.at(v).kappa2)});
        }
        RefineRow row;
        row.level = l;
        row.vertices = s.mesh.num_vertices();
        row.h_max = s.mesh.max_edge_length();
        row.value = err;
        study.rows.push_back(row);
    }
    fill_orders(study);
    return study;
}

nlohmann::json refine_json(const RefineStudy& study) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : study.rows) {
        rows.push_back({{"level", r.level},
                        {"vertices", r.vertices},
                        {"h_max", number(r.h_max)},
                        {"value", number(r.value)},
                        {"error", optional_number(r.error)},
                        {"ratio", optional_number(r.ratio)},
                        {"order", optional_number(r.order)}});
    }
    return {{"quantity", study.quantity}, {"reference", optional_number(study.reference)}, {"rows", rows}};
}

std::string refine_csv(const RefineStudy& study) {
    std::string s = "level,vertices,h_max,value,error,ratio,order\n";
    auto opt = [](const std::optional<double>& x) { return x ? fmt(*x) : std::string(); };
    for (const auto& r : study.rows) {
        s += std::to_string(r.level) + "," + std::to_string(r.vertices) + "," + fmt(r.h_max) + "," + fmt(r.value) +
             "," + opt(r.error) + "," + opt(r.ratio) + "," + opt(r.order) + "\n";
    }
    return s;
}

}  // namespace fundtone
