// fundtone: generate meshes, solve eigenproblems, verify lower bounds, study refinement.
//
// Exit codes: 0 pass, 1 bound violation, 2 ellipticity or other precondition
// failure, 3 solver failure, 4 IO or parse error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fundtone/bounds.hpp"
#include "fundtone/discretization.hpp"
#include "fundtone/eigensolve.hpp"
#include "fundtone/errors.hpp"
#include "fundtone/geometry.hpp"
#include "fundtone/harness.hpp"
#include "fundtone/io.hpp"
#include "fundtone/surfaces.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fundtone;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kViolation = 1, kPrecondition = 2, kSolver = 3, kIo = 4 };

struct FamilyArgs {
    std::string family;
    double radius = 1.0;
    std::vector<double> axes{1.0, 1.0, 1.0};
    double major = 2.0;
    double minor = 1.0;
    double angle = 0.5;
    int rings = 0;
    int level = 3;

    SurfaceParams params() const {
        SurfaceParams p;
        p.radius = radius;
        p.axis_a = axes[0];
        p.axis_b = axes[1];
        p.axis_c = axes[2];
        p.major = major;
        p.minor = minor;
        p.angle = angle;
        p.rings = rings;
        return p;
    }
};

void add_family_options(CLI::App* cmd, FamilyArgs& a, bool with_level) {
    cmd->add_option("--radius", a.radius, "sphere, disk or distance-sphere radius");
    cmd->add_option("--axes", a.axes, "ellipsoid semi-axes a b c")->expected(3);
    cmd->add_option("--major", a.major, "torus major radius");
    cmd->add_option("--minor", a.minor, "torus minor radius");
    cmd->add_option("--angle", a.angle, "cap angular radius");
    cmd->add_option("--rings", a.rings, "ring count of disk-like meshes (0: from the level)");
    if (with_level) {
        cmd->add_option("--level", a.level, "refinement level")->check(CLI::Range(0, 8));
    }
}

json num(double x) { return std::isfinite(x) ? json(round_significant(x)) : json(nullptr); }

json num_array(const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) {
        a.push_back(num(x));
    }
    return a;
}

json mesh_stats(const TriMesh& m) {
    return {{"vertices", m.num_vertices()},
            {"faces", m.num_faces()},
            {"edges", m.num_edges()},
            {"boundary_vertices", m.num_boundary_vertices()},
            {"euler_characteristic", m.euler_characteristic()},
            {"ambient_c", m.space().curvature()},
            {"h_max", num(m.max_edge_length())},
            {"area", num(m.total_area())}};
}

void emit(const json& j, const std::string& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out || !(out << text)) {
        throw IoError("cannot write " + path);
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        return;
    }
    std::ofstream out(path);
    if (!out || !(out << text)) {
        throw IoError("cannot write " + path);
    }
}

fs::path sidecar_path(const fs::path& off) {
    fs::path p = off;
    p.replace_extension(".curvature.csv");
    return p;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const FamilyArgs& a, std::string out) {
    const Surface s = builtin_surface(parse_family(a.family), a.params(), a.level);
    if (out.empty()) {
        out = a.family + "_l" + std::to_string(a.level) + ".off";
    }
    write_off_file(out, s.mesh);
    const fs::path side = sidecar_path(out);
    write_curvature_csv_file(side, s.curvature);
    json j = mesh_stats(s.mesh);
    j["mesh"] = out;
    j["curvature"] = side.string();
    j["family"] = a.family;
    j["level"] = a.level;
    emit(j, "");
    return kPass;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
    FamilyArgs fam;
    std::string mesh_path;
    std::optional<int> ambient;
    std::string op = "laplace";
    std::string phi_path;
    std::string kind;
    int k = 1;
    bool lumped = false;
    std::string out;
    std::string eigenfunctions;
    std::string matrix_market;
};

std::optional<int> parse_lr(const std::string& op) {
    static const std::regex re(R"(lr\((\d+)\)|lr(\d+))");
    std::smatch m;
    if (!std::regex_match(op, m, re)) {
        return std::nullopt;
    }
    return std::stoi(m[1].matched ? m[1].str() : m[2].str());
}

// Per-vertex tensors "vertex_id,phi11,phi12,phi22" in the (e1, e2) frame.
std::vector<Eigen::Matrix2d> read_phi_csv(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::string line;
    std::getline(in, line);
    if (line.rfind("vertex_id", 0) != 0) {
        throw IoError(path + ": expected header vertex_id,phi11,phi12,phi22");
    }
    std::vector<Eigen::Matrix2d> mats(n, Eigen::Matrix2d::Constant(std::nan("")));
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        int v;
        double a, b, c;
        if (!(ls >> v >> a >> b >> c) || v < 0 || v >= n) {
            throw IoError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
        mats[v] << a, b, b, c;
    }
    for (int v = 0; v < n; ++v) {
        if (!mats[v].allFinite()) {
            throw IoError(path + ": no tensor for vertex " + std::to_string(v));
        }
    }
    return mats;
}

int cmd_solve(const SolveArgs& a, const EigenOptions& eigen) {
    std::optional<Surface> surface;
    std::optional<TriMesh> mesh;
    std::optional<CurvatureField> cf;
    json source;
    if (!a.mesh_path.empty()) {
        mesh = read_off_file(a.mesh_path, a.ambient);
        source = a.mesh_path;
    } else if (!a.fam.family.empty()) {
        surface = builtin_surface(parse_family(a.fam.family), a.fam.params(), a.fam.level);
        source = {{"family", a.fam.family}, {"level", a.fam.level}};
    } else {
        throw IoError("solve needs --family or --mesh");
    }
    const TriMesh& m = surface ? surface->mesh : *mesh;
    auto curvature = [&]() -> const CurvatureField& {
        if (surface) {
            return surface->curvature;
        }
        if (!cf) {
            cf = estimate_curvature(m);
        }
        return *cf;
    };

    ProblemKind kind = m.is_closed() ? ProblemKind::Closed : ProblemKind::Dirichlet;
    if (a.kind == "dirichlet") {
        kind = ProblemKind::Dirichlet;
    } else if (a.kind == "closed") {
        kind = ProblemKind::Closed;
    }

    std::optional<PhiField> phi;
    double margin = 1.0;
    if (a.op == "laplace") {
        phi = PhiField::identity(m.num_vertices());
    } else if (const auto r = parse_lr(a.op)) {
        const auto el = check_ellipticity(m, curvature(), *r);
        margin = el.margin;
        if (!el.elliptic) {
            emit({{"error", "ellipticity"},
                  {"operator", a.op},
                  {"ellipticity_margin", num(margin)},
                  {"message", "P_" + std::to_string(*r) + " is not positive definite"},
                  {"mesh", mesh_stats(m)}},
                 a.out);
            return kPrecondition;
        }
        phi = PhiField::newton(curvature(), *r);
    } else if (a.op == "phi_csv") {
        if (a.phi_path.empty()) {
            throw IoError("operator phi_csv needs --phi");
        }
        phi = PhiField::custom(curvature(), read_phi_csv(a.phi_path, m.num_vertices()));
        margin = phi_extrema(*phi).mu;
        if (!(margin > 0.0)) {
            emit({{"error", "ellipticity"},
                  {"operator", a.op},
                  {"ellipticity_margin", num(margin)},
                  {"message", "Phi is not positive definite"},
                  {"mesh", mesh_stats(m)}},
                 a.out);
            return kPrecondition;
        }
    } else {
        throw IoError("unknown operator \"" + a.op + "\" (laplace, lr(r) or phi_csv)");
    }

    OperatorPair op = assemble(m, *phi, {.lumped_mass = a.lumped});
    if (kind == ProblemKind::Dirichlet) {
        op = apply_dirichlet(op, m);
    }
    if (!a.matrix_market.empty()) {
        std::ofstream ks(a.matrix_market + "_K.mtx");
        std::ofstream ms(a.matrix_market + "_M.mtx");
        if (!ks || !ms) {
            throw IoError("cannot write matrices with prefix " + a.matrix_market);
        }
        write_matrix_market(ks, op.K);
        write_matrix_market(ms, op.M);
    }

    EigenResult res;
    try {
        res = smallest_eigenpairs(op, a.k, kind, eigen);
    } catch (const SolverError& e) {
        emit({{"error", "solver"}, {"message", e.what()}, {"best_residuals", num_array(e.best_residuals())}}, a.out);
        return kSolver;
    }
    if (!a.eigenfunctions.empty()) {
        std::ofstream ef(a.eigenfunctions);
        if (!ef) {
            throw IoError("cannot write " + a.eigenfunctions);
        }
        write_eigenfunctions_csv(ef, op, res);
    }
    emit({{"operator", a.op},
          {"kind", std::string(problem_kind_name(kind))},
          {"k", a.k},
          {"lumped_mass", a.lumped},
          {"eigenvalues", num_array(res.eigenvalues)},
          {"residuals", num_array(res.residual_norms)},
          {"iterations", res.iterations},
          {"shift", num(res.shift)},
          {"seed", eigen.seed},
          {"ellipticity_margin", num(margin)},
          {"source", source},
          {"mesh", mesh_stats(m)}},
         a.out);
    return kPass;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::string suite;
    std::string json_path;
    std::string csv_path;
    std::string margins_path;
    std::string mutate;
    std::vector<int> levels;
};

int cmd_verify(const VerifyArgs& a, const EigenOptions& eigen) {
    VerificationSuite suite = a.suite.empty() ? default_suite() : read_suite_file(a.suite);
    VerifyOptions opts;
    opts.eigen = eigen;
    opts.workers = worker_count_from_env();
    if (!a.mutate.empty()) {
        try {
            opts.mutate = parse_bound_name(a.mutate);
        } catch (const DomainError& e) {
            throw IoError(e.what());
        }
    }
    if (!a.levels.empty()) {
        opts.levels = a.levels;
    }
    const auto reports = run_verify(suite, opts);

    const std::string json_path = a.json_path.empty() ? suite.json_path : a.json_path;
    const std::string csv_path = a.csv_path.empty() ? suite.csv_path : a.csv_path;
    const std::string margins_path = a.margins_path.empty() ? suite.margins_path : a.margins_path;
    write_text(json_path, reports_json(reports).dump(2) + "\n");
    write_text(csv_path, reports_csv(reports));
    write_text(margins_path, margin_table(reports));

    int pass = 0, fail = 0, skipped = 0, info = 0;
    for (const auto& r : reports) {
        if (r.status == "pass") {
            ++pass;
        } else if (r.status == "fail") {
            ++fail;
            std::cerr << "FAIL " << to_json(r).dump() << "\n";
        } else if (r.status == "skipped") {
            ++skipped;
        } else {
            ++info;
        }
    }
    std::cout << "suite " << suite.suite_name << ": " << reports.size() << " reports, " << pass << " pass, " << fail
              << " fail, " << skipped << " skipped, " << info << " info\n";
    return fail == 0 ? kPass : kViolation;
}

// ---------------------------------------------------------------- refine

struct RefineArgs {
    FamilyArgs fam;
    std::vector<int> levels{2, 3, 4, 5};
    std::string op = "laplace";
    std::string kind;
    bool curvature = false;
    std::string json_path;
    std::string csv_path;
};

int cmd_refine(const RefineArgs& a, const EigenOptions& eigen) {
    const Family family = parse_family(a.fam.family);
    const SurfaceParams params = a.fam.params();
    RefineStudy study;
    if (a.curvature) {
        study = refine_curvature(family, params, a.levels);
    } else {
        int r = 0;
        if (a.op != "laplace") {
            const auto lr = parse_lr(a.op);
            if (!lr) {
                throw IoError("unknown operator \"" + a.op + "\" (laplace or lr(r))");
            }
            r = *lr;
        }
        const bool closed = builtin_surface(family, params, 0).mesh.is_closed();
        ProblemKind kind = closed ? ProblemKind::Closed : ProblemKind::Dirichlet;
        if (a.kind == "dirichlet") {
            kind = ProblemKind::Dirichlet;
        } else if (a.kind == "closed") {
            kind = ProblemKind::Closed;
        }
        study = refine_eigenvalue(family, params, r, kind, a.levels, eigen);
    }
    if (!a.json_path.empty()) {
        emit(refine_json(study), a.json_path);
    }
    write_text(a.csv_path, refine_csv(study));
    std::cout << refine_csv(study);
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fundamental tones of divergence-form operators on surfaces, and their lower bounds"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = EigenOptions{}.seed;
    app.add_option("--seed", seed, "seed of the eigensolver start blocks");

    const std::vector<std::string> kinds{"dirichlet", "closed"};

    FamilyArgs gen;
    std::string gen_out;
    auto* generate = app.add_subcommand("generate", "write a built-in surface as OFF plus curvature CSV");
    generate->add_option("family", gen.family, "surface family")->required();
    add_family_options(generate, gen, true);
    generate->add_option("-o,--out", gen_out, "OFF output path (sidecar: .curvature.csv)");

    SolveArgs sol;
    auto* solve = app.add_subcommand("solve", "smallest eigenvalues of an operator on a surface");
    solve->add_option("--family", sol.fam.family, "built-in surface family");
    add_family_options(solve, sol.fam, true);
    solve->add_option("--mesh", sol.mesh_path, "OFF mesh instead of a family");
    solve->add_option("--ambient", sol.ambient, "ambient curvature of a four-coordinate OFF mesh")
        ->check(CLI::IsMember({-1, 1}));
    solve->add_option("--operator", sol.op, "laplace, lr(r) or phi_csv");
    solve->add_option("--phi", sol.phi_path, "tensor CSV for phi_csv");
    solve->add_option("--kind", sol.kind, "dirichlet or closed (default: closed iff no boundary)")
        ->check(CLI::IsMember(kinds));
    solve->add_option("-k", sol.k, "number of eigenpairs")->check(CLI::PositiveNumber);
    solve->add_flag("--lumped", sol.lumped, "lumped mass matrix");
    solve->add_option("-o,--out", sol.out, "JSON output (default stdout)");
    solve->add_option("--eigenfunctions", sol.eigenfunctions, "per-vertex eigenfunction CSV");
    solve->add_option("--matrix-market", sol.matrix_market, "write <prefix>_K.mtx and <prefix>_M.mtx");

    VerifyArgs ver;
    auto* verify = app.add_subcommand("verify", "check every bound of a suite against computed eigenvalues");
    verify->add_option("--suite", ver.suite, "suite JSON (default: built-in corpus)");
    verify->add_option("--json", ver.json_path, "report JSON path");
    verify->add_option("--csv", ver.csv_path, "summary CSV path");
    verify->add_option("--margins", ver.margins_path, "margin table path");
    verify->add_option("--mutate", ver.mutate, "self-test: scale the named bound by 10");
    verify->add_option("--levels", ver.levels, "override the levels of every configuration")->delimiter(',');

    RefineArgs ref;
    auto* refine = app.add_subcommand("refine", "convergence table over refinement levels");
    refine->add_option("family", ref.fam.family, "surface family")->required();
    add_family_options(refine, ref.fam, false);
    refine->add_option("--levels", ref.levels, "levels, at least three")->delimiter(',');
    refine->add_option("--operator", ref.op, "laplace or lr(r)");
    refine->add_option("--kind", ref.kind, "dirichlet or closed")->check(CLI::IsMember(kinds));
    refine->add_flag("--curvature", ref.curvature, "curvature estimator error instead of the eigenvalue");
    refine->add_option("--json", ref.json_path, "JSON output path");
    refine->add_option("--csv", ref.csv_path, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kIo;
    }

    EigenOptions eigen;
    eigen.seed = seed;
    try {
        if (*generate) {
            return cmd_generate(gen, gen_out);
        }
        if (*solve) {
            return cmd_solve(sol, eigen);
        }
        if (*verify) {
            return cmd_verify(ver, eigen);
        }
        if (*refine) {
            return cmd_refine(ref, eigen);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolver;
    } catch (const EllipticityError& e) {
        std::cerr << "ellipticity error: " << e.what() << "\n";
        return kPrecondition;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPrecondition;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kIo;
}
