// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance <path to fundtone CLI>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <boost/rational.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fundtone/algebra.hpp"
#include "fundtone/bounds.hpp"
#include "fundtone/errors.hpp"
#include "fundtone/harness.hpp"
#include "fundtone/surfaces.hpp"

using namespace fundtone;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kJ01Squared = 2.404825557695773 * 2.404825557695773;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PhiField identity(const Surface& s) { return PhiField::identity(s.mesh.num_vertices()); }

Outcome sphere_spectrum() {
    const auto t0 = std::chrono::steady_clock::now();
    const Surface s = builtin_surface(Family::RoundSphere, {}, 4);
    const auto res = smallest_eigenpairs(assemble(s.mesh, identity(s)), 4, ProblemKind::Closed);
    const double secs = seconds_since(t0);
    const auto& ev = res.eigenvalues;
    const double rel = std::abs(ev[0] - 2.0) / 2.0;
    const double spread = (ev[2] - ev[0]) / ev[0];
    const double gap = ev[3] / ev[2];
    const bool ok = rel < 0.02 && spread < 1e-3 && gap > 2.0 && secs < 30.0;
    return {ok, fmt("lambda_1 = %.6f (rel err %.2e), triple spread %.1e, next/third %.2f", ev[0], rel, spread,
                    gap) +
                    fmt(" [%.1f s]", secs)};
}

Outcome disk_dirichlet() {
    double min_margin = 1e300;
    auto check = [&](const SurfaceParams& p, int level) {
        const Surface s = builtin_surface(Family::PlaneDisk, p, level);
        const double lambda = lr_eigenvalue(s.mesh, s.curvature, 0, ProblemKind::Dirichlet);
        const double h = local_curvature_sup(s.mesh, s.curvature, *s.pole, 1.0, 0);
        const auto t = thm32_bound(0, 0, 1.0, inf_symmetric_function(s.curvature, 0), h);
        min_margin = std::min(min_margin, t.admissible ? lambda - t.bound : -1.0);
        return std::make_pair(s.mesh.num_vertices(), lambda);
    };
    for (int level = 0; level <= 5; ++level) {
        check({}, level);
    }
    SurfaceParams fine;
    fine.rings = 40;
    const auto [nv, lambda] = check(fine, 0);
    const double rel = std::abs(lambda - kJ01Squared) / kJ01Squared;
    return {rel < 0.02 && min_margin > 0.0,
            fmt("lambda_1 = %.5f at %.0f vertices (rel err %.2e); min margin over the bound 4 at levels 0-5: %.4f",
                lambda, nv, rel, min_margin)};
}

Outcome barta_equality() {
    std::string detail;
    bool ok = true;
    for (int which = 0; which < 2; ++which) {
        for (int level : {4, 5}) {
            SurfaceParams p;
            p.angle = kPi / 4;
            const Family f = which == 0 ? Family::PlaneDisk : Family::SphericalCap;
            const Surface s = builtin_surface(f, p, level);
            const double lambda = lr_eigenvalue(s.mesh, s.curvature, 0, ProblemKind::Dirichlet);
            const auto op = apply_dirichlet(assemble(s.mesh, identity(s), {.lumped_mass = true}), s.mesh);
            const auto eig = smallest_eigenpairs(op, 1, ProblemKind::Dirichlet);
            const auto b = barta_bound(s.mesh, identity(s), EdgeField::log_gradient(s.mesh, op.reinsert(eig.eigenfunctions.col(0))));
            const double ratio = b.value / lambda;
            ok = ok && ratio >= 0.95 && ratio <= 1.05;
            detail += (detail.empty() ? "" : "; ") + std::string(family_name(f)) + fmt(" l=%.0f ratio %.4f", level, ratio);
        }
    }
    return {ok, detail};
}

Outcome thm32_suite() {
    VerificationSuite suite;
    suite.suite_name = "thm32";
    for (auto c : default_suite().configs) {
        if (std::find(c.checks.begin(), c.checks.end(), Check::Thm32) != c.checks.end()) {
            c.checks = {Check::Thm32};
            c.levels = {2, 3, 4};
            suite.configs.push_back(c);
        }
    }
    const auto reports = run_verify(suite, {});
    int admissible = 0, violations = 0, skipped = 0;
    double min_rel = 1e300;
    for (const auto& r : reports) {
        if (r.status == "skipped") {
            ++skipped;
            continue;
        }
        ++admissible;
        violations += r.status == "fail";
        min_rel = std::min(min_rel, r.margin / *r.computed_lambda);
    }
    bool c1 = false, c0 = false, cm1 = false;
    for (const auto& r : reports) {
        if (r.status != "skipped") {
            const int c = static_cast<int>(r.inputs.at("c"));
            c1 |= c == 1;
            c0 |= c == 0;
            cm1 |= c == -1;
        }
    }
    return {violations == 0 && admissible > 0 && c1 && c0 && cm1,
            fmt("%.0f admissible reports over %.0f configurations x levels 2-4, %.0f violations, %.0f skipped", admissible,
                static_cast<double>(suite.configs.size()), violations, skipped) +
                fmt("; smallest relative margin %.3f", min_rel)};
}

Outcome lambda_sharpness() {
    double worst = 0.0;
    for (double rho : {0.5, 1.0, 2.0}) {
        SurfaceParams p;
        p.radius = rho;
        const Surface s = builtin_surface(Family::RoundSphere, p, 3);
        const double re = extrinsic_radius(s.mesh).radius;
        for (int r : {0, 1}) {
            const double lam = lambda_r_constant(0, 2, r, inf_symmetric_function(s.curvature, r),
                                                 sup_symmetric_function(s.curvature, r + 1));
            worst = std::max(worst, std::abs(lam - re) / re);
        }
    }
    // Exact track: a sphere of radius rho has every k_i = 1/rho.
    using Q = boost::rational<long long>;
    int exact = 0, total = 0;
    for (const Q rho : {Q(1, 2), Q(1), Q(2), Q(3, 7)}) {
        for (int n = 1; n <= 6; ++n) {
            const std::vector<Q> k(n, Q(1) / rho);
            const auto s = symmetric_functions<Q>(std::span<const Q>(k));
            for (int r = 0; r < n; ++r) {
                ++total;
                exact += lambda_r_flat_or_hyperbolic<Q>(n, r, s[r], s[r + 1]) == rho;
            }
        }
    }
    return {worst < 1e-2 && exact == total,
            fmt("max |Lambda_r - R_e| / R_e = %.2e over radii {0.5, 1, 2}, r in {0, 1}; exact rational identity %.0f/%.0f",
                worst, exact, total)};
}

// S_r by enumerating r-subsets.
double subset_sum(const std::vector<double>& k, int r, int skip = -1) {
    const int n = static_cast<int>(k.size());
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != r || (skip >= 0 && (mask >> skip & 1u))) {
            continue;
        }
        double prod = 1.0;
        for (int i = 0; i < n; ++i) {
            if (mask >> i & 1u) {
                prod *= k[i];
            }
        }
        total += prod;
    }
    return total;
}

Outcome trace_identities() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::uniform_int_distribution<int> dim(1, 8);
    double worst_trace = 0.0, worst_oracle = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = dim(rng);
        std::vector<double> k(n);
        for (double& x : k) {
            x = dist(rng);
        }
        const auto s = symmetric_functions<double>(std::span<const double>(k));
        for (int r = 0; r < n; ++r) {
            const auto mu = newton_eigenvalues<double>(std::span<const double>(k), r);
            double sum = 0.0, weighted = 0.0, scale = 1.0;
            for (int i = 0; i < n; ++i) {
                sum += mu[i];
                weighted += k[i] * mu[i];
                scale = std::max(scale, std::abs(k[i] * mu[i]));
            }
            worst_trace = std::max({worst_trace, std::abs(sum - (n - r) * s[r]) / std::max(1.0, std::abs(s[r]) * n),
                                    std::abs(weighted - (r + 1) * s[r + 1]) / (scale * n)});
            if (n <= 6) {
                worst_oracle = std::max(worst_oracle, std::abs(s[r] - subset_sum(k, r)) / std::max(1.0, std::abs(s[r])));
                for (int i = 0; i < n; ++i) {
                    // the eigenvalue of P_r on e_i is S_r of the other curvatures
                    worst_oracle = std::max(worst_oracle, std::abs(mu[i] - subset_sum(k, r, i)) / std::max(1.0, std::abs(mu[i])));
                }
            }
        }
    }
    return {worst_trace <= 1e-12 && worst_oracle <= 1e-12,
            fmt("1000 random spectra, n <= 8: worst trace residual %.1e; subset oracle (n <= 6) %.1e", worst_trace,
                worst_oracle)};
}

Outcome comparison_sandwich() {
    SurfaceParams two;
    two.radius = 2.0;
    const Surface s2 = builtin_surface(Family::RoundSphere, two, 3);
    const double l1 = lr_eigenvalue(s2.mesh, s2.curvature, 1, ProblemKind::Closed);
    const double l0 = lr_eigenvalue(s2.mesh, s2.curvature, 0, ProblemKind::Closed);
    const double rel = std::abs(l1 - 0.5 * l0) / (0.5 * l0);

    SurfaceParams ep;
    ep.axis_c = 1.5;
    const Surface e = builtin_surface(Family::Ellipsoid, ep, 3);
    const auto c10 = comparison_bound(e.mesh, e.curvature, 1, 0, ProblemKind::Closed);
    const auto c01 = comparison_bound(e.mesh, e.curvature, 0, 1, ProblemKind::Closed);
    const auto sw = phi_sandwich(e.mesh, PhiField::newton(e.curvature, 1), ProblemKind::Closed);
    const double m1 = c10.lhs - c10.rhs;
    const double m2 = c01.lhs - c01.rhs;
    const double m3 = sw.lambda_phi - sw.mu * sw.lambda_delta;
    const double m4 = sw.nu * sw.lambda_delta - sw.lambda_phi;
    return {rel < 1e-6 && m1 > 0 && m2 > 0 && m3 > 0 && m4 > 0,
            fmt("radius 2: |L1 - Delta/2| rel %.1e; ellipsoid margins: comparison %.4f, %.4f", rel, m1, m2) +
                fmt(", sandwich %.4f, %.4f", m3, m4)};
}

Outcome cheeger() {
    const Surface s = builtin_surface(Family::RoundSphere, {}, 4);
    const auto eig = smallest_eigenpairs(assemble(s.mesh, identity(s)), 1, ProblemKind::Closed);
    const auto sweep = cheeger_sweep(s.mesh, eig.eigenfunctions.col(0));
    const double rel = std::abs(sweep.h_hat - 1.0);
    const auto r0 = cheeger_lower_bound_check(s.mesh, s.curvature, 0, 1.0, 4);
    const auto r1 = cheeger_lower_bound_check(s.mesh, s.curvature, 1, 1.0, 4);
    return {rel < 0.03 && r0.status == "pass" && r1.status == "pass",
            fmt("h_hat = %.5f (rel err %.2e); r=0: %.4f >= %.4f", sweep.h_hat, rel, *r0.computed_lambda, r0.bound_value) +
                fmt("; r=1: %.4f >= %.4f", *r1.computed_lambda, r1.bound_value)};
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome mutation(const fs::path& cli) {
    const std::string outs = " --json /dev/null --csv /dev/null --margins /dev/null >/dev/null 2>&1";
    const int clean = run(quote(cli) + " verify" + outs);
    std::string detail = "unmutated exit " + std::to_string(clean) + ";";
    bool ok = clean == 0;
    for (BoundName b : all_bound_names()) {
        const int code = run(quote(cli) + " verify --mutate " + std::string(bound_name(b)) + outs);
        ok = ok && code == 1;
        detail += " " + std::string(bound_name(b)) + "=" + std::to_string(code);
    }
    return {ok, detail};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& cli, const fs::path& dir) {
    const fs::path a = dir / "run_a.json";
    const fs::path b = dir / "run_b.json";
    const std::string tail = " --csv /dev/null --margins /dev/null >/dev/null 2>&1";
    const int ca = run(quote(cli) + " verify --json " + quote(a) + tail);
    const int cb = run("FUNDTONE_WORKERS=3 " + quote(cli) + " verify --json " + quote(b) + tail);
    const std::string ja = slurp(a);
    const std::string jb = slurp(b);
    return {ca == 0 && cb == 0 && !ja.empty() && ja == jb,
            "two default-suite runs (1 and 3 workers): " + std::to_string(ja.size()) + " bytes, " +
                (ja == jb ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <fundtone CLI>\n";
        return 2;
    }
    const fs::path cli = fs::absolute(argv[1]);
    const fs::path dir = fs::temp_directory_path() / ("fundtone_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"sphere spectrum", sphere_spectrum},
        {"disk Dirichlet", disk_dirichlet},
        {"Barta equality case", barta_equality},
        {"ball bound suite", thm32_suite},
        {"extrinsic radius constant sharpness", lambda_sharpness},
        {"trace identities", trace_identities},
        {"comparison and sandwich", comparison_sandwich},
        {"Cheeger", cheeger},
        {"mutation self-test", [&] { return mutation(cli); }},
        {"determinism", [&] { return determinism(cli, dir); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    fs::remove_all(dir);
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass\n";
    return failed == 0 ? 0 : 1;
}
