#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fundtone/bounds.hpp"
#include "fundtone/eigensolve.hpp"
#include "fundtone/surfaces.hpp"
#include "json.hpp"

namespace fundtone {

/// Tensor field of a sandwich check.
struct PhiSpec {
    enum class Type { Newton, Scalar, Diagonal };
    Type type = Type::Newton;
    int r = 1;                               ///< Newton
    double scalar = 1.0;                     ///< Scalar: scalar * Id
    std::array<double, 2> diagonal{1, 1};    ///< Diagonal: diag in the (e1, e2) frame
};

enum class Check { Thm32, Barta, LambdaR, Comparison, Sandwich, Cheeger };

std::string_view check_name(Check c);

struct SuiteConfig {
    std::string name;
    Family family = Family::RoundSphere;
    SurfaceParams params;
    std::vector<int> levels{3};
    std::vector<int> r_values{0};
    std::vector<Check> checks;
    /// Ball B(p, R) of the ball bounds; p defaults to the pole of disk-like families.
    std::optional<double> ball_radius;
    std::optional<Vec> ball_center;
    /// Known Cheeger constant; without it the Cheeger report is informational.
    std::optional<double> h_exact;
    std::optional<PhiSpec> phi;
};

struct VerificationSuite {
    std::string suite_name;
    std::vector<SuiteConfig> configs;
    std::string json_path;
    std::string csv_path;
    std::string margins_path;
};

/// Built-in corpus: ball bounds on the disk, the sphere caps and the
/// hyperbolic cap (levels 2 to 4), radius constants on distance spheres,
/// comparison, sandwich and Cheeger checks (level 3).
VerificationSuite default_suite();

/// Throws IoError when the document does not describe a valid suite.
VerificationSuite parse_suite(const nlohmann::json& doc);
VerificationSuite read_suite_file(const std::string& path);
nlohmann::json suite_to_json(const VerificationSuite& suite);

struct VerifyOptions {
    /// Multiplies the evaluated value of this bound by 10 (self-test).
    std::optional<BoundName> mutate;
    int workers = 1;
    EigenOptions eigen;
    /// Replaces the levels of every configuration.
    std::optional<std::vector<int>> levels;
};

/// Worker count from FUNDTONE_WORKERS, default 1.
int worker_count_from_env();

/// All reports of one configuration at one level.
std::vector<BoundReport> run_config(const SuiteConfig& config, int level, const VerifyOptions& options);

/// Runs every (configuration, level) pair on a worker pool. The order of the
/// result does not depend on the number of workers.
std::vector<BoundReport> run_verify(const VerificationSuite& suite, const VerifyOptions& options);

bool all_pass(const std::vector<BoundReport>& reports);
nlohmann::json reports_json(const std::vector<BoundReport>& reports);
std::string reports_csv(const std::vector<BoundReport>& reports);
/// Plot data: config, level, bound, lambda, margin (skipped and info rows omitted).
std::string margin_table(const std::vector<BoundReport>& reports);

/// Known closed-form first eigenvalue, when there is one.
std::optional<double> reference_eigenvalue(Family family, const SurfaceParams& params, int r, ProblemKind kind);

struct RefineRow {
    int level = 0;
    int vertices = 0;
    double h_max = 0.0;
    double value = 0.0;
    std::optional<double> error;
    /// Successive error ratio (against the reference), or the Richardson
    /// ratio of consecutive differences without one.
    std::optional<double> ratio;
    std::optional<double> order;
};

struct RefineStudy {
    std::string quantity;
    std::optional<double> reference;
    std::vector<RefineRow> rows;
};

/// First eigenvalue of L_r over the levels. Needs at least three levels.
RefineStudy refine_eigenvalue(Family family, const SurfaceParams& params, int r, ProblemKind kind,
                              const std::vector<int>& levels, const EigenOptions& eigen = {});
/// Max principal-curvature error of the quadric-fit estimator against the
/// analytic field, over interior vertices (Euclidean families).
RefineStudy refine_curvature(Family family, const SurfaceParams& params, const std::vector<int>& levels);

nlohmann::json refine_json(const RefineStudy& study);
std::string refine_csv(const RefineStudy& study);

}  // namespace fundtone
