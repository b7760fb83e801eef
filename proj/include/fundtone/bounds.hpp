#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fundtone/discretization.hpp"
#include "fundtone/eigensolve.hpp"
#include "fundtone/geometry.hpp"
#include "json.hpp"

namespace fundtone {

enum class BoundName { Barta, Thm32I, Thm32II, Thm32III, LambdaRConst, ComparisonRs, PhiSandwich, Cheeger };

std::string_view bound_name(BoundName b);
/// Throws DomainError for an unknown name.
BoundName parse_bound_name(std::string_view name);
const std::vector<BoundName>& all_bound_names();

/// One verification record: a lower bound against the quantity it bounds.
struct BoundReport {
    BoundName bound = BoundName::Barta;
    std::string config;
    std::map<std::string, double> inputs;
    double bound_value = 0.0;
    /// The bounded quantity (an eigenvalue, or R_e for lambda_r_const).
    std::optional<double> computed_lambda;
    double margin = 0.0;
    bool pass = true;
    int mesh_level = 0;
    /// Relative tolerance: 1e-6 plus the declared discretization allowance.
    double tolerance = 1e-6;
    /// "pass", "fail", "info" or "skipped".
    std::string status = "pass";
    std::string reason;
};

/// Fills margin, pass and status; pass iff the computed value is absent or
/// margin >= -tolerance * |computed|.
BoundReport make_report(BoundName bound, std::string config, std::map<std::string, double> inputs,
                        double bound_value, std::optional<double> computed, int mesh_level, double allowance = 0.0);
BoundReport skipped_report(BoundName bound, std::string config, std::map<std::string, double> inputs,
                           int mesh_level, std::string reason);

/// Rounds to `digits` significant decimal digits.
double round_significant(double x, int digits = 12);
/// Stable JSON form; doubles rounded to 12 significant digits.
nlohmann::json to_json(const BoundReport& report);
/// Header of the CSV summary, and one row per report.
std::string csv_header();
std::string csv_row(const BoundReport& report);

/// Tangent vectors at the vertices, stored as embedding-space vectors.
struct VertexVectorField {
    std::vector<Vec> vectors;

    /// From components along the frames (e1, e2) of `cf`.
    static VertexVectorField from_frame(const CurvatureField& cf, const std::vector<Eigen::Vector2d>& components);
    std::vector<Eigen::Vector2d> frame_components(const SpaceForm& sf, const CurvatureField& cf) const;
};

/// Antisymmetric function on oriented edges, X(i, j) = -X(j, i): the line
/// integral of a vector field along the edge from i to j.
class EdgeField {
public:
    /// X(i, j) = log f(i) - log f(j), the edge form of -grad log f. f must be
    /// positive at interior vertices; boundary values <= 0 give +infinity on
    /// edges leaving the interior.
    static EdgeField log_gradient(const TriMesh& mesh, const Eigen::VectorXd& f);
    /// Trapezoidal line integrals of a vertex field along interior edges.
    /// Edges from an interior to a boundary vertex get +infinity, the limit of
    /// -grad log f for any f vanishing on the boundary. Fields that blow up at
    /// the boundary are better passed through log_gradient of a potential.
    static EdgeField from_vector_field(const TriMesh& mesh, const VertexVectorField& X);
    static EdgeField zero(const TriMesh& mesh);

    double value(int i, int j) const;

private:
    std::vector<std::pair<int, int>> edges_;  // sorted, a < b
    std::vector<double> values_;              // X(a, b)
};

struct BartaResult {
    double value = 0.0;  ///< inf over interior vertices
    int vertex = -1;     ///< where the infimum is attained
    /// All off-diagonal stiffness entries are non-positive, so the value is a
    /// rigorous lower bound for the lumped-mass eigenvalue.
    bool certified = false;
    double min_weight = 0.0;
    std::vector<double> per_vertex;  ///< NaN on boundary vertices
};

/// inf over interior vertices of the discrete div(Phi X) - |Phi^{1/2} X|^2:
///   D_i = (1 / m_i) sum_j w_ij (1 - exp(-X(i, j)))
/// with w_ij = -K^Phi_ij and m_i the lumped vertex mass. For X = -d log f this
/// is (K f)_i / (m_i f_i).
BartaResult barta_bound(const TriMesh& mesh, const PhiField& phi, const EdgeField& X);
BartaResult barta_bound(const TriMesh& mesh, const PhiField& phi, const VertexVectorField& X);

/// -grad log(R^2 - rho^2) with rho the ambient distance to p, projected onto
/// the surface: 2 rho grad rho / (R^2 - rho^2). Boundary vertices outside the
/// open ball get the zero vector.
VertexVectorField canonical_test_field(const TriMesh& mesh, const CurvatureField& cf, const AmbientPoint& p,
                                       double R);
/// R^2 - rho^2 at every vertex.
Eigen::VectorXd canonical_potential(const TriMesh& mesh, const AmbientPoint& p, double R);
/// Exact edge integrals of the canonical field: it is the surface gradient of
/// -log(R^2 - rho^2), so its line integrals are differences of that potential.
EdgeField canonical_edge_field(const TriMesh& mesh, const AmbientPoint& p, double R);

struct Thm32Result {
    double bound = 0.0;
    bool admissible = false;
    BoundName item = BoundName::Thm32III;
    /// Supremum of admissible radii (infinity when unrestricted).
    double window = 0.0;
};

/// Ball bound for the fundamental tone of L_r on a domain inside B(p, R).
Thm32Result thm32_bound(int c, int r, double R, double inf_sr, double h_next, int n = 2);

struct ComparisonResult {
    double factor = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double mu_r = 0.0;
    double nu_s = 0.0;
    double lambda_s = 0.0;
    bool pass = false;
};

/// lambda(L_r) >= mu(P_r) / nu(P_s) * lambda(L_s), both solved on the mesh.
ComparisonResult comparison_bound(const TriMesh& mesh, const CurvatureField& cf, int r, int s, ProblemKind kind,
                                  double tol = 1e-6, const EigenOptions& opts = {});

struct SandwichResult {
    double mu = 0.0;
    double nu = 0.0;
    double lambda_phi = 0.0;
    double lambda_delta = 0.0;
    bool pass = false;
};

/// nu * lambda(Delta) >= lambda(L_Phi) >= mu * lambda(Delta).
SandwichResult phi_sandwich(const TriMesh& mesh, const PhiField& phi, ProblemKind kind, double tol = 1e-6,
                            const EigenOptions& opts = {});

struct CheegerSweep {
    double h_hat = 0.0;
    double threshold = 0.0;
    double cut_length = 0.0;
    double area_below = 0.0;
    double area_above = 0.0;
    int cut_faces = 0;
};

/// Best level-set cut of a vertex function over all thresholds midway between
/// consecutive distinct values.
CheegerSweep cheeger_sweep(const TriMesh& mesh, const Eigen::VectorXd& u);

/// Checks lambda_1(L_r) >= mu(P_r) h^2 / 4 when h_exact is given; otherwise an
/// informational report carrying the sweep estimate.
BoundReport cheeger_lower_bound_check(const TriMesh& mesh, const CurvatureField& cf, int r,
                                      std::optional<double> h_exact, int mesh_level = 0, std::string config = {},
                                      const EigenOptions& opts = {});

/// Fundamental tone (kind = dirichlet) or first nonzero eigenvalue of L_r.
/// Throws EllipticityError when P_r is not positive definite.
double lr_eigenvalue(const TriMesh& mesh, const CurvatureField& cf, int r, ProblemKind kind,
                    const EigenOptions& opts = {});

}  // namespace fundtone
