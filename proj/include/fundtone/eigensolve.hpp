#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "fundtone/discretization.hpp"

namespace fundtone {

enum class ProblemKind { Dirichlet, Closed };

std::string_view problem_kind_name(ProblemKind kind);

struct EigenResult {
    ProblemKind kind = ProblemKind::Closed;
    std::vector<double> eigenvalues;  ///< ascending
    Eigen::MatrixXd eigenfunctions;   ///< M-orthonormal columns, one per eigenvalue
    std::vector<double> residual_norms;
    int iterations = 0;
    double shift = 0.0;
};

struct EigenOptions {
    std::uint64_t seed = 20240521;
    int max_iterations = 1000;
    double tolerance = 1e-8;
};

/// The k smallest eigenpairs of K u = lambda M u (the k smallest nonzero
/// ones for a closed problem, with constants projected out M-orthogonally).
///
/// Block inverse iteration on K + sigma M with a sparse LDL^T factorization,
/// M-orthonormalization and Rayleigh-Ritz at every step. Eigenvectors are
/// sign-normalized so that their M-weighted sum (or, when that vanishes,
/// their largest entry) is positive.
EigenResult smallest_eigenpairs(const OperatorPair& op, int k, ProblemKind kind, const EigenOptions& options = {});

/// u^T K u / u^T M u.
double rayleigh_quotient(const OperatorPair& op, const Eigen::VectorXd& u);

/// Per-vertex CSV "vertex_id,u0,u1,..." with zeros on removed vertices.
void write_eigenfunctions_csv(std::ostream& os, const OperatorPair& op, const EigenResult& result);

}  // namespace fundtone
