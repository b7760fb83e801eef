#include "fundtone/eigensolve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "fundtone/errors.hpp"

namespace fundtone {

std::string_view problem_kind_name(ProblemKind kind) {
    return kind == ProblemKind::Dirichlet ? "dirichlet" : "closed";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Orthonormalizes the columns of V in the M inner product (Cholesky QR,
// applied twice). Returns false when the block has lost rank.
bool m_orthonormalize(const SparseMatrix& M, MatrixXd& V) {
    for (int pass = 0; pass < 2; ++pass) {
        const MatrixXd G = V.transpose() * (M * V);
        Eigen::LLT<MatrixXd> llt(0.5 * (G + G.transpose()));
        if (llt.info() != Eigen::Success) {
            return false;
        }
        V = llt.matrixU().solve<Eigen::OnTheRight>(V);
    }
    return V.allFinite();
}

// Removes the M-orthogonal projection onto the constants; m1 = M * 1.
void project_constants(const VectorXd& m1, double mass, MatrixXd& V) {
    for (int j = 0; j < V.cols(); ++j) {
        V.col(j).array() -= m1.dot(V.col(j)) / mass;
    }
}

}  // namespace

EigenResult smallest_eigenpairs(const OperatorPair& op, int k, ProblemKind kind, const EigenOptions& options) {
    const int n = op.size();
    if (k < 1) {
        throw DomainError("number of eigenpairs must be positive");
    }
    if (op.M.rows() != n || op.K.cols() != n) {
        throw DomainError("stiffness and mass matrices have different sizes");
    }
    const bool closed = kind == ProblemKind::Closed;
    if (closed && op.reduced()) {
        throw DomainError("closed problem on a Dirichlet-reduced operator");
    }
    const int available = closed ? n - 1 : n;
    if (k > available) {
        std::ostringstream os;
        os << "requested " << k << " eigenpairs but the problem has only " << available;
        throw DomainError(os.str());
    }
    const VectorXd ones = VectorXd::Ones(n);
    const VectorXd m1 = op.M * ones;
    const double mass = m1.sum();
    if (closed) {
        const double kernel = (op.K * ones).norm() / std::max(1.0, op.K.diagonal().cwiseAbs().maxCoeff());
        if (kernel > 1e-8) {
            throw DomainError("closed problem requires constants in the kernel of K");
        }
    }

    // Shift: a small multiple of the typical diagonal ratio of K and M.
    double ratio = 0.0;
    for (int i = 0; i < n; ++i) {
        ratio += std::abs(op.K.coeff(i, i)) / op.M.coeff(i, i);
    }
    double sigma = 1e-3 * ratio / n;
    if (!(sigma > 0.0)) {
        sigma = 1e-3;
    }
    Eigen::SimplicialLDLT<SparseMatrix> solver;
    bool factored = false;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        const SparseMatrix A = op.K + sigma * op.M;
        solver.compute(A);
        if (solver.info() == Eigen::Success && (solver.vectorD().array() > 0.0).all()) {
            factored = true;
            break;
        }
        sigma *= 10.0;
    }
    if (!factored) {
        throw SolverError("factorization of K + sigma M failed after 3 retries");
    }

    const int block = std::min(std::max(2 * k, k + 8), available);
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXd V(n, block);
    for (int j = 0; j < block; ++j) {
        for (int i = 0; i < n; ++i) {
            V(i, j) = gauss(rng);
        }
    }
    if (closed) {
        project_constants(m1, mass, V);
    }
    if (!m_orthonormalize(op.M, V)) {
        throw SolverError("start block is rank deficient");
    }

    EigenResult result;
    result.kind = kind;
    result.shift = sigma;
    std::vector<double> best(k, std::numeric_limits<double>::infinity());
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        MatrixXd W = solver.solve(op.M * V);
        if (closed) {
            project_constants(m1, mass, W);
        }
        if (!m_orthonormalize(op.M, W)) {
            throw SolverError("iteration block lost rank", best);
        }
        const MatrixXd Kr = W.transpose() * (op.K * W);
        const MatrixXd Mr = W.transpose() * (op.M * W);
        Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> rr(0.5 * (Kr + Kr.transpose()),
                                                              0.5 * (Mr + Mr.transpose()));
        if (rr.info() != Eigen::Success) {
            throw SolverError("Rayleigh-Ritz step failed", best);
        }
        V = W * rr.eigenvectors();
        bool converged = true;
        std::vector<double> res(k);
        for (int j = 0; j < k; ++j) {
            const double lambda = rr.eigenvalues()[j];
            const VectorXd u = V.col(j);
            res[j] = (op.K * u - lambda * (op.M * u)).norm() / u.norm();
            best[j] = std::min(best[j], res[j]);
            converged = converged && res[j] < options.tolerance;
        }
        if (converged) {
            result.iterations = iter;
            result.eigenvalues.assign(rr.eigenvalues().data(), rr.eigenvalues().data() + k);
            result.residual_norms = res;
            result.eigenfunctions = V.leftCols(k);
            break;
        }
    }
    if (result.eigenvalues.empty()) {
        std::ostringstream os;
        os << "eigensolver did not converge in " << options.max_iterations << " iterations";
        throw SolverError(os.str(), best);
    }
    for (int j = 0; j < k; ++j) {
        auto u = result.eigenfunctions.col(j);
        double s = m1.dot(u);
        if (std::abs(s) <= 1e-9 * std::sqrt(mass)) {
            Eigen::Index arg = 0;
            u.cwiseAbs().maxCoeff(&arg);
            s = u[arg];
        }
        if (s < 0.0) {
            u = -u;
        }
    }
    return result;
}

double rayleigh_quotient(const OperatorPair& op, const Eigen::VectorXd& u) {
    if (u.size() != op.size()) {
        throw DomainError("vector size does not match the operator");
    }
    const double den = u.dot(op.M * u);
    if (!(den > 0.0)) {
        throw DomainError("Rayleigh quotient of the zero vector");
    }
    return u.dot(op.K * u) / den;
}

void write_eigenfunctions_csv(std::ostream& os, const OperatorPair& op, const EigenResult& result) {
    const int k = static_cast<int>(result.eigenfunctions.cols());
    os << "vertex_id";
    for (int j = 0; j < k; ++j) {
        os << ",u" << j;
    }
    os << '\n';
    std::vector<Eigen::VectorXd> full;
    for (int j = 0; j < k; ++j) {
        full.push_back(op.reinsert(result.eigenfunctions.col(j)));
    }
    const auto old = os.precision(12);
    for (int v = 0; v < op.full_size; ++v) {
        os << v;
        for (int j = 0; j < k; ++j) {
            os << ',' << full[j][v];
        }
        os << '\n';
    }
    os.precision(old);
}

}  // namespace fundtone
