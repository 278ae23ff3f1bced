#include "batchmf/ctmc.hpp"
#include "batchmf/errors.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <string>
#include <vector>

namespace batchmf {

namespace {

// pi Q = 0 transposed to Q^T pi^T = 0; the balance equation of state 0 is
// replaced by sum(pi) = 1.
Eigen::VectorXd solve_dense(const MarkovModel& model) {
    const int N = int(model.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (int row = 0; row < model.generator.outerSize(); ++row)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(model.generator, row);
             it; ++it)
            if (it.col() != 0)
                A(it.col(), it.row()) = it.value();
    A.row(0).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
    b(0) = 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd x = lu.solve(b);
    x += lu.solve(b - A * x); // one refinement step
    return x;
}

Eigen::VectorXd solve_sparse(const MarkovModel& model) {
    const int N = int(model.size());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(size_t(model.generator.nonZeros()) + size_t(N));
    for (int row = 0; row < model.generator.outerSize(); ++row)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(model.generator, row);
             it; ++it)
            if (it.col() != 0)
                entries.emplace_back(it.col(), it.row(), it.value());
    for (int j = 0; j < N; ++j)
        entries.emplace_back(0, j, 1.0);

    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(entries.begin(), entries.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw NumericError("sparse LU factorization of the balance equations failed (" +
                           std::to_string(N) + " states); the chain may be reducible");

    Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
    b(0) = 1.0;
    Eigen::VectorXd x = lu.solve(b);
    x += lu.solve(b - A * x);
    return x;
}

} // namespace

StationaryResult solve_stationary(const MarkovModel& model, SolveMethod method) {
    const int N = int(model.size());
    if (N == 0)
        throw ConfigError("solve_stationary called on an empty model");

    const bool dense = method == SolveMethod::Dense || (method == SolveMethod::Auto && N < 2000);
    Eigen::VectorXd x = dense ? solve_dense(model) : solve_sparse(model);

    if (!x.allFinite())
        throw NumericError("stationary solve produced non-finite entries; "
                           "the balance equations are singular");

    // Clamp roundoff negatives (order 1e-16 of mass) and renormalize.
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
        if (x(i) < 0.0) x(i) = 0.0;
        sum += x(i);
    }
    if (!(sum > 0.0))
        throw NumericError("stationary solve produced a zero vector");
    x /= sum;

    StationaryResult result;
    result.pi = std::move(x);

    // Residual of the original balance equations, normalized by the largest
    // rate magnitude in the generator.
    Eigen::VectorXd piQ = Eigen::VectorXd::Zero(N);
    double max_diag = 0.0;
    for (int row = 0; row < model.generator.outerSize(); ++row) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(model.generator, row);
             it; ++it) {
            piQ(it.col()) += result.pi(it.row()) * it.value();
            if (it.row() == it.col())
                max_diag = std::max(max_diag, std::abs(it.value()));
        }
    }
    const double raw = piQ.lpNorm<Eigen::Infinity>();
    result.residual = max_diag > 0.0 ? raw / max_diag : raw;
    if (!(result.residual < 1e-8))
        throw NumericError("stationary solve failed: normalized residual " +
                           std::to_string(result.residual) + " exceeds 1e-8");

    double theta = 0.0;
    for (int i = 0; i < N; ++i)
        theta += result.pi(i) * model.completion_rate[i];
    result.throughput = theta;
    return result;
}

bool check_irreducible(const MarkovModel& model) {
    const int N = int(model.size());
    if (N == 0) return false;
    if (N == 1) return true;

    // Single SCC iff state 0 reaches everything and everything reaches
    // state 0. Forward pass over Q's rows, backward pass over the transpose.
    auto reaches_all = [N](auto&& neighbors) {
        std::vector<char> seen(N, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            neighbors(u, [&](int v) {
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
            });
        }
        return count == N;
    };

    const bool forward = reaches_all([&](int u, auto&& visit) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(model.generator, u);
             it; ++it)
            if (it.col() != u && it.value() > 0.0)
                visit(it.col());
    });
    if (!forward) return false;

    Eigen::SparseMatrix<double, Eigen::RowMajor> QT = model.generator.transpose();
    return reaches_all([&](int u, auto&& visit) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(QT, u); it; ++it)
            if (it.col() != u && it.value() > 0.0)
                visit(it.col());
    });
}

} // namespace batchmf
