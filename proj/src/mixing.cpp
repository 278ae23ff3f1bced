#include "batchmf/simulate.hpp"
#include "batchmf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace batchmf {

MixingCurve mixing_curve(const MarkovModel& model, const std::vector<double>& times,
                         const Eigen::VectorXd* p0) {
    if (times.empty())
        throw ConfigError("mixing curve needs at least one time point");
    for (size_t i = 0; i < times.size(); ++i)
        if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1]))
            throw ConfigError("mixing times must be non-negative and strictly ascending");

    const Eigen::Index N = model.size();
    Eigen::VectorXd start;
    if (p0) {
        if (p0->size() != N)
            throw ConfigError("initial distribution size does not match the model");
        if (std::abs(p0->sum() - 1.0) > 1e-9 || p0->minCoeff() < -1e-12)
            throw ConfigError("initial distribution must be a probability vector");
        start = *p0;
    } else {
        start = Eigen::VectorXd::Zero(N);
        start(0) = 1.0; // builders explore from the all-clients-active state
    }

    const Eigen::VectorXd pi = solve_stationary(model).pi;

    MixingCurve curve;
    curve.t = times;
    curve.tv.assign(times.size(), 0.0);

    double uni_rate = 0.0; // max exit rate, the uniformization constant
    for (Eigen::Index i = 0; i < N; ++i)
        uni_rate = std::max(uni_rate, -model.generator.coeff(i, i));
    if (uni_rate == 0.0) { // single absorbing state; the law never moves
        for (size_t g = 0; g < times.size(); ++g)
            curve.tv[g] = 0.5 * (start - pi).lpNorm<1>();
        return curve;
    }

    // Column-major transpose of P = I + Q/uni_rate, so advancing the row
    // vector v <- vP is one sparse mat-vec.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(model.generator.nonZeros());
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(model.generator, i);
             it; ++it)
            trips.emplace_back(it.col(), i,
                               (i == it.col() ? 1.0 : 0.0) + it.value() / uni_rate);
    Eigen::SparseMatrix<double> kernel_t(N, N);
    kernel_t.setFromTriplets(trips.begin(), trips.end());

    const size_t G = times.size();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(N, G);
    std::vector<double> log_w(G), mass(G, 0.0);
    for (size_t g = 0; g < G; ++g)
        log_w[g] = -uni_rate * times[g]; // Poisson(uni_rate * t) pmf at j = 0, log scale

    const double lt_max = uni_rate * times.back();
    const long j_cap = long(lt_max + 15.0 * std::sqrt(lt_max + 1.0) + 200.0);

    Eigen::VectorXd v = start;
    for (long j = 0; j <= j_cap; ++j) {
        double min_mass = 1.0;
        for (size_t g = 0; g < G; ++g) {
            const double w = std::exp(log_w[g]);
            if (w > 1e-18)
                acc.col(g) += w * v;
            mass[g] += w;
            min_mass = std::min(min_mass, mass[g]);
            log_w[g] += std::log(uni_rate * times[g]) - std::log(double(j + 1));
        }
        if (min_mass >= 1.0 - 1e-12)
            break;
        v = kernel_t * v;
        if ((j & 255) == 255)
            v /= v.sum(); // counter roundoff drift over many powers
    }

    for (size_t g = 0; g < G; ++g) {
        const double tv = 0.5 * (acc.col(g) - pi).lpNorm<1>();
        curve.tv[g] = std::clamp(tv, 0.0, 1.0);
    }
    return curve;
}

} // namespace batchmf
