#include "batchmf/meanfield.hpp"
#include "batchmf/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace batchmf {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0))
        throw ConfigError(std::string(name) + " must be > 0, got " + std::to_string(v));
}

} // namespace

MeanFieldSolution fixed_point_single(double lambda, const SpeedupModel& service, int k,
                                     double alpha, int n) {
    require_positive(lambda, "lambda");
    require_positive(alpha, "alpha");
    const double mu = service.rate(k);
    const double w = std::min(mu / (lambda + mu), alpha * k * mu / lambda);

    MeanFieldSolution sol;
    sol.w = {w};
    sol.alpha = alpha;
    sol.throughput_per_client = lambda * w;
    sol.throughput_total = n > 0 ? n * lambda * w : 0.0;
    return sol;
}

double throughput_bound(int n, int m, int k, double lambda, const SpeedupModel& service) {
    require_positive(lambda, "lambda");
    const double mu = service.rate(k);
    return std::min(double(k) * mu * m, n * lambda * mu / (lambda + mu));
}

double drift_single(double w, double lambda, const SpeedupModel& service, int k, double alpha) {
    const double mu = service.rate(k);
    return k * mu * std::min(alpha, (1.0 - w) / k) - lambda * w;
}

TwoTypeRates make_two_type_rates(const TwoTypeConfig& config, bool* ignored_batching) {
    config.validate();
    if (ignored_batching)
        *ignored_batching = config.batching1.has_value() || config.batching2.has_value();
    TwoTypeRates r;
    r.lambda = config.lambda;
    r.p = config.p;
    r.k1 = config.k1;
    r.k2 = config.k2;
    r.mu1 = config.service1.rate(config.k1);
    r.mu2 = config.service2.rate(config.k2);
    r.alpha = double(config.m) / double(config.n);
    return r;
}

MeanFieldSolution fixed_point_two_type(const TwoTypeRates& r, int n) {
    require_positive(r.lambda, "lambda");
    require_positive(r.alpha, "alpha");
    if (!(r.p >= 0.0 && r.p <= 1.0))
        throw ConfigError("p must lie in [0,1], got " + std::to_string(r.p));

    double w1, w2;
    if (r.p == 1.0) { // only type-1 jobs: single-type system with (k1, mu1)
        w1 = std::min(r.mu1 / (r.lambda + r.mu1), r.alpha * r.k1 * r.mu1 / r.lambda);
        w2 = r.lambda * w1 / r.mu1;
    } else if (r.p == 0.0) { // only type-2 jobs
        w1 = std::min(r.mu2 / (r.lambda + r.mu2), r.alpha * r.k2 * r.mu2 / r.lambda);
        w2 = 0.0;
    } else {
        const double client = r.mu1 * r.mu2 /
                              (r.mu1 * r.lambda * (1.0 - r.p) + r.mu2 * r.lambda * r.p +
                               r.mu1 * r.mu2);
        const double server = r.k1 * r.k2 * r.mu1 * r.mu2 * r.alpha /
                              (r.k1 * r.mu1 * r.lambda * (1.0 - r.p) +
                               r.k2 * r.mu2 * r.lambda * r.p);
        w1 = std::min(client, server);
        w2 = r.lambda * r.p * w1 / r.mu1;
    }

    MeanFieldSolution sol;
    sol.w = {w1, w2};
    sol.alpha = r.alpha;
    sol.throughput_per_client = r.lambda * w1;
    sol.throughput_total = n > 0 ? n * r.lambda * w1 : 0.0;
    return sol;
}

std::array<double, 2> drift_two_type(double w1, double w2, const TwoTypeRates& r) {
    const double served1 = r.k1 * r.mu1 * std::min(r.alpha, w2 / r.k1);
    const double served2 = r.k2 * r.mu2 *
                           std::min(std::max(0.0, r.alpha - w2 / r.k1), (1.0 - w1 - w2) / r.k2);
    return {-r.lambda * w1 + served1 + served2, r.lambda * r.p * w1 - served1};
}

TwoTypeStability classify_two_type(const TwoTypeRates& r) {
    require_positive(r.lambda, "lambda");
    require_positive(r.alpha, "alpha");

    TwoTypeStability s;
    const double k1a = r.k1 * r.alpha;
    const double k2a = r.k2 * r.alpha;
    if (k1a >= 1.0)
        s.case_label = k2a >= 1.0 ? 1 : 2;
    else
        s.case_label = k2a >= 1.0 ? 4 : 3;

    s.eta = r.lambda * r.p / (r.mu1 + r.lambda * r.p);
    s.z11 = (r.mu1 + r.lambda * r.p) * r.mu2 /
            (r.mu1 * r.lambda * (1.0 - r.p) + r.mu2 * r.lambda * r.p + r.mu1 * r.mu2);
    const double z12_den =
        r.k1 * r.mu1 * r.lambda * (1.0 - r.p) + r.k2 * r.mu2 * r.lambda * r.p;
    s.z12 = r.k1 * r.k2 * (r.mu1 + r.lambda * r.p) * r.mu2 * r.alpha / z12_den;

    // L1 is the branch boundary (1-z1)/k2 + z2/k1 = alpha of the type-2
    // service term; z10 is where it meets the attractor line L2: z2 = eta*z1.
    const double z10_den = r.k1 * r.mu1 + r.k1 * r.lambda * r.p - r.k2 * r.lambda * r.p;
    const double scale = r.k1 * (r.mu1 + r.lambda * r.p);
    if (std::abs(z10_den) < 1e-14 * scale) {
        s.degenerate = true;
        s.z10 = std::numeric_limits<double>::quiet_NaN();
    } else {
        s.z10 = r.k1 * (r.mu1 + r.lambda * r.p) * (1.0 - k2a) / z10_den;
    }

    s.z1_star = std::min(s.z11, s.z12);
    s.z2_star = s.eta * s.z1_star;
    s.w_star = {s.z1_star - s.z2_star, s.z2_star};
    return s;
}

std::vector<std::vector<double>> drift_multi(const std::vector<std::vector<double>>& w,
                                             const MultiTypeConfig& config) {
    config.validate();
    const int r = config.r, d = config.d;
    if (int(w.size()) != r)
        throw ConfigError("w must have r = " + std::to_string(r) + " rows");
    double sigma = 0.0;
    for (int i = 0; i < r; ++i) {
        if (int(w[i].size()) != d)
            throw ConfigError("w rows must have d = " + std::to_string(d) + " entries");
        for (int j = 0; j < d; ++j)
            sigma += w[i][j];
    }
    const std::vector<double> alpha = config.alpha();

    // out[i][j]: job flow of type i completing level j. Types with lower
    // index claim the level's service capacity first.
    std::vector<std::vector<double>> out(r, std::vector<double>(d));
    for (int j = 0; j < d; ++j) {
        double higher = 0.0; // sum_{l<i} w[l][j]/k_l, batches of higher priority
        for (int i = 0; i < r; ++i) {
            const double avail = std::max(0.0, alpha[j] - higher);
            out[i][j] = config.mu[i][j] * std::min(w[i][j], config.k[i] * avail);
            higher += w[i][j] / config.k[i];
        }
    }

    std::vector<std::vector<double>> f(r, std::vector<double>(d));
    for (int i = 0; i < r; ++i) {
        f[i][0] = config.lambda * config.p[i] * (1.0 - sigma) - out[i][0];
        for (int j = 1; j < d; ++j)
            f[i][j] = out[i][j - 1] - out[i][j];
    }
    return f;
}

MultiTypeEquilibrium multi_type_fixed_point(const MultiTypeConfig& config) {
    config.validate();
    if (config.d != 1)
        throw ConfigError("closed-form multi-type equilibrium requires d = 1, got d = " +
                          std::to_string(config.d));
    const int r = config.r;
    const int k = config.k[0];
    for (int i = 1; i < r; ++i)
        if (config.k[i] != k)
            throw ConfigError("closed-form multi-type equilibrium requires a uniform batch size");

    const double lambda = config.lambda;
    const double alpha = config.alpha()[0];

    MultiTypeEquilibrium eq;
    eq.k_alpha = k * alpha;
    eq.A.resize(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            eq.A(i, j) = -lambda * config.p[i] - (i == j ? config.mu[i][0] : 0.0);
    eq.B = eq.A;
    for (int j = 0; j < r; ++j)
        eq.B(r - 1, j) += config.mu[r - 1][0];
    eq.c_a = Eigen::VectorXd(r);
    for (int i = 0; i < r; ++i)
        eq.c_a(i) = -lambda * config.p[i];
    eq.c_b = eq.c_a;
    eq.c_b(r - 1) += eq.k_alpha * config.mu[r - 1][0];

    Eigen::FullPivLU<Eigen::MatrixXd> luA(eq.A);
    Eigen::FullPivLU<Eigen::MatrixXd> luB(eq.B);
    if (!luA.isInvertible() || !luB.isInvertible())
        throw NumericError("equilibrium matrix is singular; check the rate inputs");

    const Eigen::VectorXd wa = luA.solve(eq.c_a);
    eq.switch_sum = wa.sum();
    eq.client_bound = eq.switch_sum < eq.k_alpha;
    eq.w_star = eq.client_bound ? wa : Eigen::VectorXd(luB.solve(eq.c_b));

    Eigen::EigenSolver<Eigen::MatrixXd> esA(eq.A, false);
    Eigen::EigenSolver<Eigen::MatrixXd> esB(eq.B, false);
    eq.max_re_eig_A = esA.eigenvalues().real().maxCoeff();
    eq.max_re_eig_B = esB.eigenvalues().real().maxCoeff();

    double S = 0.0;
    for (int i = 0; i < r; ++i)
        S += lambda * config.p[i] / config.mu[i][0];
    eq.sum_a_closed = S / (1.0 + S);
    eq.sum_b_closed = (S - eq.k_alpha) / S;
    return eq;
}

Trajectory integrate(const DriftFn& f, std::vector<double> w0, double T,
                     const IntegrateOptions& options) {
    if (T <= 0.0)
        throw ConfigError("integration horizon must be > 0");
    const double h =
        options.step > 0.0 ? options.step : 0.005 / std::max(options.rate_scale, 1e-300);
    const size_t dim = w0.size();
    const long steps = std::lround(std::ceil(T / h));

    Trajectory traj;
    traj.t.reserve(steps + 1);
    traj.w.reserve(steps + 1);
    traj.t.push_back(0.0);
    traj.w.push_back(w0);

    std::vector<double> w = std::move(w0);
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    int near_target = 0;

    for (long step = 1; step <= steps; ++step) {
        k1 = f(w);
        for (size_t i = 0; i < dim; ++i) tmp[i] = w[i] + 0.5 * h * k1[i];
        k2 = f(tmp);
        for (size_t i = 0; i < dim; ++i) tmp[i] = w[i] + 0.5 * h * k2[i];
        k3 = f(tmp);
        for (size_t i = 0; i < dim; ++i) tmp[i] = w[i] + h * k3[i];
        k4 = f(tmp);
        for (size_t i = 0; i < dim; ++i)
            w[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        for (size_t i = 0; i < dim; ++i) {
            if (w[i] < -1e-6 || w[i] > 1.0 + 1e-6)
                throw NumericError("integration unstable: component " + std::to_string(i) +
                                   " reached " + std::to_string(w[i]) + " at t = " +
                                   std::to_string(step * h));
            if (options.clamp_to_unit) {
                if (w[i] < 0.0 && w[i] > -1e-12) w[i] = 0.0;
                if (w[i] > 1.0 && w[i] < 1.0 + 1e-12) w[i] = 1.0;
            }
        }

        traj.t.push_back(step * h);
        traj.w.push_back(w);

        if (options.target) {
            double dist = 0.0;
            for (size_t i = 0; i < dim; ++i)
                dist = std::max(dist, std::abs(w[i] - (*options.target)[i]));
            near_target = dist < options.target_tol ? near_target + 1 : 0;
            if (near_target >= options.sustain_steps) {
                traj.converged = true;
                traj.convergence_time = step * h;
                break;
            }
        }
    }
    return traj;
}

AsymptoticOptimum optimal_k_asymptotic(double lambda, const SpeedupModel& service, double alpha,
                                       int K) {
    require_positive(lambda, "lambda");
    require_positive(alpha, "alpha");
    if (K < 1)
        throw ConfigError("K must be >= 1, got " + std::to_string(K));

    auto w_at = [&](int k) {
        const double mu = service.rate(k);
        return std::min(mu / (lambda + mu), alpha * k * mu / lambda);
    };

    AsymptoticOptimum best;
    best.k_star = 1;
    best.w_star = w_at(1);

    // Grid argmax; also record whether mu is non-increasing and k*mu(k)
    // non-decreasing, the shape under which the branch-crossing equation has
    // a unique root.
    bool monotone = true;
    double prev_mu = service.rate(1);
    for (int k = 2; k <= K; ++k) {
        const double mu = service.rate(k);
        if (mu > prev_mu * (1.0 + 1e-12) || k * mu < (k - 1) * prev_mu * (1.0 - 1e-12))
            monotone = false;
        prev_mu = mu;
        const double w = w_at(k);
        if (w > best.w_star) {
            best.w_star = w;
            best.k_star = k;
        }
    }

    if (monotone && K > 1) {
        // h(k) = mu/(lambda+mu) - alpha*k*mu/lambda is non-increasing; its
        // root is where the client-bound and server-bound branches cross.
        auto hfun = [&](double k) {
            double gk = 0.0; // batch time at real-valued k
            switch (service.form) {
            case SpeedupForm::Linear: gk = service.p1 * k + service.p2; break;
            case SpeedupForm::Power:  gk = service.p1 * std::pow(k, service.p2); break;
            case SpeedupForm::Log:    gk = service.p1 * std::log(k) + service.p2; break;
            }
            const double mu = 1.0 / gk;
            return mu / (lambda + mu) - alpha * k * mu / lambda;
        };

        double k_real;
        if (hfun(1.0) <= 0.0) {
            k_real = 1.0; // client-bound everywhere: w* non-increasing
        } else if (hfun(double(K)) > 0.0) {
            k_real = double(K); // server-bound everywhere: w* non-decreasing
        } else if (service.form == SpeedupForm::Linear) {
            // lambda*g(k)*(1 - alpha*k) = alpha*k with g = a*k + b expands to
            // lambda*a*alpha*k^2 + (alpha + lambda*b*alpha - lambda*a)*k - lambda*b = 0.
            const double a = service.p1, b = service.p2;
            const double qa = lambda * a * alpha;
            const double qb = alpha + lambda * b * alpha - lambda * a;
            const double qc = -lambda * b;
            if (qa == 0.0) {
                k_real = -qc / qb;
            } else {
                const double disc = std::sqrt(qb * qb - 4.0 * qa * qc);
                k_real = (-qb + disc) / (2.0 * qa);
            }
        } else {
            double lo = 1.0, hi = double(K);
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (hfun(mid) > 0.0 ? lo : hi) = mid;
            }
            k_real = 0.5 * (lo + hi);
        }
        k_real = std::clamp(k_real, 1.0, double(K));

        const int kf = std::clamp(int(std::floor(k_real)), 1, K);
        const int kc = std::clamp(int(std::ceil(k_real)), 1, K);
        int k_pick = kf;
        double w_pick = w_at(kf);
        if (kc != kf && w_at(kc) > w_pick) {
            k_pick = kc;
            w_pick = w_at(kc);
        }
        best.k_star = k_pick;
        best.w_star = w_pick;
        best.used_crossing = true;
        best.k_real = k_real;
    }

    best.throughput_per_client = lambda * best.w_star;
    return best;
}

AsymptoticOptimum optimal_k_two_type_uniform(const TwoTypeConfig& base, int K) {
    if (K < 1)
        throw ConfigError("K must be >= 1, got " + std::to_string(K));
    AsymptoticOptimum best;
    for (int k = 1; k <= K; ++k) {
        TwoTypeConfig c = base;
        c.k1 = c.k2 = k;
        const auto sol = fixed_point_two_type(make_two_type_rates(c));
        if (k == 1 || sol.w[0] > best.w_star) {
            best.k_star = k;
            best.w_star = sol.w[0];
        }
    }
    best.throughput_per_client = base.lambda * best.w_star;
    return best;
}

TwoTypeJointOptimum optimal_k_two_type_joint(const TwoTypeConfig& base, int K) {
    if (K < 1)
        throw ConfigError("K must be >= 1, got " + std::to_string(K));
    TwoTypeJointOptimum best;
    best.w1_star = -1.0;
    for (int k1 = 1; k1 <= K; ++k1) {
        for (int k2 = 1; k2 <= K; ++k2) {
            TwoTypeConfig c = base;
            c.k1 = k1;
            c.k2 = k2;
            const auto sol = fixed_point_two_type(make_two_type_rates(c));
            if (sol.w[0] > best.w1_star) {
                best.k1_star = k1;
                best.k2_star = k2;
                best.w1_star = sol.w[0];
            }
        }
    }
    best.throughput_per_client = base.lambda * best.w1_star;
    return best;
}

} // namespace batchmf
