#include "batchmf/fitting.hpp"
#include "batchmf/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace batchmf {

double ServiceSample::mean() const {
    double sum = 0.0;
    for (double s : samples)
        sum += s;
    return sum / samples.size();
}

void ServiceSample::validate() const {
    if (k < 1)
        throw ConfigError("sample batch size must be >= 1, got " + std::to_string(k));
    if (samples.empty())
        throw ConfigError("k=" + std::to_string(k) + " has no measurements");
    for (double s : samples)
        if (!(s > 0.0))
            throw ConfigError("k=" + std::to_string(k) + " has a non-positive measurement");
}

Eigen::VectorXd linear_features(int k) {
    Eigen::VectorXd phi(2);
    phi << 1.0, double(k);
    return phi;
}

namespace {

// log det of sum_{k in subset} phi(k) phi(k)^T, or -inf when singular.
double log_det_information(const std::vector<int>& subset, const FeatureMap& phi) {
    const Eigen::VectorXd first = phi(subset.front());
    const Eigen::Index d = first.size();
    Eigen::MatrixXd info = first * first.transpose();
    for (size_t i = 1; i < subset.size(); ++i) {
        const Eigen::VectorXd f = phi(subset[i]);
        info += f * f.transpose();
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
    lu.setThreshold(1e-10);
    if (lu.rank() < d)
        return -std::numeric_limits<double>::infinity();
    // The information matrix is positive semidefinite, so a non-positive
    // determinant can only mean a numerically singular subset.
    const double det = lu.determinant();
    if (!(det > 0.0))
        return -std::numeric_limits<double>::infinity();
    return std::log(det);
}

double subset_count(int n, int b) {
    double c = 1.0;
    for (int i = 0; i < b; ++i)
        c *= double(n - i) / double(i + 1);
    return c;
}

} // namespace

std::vector<int> design_select(const std::vector<int>& candidates, int budget,
                               const FeatureMap& phi, std::uint64_t seed, DesignMethod method) {
    if (candidates.empty())
        throw ConfigError("design selection needs at least one candidate");
    std::vector<int> pool = candidates;
    std::sort(pool.begin(), pool.end());
    if (std::adjacent_find(pool.begin(), pool.end()) != pool.end())
        throw ConfigError("design candidates must be distinct");
    const int features = int(phi(pool.front()).size());
    if (budget < features)
        throw ConfigError("design budget must cover the " + std::to_string(features) +
                          " regression features");
    if (budget > int(pool.size()))
        throw ConfigError("design budget exceeds the number of candidates");
    if (budget == int(pool.size()))
        return pool;

    const int n = int(pool.size());
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> best_subset;

    const bool exhaustive = method == DesignMethod::Exhaustive ||
                            (method == DesignMethod::Auto && subset_count(n, budget) <= 1e5);
    if (exhaustive) {
        // Lexicographic combination walk; a strict improvement rule keeps the
        // first (lexicographically smallest) subset among ties.
        std::vector<int> idx(budget);
        for (int i = 0; i < budget; ++i)
            idx[i] = i;
        std::vector<int> subset(budget);
        for (;;) {
            for (int i = 0; i < budget; ++i)
                subset[i] = pool[idx[i]];
            const double val = log_det_information(subset, phi);
            if (val > best) {
                best = val;
                best_subset = subset;
            }
            int i = budget - 1;
            while (i >= 0 && idx[i] == n - budget + i)
                --i;
            if (i < 0)
                break;
            ++idx[i];
            for (int j = i + 1; j < budget; ++j)
                idx[j] = idx[j - 1] + 1;
        }
    } else {
        std::mt19937_64 rng(seed);
        for (int restart = 0; restart < 10; ++restart) {
            std::vector<int> perm(n);
            for (int i = 0; i < n; ++i)
                perm[i] = i;
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<int> subset;
            for (int i = 0; i < budget; ++i)
                subset.push_back(pool[perm[i]]);
            std::sort(subset.begin(), subset.end());
            double val = log_det_information(subset, phi);

            for (bool improved = true; improved;) {
                improved = false;
                for (int i = 0; i < budget && !improved; ++i) {
                    for (int c = 0; c < n && !improved; ++c) {
                        if (std::find(subset.begin(), subset.end(), pool[c]) != subset.end())
                            continue;
                        std::vector<int> trial = subset;
                        trial[i] = pool[c];
                        std::sort(trial.begin(), trial.end());
                        const double tv = log_det_information(trial, phi);
                        if (tv > val + 1e-12) {
                            subset = trial;
                            val = tv;
                            improved = true;
                        }
                    }
                }
            }
            if (val > best || (val == best && subset < best_subset)) {
                best = val;
                best_subset = subset;
            }
        }
    }

    if (!std::isfinite(best))
        throw NumericError("every feasible design is rank deficient for the feature map");
    std::sort(best_subset.begin(), best_subset.end());
    return best_subset;
}

FormFit ols_fit(SpeedupForm form, const std::vector<ServiceSample>& samples) {
    if (samples.size() < 2)
        throw ConfigError("fitting needs at least two distinct batch sizes");
    for (const ServiceSample& s : samples)
        s.validate();

    const Eigen::Index rows = Eigen::Index(samples.size());
    Eigen::MatrixXd X(rows, 2);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double k = samples[i].k;
        const double mean = samples[i].mean();
        switch (form) {
        case SpeedupForm::Linear:
            X(i, 0) = k;
            X(i, 1) = 1.0;
            y(i) = mean;
            break;
        case SpeedupForm::Power:
            X(i, 0) = std::log(k);
            X(i, 1) = 1.0;
            y(i) = std::log(mean);
            break;
        case SpeedupForm::Log:
            X(i, 0) = std::log(k);
            X(i, 1) = 1.0;
            y(i) = mean;
            break;
        }
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < 2)
        throw NumericError("design is rank deficient for this form (need two distinct "
                           "informative batch sizes)");
    const Eigen::VectorXd theta = qr.solve(y);

    FormFit fit;
    fit.form = form;
    switch (form) {
    case SpeedupForm::Linear: // g = a k + b
        fit.p1 = theta(0);
        fit.p2 = theta(1);
        break;
    case SpeedupForm::Power: // ln g = alpha ln k + ln gamma
        fit.p1 = std::exp(theta(1));
        fit.p2 = theta(0);
        break;
    case SpeedupForm::Log: // g = c ln k + d
        fit.p1 = theta(0);
        fit.p2 = theta(1);
        break;
    }

    fit.residual = 0.0;
    for (const ServiceSample& s : samples) {
        double g;
        switch (form) { // evaluate without the positivity guard of eval()
        case SpeedupForm::Linear: g = fit.p1 * s.k + fit.p2; break;
        case SpeedupForm::Power:  g = fit.p1 * std::pow(double(s.k), fit.p2); break;
        default:                  g = fit.p1 * std::log(double(s.k)) + fit.p2; break;
        }
        const double err = g - s.mean();
        fit.residual += err * err;
    }
    return fit;
}

FitResult select_model(const std::vector<ServiceSample>& samples) {
    FitResult result;
    for (const ServiceSample& s : samples)
        result.design.push_back(s.k);
    std::sort(result.design.begin(), result.design.end());

    for (SpeedupForm form : {SpeedupForm::Linear, SpeedupForm::Power, SpeedupForm::Log}) {
        try {
            result.fits.push_back(ols_fit(form, samples));
        } catch (const std::exception& e) {
            result.failures.push_back(e.what());
        }
    }
    if (result.fits.empty())
        throw NumericError("no service-time form could be fit: " +
                           (result.failures.empty() ? std::string("no data")
                                                    : result.failures.front()));

    const FormFit* best = &result.fits.front();
    for (const FormFit& f : result.fits)
        if (f.residual < best->residual) // strict: ties keep the earlier form
            best = &f;
    result.selected = best->form;
    result.model = SpeedupModel{best->form, best->p1, best->p2};

    result.constraint_ok = true;
    try {
        int max_k = result.design.back();
        result.model.validate(max_k);
    } catch (const std::exception&) {
        result.constraint_ok = false;
    }
    return result;
}

std::vector<ServiceSample> read_service_samples(std::istream& in) {
    std::map<int, std::vector<double>> grouped;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line_no == 1 && line.find_first_not_of("0123456789.,+-eE \t") != std::string::npos)
            continue; // header row
        std::istringstream row(line);
        std::string k_field, t_field;
        if (!std::getline(row, k_field, ',') || !std::getline(row, t_field))
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected \"k,service_time_seconds\"");
        try {
            size_t pos = 0;
            const int k = std::stoi(k_field, &pos);
            for (size_t i = pos; i < k_field.size(); ++i)
                if (!std::isspace(static_cast<unsigned char>(k_field[i])))
                    throw std::invalid_argument("trailing junk");
            const double t = std::stod(t_field);
            if (k < 1 || !(t > 0.0))
                throw ConfigError("line " + std::to_string(line_no) +
                                  ": k must be >= 1 and the time positive");
            grouped[k].push_back(t);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(line_no) + ": malformed row \"" + line +
                              "\"");
        }
    }
    std::vector<ServiceSample> out;
    out.reserve(grouped.size());
    for (auto& [k, ts] : grouped)
        out.push_back(ServiceSample{k, std::move(ts)});
    return out;
}

} // namespace batchmf
