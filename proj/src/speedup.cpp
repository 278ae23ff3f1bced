#include "batchmf/speedup.hpp"
#include "batchmf/errors.hpp"

#include <cmath>
#include <sstream>

namespace batchmf {

double SpeedupModel::eval(int k) const {
    if (k < 1)
        throw ConfigError("speedup law evaluated at k = " + std::to_string(k) +
                          "; batch sizes start at 1");
    double g = 0.0;
    switch (form) {
    case SpeedupForm::Linear: g = p1 * k + p2; break;
    case SpeedupForm::Power:  g = p1 * std::pow(double(k), p2); break;
    case SpeedupForm::Log:    g = p1 * std::log(double(k)) + p2; break;
    }
    if (!(g > 0.0))
        throw ConfigError("speedup law " + describe() + " gives non-positive service time " +
                          std::to_string(g) + " at k = " + std::to_string(k));
    return g;
}

double SpeedupModel::rate(int k) const {
    return 1.0 / eval(k);
}

void SpeedupModel::validate(int max_k) const {
    switch (form) {
    case SpeedupForm::Linear:
        if (!(p1 < 1.0))
            throw ConfigError("linear speedup law requires a < 1, got a = " + std::to_string(p1));
        break;
    case SpeedupForm::Power:
        if (!(p2 < 1.0))
            throw ConfigError("power speedup law requires alpha < 1, got alpha = " + std::to_string(p2));
        break;
    case SpeedupForm::Log:
        if (!(p1 < 1.0))
            throw ConfigError("log speedup law requires c < 1, got c = " + std::to_string(p1));
        break;
    }
    // eval() throws on non-positive values; endpoints do not suffice for the
    // log form with c < 0, so scan the whole domain.
    for (int k = 1; k <= max_k; ++k)
        eval(k);
}

std::string SpeedupModel::describe() const {
    std::ostringstream os;
    switch (form) {
    case SpeedupForm::Linear: os << "linear(a=" << p1 << ", b=" << p2 << ")"; break;
    case SpeedupForm::Power:  os << "power(gamma=" << p1 << ", alpha=" << p2 << ")"; break;
    case SpeedupForm::Log:    os << "log(c=" << p1 << ", d=" << p2 << ")"; break;
    }
    return os.str();
}

SubadditivityReport check_subadditive(const SpeedupModel& model, int max_k) {
    if (max_k < 2)
        throw ConfigError("sub-additivity check needs max_k >= 2, got " + std::to_string(max_k));
    for (int k1 = 1; k1 <= max_k - 1; ++k1) {
        for (int k2 = k1; k1 + k2 <= max_k; ++k2) {
            if (model.eval(k1 + k2) > model.eval(k1) + model.eval(k2))
                return {false, k1, k2};
        }
    }
    return {true, 0, 0};
}

} // namespace batchmf
