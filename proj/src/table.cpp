#include "uwbnli/table.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uwbnli/errors.hpp"

namespace uwbnli {

Table1D::Table1D(std::vector<std::pair<double, double>> samples, std::string name)
    : name_(std::move(name)) {
    if (samples.empty()) throw ConfigError(name_ + ": table has no samples");
    std::sort(samples.begin(), samples.end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto [x, y] = samples[i];
        if (!std::isfinite(x) || !std::isfinite(y))
            throw ConfigError(name_ + ": non-finite table entry");
        if (i > 0 && x == samples[i - 1].first)
            throw ConfigError(name_ + ": duplicate abscissa in table");
        x_.push_back(x);
        y_.push_back(y);
    }
}

Table1D Table1D::constant(double value, std::string name) {
    return Table1D({{0.0, value}}, std::move(name));
}

bool Table1D::covers(double lo, double hi) const {
    if (x_.empty()) return false;
    if (is_constant()) return true;
    return lo >= x_.front() && hi <= x_.back();
}

double Table1D::interpolate(double x) const {
    if (is_constant()) return y_.front();
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    if (it == x_.begin()) return y_.front();
    if (it == x_.end()) return y_.back();
    const std::size_t hi = static_cast<std::size_t>(it - x_.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - x_[lo]) / (x_[hi] - x_[lo]);
    return y_[lo] + t * (y_[hi] - y_[lo]);
}

double Table1D::at(double x) const {
    if (x_.empty()) throw ConfigError(name_ + ": empty table");
    if (!covers(x, x)) {
        std::ostringstream os;
        os << name_ << ": " << x << " outside table range [" << x_.front() << ", " << x_.back()
           << "]";
        throw ConfigError(os.str());
    }
    return interpolate(x);
}

double Table1D::at_or(double x, double fallback) const {
    if (x_.empty() || !covers(x, x)) return fallback;
    return interpolate(x);
}

}  // namespace uwbnli
