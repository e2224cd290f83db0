#pragma once

#include <string>
#include <utility>
#include <vector>

namespace uwbnli {

/// Piecewise-linear lookup table over strictly increasing abscissae.
class Table1D {
public:
    Table1D() = default;
    explicit Table1D(std::vector<std::pair<double, double>> samples, std::string name = "table");

    /// A table with one sample is treated as constant everywhere.
    static Table1D constant(double value, std::string name = "table");

    /// Interpolated value. Throws ConfigError when x lies outside the sampled range.
    double at(double x) const;

    /// Interpolated value, or `fallback` outside the sampled range.
    double at_or(double x, double fallback) const;

    bool covers(double lo, double hi) const;
    bool empty() const { return x_.empty(); }
    bool is_constant() const { return x_.size() == 1; }
    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }
    const std::string& name() const { return name_; }

    friend bool operator==(const Table1D&, const Table1D&) = default;

private:
    double interpolate(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::string name_;
};

}  // namespace uwbnli
