#include "biharm/radial_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "biharm/errors.hpp"
#include "biharm/fit.hpp"

namespace biharm {

std::vector<double> RadialFunction::log_grid(double lo, double hi, std::size_t nodes) {
    if (!(lo > 0.0) || !(hi > lo) || nodes < 2)
        throw PreconditionError("log grid needs 0 < lo < hi and at least two nodes");
    std::vector<double> g(nodes);
    const double step = std::log(hi / lo) / static_cast<double>(nodes - 1);
    for (std::size_t i = 0; i < nodes; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.front() = lo;
    g.back() = hi;
    return g;
}

void RadialFunction::validate() const {
    if (grid.size() != values.size())
        throw PreconditionError("radial function grid/value size mismatch");
    if (grid.empty())
        throw PreconditionError("radial function is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
            throw PreconditionError("radial grid must be positive and strictly increasing");
        if (!std::isfinite(values[i]))
            throw PreconditionError("radial function has a non-finite value");
    }
}

CellForm cell_form(const RadialFunction& fn, std::size_t j) {
    const double r0 = fn.grid[j], r1 = fn.grid[j + 1];
    const double f0 = fn.values[j], f1 = fn.values[j + 1];
    CellForm form;
    if (f0 > 0.0 && f1 > 0.0) {
        form.power = true;
        form.k = std::log(f1 / f0) / std::log(r1 / r0);
        form.c = f0 * std::pow(r0, -form.k);
    } else {
        form.power = false;
        form.lin_b = (f1 - f0) / (r1 - r0);
        form.lin_a = f0 - form.lin_b * r0;
    }
    return form;
}

double RadialFunction::operator()(double r) const {
    if (!(r > 0.0))
        throw PreconditionError("radial function evaluated at non-positive radius");
    if (r <= grid.front()) return values.front() * std::pow(r / grid.front(), left_exponent);
    if (r >= grid.back()) return values.back() * std::pow(r / grid.back(), right_exponent);
    const auto it = std::upper_bound(grid.begin(), grid.end(), r);
    const std::size_t j = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double r0 = grid[j], r1 = grid[j + 1];
    const double f0 = values[j], f1 = values[j + 1];
    if (f0 > 0.0 && f1 > 0.0) {
        const double t = std::log(r / r0) / std::log(r1 / r0);
        return f0 * std::pow(f1 / f0, t);
    }
    return f0 + (f1 - f0) * (r - r0) / (r1 - r0);
}

double RadialFunction::fitted_slope(double lo, double hi) const {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= lo && grid[i] <= hi) {
            x.push_back(grid[i]);
            y.push_back(values[i]);
        }
    }
    return fit_power_law(x, y).slope;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void RadialFunction::write_csv(std::ostream& out) const {
    out << "rho,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        out << format_double(grid[i]) << ',' << format_double(values[i]) << '\n';
}

RadialFunction RadialFunction::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("rho,value", 0) != 0)
        throw PreconditionError("radial CSV must start with the header 'rho,value'");
    RadialFunction fn;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw PreconditionError("malformed radial CSV row: " + line);
        fn.grid.push_back(std::stod(line.substr(0, comma)));
        fn.values.push_back(std::stod(line.substr(comma + 1)));
    }
    fn.validate();
    if (fn.size() >= 2) {
        const std::size_t n = fn.size();
        auto slope = [&](std::size_t a, std::size_t b) {
            return fn.values[a] > 0.0 && fn.values[b] > 0.0
                       ? std::log(fn.values[b] / fn.values[a]) / std::log(fn.grid[b] / fn.grid[a])
                       : 0.0;
        };
        fn.left_exponent = slope(0, 1);
        fn.right_exponent = slope(n - 2, n - 1);
    }
    return fn;
}

} // namespace biharm
