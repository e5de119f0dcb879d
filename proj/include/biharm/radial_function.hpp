#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biharm {

/// Values on a strictly increasing grid of positive radii. Between nodes the
/// function is interpolated log-log linearly (linearly when a node value is
/// not positive); outside the grid it is extended as a power law with the
/// stored left/right exponents.
struct RadialFunction {
    std::vector<double> grid;
    std::vector<double> values;
    double left_exponent = 0.0;
    double right_exponent = 0.0;

    static std::vector<double> log_grid(double lo, double hi, std::size_t nodes);

    std::size_t size() const { return grid.size(); }
    void validate() const;
    double operator()(double r) const;

    /// Least-squares log-log slope over the nodes with lo <= rho <= hi.
    double fitted_slope(double lo, double hi) const;

    /// CSV with mandatory header "rho,value".
    void write_csv(std::ostream& out) const;
    static RadialFunction read_csv(std::istream& in);
};

/// Interpolant on one grid cell: c * r^k when both ends are positive, A + B r otherwise.
struct CellForm {
    bool power = true;
    double c = 0.0;
    double k = 0.0;
    double lin_a = 0.0;
    double lin_b = 0.0;
};
CellForm cell_form(const RadialFunction& fn, std::size_t cell);

/// Prints a double in the fixed scientific format used by every CSV artifact.
std::string format_double(double v);

} // namespace biharm
