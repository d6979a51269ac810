#include "atombs/distribution.hpp"

#include <algorithm>

#include "atombs/quadrature.hpp"

namespace atombs {

double JointDistribution2D::peak() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double integrate(const Grid2D& grid, const std::vector<double>& values) {
    const std::size_t nx = grid.x.points();
    const std::size_t ny = grid.y.points();
    std::vector<double> rows(nx);
    for (std::size_t i = 0; i < nx; ++i)
        rows[i] = quad::trapezoid(std::span<const double>(values.data() + i * ny, ny), grid.y.spacing());
    return quad::trapezoid(std::span<const double>(rows), grid.x.spacing());
}

}  // namespace atombs
