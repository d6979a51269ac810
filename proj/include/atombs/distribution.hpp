#pragma once

#include <string>
#include <vector>

#include "atombs/core.hpp"

namespace atombs {

enum class Domain { Time, Frequency };

/// Nonnegative density sampled on a uniform 2D grid (row index = first axis).
struct JointDistribution2D {
    Grid2D grid;
    std::vector<double> values;
    Domain domain = Domain::Time;
    double normalization = 0.0;  // integral over the plane, see the producing function
    std::vector<std::string> warnings;

    double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
    double peak() const;
};

/// Trapezoid integral of `values` over `grid`.
double integrate(const Grid2D& grid, const std::vector<double>& values);

}  // namespace atombs
