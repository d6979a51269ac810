#pragma once

// Small quadrature helpers shared by the engines.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace atombs::quad {

/// Composite trapezoid on uniformly spaced samples.
template <typename T>
T trapezoid(std::span<const T> y, double h) {
    if (y.size() < 2) return T{};
    T sum = (y.front() + y.back()) / 2.0;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) sum += y[i];
    return sum * h;
}

/// Composite Simpson on uniformly spaced samples. An even sample count is
/// handled by closing the last three intervals with the 3/8 rule.
template <typename T>
T simpson(std::span<const T> y, double h) {
    const std::size_t n = y.size();
    if (n < 3) return trapezoid(y, h);
    std::size_t m = n;  // samples covered by the 1/3 rule
    T tail{};
    if (n % 2 == 0) {
        m = n - 3;
        tail = 3.0 * h / 8.0 * (y[m - 1] + 3.0 * y[m] + 3.0 * y[m + 1] + y[m + 2]);
        if (m == 1) return tail;
    }
    T sum = y[0] + y[m - 1];
    for (std::size_t i = 1; i + 1 < m; ++i) sum += (i % 2 ? 4.0 : 2.0) * y[i];
    return sum * (h / 3.0) + tail;
}

/// Gauss-Legendre over [a, b] split into `panels` equal pieces.
template <typename F>
auto gauss_legendre(F&& f, double a, double b, std::size_t panels = 1) {
    using Rule = boost::math::quadrature::gauss<double, 10>;
    using R = decltype(f(a));
    R total{};
    if (b <= a) return total;
    const double w = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + static_cast<double>(p) * w;
        total += Rule::integrate(f, lo, p + 1 == panels ? b : lo + w);
    }
    return total;
}

/// Odd number of uniform samples spanning [-half_width, half_width] with
/// spacing at most `max_step`.
inline std::size_t odd_sample_count(double half_width, double max_step) {
    auto n = static_cast<std::size_t>(std::ceil(2.0 * half_width / max_step)) + 1;
    if (n % 2 == 0) ++n;
    return std::max<std::size_t>(n, 3);
}

}  // namespace atombs::quad
