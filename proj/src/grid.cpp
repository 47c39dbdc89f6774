#include "cavity/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cavity {

Grid::Grid(int n, double half_width) : n_(n), half_width_(half_width) {
    if (n < 16 || n % 2 != 0)
        throw std::invalid_argument("grid: n must be even and >= 16");
    if (!(half_width > 1.0))
        throw std::invalid_argument("grid: half width must exceed the aperture (W > 1)");
    step_ = 2.0 * half_width / n;
    points_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // (2i - n + 1) is odd, so pairs mirror to exactly opposite doubles
        points_[static_cast<std::size_t>(i)] = 0.5 * step_ * (2 * i - n + 1);
        if (std::abs(std::abs(points_[static_cast<std::size_t>(i)]) - 1.0) <= 1e-14) {
            std::ostringstream os;
            os << "grid: sample " << i << " falls on the aperture edge |y| = 1 "
               << "(n = " << n << ", W = " << half_width << ")";
            throw std::invalid_argument(os.str());
        }
    }
}

bool grid_adequacy(const Grid& grid, double chirp, double magnification) {
    if (!(chirp > 0.0)) return true;  // no oscillation to resolve
    if (!(magnification >= 1.0))
        throw std::invalid_argument("grid_adequacy: magnification must be >= 1");
    double worst_increment = grid.step() * 2.0 * chirp * grid.half_width() *
                             (1.0 + 1.0 / magnification);
    return worst_increment < 1.57079632679489661923;  // pi/2
}

}  // namespace cavity
