// Midpoint sampling of the transverse window, in units of the aperture a.
#pragma once

#include <vector>

namespace cavity {

/// Symmetric midpoint grid on [-W, W]: y_i = h*(2i - n + 1)/2 with
/// h = 2W/n. Midpoint placement keeps every sample off the aperture edge
/// |y| = 1, so the step masks are unambiguous; the constructor rejects
/// n, W combinations that land a point within 1e-14 of |y| = 1.
class Grid {
public:
    Grid(int n, double half_width);

    int size() const { return n_; }
    double half_width() const { return half_width_; }
    double step() const { return step_; }
    const std::vector<double>& points() const { return points_; }
    double point(int i) const { return points_[static_cast<std::size_t>(i)]; }

private:
    int n_;
    double half_width_;
    double step_;
    std::vector<double> points_;
};

/// Nyquist-style guard for the canonical chirp exp(-i t (x - y/M)^2):
/// true iff the worst adjacent-sample phase increment over the window,
/// h * 2 t W (1 + 1/M), stays below pi/2.
bool grid_adequacy(const Grid& grid, double chirp, double magnification);

}  // namespace cavity
