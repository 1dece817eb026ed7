#pragma once

#include <cmath>

#include "pslab/types.hpp"

namespace pslab {

/// Rectangular lattice of nx × ny nodes in the complex plane, endpoints
/// included. Node (ix, iy) is stored at flat index iy * nx + ix.
struct ComplexGrid {
    double re_min = -1.0;
    double re_max = 1.0;
    double im_min = -1.0;
    double im_max = 1.0;
    int nx = 301;
    int ny = 301;

    void validate() const {
        if (!(re_min < re_max) || !(im_min < im_max) || nx < 2 || ny < 2) {
            throw InvalidArgument("ComplexGrid: need re_min < re_max, im_min < im_max, nx, ny >= 2");
        }
    }
    double re_at(int ix) const { return std::lerp(re_min, re_max, double(ix) / (nx - 1)); }
    double im_at(int iy) const { return std::lerp(im_min, im_max, double(iy) / (ny - 1)); }
    Complex node(int ix, int iy) const { return {re_at(ix), im_at(iy)}; }
    double re_step() const { return (re_max - re_min) / (nx - 1); }
    double im_step() const { return (im_max - im_min) / (ny - 1); }
    double pitch() const { return std::max(re_step(), im_step()); }
    std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
    std::size_t index(int ix, int iy) const { return std::size_t(iy) * nx + ix; }
};

}  // namespace pslab
