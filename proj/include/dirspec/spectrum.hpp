#pragma once

#include <vector>

#include "dirspec/determinant.hpp"
#include "dirspec/model.hpp"

namespace dirspec {

struct Rect {
    double re_min, re_max, im_min, im_max;

    Rect(double rmin, double rmax, double imin, double imax);
    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
    double diameter() const;
    Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
};

struct Eigenvalue {
    Complex lambda;
    int multiplicity;
    bool refined; // false when Newton stalled and lambda brackets a cluster
};

struct EigenvalueSet {
    std::vector<Eigenvalue> zeros;
    int total_count = 0; // winding-number count of the enclosing rectangle
};

/// Zeros of Delta_Q inside the rectangle, counted with multiplicity via the
/// winding number of the boundary image. Phase-tracked with adaptive edge
/// bisection (max phase step pi/4); a zero too close to the boundary triggers
/// up to 3 guard inflations before BoundaryZero is thrown.
int count_zeros(const DiracSystem& sys, const BoundarySpec& bc, const Rect& rect,
                const OdeOptions& opts = {});
int count_zeros(const DiracSystem& sys, const MinorSet& ms, const Rect& rect,
                const OdeOptions& opts = {});

/// Recursive quadrisection down to single clusters, then Newton on Delta_Q
/// (central-difference derivative, multiplicity-accelerated) with the cluster
/// multiplicity confirmed on a small winding circle.
EigenvalueSet locate_zeros(const DiracSystem& sys, const BoundarySpec& bc,
                           const Rect& rect, const OdeOptions& opts = {});
EigenvalueSet locate_zeros(const DiracSystem& sys, const MinorSet& ms, const Rect& rect,
                           const OdeOptions& opts = {});

} // namespace dirspec
