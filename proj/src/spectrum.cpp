#include "dirspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dirspec/errors.hpp"

namespace dirspec {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaxPhaseStep = kPi / 4.0;
constexpr int kMaxBisectDepth = 48;

double phase_jump(const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero() || b.is_zero()) throw BoundaryZero("determinant vanishes on contour");
    return std::arg(b.mantissa / a.mantissa);
}

class PhaseTracker {
public:
    PhaseTracker(const DiracSystem& sys, const MinorSet& ms, const OdeOptions& opts)
        : sys_(sys), ms_(ms), opts_(opts) {}

    // Total continuous phase change of Delta_Q along the segment [za, zb].
    // The principal-value jump between two samples is blind to full turns, so
    // seed the chase with panels sized by the exponential phase speed
    // |b| * length before adaptive bisection takes over.
    double segment(Complex za, Complex zb) const {
        double speed = std::max(std::abs(sys_.b1), std::abs(sys_.b2));
        double len = std::abs(zb - za);
        int panels = std::clamp(static_cast<int>(std::ceil(len * speed * 8.0 / kPi)), 8, 1024);
        double total = 0.0;
        Complex prev_z = za;
        ScaledComplex prev_v = eval(za);
        for (int i = 1; i <= panels; ++i) {
            Complex z = za + (zb - za) * (static_cast<double>(i) / panels);
            ScaledComplex v = eval(z);
            total += chase(prev_z, prev_v, z, v, 0);
            prev_z = z;
            prev_v = v;
        }
        return total;
    }

    ScaledComplex eval(Complex z) const { return delta_Q(sys_, ms_, z, opts_); }

private:
    double chase(Complex za, const ScaledComplex& va, Complex zb, const ScaledComplex& vb,
                 int depth) const {
        double jump = phase_jump(va, vb);
        if (std::abs(jump) <= kMaxPhaseStep) {
            // a phase step under pi/4 is unambiguous unless the modulus dips
            // through a zero between samples; the dip shows up as a huge
            // magnitude ratio, so bisect once more in that case
            double ratio = std::abs(va.log_abs() - vb.log_abs());
            if (ratio < std::log(4.0) || depth >= kMaxBisectDepth) return jump;
        }
        if (depth >= kMaxBisectDepth)
            throw BoundaryZero("phase tracking exhausted bisection depth");
        Complex zm = 0.5 * (za + zb);
        ScaledComplex vm = eval(zm);
        return chase(za, va, zm, vm, depth + 1) + chase(zm, vm, zb, vb, depth + 1);
    }

    const DiracSystem& sys_;
    const MinorSet& ms_;
    const OdeOptions& opts_;
};

int winding_of_rect(const PhaseTracker& tr, const Rect& r) {
    Complex c00(r.re_min, r.im_min), c10(r.re_max, r.im_min);
    Complex c11(r.re_max, r.im_max), c01(r.re_min, r.im_max);
    double total = tr.segment(c00, c10) + tr.segment(c10, c11) + tr.segment(c11, c01) +
                   tr.segment(c01, c00);
    double w = total / (2.0 * kPi);
    long n = std::lround(w);
    if (std::abs(w - static_cast<double>(n)) > 0.05)
        throw BoundaryZero("winding number did not settle on an integer");
    return static_cast<int>(n);
}

int winding_of_circle(const PhaseTracker& tr, Complex center, double radius) {
    constexpr int kSamples = 16;
    double total = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        double a0 = 2.0 * kPi * i / kSamples;
        double a1 = 2.0 * kPi * (i + 1) / kSamples;
        Complex z0 = center + radius * Complex(std::cos(a0), std::sin(a0));
        Complex z1 = center + radius * Complex(std::cos(a1), std::sin(a1));
        total += tr.segment(z0, z1);
    }
    double w = total / (2.0 * kPi);
    long n = std::lround(w);
    if (std::abs(w - static_cast<double>(n)) > 0.05)
        throw BoundaryZero("circle winding did not settle on an integer");
    return static_cast<int>(n);
}

// winding of a small circle around z with retry growth; 0 when it never settles
int circle_multiplicity(const PhaseTracker& tr, Complex z, double rad) {
    for (int grow = 0; grow < 3; ++grow) {
        try {
            return winding_of_circle(tr, z, rad);
        } catch (const BoundaryZero&) {
            rad *= 8.0;
        }
    }
    return 0;
}

// Newton refinement; derivative by central difference h = 1e-5 (1 + |z|).
// At a double zero the function value drops below the evaluation noise floor
// (|Delta| ~ e^2 against ~1e-15 cancellation noise), so multiplicity-2
// clusters are refined on Delta' instead, whose zero there is simple.
Eigenvalue refine_zero(const PhaseTracker& tr, Complex start, int mult) {
    Complex z = start;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
        double h = 1e-5 * (1.0 + std::abs(z));
        ScaledComplex num, den;
        double tol_scale;
        if (mult == 2) {
            ScaledComplex fp = tr.eval(z + h), f0 = tr.eval(z), fm = tr.eval(z - h);
            num = (fp - fm) * Complex(0.5 * h, 0.0);           // h^2/2 * Delta'
            den = fp - f0 - f0 + fm;                            // h^2 * Delta''
            tol_scale = 3e-12;
        } else {
            num = tr.eval(z) * Complex(2.0 * h * mult, 0.0);
            den = tr.eval(z + h) - tr.eval(z - h);
            tol_scale = 1e-12;
        }
        if (den.is_zero()) break;
        Complex step = (num / den).to_complex();
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        // keep Newton inside its basin
        double cap = 0.5 * (1.0 + std::abs(z));
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z -= step;
        if (std::abs(step) < tol_scale * (1.0 + std::abs(z))) {
            converged = true;
            break;
        }
    }
    return Eigenvalue{z, mult, converged};
}

struct Locator {
    const PhaseTracker& tr;
    const OdeOptions& opts;
    std::vector<Eigenvalue>& out;

    int count(const Rect& r) const { return winding_of_rect(tr, r); }

    // Split coordinate that avoids zeros sitting on the cut line.
    static double pick_cut(double lo, double hi, int attempt) {
        static constexpr double fractions[] = {0.5, 0.46, 0.54, 0.42, 0.58, 0.38, 0.62};
        return lo + fractions[attempt] * (hi - lo);
    }

    static bool inside(const Rect& r, Complex z) {
        double mw = 0.2 * r.width(), mh = 0.2 * r.height();
        return z.real() >= r.re_min - mw && z.real() <= r.re_max + mw &&
               z.imag() >= r.im_min - mh && z.imag() <= r.im_max + mh;
    }

    int measure_multiplicity(Complex z) const {
        return circle_multiplicity(tr, z, std::max(1e-6 * (1.0 + std::abs(z)), 1e-9));
    }

    void subdivide(const Rect& r, int n, double eps) const {
        if (n == 0) return;
        if (n == 1) {
            Eigenvalue ev = refine_zero(tr, r.center(), 1);
            // Newton escaping the cell means it locked onto a neighbor zero;
            // shrink the cell around the right one instead
            if (ev.refined && !inside(r, ev.lambda) && r.diameter() >= eps) {
                quadrisect(r, 1, eps);
                return;
            }
            ev.multiplicity = 1; // the contour already certifies a single zero
            out.push_back(ev);
            return;
        }
        if (r.diameter() < eps) {
            resolve_cluster(r, n, eps);
            return;
        }
        quadrisect(r, n, eps);
    }

    // A small cell carrying winding n: either one multiple zero or several
    // zeros closer than eps. The confirmation circle around the refined point
    // tells the two apart; on a mismatch keep splitting with a tighter floor.
    void resolve_cluster(const Rect& r, int n, double eps) const {
        Eigenvalue ev = refine_zero(tr, r.center(), n);
        int measured = ev.refined ? measure_multiplicity(ev.lambda) : 0;
        if (measured == n) {
            ev.multiplicity = n;
            out.push_back(ev);
            return;
        }
        double eps_floor = 1e-9 * (1.0 + std::abs(r.center()));
        if (eps > eps_floor) {
            quadrisect(r, n, std::max(eps / 64.0, eps_floor));
            return;
        }
        // bracketed cluster below resolution: report the cell, not a point
        out.push_back(Eigenvalue{r.center(), n, false});
    }

    void quadrisect(const Rect& r, int n, double eps) const {
        for (int attempt = 0; attempt < 7; ++attempt) {
            double xc = pick_cut(r.re_min, r.re_max, attempt);
            double yc = pick_cut(r.im_min, r.im_max, attempt);
            Rect q[4] = {Rect(r.re_min, xc, r.im_min, yc), Rect(xc, r.re_max, r.im_min, yc),
                         Rect(r.re_min, xc, yc, r.im_max), Rect(xc, r.re_max, yc, r.im_max)};
            try {
                int cnt[4];
                int sum = 0;
                for (int i = 0; i < 4; ++i) {
                    cnt[i] = count(q[i]);
                    sum += cnt[i];
                }
                if (sum != n) continue; // a zero slipped through the cut lines
                for (int i = 0; i < 4; ++i) subdivide(q[i], cnt[i], eps);
                return;
            } catch (const BoundaryZero&) {
                continue; // move the cut and retry
            }
        }
        // quadrisection could not separate; treat the whole cell as a cluster
        Eigenvalue ev = refine_zero(tr, r.center(), n);
        ev.multiplicity = n;
        ev.refined = ev.refined && measure_multiplicity(ev.lambda) == n;
        out.push_back(ev);
    }
};

} // namespace

Rect::Rect(double rmin, double rmax, double imin, double imax)
    : re_min(rmin), re_max(rmax), im_min(imin), im_max(imax) {
    if (!(re_min < re_max) || !(im_min < im_max))
        throw std::invalid_argument("rectangle needs a nonempty interior");
    if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) ||
        !std::isfinite(im_max))
        throw std::invalid_argument("rectangle bounds must be finite");
}

double Rect::diameter() const { return std::hypot(width(), height()); }

int count_zeros(const DiracSystem& sys, const MinorSet& ms, const Rect& rect,
                const OdeOptions& opts) {
    PhaseTracker tr(sys, ms, opts);
    double delta = 1e-4 * rect.diameter();
    Rect r = rect;
    for (int attempt = 0;; ++attempt) {
        try {
            return winding_of_rect(tr, r);
        } catch (const BoundaryZero&) {
            if (attempt >= 3) throw;
            double g = 3.0 * delta * (attempt + 1);
            r = Rect(r.re_min - g, r.re_max + g, r.im_min - g, r.im_max + g);
        }
    }
}

int count_zeros(const DiracSystem& sys, const BoundarySpec& bc, const Rect& rect,
                const OdeOptions& opts) {
    return count_zeros(sys, minors(bc), rect, opts);
}

EigenvalueSet locate_zeros(const DiracSystem& sys, const MinorSet& ms, const Rect& rect,
                           const OdeOptions& opts) {
    PhaseTracker tr(sys, ms, opts);
    EigenvalueSet set;
    set.total_count = count_zeros(sys, ms, rect, opts);
    if (set.total_count == 0) return set;

    Locator loc{tr, opts, set.zeros};
    loc.subdivide(rect, set.total_count, 1e-3 * (1.0 + std::abs(rect.center())));

    std::sort(set.zeros.begin(), set.zeros.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });

    // A cut line through a multiple zero hands each neighbor cell a share of
    // its winding; the refinements then converge to the same point (up to the
    // evaluation noise floor) carrying shares that add back up to the zero's
    // multiplicity. Candidate pairs are confirmed on a circle before merging
    // so that genuinely distinct close zeros stay separate.
    std::vector<Eigenvalue> merged;
    for (const Eigenvalue& ev : set.zeros) {
        if (!merged.empty() && merged.back().refined && ev.refined) {
            double gap = std::abs(merged.back().lambda - ev.lambda);
            if (gap <= 1e-6 * (1.0 + std::abs(ev.lambda))) {
                Complex mid = 0.5 * (merged.back().lambda + ev.lambda);
                int want = merged.back().multiplicity + ev.multiplicity;
                double rad = std::max(4.0 * gap, 1e-6 * (1.0 + std::abs(mid)));
                if (circle_multiplicity(tr, mid, rad) == want) {
                    Eigenvalue improved = refine_zero(tr, mid, want);
                    merged.back().lambda = improved.refined ? improved.lambda : mid;
                    merged.back().multiplicity = want;
                    merged.back().refined = improved.refined;
                    continue;
                }
            }
        }
        merged.push_back(ev);
    }
    set.zeros = std::move(merged);

    int sum = 0;
    for (const Eigenvalue& ev : set.zeros) sum += ev.multiplicity;
    if (sum != set.total_count)
        throw NewtonStall("located multiplicities disagree with the contour count");
    return set;
}

EigenvalueSet locate_zeros(const DiracSystem& sys, const BoundarySpec& bc,
                           const Rect& rect, const OdeOptions& opts) {
    return locate_zeros(sys, minors(bc), rect, opts);
}

} // namespace dirspec
