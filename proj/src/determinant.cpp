#include "dirspec/determinant.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dirspec/errors.hpp"
#include "parallel.hpp"

namespace dirspec {

namespace {

using Vec2 = std::array<Complex, 2>;

struct ScaledVec2 {
    Vec2 v{Complex(0, 0), Complex(0, 0)};
    double exponent = 0.0;

    void renormalize() {
        double m = std::max(std::abs(v[0]), std::abs(v[1]));
        if (m > 1e8 || (m > 0.0 && m < 1e-8)) {
            v[0] /= m;
            v[1] /= m;
            exponent += std::log(m);
        }
    }
};

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// difference between 5th and embedded 4th order weights
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

class ColumnRhs {
public:
    // z' = [i lambda (B - b_col I) - i B Q(x)] z for the rescaled column.
    ColumnRhs(const DiracSystem& sys, Complex lambda, int col) : sys_(sys) {
        Complex il = Complex(0, 1) * lambda;
        double bcol = col == 0 ? sys.b1 : sys.b2;
        d1_ = il * (sys.b1 - bcol);
        d2_ = il * (sys.b2 - bcol);
    }

    Vec2 operator()(double x, const Vec2& z) const {
        Complex q12 = sys_.Q12.eval(x);
        Complex q21 = sys_.Q21.eval(x);
        Complex mi(0, -1);
        return {d1_ * z[0] + mi * sys_.b1 * q12 * z[1],
                d2_ * z[1] + mi * sys_.b2 * q21 * z[0]};
    }

    double rate() const { return std::max(std::abs(d1_), std::abs(d2_)); }

private:
    const DiracSystem& sys_;
    Complex d1_, d2_;
};

ScaledVec2 integrate_column(const DiracSystem& sys, Complex lambda, int col,
                            const OdeOptions& opts) {
    ColumnRhs f(sys, lambda, col);
    ScaledVec2 z;
    z.v[col] = Complex(1, 0);

    double qmag = 1.0 + std::max(sys.Q12.max_abs_coeff(), sys.Q21.max_abs_coeff()) *
                            (std::abs(sys.b1) + std::abs(sys.b2));
    double rate = f.rate() + qmag;
    double h = std::clamp(0.1 / rate, opts.h_min, opts.h_max);
    double x = 0.0;

    while (x < 1.0) {
        bool clipped = false;
        if (x + h >= 1.0) {
            h = 1.0 - x;
            clipped = true;
        }

        Vec2 k1 = f(x, z.v);
        auto at = [&](double c, std::initializer_list<std::pair<double, const Vec2*>> ws) {
            Vec2 y = z.v;
            for (auto [w, k] : ws) {
                y[0] += h * w * (*k)[0];
                y[1] += h * w * (*k)[1];
            }
            return f(x + c * h, y);
        };
        Vec2 k2 = at(1.0 / 5, {{A21, &k1}});
        Vec2 k3 = at(3.0 / 10, {{A31, &k1}, {A32, &k2}});
        Vec2 k4 = at(4.0 / 5, {{A41, &k1}, {A42, &k2}, {A43, &k3}});
        Vec2 k5 = at(8.0 / 9, {{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}});
        Vec2 k6 = at(1.0, {{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}});

        Vec2 z5;
        for (int i = 0; i < 2; ++i)
            z5[i] = z.v[i] +
                    h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        Vec2 k7 = f(x + h, z5);

        double scale = std::max({std::abs(z.v[0]), std::abs(z.v[1]), std::abs(z5[0]),
                                 std::abs(z5[1]), 1e-30});
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            Complex e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                             E6 * k6[i] + E7 * k7[i]);
            err = std::max(err, std::abs(e));
        }
        double ratio = err / (opts.tol * scale);

        if (ratio <= 1.0) {
            x += h;
            z.v = z5;
            z.renormalize();
        } else if (h <= opts.h_min * (1.0 + 1e-12) && !clipped) {
            throw StepFailure(lambda);
        }
        double grow = 0.9 * std::pow(std::max(ratio, 1e-10), -0.2);
        h = std::clamp(h * std::clamp(grow, 0.2, 5.0), opts.h_min, opts.h_max);
    }
    return z;
}

ScaledComplex phase_exp(double b, Complex lambda) {
    // e^{i b lambda}: unit phase into the mantissa, magnitude into the exponent
    return ScaledComplex(std::exp(Complex(0, b * lambda.real())), -b * lambda.imag());
}

} // namespace

FundamentalMatrix fundamental_matrix(const DiracSystem& sys, Complex lambda,
                                     const OdeOptions& opts) {
    FundamentalMatrix out;
    for (int col = 0; col < 2; ++col) {
        ScaledVec2 z = integrate_column(sys, lambda, col, opts);
        ScaledComplex ph = phase_exp(col == 0 ? sys.b1 : sys.b2, lambda);
        for (int row = 0; row < 2; ++row)
            out.phi[row][col] = ScaledComplex(z.v[row], z.exponent) * ph;
    }
    return out;
}

ScaledComplex delta0_closed(const MinorSet& ms, double b1, double b2, Complex lambda) {
    return ScaledComplex::from(ms.J12) + ms.J34 * phase_exp(b1 + b2, lambda) +
           ms.J32 * phase_exp(b1, lambda) + ms.J14 * phase_exp(b2, lambda);
}

ScaledComplex delta_Q_via_ode(const DiracSystem& sys, const MinorSet& ms, Complex lambda,
                              const OdeOptions& opts) {
    FundamentalMatrix f = fundamental_matrix(sys, lambda, opts);
    return ScaledComplex::from(ms.J12) + ms.J34 * phase_exp(sys.b1 + sys.b2, lambda) +
           ms.J32 * f(0, 0) + ms.J13 * f(0, 1) + ms.J42 * f(1, 0) + ms.J14 * f(1, 1);
}

ScaledComplex delta_Q(const DiracSystem& sys, const MinorSet& ms, Complex lambda,
                      const OdeOptions& opts) {
    if (sys.q_is_zero()) return delta0_closed(ms, sys.b1, sys.b2, lambda);
    return delta_Q_via_ode(sys, ms, lambda, opts);
}

ScaledComplex delta_Q(const DiracSystem& sys, const BoundarySpec& bc, Complex lambda,
                      const OdeOptions& opts) {
    return delta_Q(sys, minors(bc), lambda, opts);
}

std::vector<std::pair<double, Complex>> ray_scan(const DiracSystem& sys,
                                                 const MinorSet& ms, HalfPlane hp,
                                                 const std::vector<double>& t_values,
                                                 const OdeOptions& opts) {
    std::vector<std::pair<double, Complex>> out(t_values.size());
    parallel_for(t_values.size(), [&](std::size_t i) {
        double t = t_values[i];
        ScaledComplex d = (hp == HalfPlane::Upper)
                              ? delta_Q(sys, ms, Complex(0, t), opts).times_exp(sys.b1 * t)
                              : delta_Q(sys, ms, Complex(0, -t), opts).times_exp(-sys.b2 * t);
        out[i] = {t, d.to_complex()};
    });
    return out;
}

std::vector<std::pair<double, Complex>> ray_scan(const DiracSystem& sys,
                                                 const BoundarySpec& bc, HalfPlane hp,
                                                 const std::vector<double>& t_values,
                                                 const OdeOptions& opts) {
    return ray_scan(sys, minors(bc), hp, t_values, opts);
}

std::vector<double> geometric_grid(double t_min, double t_max, int points) {
    std::vector<double> g;
    if (points <= 1) {
        g.push_back(t_min);
        return g;
    }
    double r = std::pow(t_max / t_min, 1.0 / (points - 1));
    double t = t_min;
    for (int i = 0; i < points; ++i, t *= r) g.push_back(t);
    g.back() = t_max;
    return g;
}

FitResult fit_leading_coefficient(const DiracSystem& sys, const MinorSet& ms,
                                  HalfPlane hp, int K, const std::vector<double>& t_grid,
                                  const std::vector<Complex>& known,
                                  const OdeOptions& opts) {
    if (static_cast<int>(known.size()) < K)
        throw std::invalid_argument("fit needs coefficients c_0..c_{K-1}");

    auto scan = ray_scan(sys, ms, hp, t_grid, opts);
    double c_w = sys.b2 - sys.b1; // |c lambda| = c_w * t; on the rays c lambda is real

    std::size_t m = t_grid.size();
    std::vector<Complex> G(m);
    std::vector<double> u(m);
    for (std::size_t i = 0; i < m; ++i) {
        double t = t_grid[i];
        double w = (hp == HalfPlane::Upper) ? c_w * t : -c_w * t; // c * lambda
        Complex partial(0, 0);
        for (int k = 0; k < K; ++k) {
            double sgn = (hp == HalfPlane::Lower && k >= 1) ? -1.0 : 1.0;
            partial += sgn * known[k] * std::pow(w, -k);
        }
        Complex g = (scan[i].second - partial) * std::pow(w, K);
        if (hp == HalfPlane::Lower && K >= 1) g = -g;
        G[i] = g;
        u[i] = 1.0 / t;
    }

    // The extracted sequence must settle toward a constant; monotone growth
    // across the grid means lower-order content (the outer factor's tail
    // against a nonzero earlier coefficient) swamps the target order.
    double g_first = std::abs(G.front());
    double g_last = std::abs(G.back());
    if (g_last > 2.0 * g_first && g_last > 1e-12)
        throw NoConvergence("extracted values grow with t; raise the t grid");

    // Neville extrapolation to u = 0; the residual model is a power series in
    // 1/t, which includes the (1+o(1)) outer factor's own tail.
    std::vector<std::vector<Complex>> T(m);
    for (std::size_t i = 0; i < m; ++i) {
        T[i].resize(i + 1);
        T[i][0] = G[i];
        for (std::size_t j = 1; j <= i; ++j)
            T[i][j] = (u[i - j] * T[i][j - 1] - u[i] * T[i - 1][j - 1]) / (u[i - j] - u[i]);
    }

    FitResult best;
    best.estimate = T[m - 1][0];
    best.err_est = std::numeric_limits<double>::infinity();
    best.level_used = 0;
    for (std::size_t j = 1; j < m; ++j) {
        double diff = std::abs(T[m - 1][j] - T[m - 1][j - 1]);
        if (diff < best.err_est) {
            best.err_est = diff;
            best.estimate = T[m - 1][j];
            best.level_used = static_cast<int>(j);
        }
    }

    double scale0 = 0.0;
    for (const Complex& g : G) scale0 = std::max(scale0, std::abs(g));
    if (best.err_est > 0.5 * scale0 && scale0 > 1e-12)
        throw NoConvergence("fit levels diverge; raise the t grid");
    return best;
}

FitResult fit_leading_coefficient(const DiracSystem& sys, const BoundarySpec& bc,
                                  HalfPlane hp, int K, const std::vector<double>& t_grid,
                                  const std::vector<Complex>& known,
                                  const OdeOptions& opts) {
    return fit_leading_coefficient(sys, minors(bc), hp, K, t_grid, known, opts);
}

std::optional<double> residual_decay_slope(const DiracSystem& sys, const MinorSet& ms,
                                           HalfPlane hp, int n,
                                           const std::vector<Complex>& table_coeffs,
                                           double t_hi, int points,
                                           const OdeOptions& opts) {
    std::vector<double> grid = geometric_grid(t_hi / 10.0, t_hi, points);
    auto scan = ray_scan(sys, ms, hp, grid, opts);
    double c_w = sys.b2 - sys.b1;

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        double w = (hp == HalfPlane::Upper) ? c_w * t : -c_w * t;
        Complex partial(0, 0);
        double scale = 0.0;
        for (int k = 0; k <= n && k < static_cast<int>(table_coeffs.size()); ++k) {
            double sgn = (hp == HalfPlane::Lower && k >= 1) ? -1.0 : 1.0;
            Complex term = sgn * table_coeffs[k] * std::pow(w, -k);
            partial += term;
            scale = std::max(scale, std::abs(term));
        }
        double res = std::abs(scan[i].second - partial);
        if (res <= 100.0 * opts.tol * std::max(scale, 1.0)) continue; // numeric floor
        xs.push_back(std::log(t));
        ys.push_back(std::log(res));
    }
    if (xs.size() < 3) return std::nullopt;

    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxy / sxx;
}

} // namespace dirspec
