#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dirspec {

/// A derivative order exceeded the configured expansion limit n_max.
class MaxOrderExceeded : public std::runtime_error {
public:
    MaxOrderExceeded(int order, int n_max)
        : std::runtime_error("derivative order " + std::to_string(order) +
                             " exceeds n_max = " + std::to_string(n_max)),
          order_(order), n_max_(n_max) {}
    int order() const noexcept { return order_; }
    int n_max() const noexcept { return n_max_; }

private:
    int order_;
    int n_max_;
};

/// evaluate() was called without a value for some derivative order.
class MissingDerivative : public std::runtime_error {
public:
    MissingDerivative(char species, int order)
        : std::runtime_error(std::string("missing derivative value ") + species +
                             std::to_string(order)),
          species_(species), order_(order) {}
    char species() const noexcept { return species_; }
    int order() const noexcept { return order_; }

private:
    char species_;
    int order_;
};

/// The adaptive integrator could not meet its tolerance at the minimum step.
class StepFailure : public std::runtime_error {
public:
    explicit StepFailure(std::complex<double> lambda)
        : std::runtime_error("step size underflow integrating at lambda = (" +
                             std::to_string(lambda.real()) + ", " +
                             std::to_string(lambda.imag()) + ")"),
          lambda_(lambda) {}
    std::complex<double> lambda() const noexcept { return lambda_; }

private:
    std::complex<double> lambda_;
};

/// Richardson extrapolation of an asymptotic fit failed to settle.
class NoConvergence : public std::runtime_error {
public:
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

/// A zero of the determinant sits on (or too close to) a counting contour.
class BoundaryZero : public std::runtime_error {
public:
    explicit BoundaryZero(const std::string& what) : std::runtime_error(what) {}
};

/// Newton refinement stalled; the zero is reported as a bracketed cluster.
class NewtonStall : public std::runtime_error {
public:
    explicit NewtonStall(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dirspec
