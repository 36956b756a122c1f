#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "dirspec/completeness.hpp"
#include "dirspec/model.hpp"
#include "dirspec/spectrum.hpp"

namespace dirspec {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Batch problem description parsed from a JSON config document.
struct ProblemConfig {
    DiracSystem sys;
    BoundarySpec bc;
    int order_n = 6;
    double zero_tol = kDefaultZeroTol;
    OdeOptions ode;
    double t_min = 20.0;
    double t_max = 80.0;
    int scan_points = 5;
    HalfPlane scan_halfplane = HalfPlane::Upper;
    std::optional<Rect> rect;

    std::vector<double> scan_grid() const { return geometric_grid(t_min, t_max, scan_points); }
};

ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::string& path);

// Each command renders a deterministic report: keys sorted, floats with 17
// significant digits, complex values as [re, im] pairs.
std::string cmd_classify(const ProblemConfig& cfg);
std::string cmd_coefficients(const ProblemConfig& cfg);
std::string cmd_scan(const ProblemConfig& cfg); // CSV: t,re_norm,im_norm
std::string cmd_verify_asymptotics(const ProblemConfig& cfg);
std::string cmd_eigenvalues(const ProblemConfig& cfg);
std::string cmd_report(const ProblemConfig& cfg);

} // namespace dirspec
