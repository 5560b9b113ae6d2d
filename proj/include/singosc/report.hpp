#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace singosc {

// One named residual check. "pass" is usually residual <= tolerance but a few
// checks (strict monotonicity) set it directly.
struct Check {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct CheckReport {
    std::vector<Check> checks;

    void add(const std::string& name, double residual, double tolerance) {
        checks.push_back({name, residual, tolerance, residual <= tolerance});
    }
    void add_strict(const std::string& name, double residual, double tolerance) {
        checks.push_back({name, residual, tolerance, residual < tolerance});
    }
    void append(const CheckReport& other) {
        checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    }
    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const Check& c) { return c.pass; });
    }
    double max_residual() const {
        double r = 0.0;
        for (const Check& c : checks) r = std::max(r, c.residual);
        return r;
    }
};

} // namespace singosc
