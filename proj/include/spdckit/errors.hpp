#pragma once

#include <stdexcept>
#include <string>

namespace spdckit {

// bad configuration files, unknown names, schema violations; CLI exit code 2
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// poling profile produced a non-physical domain; carries where it happened
struct ProfileError : std::runtime_error {
    int domain_index;
    double position_um;
    ProfileError(const std::string& what, int index, double z_um)
        : std::runtime_error(what), domain_index(index), position_um(z_um) {}
};

// period/offset root finding failed to bracket
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// downstream numerical analysis could not produce a trustworthy answer
struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spdckit
