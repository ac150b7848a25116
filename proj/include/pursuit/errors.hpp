#pragma once

#include <stdexcept>
#include <string>

namespace pursuit {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed configuration or scenario input (CLI exit code 2).
struct config_error : error {
    using error::error;
};

/// A simulation run aborted: adjacent collision or numerical blowup (CLI exit code 3).
struct simulation_error : error {
    simulation_error(const std::string& what, double t_abort) : error(what), t(t_abort) {}
    double t;  // simulation time at abort
};

/// Degenerate geometry: coincident vehicles, zero-sine bearings, invalid formation inputs.
struct geometry_error : error {
    using error::error;
};

/// An analysis could not be carried out (non-equilibrium input, eigensolver
/// failure, polynomial inconsistency, ...). CLI exit code 4.
struct analysis_error : error {
    using error::error;
};

}  // namespace pursuit
