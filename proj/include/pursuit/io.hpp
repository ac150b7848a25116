#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "pursuit/geometry.hpp"
#include "pursuit/linearize.hpp"
#include "pursuit/sim.hpp"
#include "pursuit/spectral.hpp"

// JSON bindings (nlohmann ADL) for every exported type, the trajectory CSV
// writer, and the plain-text matrix format used for external cross-checking.

namespace pursuit {

void to_json(nlohmann::json& j, const AgentState& q);
void from_json(const nlohmann::json& j, AgentState& q);
void to_json(nlohmann::json& j, const RelativeState& l);
void from_json(const nlohmann::json& j, RelativeState& l);
void to_json(nlohmann::json& j, const FleetRelativeState& xi);
void from_json(const nlohmann::json& j, FleetRelativeState& xi);
void to_json(nlohmann::json& j, const ConstraintResidual& r);
void to_json(nlohmann::json& j, const FormationDescriptor& d);
void from_json(const nlohmann::json& j, FormationDescriptor& d);
void to_json(nlohmann::json& j, const SimConfig& c);
void from_json(const nlohmann::json& j, SimConfig& c);
void to_json(nlohmann::json& j, const Trajectory& t);
void to_json(nlohmann::json& j, const ConvergenceReport& r);
void to_json(nlohmann::json& j, const CharPoly& p);
void to_json(nlohmann::json& j, const RouthTable& t);
void to_json(nlohmann::json& j, const StabilityVerdict& v);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M);

/// Rows of space-separated decimals, one line per row.
void write_matrix_text(std::ostream& os, const Eigen::MatrixXd& M);

/// CSV with header t,x_1,y_1,theta_1,...,rho_1,alpha_1,beta_1,...,omega_1,...,
/// g1,g2,g3 (the pose block is present only for absolute-mode trajectories).
/// Values are printed with %.17g so reruns are byte-identical.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Human-readable Routh table.
void print_routh_table(std::ostream& os, const RouthTable& table);

std::string format_double(double x);

}  // namespace pursuit
