#pragma once

#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmm/conditions.hpp"
#include "pmm/node.hpp"
#include "pmm/obs.hpp"
#include "pmm/online.hpp"

namespace pmm {

// fixed "%.17g" rendering so emitted files are byte-stable across runs
std::string format_double(double v);

// Trajectory CSV: "t,x,y" (discrete) or "t,x_1..x_d,y" (Euclidean).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

// Observation CSV: trajectory files are accepted (the y column is ignored).
ObsSeq read_obs_csv(std::istream& in);

// Decode CSV: "t,v".
void write_decode_csv(std::ostream& out, const std::vector<int>& path, long long t0 = 1);

nlohmann::json to_json(const NodeReport& rep);
nlohmann::json to_json(const WitnessTriple& w);
nlohmann::json to_json(const BarrierCertificate& cert);
nlohmann::json to_json(const BarrierCheck& check);
nlohmann::json to_json(const AConditionsReport& rep);
nlohmann::json to_json(const HmmCorollaryReport& rep);
nlohmann::json to_json(const DiscreteCorollaryReport& rep);
nlohmann::json to_json(const GlmConditionReport& rep);
nlohmann::json to_json(const StreamDiagnostics& diag);

}  // namespace pmm
