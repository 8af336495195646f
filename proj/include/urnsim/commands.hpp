#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "urnsim/asymptotics.hpp"
#include "urnsim/config.hpp"
#include "urnsim/equilibria.hpp"

namespace urnsim {

// Payload builders behind the CLI subcommands; pure functions of their
// inputs so they can be tested without touching the filesystem.
nlohmann::json zeros_payload(const ModelParams& p, bool include_unstable_middle);
nlohmann::json mc_payload(const ExperimentConfig& cfg);
nlohmann::json clt_payload(const ExperimentConfig& cfg);

std::string trajectory_csv(const std::vector<StateVector>& snapshots);
std::string report_csv(const std::vector<ReplicationReport>& reports);

// Subcommand entry points; write artifacts under out_dir and print a one-line
// summary to `log`. Return the process exit code.
int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_equilibria(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_field(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_mc(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_clt_check(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);

} // namespace urnsim
