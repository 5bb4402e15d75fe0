#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "envctrl/model.hpp"
#include "envctrl/oracle.hpp"

namespace envctrl::cli {

/// Invalid configuration. The message starts with the offending field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModeConfig {
    double omega{1.0};
    double g{0.0};
    std::optional<double> nbar;        // exactly one of nbar / temperature
    std::optional<double> temperature;
};

struct InteractionConfig {
    std::array<double, 4> alphas{};
    Eigenbasis basis{Eigenbasis::Bell};
    std::optional<Eigen::Matrix4cd> unitary; // columns are eigenvectors; General only
};

struct TimeGrid {
    double start{0.0};
    double stop{1.0};
    int steps{2}; // number of points, endpoints included

    std::vector<double> points() const;
};

struct OracleConfig {
    std::optional<std::vector<int>> cutoffs;
    oracle::BathState::Kind bath_state{oracle::BathState::Kind::Vacuum};
    double tolerance{1e-6};
};

struct SearchConfig {
    long long k1_max{0};
    std::optional<double> omega0;
};

struct DesignConfig {
    long long k1{0};
    std::vector<long long> k2;
};

struct OutputConfig {
    std::string directory{"."};
    std::vector<std::string> formats{"csv", "json"};
};

struct RunConfig {
    std::vector<ModeConfig> bath;
    InteractionConfig interaction;
    Eigen::Vector3d initial_s{Eigen::Vector3d::Zero()};
    std::optional<Eigen::Vector3d> probe; // nullopt: sweep over the six axis states
    TimeGrid time_grid;
    OracleConfig oracle;
    SearchConfig search;
    std::optional<DesignConfig> design;
    int reachable_samples{64};
    OutputConfig output;

    BathSpec bath_spec() const;
    InteractionSpec interaction_spec() const;
    QubitState initial_state() const;
    std::vector<QubitState> probe_states() const;
    bool wants(const std::string& format) const;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

/// FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& config);

} // namespace envctrl::cli
