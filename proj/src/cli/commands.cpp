#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "envctrl/dynamics.hpp"
#include "envctrl/oracle.hpp"
#include "envctrl/reachability.hpp"

namespace envctrl::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Oracle disagreement beyond the configured tolerance.
class OracleMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

std::string cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt::format("{:.17g}", v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.get<std::string>();
}

fs::path output_dir(const RunConfig& config, const CommandOptions& options) {
    fs::path dir = options.out_dir ? fs::path(*options.out_dir) : fs::path(config.output.directory);
    fs::create_directories(dir);
    return dir;
}

// Single writer; the file appears only once complete.
void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

json provenance(const RunConfig& config, const std::string& command) {
    return {{"tool", "envctrl"}, {"version", version()}, {"config_hash", config_hash(config)}, {"command", command}};
}

void write_table(const fs::path& dir, const std::string& stem, const Table& table, const RunConfig& config,
                 const std::string& command, const std::vector<std::string>& notes = {}) {
    if (config.wants("csv")) {
        std::string text = fmt::format("# envctrl {} command={} config_hash={}\n", version(), command, config_hash(config));
        for (const auto& n : notes) text += "# " + n + "\n";
        for (std::size_t c = 0; c < table.columns.size(); ++c) text += (c ? "," : "") + table.columns[c];
        text += "\n";
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) text += (c ? "," : "") + cell(row[c]);
            text += "\n";
        }
        write_atomic(dir / (stem + ".csv"), text);
    }
    if (config.wants("json")) {
        json doc = provenance(config, command);
        doc["columns"] = table.columns;
        doc["rows"] = table.rows;
        if (!notes.empty()) doc["notes"] = notes;
        write_atomic(dir / (stem + ".json"), doc.dump(2) + "\n");
    }
}

void write_report(const fs::path& dir, const std::string& stem, json report, const RunConfig& config,
                  const std::string& command) {
    json doc = provenance(config, command);
    doc["report"] = std::move(report);
    write_atomic(dir / (stem + ".json"), doc.dump(2) + "\n");
}

double inf_norm(const Eigen::Matrix3d& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

AffineMap map_for(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0, double t) {
    return interaction.eigenbasis() == Eigenbasis::Bell ? bell_affine_map(interaction, bath, s0, t)
                                                        : affine_map(interaction, bath, s0, t);
}

std::string join(const std::vector<long long>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + std::to_string(v[i]);
    return out;
}

BathSpec with_zero_occupation(const BathSpec& bath) {
    std::vector<BathMode> modes = bath.modes();
    for (auto& m : modes) m.nbar = 0.0;
    return BathSpec(std::move(modes));
}

} // namespace

const char* version() {
#ifdef ENVCTRL_VERSION
    return ENVCTRL_VERSION;
#else
    return "0.0.0";
#endif
}

int cmd_simulate(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
    const BathSpec bath = config.bath_spec();
    const InteractionSpec interaction = config.interaction_spec();
    const DensityMatrix2 rho_s = DensityMatrix2::from_bloch(config.initial_state());
    const auto& alpha = interaction.alphas();

    Table table;
    table.columns = {"probe", "px", "py", "pz", "t", "sx", "sy", "sz", "purity"};
    for (const auto& [i, j] : kPairs) table.columns.push_back(fmt::format("abs_gamma_{}{}", i + 1, j + 1));

    const auto probes = config.probe_states();
    const auto times = config.time_grid.points();
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const DensityMatrix2 rho_p = DensityMatrix2::from_bloch(probes[k]);
        for (double t : times) {
            const DensityMatrix2 rho = evolve_general(interaction, bath, rho_s, rho_p, t);
            const QubitState s = rho.bloch();
            std::vector<json> row{static_cast<long long>(k), probes[k].x(), probes[k].y(), probes[k].z(), t,
                                  s.x(), s.y(), s.z(), rho.purity()};
            for (const auto& [i, j] : kPairs) row.emplace_back(std::abs(gamma(bath, alpha[i], alpha[j], t)));
            table.rows.push_back(std::move(row));
        }
    }
    const fs::path dir = output_dir(config, options);
    write_table(dir, "trajectory", table, config, "simulate");
    log << "simulate: " << table.rows.size() << " rows written to " << dir.string() << "\n";
    return kSuccess;
}

int cmd_reachable(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
    const BathSpec bath = config.bath_spec();
    const InteractionSpec interaction = config.interaction_spec();
    const QubitState s0 = config.initial_state();
    const auto directions = fibonacci_sphere(static_cast<std::size_t>(config.reachable_samples));

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    const auto random_unit = [&] {
        Eigen::Vector3d v;
        do {
            v = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
        } while (v.norm() < 1e-12);
        return Eigen::Vector3d(v.normalized());
    };

    Table table;
    table.columns = {"t", "cx", "cy", "cz", "r1", "r2", "r3"};
    for (int k = 1; k <= 3; ++k)
        for (const char* c : {"x", "y", "z"}) table.columns.push_back(fmt::format("u{}{}", k, c));
    table.columns.push_back("max_containment_excess");

    ReachableUnion reach;
    for (double t : config.time_grid.points()) {
        const AffineMap map = map_for(interaction, bath, s0, t);
        const Ellipsoid e = reachable_ellipsoid(map);

        double excess = 0.0;
        for (int n = 0; n < config.reachable_samples; ++n) {
            const Eigen::Vector3d image = map.A * random_unit() + map.a;
            excess = std::max({excess, e.excess(image), image.norm() - 1.0});
        }
        std::vector<Eigen::Vector3d> surface;
        for (const auto& d : directions) {
            surface.push_back(e.surface_point(d));
            excess = std::max(excess, surface.back().norm() - 1.0);
        }
        if (excess > 1e-9) {
            throw PhysicalityError(fmt::format("reachable set at t={} leaves its ellipsoid or the Bloch ball by {}", t, excess));
        }
        reach.add(t, std::move(surface));

        std::vector<json> row{t, e.center.x(), e.center.y(), e.center.z(), e.semi_axes(0), e.semi_axes(1), e.semi_axes(2)};
        for (int k = 0; k < 3; ++k)
            for (int c = 0; c < 3; ++c) row.emplace_back(e.axes(c, k));
        row.emplace_back(std::max(excess, 0.0));
        table.rows.push_back(std::move(row));
    }

    Table points;
    points.columns = {"t", "x", "y", "z"};
    const auto times = config.time_grid.points();
    const auto all = reach.points_until(times.back());
    for (std::size_t i = 0; i < all.size(); ++i) {
        points.rows.push_back({times[i / directions.size()], all[i].x(), all[i].y(), all[i].z()});
    }

    const fs::path dir = output_dir(config, options);
    write_table(dir, "ellipsoids", table, config, "reachable");
    write_table(dir, "reachable_points", points, config, "reachable");
    log << "reachable: " << table.rows.size() << " time steps written to " << dir.string() << "\n";
    return kSuccess;
}

int cmd_access(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
    const BathSpec bath = config.bath_spec();
    const InteractionSpec interaction = config.interaction_spec();
    const QubitState s0 = config.initial_state();
    const AccessVerdict verdict = accessibility_check(interaction, bath, s0);

    json report;
    report["alphas"] = interaction.alphas();
    report["conditions"] = {
        {{"inequality", "(a2-a4)^2 != (a1-a3)^2"}, {"holds", verdict.conditions[0]}},
        {{"inequality", "(a1-a4)^2 != (a2-a3)^2"}, {"holds", verdict.conditions[1]}},
        {{"inequality", "(a3-a4)^2 != (a1-a2)^2"}, {"holds", verdict.conditions[2]}},
    };
    report["holds"] = verdict.holds;
    report["status"] = to_string(verdict.status);
    report["certificate"] = verdict.certificate ? json(*verdict.certificate) : json(nullptr);
    if (interaction.eigenbasis() == Eigenbasis::Bell) {
        report["det_series"] = det_series(interaction, bath, s0).coefficients();
    }
    write_report(output_dir(config, options), "access", report, config, "access");
    log << "access: " << to_string(verdict.status);
    if (verdict.certificate) log << " (sixth derivative " << fmt::format("{:.17g}", *verdict.certificate) << ")";
    log << "\n";
    return kSuccess;
}

int cmd_control_search(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
    const BathSpec bath = config.bath_spec();
    const auto& alphas = config.interaction.alphas;
    const double alpha4 = alphas[3];
    const QubitState s0 = config.initial_state();

    std::vector<std::string> notes;
    if (alphas[0] != 0.0 || alphas[1] != 0.0 || alphas[2] != 0.0) {
        notes.push_back("alphas 1-3 are nonzero; swap conditions assume (0, 0, 0, alpha4)");
    }
    if (config.interaction.basis != Eigenbasis::Bell) notes.push_back("swap conditions assume the Bell eigenbasis");

    const auto solutions = swap_times(bath, alpha4, config.search.k1_max, config.search.omega0);
    Table table;
    table.columns = {"t_hat", "k1", "alpha4", "k2", "err_A_minus_I_inf", "err_a_norm"};
    for (const auto& sol : solutions) {
        const AffineMap map = simplified_map(alpha4, bath, s0, sol.t_hat);
        table.rows.push_back({sol.t_hat, sol.k1, sol.alpha4, join(sol.k2),
                              inf_norm(map.A - Eigen::Matrix3d::Identity()), map.a.norm()});
    }
    write_table(output_dir(config, options), "swap_solutions", table, config, "control-search", notes);
    log << "control-search: " << solutions.size() << " swap time(s) with k1 <= " << config.search.k1_max << "\n";
    return kSuccess;
}

int cmd_design(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
    const BathSpec bath = config.bath_spec();
    long long k1 = 0;
    std::vector<long long> k2;
    if (config.design) {
        k1 = config.design->k1;
        k2 = config.design->k2;
    }
    if (options.k1) k1 = *options.k1;
    if (options.k2) k2 = *options.k2;
    if (k2.empty()) throw ConfigError("design.k2: required (config design section or --k2)");
    if (k2.size() != bath.size()) throw ConfigError("design.k2: expected one integer per bath mode");

    const double alpha4 = design_alpha4(bath, k1, k2);
    const double t_hat = 2.0 * std::numbers::pi * static_cast<double>(k2[0]) / bath.modes()[0].omega;
    const auto solutions = swap_times(bath, alpha4, std::max(k1, 0LL), config.search.omega0);
    const bool round_trip = std::any_of(solutions.begin(), solutions.end(), [&](const SwapSolution& s) {
        return s.k1 == k1 && std::abs(s.t_hat - t_hat) <= 1e-9 * t_hat;
    });

    json report{{"k1", k1}, {"k2", k2}, {"alpha4", alpha4}, {"t_hat", t_hat}, {"round_trip", round_trip}};
    write_report(output_dir(config, options), "design", report, config, "design");
    log << fmt::format("design: alpha4 = {:.17g} (t_hat = {:.17g})\n", alpha4, t_hat);
    if (!round_trip) throw std::logic_error("designed alpha4 was not recovered by swap_times");
    return kSuccess;
}

int cmd_verify(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
    const BathSpec bath = config.bath_spec();
    const InteractionSpec interaction = config.interaction_spec();
    const bool vacuum = config.oracle.bath_state == oracle::BathState::Kind::Vacuum;
    // The vacuum oracle corresponds to zero occupation in the closed form.
    const BathSpec analytic_bath = vacuum ? with_zero_occupation(bath) : bath;
    const oracle::BathState bath_state = vacuum ? oracle::BathState::vacuum() : oracle::BathState::thermal(bath);

    oracle::FockCutoffs cutoffs = config.oracle.cutoffs ? oracle::FockCutoffs{*config.oracle.cutoffs, options.dim_cap}
                                                        : oracle::default_cutoffs(bath, options.dim_cap);
    cutoffs.cap = options.dim_cap;
    std::optional<oracle::FockCutoffs> doubled = cutoffs;
    for (int& d : doubled->dims) d *= 2;
    if (4 * doubled->bath_dimension() > options.dim_cap) doubled.reset();

    const oracle::Simulator sim(interaction, bath, cutoffs);
    std::optional<oracle::Simulator> sim2;
    if (doubled) sim2.emplace(interaction, bath, *doubled);

    const DensityMatrix2 rho_s = DensityMatrix2::from_bloch(config.initial_state());
    Table table;
    table.columns = {"probe", "t", "max_abs_delta", "max_abs_delta_doubled_cutoff"};
    double worst = 0.0, worst2 = 0.0;
    const auto probes = config.probe_states();
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const DensityMatrix2 rho_p = DensityMatrix2::from_bloch(probes[k]);
        for (double t : config.time_grid.points()) {
            const Eigen::Matrix2cd exact = evolve_general(interaction, analytic_bath, rho_s, rho_p, t).matrix();
            const double delta = (sim.evolve(rho_s, rho_p, bath_state, t).matrix() - exact).cwiseAbs().maxCoeff();
            worst = std::max(worst, delta);
            json delta2 = nullptr;
            if (sim2) {
                const double d2 = (sim2->evolve(rho_s, rho_p, bath_state, t).matrix() - exact).cwiseAbs().maxCoeff();
                worst2 = std::max(worst2, d2);
                delta2 = d2;
            }
            table.rows.push_back({static_cast<long long>(k), t, delta, delta2});
        }
    }

    const bool pass = worst <= config.oracle.tolerance;
    json report{{"cutoffs", cutoffs.dims},
                {"doubled_cutoffs", doubled ? json(doubled->dims) : json(nullptr)},
                {"bath_state", vacuum ? "vacuum" : "thermal"},
                {"tolerance", config.oracle.tolerance},
                {"max_abs_delta", worst},
                {"max_abs_delta_doubled_cutoff", doubled ? json(worst2) : json(nullptr)},
                {"pass", pass}};
    const fs::path dir = output_dir(config, options);
    write_table(dir, "verify", table, config, "verify");
    write_report(dir, "verify_summary", report, config, "verify");
    log << fmt::format("verify: max |delta| = {:.3e} (tolerance {:.1e}) {}\n", worst, config.oracle.tolerance,
                       pass ? "PASS" : "FAIL");
    if (!pass) throw OracleMismatch("analytic and oracle dynamics disagree beyond tolerance");
    return kSuccess;
}

int exit_code_for(std::exception_ptr error, std::ostream& log) {
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IncommensurateBath& e) {
        log << "incommensurate bath: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        log << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const PhysicalityError& e) {
        log << "physics invariant violated: " << e.what() << "\n";
        return kPhysicsViolation;
    } catch (const OracleMismatch& e) {
        log << "oracle mismatch: " << e.what() << "\n";
        return kOracleMismatch;
    } catch (const std::logic_error& e) {
        log << "physics invariant violated: " << e.what() << "\n";
        return kPhysicsViolation;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    } catch (...) {
        log << "error: unknown failure\n";
        return 1;
    }
}

int run_command(const std::string& name, const std::string& config_path, const CommandOptions& options,
                std::ostream& log) {
    try {
        const RunConfig config = load_config(config_path);
        if (name == "simulate") return cmd_simulate(config, options, log);
        if (name == "reachable") return cmd_reachable(config, options, log);
        if (name == "access") return cmd_access(config, options, log);
        if (name == "control-search") return cmd_control_search(config, options, log);
        if (name == "design") return cmd_design(config, options, log);
        if (name == "verify") return cmd_verify(config, options, log);
        log << "error: unknown command " << name << "\n";
        return kConfigError;
    } catch (...) {
        return exit_code_for(std::current_exception(), log);
    }
}

} // namespace envctrl::cli
