#include "cli/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

namespace envctrl::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) fail(path + "." + key, "unknown field");
    }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) fail(path + "." + key, "required field missing");
    return obj.at(key);
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
}

long long integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long long>();
}

Eigen::Vector3d vector3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) fail(path, "expected an array of 3 numbers");
    Eigen::Vector3d out;
    for (int k = 0; k < 3; ++k) out(k) = number(v[k], path + "[" + std::to_string(k) + "]");
    return out;
}

Eigen::Vector3d bloch_vector(const json& v, const std::string& path) {
    const Eigen::Vector3d out = vector3(v, path);
    if (out.norm() > 1.0 + QubitState::kNormTolerance) fail(path, "Bloch vector norm must be <= 1");
    return out;
}

const char* basis_name(Eigenbasis b) {
    switch (b) {
    case Eigenbasis::Factorized: return "factorized";
    case Eigenbasis::Bell: return "bell";
    case Eigenbasis::General: return "general";
    }
    return "bell";
}

std::vector<ModeConfig> parse_bath(const json& doc) {
    check_keys(doc, "bath", {"modes"});
    const json& modes = require(doc, "modes", "bath");
    if (!modes.is_array() || modes.empty()) fail("bath.modes", "expected a non-empty array");
    std::vector<ModeConfig> out;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string path = "bath.modes[" + std::to_string(i) + "]";
        const json& m = modes[i];
        check_keys(m, path, {"omega", "g", "nbar", "temperature"});
        ModeConfig mode;
        mode.omega = number(require(m, "omega", path), path + ".omega");
        if (mode.omega <= 0.0) fail(path + ".omega", "must be > 0");
        mode.g = number(require(m, "g", path), path + ".g");
        if (m.contains("nbar") == m.contains("temperature")) fail(path, "give exactly one of nbar or temperature");
        if (m.contains("nbar")) {
            mode.nbar = number(m.at("nbar"), path + ".nbar");
            if (*mode.nbar < 0.0) fail(path + ".nbar", "must be >= 0");
        } else {
            mode.temperature = number(m.at("temperature"), path + ".temperature");
            if (*mode.temperature < 0.0) fail(path + ".temperature", "must be >= 0");
        }
        out.push_back(mode);
    }
    return out;
}

InteractionConfig parse_interaction(const json& doc) {
    check_keys(doc, "interaction", {"alphas", "eigenbasis", "unitary"});
    InteractionConfig out;
    const json& alphas = require(doc, "alphas", "interaction");
    if (!alphas.is_array() || alphas.size() != 4) fail("interaction.alphas", "expected an array of 4 numbers");
    for (int i = 0; i < 4; ++i) out.alphas[i] = number(alphas[i], "interaction.alphas[" + std::to_string(i) + "]");

    const json& basis = require(doc, "eigenbasis", "interaction");
    const std::string name = basis.is_string() ? basis.get<std::string>() : "";
    if (name == "factorized") out.basis = Eigenbasis::Factorized;
    else if (name == "bell") out.basis = Eigenbasis::Bell;
    else if (name == "general") out.basis = Eigenbasis::General;
    else fail("interaction.eigenbasis", "expected one of factorized, bell, general");

    if (out.basis == Eigenbasis::General) {
        const json& u = require(doc, "unitary", "interaction");
        if (!u.is_array() || u.size() != 4) fail("interaction.unitary", "expected 4 rows");
        Eigen::Matrix4cd m;
        for (int r = 0; r < 4; ++r) {
            const std::string rp = "interaction.unitary[" + std::to_string(r) + "]";
            if (!u[r].is_array() || u[r].size() != 4) fail(rp, "expected 4 entries");
            for (int c = 0; c < 4; ++c) {
                const std::string cp = rp + "[" + std::to_string(c) + "]";
                const json& z = u[r][c];
                if (!z.is_array() || z.size() != 2) fail(cp, "expected [re, im]");
                m(r, c) = Complex(number(z[0], cp + "[0]"), number(z[1], cp + "[1]"));
            }
        }
        const double err = (m.adjoint() * m - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
        if (!(err <= 1e-12)) fail("interaction.unitary", "columns must be orthonormal to 1e-12");
        out.unitary = m;
    } else if (doc.contains("unitary")) {
        fail("interaction.unitary", "only allowed with eigenbasis general");
    }
    return out;
}

TimeGrid parse_time_grid(const json& doc) {
    check_keys(doc, "time_grid", {"start", "stop", "steps"});
    TimeGrid g;
    g.start = number(require(doc, "start", "time_grid"), "time_grid.start");
    g.stop = number(require(doc, "stop", "time_grid"), "time_grid.stop");
    const long long steps = integer(require(doc, "steps", "time_grid"), "time_grid.steps");
    if (steps < 1 || steps > 10'000'000) fail("time_grid.steps", "must be in [1, 1e7]");
    g.steps = static_cast<int>(steps);
    if (g.stop < g.start) fail("time_grid.stop", "must be >= start");
    return g;
}

OracleConfig parse_oracle(const json& doc, std::size_t modes) {
    check_keys(doc, "oracle", {"cutoffs", "bath_state", "tolerance"});
    OracleConfig o;
    if (doc.contains("cutoffs") && !doc.at("cutoffs").is_null()) {
        const json& c = doc.at("cutoffs");
        if (!c.is_array() || c.size() != modes) fail("oracle.cutoffs", "expected one cutoff per bath mode");
        std::vector<int> dims;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const long long d = integer(c[i], "oracle.cutoffs[" + std::to_string(i) + "]");
            if (d < 2 || d > 100000) fail("oracle.cutoffs[" + std::to_string(i) + "]", "must be in [2, 1e5]");
            dims.push_back(static_cast<int>(d));
        }
        o.cutoffs = dims;
    }
    if (doc.contains("bath_state")) {
        const json& s = doc.at("bath_state");
        const std::string name = s.is_string() ? s.get<std::string>() : "";
        if (name == "vacuum") o.bath_state = oracle::BathState::Kind::Vacuum;
        else if (name == "thermal") o.bath_state = oracle::BathState::Kind::ThermalDiagonal;
        else fail("oracle.bath_state", "expected vacuum or thermal");
    }
    if (doc.contains("tolerance")) {
        o.tolerance = number(doc.at("tolerance"), "oracle.tolerance");
        if (o.tolerance <= 0.0) fail("oracle.tolerance", "must be > 0");
    }
    return o;
}

SearchConfig parse_search(const json& doc) {
    check_keys(doc, "search", {"k1_max", "omega0"});
    SearchConfig s;
    if (doc.contains("k1_max")) {
        s.k1_max = integer(doc.at("k1_max"), "search.k1_max");
        if (s.k1_max < 0) fail("search.k1_max", "must be >= 0");
    }
    if (doc.contains("omega0") && !doc.at("omega0").is_null()) {
        s.omega0 = number(doc.at("omega0"), "search.omega0");
        if (*s.omega0 <= 0.0) fail("search.omega0", "must be > 0");
    }
    return s;
}

DesignConfig parse_design(const json& doc, std::size_t modes) {
    check_keys(doc, "design", {"k1", "k2"});
    DesignConfig d;
    d.k1 = integer(require(doc, "k1", "design"), "design.k1");
    const json& k2 = require(doc, "k2", "design");
    if (!k2.is_array() || k2.size() != modes) fail("design.k2", "expected one integer per bath mode");
    for (std::size_t i = 0; i < k2.size(); ++i) d.k2.push_back(integer(k2[i], "design.k2[" + std::to_string(i) + "]"));
    return d;
}

OutputConfig parse_output(const json& doc) {
    check_keys(doc, "output", {"directory", "formats"});
    OutputConfig o;
    if (doc.contains("directory")) {
        if (!doc.at("directory").is_string()) fail("output.directory", "expected a string");
        o.directory = doc.at("directory").get<std::string>();
    }
    if (doc.contains("formats")) {
        const json& f = doc.at("formats");
        if (!f.is_array()) fail("output.formats", "expected an array");
        o.formats.clear();
        for (std::size_t i = 0; i < f.size(); ++i) {
            const std::string name = f[i].is_string() ? f[i].get<std::string>() : "";
            if (name != "csv" && name != "json") fail("output.formats[" + std::to_string(i) + "]", "expected csv or json");
            o.formats.push_back(name);
        }
    }
    return o;
}

} // namespace

std::vector<double> TimeGrid::points() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        out.push_back(k + 1 == steps && steps > 1 ? stop : start + (stop - start) * k / std::max(steps - 1, 1));
    }
    return out;
}

BathSpec RunConfig::bath_spec() const {
    std::vector<BathMode> modes;
    for (const auto& m : bath) {
        const double nbar = m.nbar ? *m.nbar : bose_occupation(m.omega, *m.temperature);
        modes.push_back({m.omega, m.g, nbar});
    }
    return BathSpec(std::move(modes));
}

InteractionSpec RunConfig::interaction_spec() const {
    switch (interaction.basis) {
    case Eigenbasis::Factorized: return InteractionSpec::factorized(interaction.alphas);
    case Eigenbasis::Bell: return InteractionSpec::bell(interaction.alphas);
    case Eigenbasis::General: return InteractionSpec::general(interaction.alphas, *interaction.unitary);
    }
    throw ConfigError("interaction.eigenbasis: unsupported");
}

QubitState RunConfig::initial_state() const { return QubitState(initial_s); }

std::vector<QubitState> RunConfig::probe_states() const {
    if (probe) return {QubitState(*probe)};
    return {QubitState(1, 0, 0), QubitState(-1, 0, 0), QubitState(0, 1, 0),
            QubitState(0, -1, 0), QubitState(0, 0, 1), QubitState(0, 0, -1)};
}

bool RunConfig::wants(const std::string& format) const {
    return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

RunConfig parse_config(const json& doc) {
    check_keys(doc, "config",
               {"bath", "interaction", "initial_s", "probe", "time_grid", "oracle", "search", "design", "reachable",
                "output"});
    RunConfig c;
    c.bath = parse_bath(require(doc, "bath", "config"));
    c.interaction = parse_interaction(require(doc, "interaction", "config"));
    c.initial_s = bloch_vector(require(doc, "initial_s", "config"), "initial_s");
    if (doc.contains("probe")) {
        const json& p = doc.at("probe");
        if (p.is_string()) {
            if (p.get<std::string>() != "sweep") fail("probe", "expected a Bloch vector or \"sweep\"");
        } else {
            c.probe = bloch_vector(p, "probe");
        }
    }
    if (doc.contains("time_grid")) c.time_grid = parse_time_grid(doc.at("time_grid"));
    if (doc.contains("oracle")) c.oracle = parse_oracle(doc.at("oracle"), c.bath.size());
    if (doc.contains("search")) c.search = parse_search(doc.at("search"));
    if (doc.contains("design") && !doc.at("design").is_null()) c.design = parse_design(doc.at("design"), c.bath.size());
    if (doc.contains("reachable")) {
        const json& r = doc.at("reachable");
        check_keys(r, "reachable", {"samples"});
        if (r.contains("samples")) {
            const long long n = integer(r.at("samples"), "reachable.samples");
            if (n < 1 || n > 1'000'000) fail("reachable.samples", "must be in [1, 1e6]");
            c.reachable_samples = static_cast<int>(n);
        }
    }
    if (doc.contains("output")) c.output = parse_output(doc.at("output"));

    // Cross-check against the library's own invariants.
    try {
        (void)c.bath_spec();
        (void)c.interaction_spec();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunConfig& c) {
    json doc;
    json modes = json::array();
    for (const auto& m : c.bath) {
        json mode{{"omega", m.omega}, {"g", m.g}};
        if (m.nbar) mode["nbar"] = *m.nbar;
        else mode["temperature"] = *m.temperature;
        modes.push_back(mode);
    }
    doc["bath"] = {{"modes", modes}};

    json interaction{{"alphas", c.interaction.alphas}, {"eigenbasis", basis_name(c.interaction.basis)}};
    if (c.interaction.unitary) {
        json rows = json::array();
        for (int r = 0; r < 4; ++r) {
            json row = json::array();
            for (int col = 0; col < 4; ++col) {
                const Complex z = (*c.interaction.unitary)(r, col);
                row.push_back({z.real(), z.imag()});
            }
            rows.push_back(row);
        }
        interaction["unitary"] = rows;
    }
    doc["interaction"] = interaction;
    doc["initial_s"] = {c.initial_s.x(), c.initial_s.y(), c.initial_s.z()};
    if (c.probe) doc["probe"] = {c.probe->x(), c.probe->y(), c.probe->z()};
    else doc["probe"] = "sweep";
    doc["time_grid"] = {{"start", c.time_grid.start}, {"stop", c.time_grid.stop}, {"steps", c.time_grid.steps}};

    json oracle{{"bath_state", c.oracle.bath_state == oracle::BathState::Kind::Vacuum ? "vacuum" : "thermal"},
                {"tolerance", c.oracle.tolerance}};
    oracle["cutoffs"] = c.oracle.cutoffs ? json(*c.oracle.cutoffs) : json(nullptr);
    doc["oracle"] = oracle;

    json search{{"k1_max", c.search.k1_max}};
    search["omega0"] = c.search.omega0 ? json(*c.search.omega0) : json(nullptr);
    doc["search"] = search;
    doc["design"] = c.design ? json{{"k1", c.design->k1}, {"k2", c.design->k2}} : json(nullptr);
    doc["reachable"] = {{"samples", c.reachable_samples}};
    doc["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
    return doc;
}

std::string config_hash(const RunConfig& config) {
    const std::string text = to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

} // namespace envctrl::cli
