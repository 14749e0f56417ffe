// config.hpp — run configuration: JSON parsing with validation, defaults
// taken from the reference simulations, and canonical serialization (parse →
// serialize → parse is the identity).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsl/errors.hpp"

namespace qsl::cli {

struct SbmParams {
    double delta{0.2};
    double xi{0.1};
    double omega_c{1.0};
    double omega_max{5.0};      // defaults to 5 ω_c
    std::uint64_t n_osc{200};
    double temperature{1.0};

    bool operator==(const SbmParams&) const = default;
};

struct FmoParams {
    double lambda_d_cm{35.0};   // reorganization energy, cm⁻¹
    double tau_c_fs{50.0};      // bath characteristic time, fs
    std::uint64_t n_osc{40};
    double temperature_k{300.0};
    double omega_max{0.2};      // rad/fs; defaults to 10/τ_c
    std::string site_table_file{};
    int initial_site{1};        // 1-based site label
    bool subtract_min_energy{true};

    bool operator==(const FmoParams&) const = default;
};

struct GridParams {
    double dt{0.0};
    double tau{0.0};

    bool operator==(const GridParams&) const = default;
};

struct EnsembleParams {
    std::uint64_t n_traj{10000};
    std::uint64_t master_seed{1};
    bool deterministic{true};
    unsigned workers{0};

    bool operator==(const EnsembleParams&) const = default;
};

struct SweepParams {
    std::string axis;           // coupling | tau | temperature
    std::vector<double> values;

    bool operator==(const SweepParams&) const = default;
};

struct OutputParams {
    std::string dir{"."};
    bool emit_series{false};

    bool operator==(const OutputParams&) const = default;
};

struct RunConfig {
    std::string model{"sbm"};    // sbm | fmo
    std::string method{"decide"};  // decide | nm_bre | m_bre | isolated
    SbmParams sbm;
    FmoParams fmo;
    GridParams grid;
    EnsembleParams ensemble;
    std::optional<SweepParams> sweep;
    OutputParams output;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

using json = nlohmann::ordered_json;

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) { ok = true; break; }
        if (!ok) throw ValidationError("config: unknown key \"" + key + "\" in " + where);
    }
}

template <class T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("config: field \"" + where + "." + key + "\": " + e.what());
    }
}

} // namespace detail

inline void validate(const RunConfig& c) {
    auto fail = [](const std::string& msg) { throw ValidationError("config: " + msg); };

    if (c.model != "sbm" && c.model != "fmo") fail("model must be \"sbm\" or \"fmo\"");
    if (c.method != "decide" && c.method != "nm_bre" && c.method != "m_bre" &&
        c.method != "isolated")
        fail("method must be one of decide, nm_bre, m_bre, isolated");
    if (c.model == "fmo" && c.method != "decide")
        fail("method \"" + c.method + "\" supports the sbm model only");

    if (!(c.grid.dt > 0.0)) fail("grid.dt must be > 0");
    if (!(c.grid.tau > 0.0)) fail("grid.tau must be > 0");
    if (c.grid.tau < c.grid.dt) fail("grid.tau must be >= grid.dt");

    if (c.model == "sbm") {
        if (!(c.sbm.delta > 0.0)) fail("sbm.delta must be > 0");
        if (c.sbm.xi < 0.0) fail("sbm.xi must be >= 0");
        if (!(c.sbm.omega_c > 0.0)) fail("sbm.omega_c must be > 0");
        if (!(c.sbm.omega_max > 0.0)) fail("sbm.omega_max must be > 0");
        if (c.sbm.n_osc < 1) fail("sbm.n_osc must be >= 1");
        if (!(c.sbm.temperature > 0.0)) fail("sbm.temperature must be > 0");
    } else {
        if (c.fmo.lambda_d_cm < 0.0) fail("fmo.lambda_d_cm must be >= 0");
        if (!(c.fmo.tau_c_fs > 0.0)) fail("fmo.tau_c_fs must be > 0");
        if (c.fmo.n_osc < 1) fail("fmo.n_osc must be >= 1");
        if (!(c.fmo.temperature_k > 0.0)) fail("fmo.temperature_k must be > 0");
        if (!(c.fmo.omega_max > 0.0)) fail("fmo.omega_max must be > 0");
        if (c.fmo.initial_site < 1 || c.fmo.initial_site > 7)
            fail("fmo.initial_site must be in 1..7");
    }

    if (c.ensemble.n_traj < 1) fail("ensemble.n_traj must be >= 1");

    if (c.sweep) {
        const auto& s = *c.sweep;
        if (s.axis != "coupling" && s.axis != "tau" && s.axis != "temperature")
            fail("sweep.axis must be coupling, tau, or temperature");
        if (s.axis == "coupling" && c.model != "sbm")
            fail("sweep.axis \"coupling\" supports the sbm model only");
        if (s.values.empty()) fail("sweep.values must not be empty");
        for (double v : s.values) {
            if (s.axis == "coupling" && v < 0.0) fail("sweep coupling values must be >= 0");
            if (s.axis == "tau" && !(v > 0.0)) fail("sweep tau values must be > 0");
            if (s.axis == "temperature" && !(v > 0.0)) fail("sweep temperature values must be > 0");
        }
    }
}

// Parses a JSON configuration document, fills model-caption defaults for
// omitted fields, and validates.
inline RunConfig parse_config(const std::string& text) {
    using detail::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config: top-level document must be an object");

    detail::reject_unknown_keys(
        j, {"model", "method", "sbm", "fmo", "grid", "ensemble", "sweep", "output"}, "top level");

    RunConfig c;
    detail::read_field(j, "model", c.model, "");
    detail::read_field(j, "method", c.method, "");

    bool sbm_omega_max_given = false;
    if (j.contains("sbm")) {
        const auto& js = j.at("sbm");
        detail::reject_unknown_keys(
            js, {"delta", "xi", "omega_c", "omega_max", "n_osc", "temperature"}, "sbm");
        detail::read_field(js, "delta", c.sbm.delta, "sbm");
        detail::read_field(js, "xi", c.sbm.xi, "sbm");
        detail::read_field(js, "omega_c", c.sbm.omega_c, "sbm");
        sbm_omega_max_given = js.contains("omega_max");
        detail::read_field(js, "omega_max", c.sbm.omega_max, "sbm");
        detail::read_field(js, "n_osc", c.sbm.n_osc, "sbm");
        detail::read_field(js, "temperature", c.sbm.temperature, "sbm");
    }
    if (!sbm_omega_max_given) c.sbm.omega_max = 5.0 * c.sbm.omega_c;

    bool fmo_omega_max_given = false;
    if (j.contains("fmo")) {
        const auto& jf = j.at("fmo");
        detail::reject_unknown_keys(jf,
                                    {"lambda_d_cm", "tau_c_fs", "n_osc", "temperature_k",
                                     "omega_max", "site_table_file", "initial_site",
                                     "subtract_min_energy"},
                                    "fmo");
        detail::read_field(jf, "lambda_d_cm", c.fmo.lambda_d_cm, "fmo");
        detail::read_field(jf, "tau_c_fs", c.fmo.tau_c_fs, "fmo");
        detail::read_field(jf, "n_osc", c.fmo.n_osc, "fmo");
        detail::read_field(jf, "temperature_k", c.fmo.temperature_k, "fmo");
        fmo_omega_max_given = jf.contains("omega_max");
        detail::read_field(jf, "omega_max", c.fmo.omega_max, "fmo");
        detail::read_field(jf, "site_table_file", c.fmo.site_table_file, "fmo");
        detail::read_field(jf, "initial_site", c.fmo.initial_site, "fmo");
        detail::read_field(jf, "subtract_min_energy", c.fmo.subtract_min_energy, "fmo");
    }
    if (!fmo_omega_max_given) c.fmo.omega_max = 10.0 / c.fmo.tau_c_fs;

    if (j.contains("grid")) {
        const auto& jg = j.at("grid");
        detail::reject_unknown_keys(jg, {"dt", "tau"}, "grid");
        detail::read_field(jg, "dt", c.grid.dt, "grid");
        detail::read_field(jg, "tau", c.grid.tau, "grid");
    }
    if (c.grid.dt == 0.0) c.grid.dt = (c.model == "fmo") ? 1.0 : 0.005;
    if (c.grid.tau == 0.0) c.grid.tau = (c.model == "fmo") ? 1000.0 : 1.0;

    if (j.contains("ensemble")) {
        const auto& je = j.at("ensemble");
        detail::reject_unknown_keys(je, {"n_traj", "master_seed", "deterministic", "workers"},
                                    "ensemble");
        detail::read_field(je, "n_traj", c.ensemble.n_traj, "ensemble");
        detail::read_field(je, "master_seed", c.ensemble.master_seed, "ensemble");
        detail::read_field(je, "deterministic", c.ensemble.deterministic, "ensemble");
        detail::read_field(je, "workers", c.ensemble.workers, "ensemble");
    }

    if (j.contains("sweep")) {
        const auto& jw = j.at("sweep");
        detail::reject_unknown_keys(jw, {"axis", "values"}, "sweep");
        SweepParams s;
        detail::read_field(jw, "axis", s.axis, "sweep");
        detail::read_field(jw, "values", s.values, "sweep");
        c.sweep = std::move(s);
    }

    if (j.contains("output")) {
        const auto& jo = j.at("output");
        detail::reject_unknown_keys(jo, {"dir", "emit_series"}, "output");
        detail::read_field(jo, "dir", c.output.dir, "output");
        detail::read_field(jo, "emit_series", c.output.emit_series, "output");
    }

    validate(c);
    return c;
}

// Canonical serialization of the fully resolved configuration.
inline std::string serialize_config(const RunConfig& c, int indent = 2) {
    using detail::json;
    json j;
    j["model"] = c.model;
    j["method"] = c.method;
    j["sbm"] = {{"delta", c.sbm.delta},
                {"xi", c.sbm.xi},
                {"omega_c", c.sbm.omega_c},
                {"omega_max", c.sbm.omega_max},
                {"n_osc", c.sbm.n_osc},
                {"temperature", c.sbm.temperature}};
    j["fmo"] = {{"lambda_d_cm", c.fmo.lambda_d_cm},
                {"tau_c_fs", c.fmo.tau_c_fs},
                {"n_osc", c.fmo.n_osc},
                {"temperature_k", c.fmo.temperature_k},
                {"omega_max", c.fmo.omega_max},
                {"site_table_file", c.fmo.site_table_file},
                {"initial_site", c.fmo.initial_site},
                {"subtract_min_energy", c.fmo.subtract_min_energy}};
    j["grid"] = {{"dt", c.grid.dt}, {"tau", c.grid.tau}};
    j["ensemble"] = {{"n_traj", c.ensemble.n_traj},
                     {"master_seed", c.ensemble.master_seed},
                     {"deterministic", c.ensemble.deterministic},
                     {"workers", c.ensemble.workers}};
    if (c.sweep) j["sweep"] = {{"axis", c.sweep->axis}, {"values", c.sweep->values}};
    j["output"] = {{"dir", c.output.dir}, {"emit_series", c.output.emit_series}};
    return j.dump(indent);
}

} // namespace qsl::cli
