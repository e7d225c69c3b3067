// run_config.cpp — JSON parsing, validation and serialization of run configurations

#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "floquet_if/errors.hpp"
#include "floquet_if/operators.hpp"

namespace floquet::app {

using nlohmann::json;

namespace {

/// Reads one JSON object, tracking the dotted path for error messages and rejecting unknown keys.
class Section {
public:
    Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
        if (!doc_.is_object()) throw InputError("config field '" + path_ + "' must be an object");
    }

    /// Rejects keys that were never queried.
    void finish() const {
        for (const auto& [key, value] : doc_.items())
            if (!seen_.count(key)) throw InputError("config field '" + name(key) + "' is not recognized");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return doc_.contains(key);
    }

    Section sub(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Section(doc_.contains(key) ? doc_.at(key) : empty, name(key));
    }

    void number(const std::string& key, double& out, bool positive = false, bool nonnegative = false) {
        if (!has(key)) return;
        const json& v = doc_.at(key);
        if (!v.is_number()) fail(key, "must be a number");
        out = v.get<double>();
        check_value(key, out, positive, nonnegative);
    }

    template <typename Int>
    void integer(const std::string& key, Int& out, Int minimum) {
        if (!has(key)) return;
        const json& v = doc_.at(key);
        if (!v.is_number_integer()) fail(key, "must be an integer");
        const auto x = v.get<long long>();
        if (x < minimum) fail(key, "must be at least " + std::to_string(minimum));
        out = static_cast<Int>(x);
    }

    void boolean(const std::string& key, bool& out) {
        if (!has(key)) return;
        const json& v = doc_.at(key);
        if (!v.is_boolean()) fail(key, "must be true or false");
        out = v.get<bool>();
    }

    void string(const std::string& key, std::string& out, const std::vector<std::string>& allowed = {}) {
        if (!has(key)) return;
        const json& v = doc_.at(key);
        if (!v.is_string()) fail(key, "must be a string");
        out = v.get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), out) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
            fail(key, "must be one of " + list + ", got '" + out + "'");
        }
    }

    /// Strictly increasing list of finite positive (or non-negative) numbers.
    void grid(const std::string& key, std::vector<double>& out, bool positive) {
        if (!has(key)) return;
        const json& v = doc_.at(key);
        if (!v.is_array()) fail(key, "must be an array of numbers");
        out.clear();
        for (const auto& x : v) {
            if (!x.is_number()) fail(key, "must be an array of numbers");
            out.push_back(x.get<double>());
            check_value(key, out.back(), positive, !positive);
        }
        for (std::size_t i = 1; i < out.size(); ++i)
            if (!(out[i] > out[i - 1])) fail(key, "must be strictly increasing");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw InputError("config field '" + name(key) + "' " + what);
    }

private:
    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void check_value(const std::string& key, double x, bool positive, bool nonnegative) const {
        if (!std::isfinite(x)) fail(key, "must be finite");
        if (positive && !(x > 0.0)) fail(key, "must be positive");
        if (nonnegative && x < 0.0) fail(key, "must be non-negative");
    }

    const json& doc_;
    std::string path_;
    std::set<std::string> seen_;
};

const std::vector<std::string> kDriveNames{"none", "longitudinal", "transversal"};

Matrix pure_state(const Vector& psi) { return psi * psi.adjoint(); }

}  // namespace

RunConfig parse_config(const json& doc) {
    RunConfig c;
    Section root(doc, "");
    {
        auto s = root.sub("bath");
        s.number("alpha", c.bath.alpha, false, true);
        s.number("omega_c", c.bath.omega_c, true);
        s.number("temperature", c.bath.temperature, false, true);
        s.integer("fit_terms", c.bath.fit_terms, 1);
        s.number("window", c.bath.window, false, true);
        s.number("sample_step", c.bath.sample_step, false, true);
        s.finish();
    }
    {
        auto s = root.sub("embedding");
        s.integer("cutoff", c.embedding.cutoff, 2);
        s.integer("excitation_cap", c.embedding.excitation_cap, -1);
        s.number("memory_budget_gib", c.embedding.memory_budget_gib, true);
        s.finish();
    }
    {
        auto s = root.sub("system");
        s.string("preset", c.system.preset, {"single-spin", "two-spin"});
        s.number("omega", c.system.omega, false, true);
        std::string drive = model::to_string(c.system.drive);
        s.string("drive_type", drive, kDriveNames);
        c.system.drive = model::parse_drive_type(drive);
        s.number("eps_d", c.system.eps_d);
        s.number("omega_d", c.system.omega_d, false, true);
        s.number("phase", c.system.phase);
        if (c.system.preset == "single-spin")
            s.string("initial_state", c.system.initial_state, {"up", "down", "plus", "minus"});
        else
            s.string("initial_state", c.system.initial_state, {"00", "01", "10", "11"});
        if (c.system.initial_state.empty()) c.system.initial_state = c.system.preset == "single-spin" ? "up" : "00";
        if (c.system.preset == "two-spin" && c.system.drive == model::DriveType::transversal && c.system.eps_d != 0.0)
            s.fail("drive_type", "must be longitudinal for the two-spin preset");
        s.finish();
    }
    {
        auto s = root.sub("grid");
        s.number("dt", c.grid.dt, true);
        s.integer("n_steps", c.grid.n_steps, 0L);
        s.number("t_final", c.grid.t_final, false, true);
        s.number("tau_max", c.grid.tau_max, true);
        s.integer("substeps", c.grid.substeps, 1);
        s.string("method", c.grid.method, {"magnus4", "midpoint"});
        s.finish();
    }
    {
        auto s = root.sub("sweep");
        s.grid("omega_d", c.sweep.omega_d, true);
        s.grid("eps_d", c.sweep.eps_d, false);
        if (s.has("drive_types")) {
            const json& v = doc.at("sweep").at("drive_types");
            if (!v.is_array()) s.fail("drive_types", "must be an array of strings");
            for (const auto& x : v) {
                if (!x.is_string()) s.fail("drive_types", "must be an array of strings");
                const auto name = x.get<std::string>();
                if (name != "longitudinal" && name != "transversal")
                    s.fail("drive_types", "entries must be longitudinal or transversal, got '" + name + "'");
                c.sweep.drives.push_back(model::parse_drive_type(name));
            }
        }
        s.finish();
    }
    {
        auto s = root.sub("steady");
        s.string("method", c.steady.method, {"automatic", "spectral", "power"});
        s.number("power_tolerance", c.steady.power_tolerance, true);
        s.finish();
    }
    {
        auto s = root.sub("heat");
        s.number("omega_max", c.heat.omega_max, true);
        s.integer("n_omega", c.heat.n_omega, 1);
        s.boolean("taper", c.heat.taper);
        s.integer("n_max", c.heat.n_max, 0);
        s.number("decay_threshold", c.heat.decay_threshold, true);
        s.integer("max_doublings", c.heat.max_doublings, 0);
        s.finish();
    }
    {
        auto s = root.sub("spectral");
        s.integer("scan_points", c.spectral.scan_points, 2);
        s.number("positivity_tolerance", c.spectral.positivity_tolerance, false, true);
        s.finish();
    }
    {
        auto s = root.sub("benchmark");
        s.grid("omega_d", c.benchmark.omega_d, true);
        s.number("dt_me", c.benchmark.dt_me, true);
        s.finish();
    }
    {
        auto s = root.sub("output");
        s.string("directory", c.output.directory);
        if (c.output.directory.empty()) s.fail("directory", "must not be empty");
        s.finish();
    }
    {
        auto s = root.sub("cache");
        s.string("path", c.cache.path);
        s.boolean("enable", c.cache.enable);
        s.finish();
    }
    root.integer("workers", c.workers, 0);
    root.finish();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw InputError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunConfig& c) {
    json j;
    j["bath"] = {{"alpha", c.bath.alpha},         {"omega_c", c.bath.omega_c},
                 {"temperature", c.bath.temperature}, {"fit_terms", c.bath.fit_terms},
                 {"window", c.bath.window},       {"sample_step", c.bath.sample_step}};
    j["embedding"] = {{"cutoff", c.embedding.cutoff},
                      {"excitation_cap", c.embedding.excitation_cap},
                      {"memory_budget_gib", c.embedding.memory_budget_gib}};
    j["system"] = {{"preset", c.system.preset},         {"omega", c.system.omega},
                   {"drive_type", model::to_string(c.system.drive)}, {"eps_d", c.system.eps_d},
                   {"omega_d", c.system.omega_d},       {"phase", c.system.phase},
                   {"initial_state", c.system.initial_state}};
    j["grid"] = {{"dt", c.grid.dt},           {"n_steps", c.grid.n_steps},   {"t_final", c.grid.t_final},
                 {"tau_max", c.grid.tau_max}, {"substeps", c.grid.substeps}, {"method", c.grid.method}};
    json drives = json::array();
    for (auto d : c.sweep.drives) drives.push_back(model::to_string(d));
    j["sweep"] = {{"omega_d", c.sweep.omega_d}, {"eps_d", c.sweep.eps_d}, {"drive_types", drives}};
    j["steady"] = {{"method", c.steady.method}, {"power_tolerance", c.steady.power_tolerance}};
    j["heat"] = {{"omega_max", c.heat.omega_max},
                 {"n_omega", c.heat.n_omega},
                 {"taper", c.heat.taper},
                 {"n_max", c.heat.n_max},
                 {"decay_threshold", c.heat.decay_threshold},
                 {"max_doublings", c.heat.max_doublings}};
    j["spectral"] = {{"scan_points", c.spectral.scan_points},
                     {"positivity_tolerance", c.spectral.positivity_tolerance}};
    j["benchmark"] = {{"omega_d", c.benchmark.omega_d}, {"dt_me", c.benchmark.dt_me}};
    j["output"] = {{"directory", c.output.directory}};
    j["cache"] = {{"path", c.cache.path}, {"enable", c.cache.enable}};
    j["workers"] = c.workers;
    return j;
}

bath::BathSpec RunConfig::bath_spec() const {
    bath::BathSpec spec;
    spec.density = bath::SpectralDensityOhmic{bath.alpha, bath.omega_c};
    spec.temperature = bath.temperature;
    spec.validate();
    return spec;
}

bath::FitOptions RunConfig::fit_options() const {
    bath::FitOptions fo;
    fo.terms = bath.fit_terms;
    fo.window = bath.window;
    fo.sample_step = bath.sample_step;
    return fo;
}

embedding::PseudomodeSpec RunConfig::pseudomode_spec() const {
    embedding::PseudomodeSpec pm;
    pm.default_cutoff = embedding.cutoff;
    pm.excitation_cap = embedding.excitation_cap;
    pm.memory_budget_bytes = static_cast<std::size_t>(embedding.memory_budget_gib * double(std::size_t{1} << 30));
    return pm;
}

model::ChannelOptions RunConfig::channel_options() const {
    model::ChannelOptions co;
    co.method = grid.method == "midpoint" ? model::PropagatorMethod::midpoint : model::PropagatorMethod::magnus4;
    co.substeps = grid.substeps;
    return co;
}

model::SystemModel RunConfig::system_model(double omega_d, double eps_d) const {
    if (system.preset == "two-spin") return model::two_spin(system.omega, eps_d, omega_d, system.phase);
    const bool driven = eps_d != 0.0 && omega_d > 0.0 && system.drive != model::DriveType::none;
    return model::single_spin(system.omega, driven ? system.drive : model::DriveType::none, driven ? eps_d : 0.0,
                              driven ? omega_d : 0.0, system.phase);
}

Matrix RunConfig::initial_state() const {
    const double r = 1.0 / std::sqrt(2.0);
    if (system.preset == "single-spin") {
        Vector psi(2);
        if (system.initial_state == "up") psi << 1.0, 0.0;
        else if (system.initial_state == "down") psi << 0.0, 1.0;
        else if (system.initial_state == "plus") psi << r, r;
        else psi << r, -r;
        return pure_state(psi);
    }
    Vector psi = Vector::Zero(4);
    psi(std::stoi(system.initial_state, nullptr, 2)) = 1.0;
    return pure_state(psi);
}

long RunConfig::quench_steps(double dt) const {
    return grid.n_steps > 0 ? grid.n_steps : static_cast<long>(std::llround(grid.t_final / dt));
}

}  // namespace floquet::app
