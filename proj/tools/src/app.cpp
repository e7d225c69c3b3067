// app.cpp — Command implementations of the floquet-if tool

#include "app.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "floquet_if/bath.hpp"
#include "floquet_if/embedding.hpp"
#include "floquet_if/entanglement.hpp"
#include "floquet_if/errors.hpp"
#include "floquet_if/floquet.hpp"
#include "floquet_if/if_cache.hpp"
#include "floquet_if/observables.hpp"
#include "floquet_if/operators.hpp"
#include "floquet_if/redfield.hpp"
#include "run_config.hpp"

#ifndef FLOQUET_IF_VERSION
#define FLOQUET_IF_VERSION "unknown"
#endif

namespace floquet::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kRedfieldVariant =
    "time-local second-order master equation in the Magnus frame; memory kernel integrated in closed form "
    "from the exponential fit; no initial-slip correction; RK4 integration";

/// Runs fn(i) for i in [0, n) on a fixed pool; results are stored by index, so the order is deterministic.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
    };
    const int w = std::clamp<int>(workers, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
    if (w == 1) {
        work();
        return;
    }
    std::vector<std::jthread> pool;
    for (int k = 0; k < w; ++k) pool.emplace_back(work);
}

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

/// Observable columns for the configured preset.
struct ObservableSet {
    std::vector<std::string> names;
    std::function<std::vector<double>(const Matrix&)> eval;
};

ObservableSet observables_for(const RunConfig& cfg) {
    if (cfg.system.preset == "single-spin") {
        return {{"sx", "sy", "sz"}, [](const Matrix& r) {
                    return std::vector<double>{ops::expectation(ops::pauli_x(), r).real(),
                                               ops::expectation(ops::pauli_y(), r).real(),
                                               ops::expectation(ops::pauli_z(), r).real()};
                }};
    }
    const Matrix s = 0.5 * (ops::on_qubit_a(ops::pauli_z()) + ops::on_qubit_b(ops::pauli_z()));
    const Matrix singlet = ops::singlet_projector();
    return {{"concurrence", "s", "singlet_population"}, [s, singlet](const Matrix& r) {
                double c;
                try {
                    c = obs::concurrence(r);
                } catch (const InputError&) {
                    c = std::numeric_limits<double>::quiet_NaN();
                }
                return std::vector<double>{c, ops::expectation(s, r).real(), ops::expectation(singlet, r).real()};
            }};
}

engine::SteadyStateMethod steady_method(const std::string& name) {
    if (name == "spectral") return engine::SteadyStateMethod::spectral;
    if (name == "power") return engine::SteadyStateMethod::power;
    return engine::SteadyStateMethod::automatic;
}

std::string single_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

class RunContext {
public:
    RunContext(RunConfig cfg, fs::path out, int workers, bool use_cache, std::ostream& log)
        : cfg_(std::move(cfg)), out_(std::move(out)), workers_(workers), log_(log), spec_(cfg_.bath_spec()) {
        fs::create_directories(out_);
        if (use_cache) cache_ = std::make_unique<cache::IfCache>(cfg_.cache.path);
    }

    const RunConfig& config() const { return cfg_; }
    int workers() const { return workers_; }
    const bath::BathSpec& bath_spec() const { return spec_; }
    std::ostream& log() { return log_; }
    json& results() { return results_; }

    fs::path artifact(const std::string& name) {
        artifacts_.push_back(name);
        return out_ / name;
    }

    const bath::ExponentialBathFit& fit() {
        std::lock_guard<std::mutex> lock(mu_);
        if (!fit_) {
            log_ << "fitting bath correlation with " << cfg_.bath.fit_terms << " exponentials\n";
            fit_ = bath::fit_exponentials(spec_, cfg_.fit_options());
        }
        return *fit_;
    }

    /// Semi-group IF for coupling S and step dt, memoized in memory and (optionally) on disk.
    std::shared_ptr<const embedding::SemiGroupIF> semigroup(const Matrix& S, double dt) {
        const auto& f = fit();
        std::lock_guard<std::mutex> lock(mu_);
        cache::IfRequest req{spec_, f, cfg_.pseudomode_spec(), S, dt};
        const std::string key = cache::cache_key(req);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::shared_ptr<const embedding::SemiGroupIF> sg;
        if (cache_) {
            bool hit = false;
            sg = cache_->get_or_build(req, &hit);
            ++(hit ? cache_hits_ : cache_misses_);
        } else {
            sg = cache::build_if(req);
        }
        log_ << "influence functional dt=" << format_number(dt) << " chi=" << sg->chi << '\n';
        memo_.emplace(key, sg);
        return sg;
    }

    engine::FloquetPropagator propagator(const model::SystemModel& m, const model::TrotterGrid& grid) {
        return engine::assemble_step_propagators(semigroup(m.coupling, grid.dt), m, grid, cfg_.channel_options());
    }

    engine::SteadyStateOptions steady_options() const {
        engine::SteadyStateOptions so;
        so.method = steady_method(cfg_.steady.method);
        so.power_tolerance = cfg_.steady.power_tolerance;
        so.reference = cfg_.initial_state();
        return so;
    }

    obs::CorrelationOptions correlation_options() const {
        obs::CorrelationOptions co;
        co.tau_max = cfg_.grid.tau_max;
        co.relative_decay_threshold = cfg_.heat.decay_threshold;
        co.max_doublings = cfg_.heat.max_doublings;
        co.n_max = cfg_.heat.n_max;
        return co;
    }

    void warn(const std::string& w) {
        std::lock_guard<std::mutex> lock(mu_);
        warnings_.push_back(single_line(w));
    }

    void write_metadata(const std::string& command) {
        json meta;
        meta["command"] = command;
        meta["version"] = FLOQUET_IF_VERSION;
        meta["config"] = to_json(cfg_);
        if (fit_) {
            json terms = json::array();
            for (const auto& t : fit_->terms)
                terms.push_back({{"amplitude", {t.amplitude.real(), t.amplitude.imag()}},
                                 {"rate", {t.rate.real(), t.rate.imag()}}});
            meta["fit"] = {{"hash", cache::fit_hash(*fit_)},
                           {"terms", terms},
                           {"max_error", fit_->max_error},
                           {"relative_error", fit_->relative_error()},
                           {"window", fit_->window},
                           {"sample_step", fit_->sample_step},
                           {"warnings", fit_->warnings}};
        }
        const auto so = steady_options();
        const auto co = correlation_options();
        meta["tolerances"] = {{"expm", 1e-12},
                              {"steady_unit_tolerance", so.unit_tolerance},
                              {"steady_cluster_tolerance", so.cluster_tolerance},
                              {"steady_power_tolerance", so.power_tolerance},
                              {"correlation_relative_decay_threshold", co.relative_decay_threshold},
                              {"correlation_max_doublings", co.max_doublings},
                              {"concurrence_clip_tolerance", 1e-6},
                              {"spectral_positivity_tolerance", cfg_.spectral.positivity_tolerance},
                              {"redfield_trace_tolerance", redfield::RedfieldOptions{}.trace_tolerance}};
        if (cache_) {
            for (const auto& w : cache_->warnings()) warnings_.push_back(single_line(w));
            meta["cache"] = {{"directory", cache_->directory().string()},
                             {"hits", cache_hits_},
                             {"misses", cache_misses_}};
        }
        meta["results"] = results_;
        meta["warnings"] = warnings_;
        std::sort(artifacts_.begin(), artifacts_.end());
        meta["artifacts"] = artifacts_;
        std::ofstream out(out_ / "metadata.json", std::ios::binary);
        out << meta.dump(2) << '\n';
        if (!out) throw Error("cannot write metadata.json");
    }

private:
    RunConfig cfg_;
    fs::path out_;
    int workers_;
    std::ostream& log_;
    bath::BathSpec spec_;
    std::optional<bath::ExponentialBathFit> fit_;
    std::unique_ptr<cache::IfCache> cache_;
    std::map<std::string, std::shared_ptr<const embedding::SemiGroupIF>> memo_;
    int cache_hits_ = 0;
    int cache_misses_ = 0;
    std::mutex mu_;
    json results_ = json::object();
    std::vector<std::string> warnings_;
    std::vector<std::string> artifacts_;
};

void require_preset(const RunConfig& cfg, const std::string& preset, const std::string& command) {
    if (cfg.system.preset != preset)
        throw InputError("config field 'system.preset' must be " + preset + " for " + command);
}

void write_trajectory(RunContext& ctx, const std::string& name, const engine::Trajectory& tr) {
    const auto set = observables_for(ctx.config());
    std::vector<std::string> header{"t"};
    header.insert(header.end(), set.names.begin(), set.names.end());
    CsvWriter csv(ctx.artifact(name), header);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        std::vector<double> row{tr.times[i]};
        for (double v : set.eval(tr.states[i])) row.push_back(v);
        csv.row(row);
    }
}

// ---------------------------------------------------------------------------

void cmd_fit_bath(RunContext& ctx) {
    const auto& fit = ctx.fit();
    {
        CsvWriter csv(ctx.artifact("fit.csv"), {"k", "re_amplitude", "im_amplitude", "re_rate", "im_rate"});
        for (std::size_t k = 0; k < fit.terms.size(); ++k) {
            const auto& t = fit.terms[k];
            csv.row(k, t.amplitude.real(), t.amplitude.imag(), t.rate.real(), t.rate.imag());
        }
    }
    {
        CsvWriter csv(ctx.artifact("fit_validation.csv"), {"t", "re_c", "im_c", "re_fit", "im_fit"});
        const int n = 401;
        for (int i = 0; i < n; ++i) {
            const double t = fit.window * i / (n - 1);
            const cd c = bath::bath_correlation(ctx.bath_spec(), t);
            const cd f = fit.evaluate(t);
            csv.row(t, c.real(), c.imag(), f.real(), f.imag());
        }
    }
    std::ofstream txt(ctx.artifact("fit.txt"), std::ios::binary);
    bath::write_fit(txt, fit, ctx.bath_spec());
    ctx.results() = {{"terms", fit.terms.size()},
                     {"max_error", fit.max_error},
                     {"relative_error", fit.relative_error()},
                     {"discarded_terms", fit.discarded.size()}};
}

void cmd_build_if(RunContext& ctx) {
    const auto m = ctx.config().system_model();
    const auto grid = model::TrotterGrid::for_model(m, ctx.config().grid.dt);
    const auto sg = ctx.semigroup(m.coupling, grid.dt);
    const auto diag = embedding::if_diagnostics(*sg, true);
    CsvWriter csv(ctx.artifact("if_singular_values.csv"), {"index", "singular_value"});
    for (Eigen::Index i = 0; i < diag.singular_values.size(); ++i) csv.row(i, diag.singular_values(i));
    ctx.results() = {{"dt", grid.dt},
                     {"chi", diag.chi},
                     {"spectral_radius", diag.spectral_radius},
                     {"trace_duality_residual", diag.trace_duality_residual},
                     {"boundary_overlap", diag.boundary_overlap},
                     {"construction_note", diag.construction_note}};
}

void cmd_quench(RunContext& ctx) {
    const auto& cfg = ctx.config();
    const auto m = cfg.system_model();
    const auto grid = model::TrotterGrid::for_model(m, cfg.grid.dt);
    const auto fp = ctx.propagator(m, grid);
    const long n = cfg.quench_steps(grid.dt);
    ctx.log() << "quench: " << n << " steps of " << format_number(grid.dt) << '\n';
    const auto tr = engine::propagate_quench(fp, cfg.initial_state(), n);
    write_trajectory(ctx, "trajectory.csv", tr);
    double min_eig = 1.0;
    for (const auto& r : tr.states) min_eig = std::min(min_eig, ops::min_eigenvalue(r));
    ctx.results() = {{"dt", grid.dt},
                     {"steps_per_period", grid.steps_per_period},
                     {"n_steps", n},
                     {"min_state_eigenvalue", min_eig},
                     {"stepwise_trace_drift", engine::stepwise_trace_drift(fp)}};
}

void cmd_spectrum(RunContext& ctx) {
    const auto& cfg = ctx.config();
    const auto m = cfg.system_model();
    const auto grid = model::TrotterGrid::for_model(m, cfg.grid.dt);
    auto fp = ctx.propagator(m, grid);
    ctx.log() << "spectrum: dimension " << fp.dimension() << ", " << grid.steps_per_period << " steps per period\n";
    fp.assemble(true);
    const auto spec = engine::floquet_spectrum(fp);
    CsvWriter csv(ctx.artifact("spectrum.csv"), {"re_lambda", "im_lambda", "re_rate", "im_rate"});
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
        csv.row(spec.eigenvalues(i).real(), spec.eigenvalues(i).imag(), spec.rates(i).real(), spec.rates(i).imag());
    ctx.results() = {{"dt", grid.dt},
                     {"steps_per_period", grid.steps_per_period},
                     {"period", grid.period},
                     {"dimension", fp.dimension()},
                     {"unit_index", spec.unit_index},
                     {"unit_distance", spec.unit_distance},
                     {"condition_number", fp.spectrum().condition_number}};
}

void cmd_steady(RunContext& ctx) {
    const auto& cfg = ctx.config();
    const auto m = cfg.system_model();
    const auto grid = model::TrotterGrid::for_model(m, cfg.grid.dt);
    const auto fp = ctx.propagator(m, grid);
    const auto ss = engine::steady_state(fp, ctx.steady_options());
    const auto set = observables_for(cfg);
    {
        std::vector<std::string> header{"step", "t"};
        header.insert(header.end(), set.names.begin(), set.names.end());
        CsvWriter csv(ctx.artifact("steady_state.csv"), header);
        auto emit = [&](long n, const Matrix& r) {
            std::vector<double> row{static_cast<double>(n), grid.time(n)};
            for (double v : set.eval(r)) row.push_back(v);
            csv.row(row);
        };
        emit(0, ss.rho);
        for (std::size_t k = 0; k < ss.micromotion.size(); ++k) emit(static_cast<long>(k) + 1, ss.micromotion[k]);
    }
    {
        CsvWriter csv(ctx.artifact("steady_rho.csv"), {"row", "col", "re", "im"});
        for (Eigen::Index i = 0; i < ss.rho.rows(); ++i)
            for (Eigen::Index j = 0; j < ss.rho.cols(); ++j) csv.row(i, j, ss.rho(i, j).real(), ss.rho(i, j).imag());
    }
    json res = {{"dt", grid.dt},
                {"steps_per_period", grid.steps_per_period},
                {"method", ss.method},
                {"cluster_size", ss.cluster_size},
                {"residual", ss.residual},
                {"leading_eigenvalue", {ss.leading_eigenvalue.real(), ss.leading_eigenvalue.imag()}}};
    if (cfg.system.preset == "two-spin") res["period_averaged_concurrence"] = obs::period_averaged_concurrence(ss);
    ctx.results() = res;
}

struct HeatRun {
    obs::SteadyCorrelation corr;
    obs::HeatCurrentSpectrum spectrum;
    model::TrotterGrid grid;
};

HeatRun heat_run(RunContext& ctx, const model::SystemModel& m) {
    const auto& cfg = ctx.config();
    HeatRun run;
    run.grid = model::TrotterGrid::for_model(m, cfg.grid.dt);
    const auto fp = ctx.propagator(m, run.grid);
    const auto ss = engine::steady_state(fp, ctx.steady_options());
    run.corr = obs::steady_two_time_correlation(fp, ss, ctx.correlation_options());
    obs::HeatOptions ho;
    ho.taper = cfg.heat.taper;
    run.spectrum =
        obs::heat_current_density(run.corr, ctx.bath_spec(), obs::frequency_grid(cfg.heat.omega_max, cfg.heat.n_omega), ho);
    return run;
}

void cmd_heat_current(RunContext& ctx) {
    require_preset(ctx.config(), "single-spin", "heat-current");
    const auto run = heat_run(ctx, ctx.config().system_model());
    const auto& corr = run.corr;
    const auto& hs = run.spectrum;
    {
        CsvWriter csv(ctx.artifact("heat_spectrum.csv"), {"omega", "j_cont"});
        for (std::size_t i = 0; i < hs.omega.size(); ++i) csv.row(hs.omega[i], hs.j_cont[i]);
    }
    {
        CsvWriter csv(ctx.artifact("heat_harmonics.csv"), {"n", "n_omega_d", "c_n", "c_n_projection", "w_n"});
        for (std::size_t i = 0; i < hs.harmonic.size(); ++i) {
            const auto n = static_cast<std::size_t>(hs.harmonic[i]);
            csv.row(hs.harmonic[i], hs.harmonic_omega[i], corr.c[n], corr.c_projection[n], hs.weights[i]);
        }
    }
    {
        CsvWriter csv(ctx.artifact("correlation.csv"),
                      {"tau", "re_full", "im_full", "re_decay", "im_decay", "re_asym", "im_asym"});
        for (std::size_t i = 0; i < corr.tau.size(); ++i)
            csv.row(corr.tau[i], corr.full[i].real(), corr.full[i].imag(), corr.decay[i].real(), corr.decay[i].imag(),
                    corr.asym[i].real(), corr.asym[i].imag());
    }
    double delta = 0.0;
    for (double w : hs.weights) delta += w;
    ctx.results() = {{"dt", corr.dt},
                     {"steps_per_period", corr.steps_per_period},
                     {"tau_max", corr.tau.back()},
                     {"decay_tail", corr.decay_tail},
                     {"decay_threshold", corr.decay_threshold},
                     {"total_current", obs::total_heat_current(hs)},
                     {"delta_current", delta}};
}

void cmd_total_current_sweep(RunContext& ctx) {
    const auto& cfg = ctx.config();
    require_preset(cfg, "single-spin", "total-current-sweep");
    if (cfg.sweep.omega_d.empty()) throw InputError("config field 'sweep.omega_d' must list at least one frequency");
    auto drives = cfg.sweep.drives;
    if (drives.empty()) drives = {model::DriveType::longitudinal, model::DriveType::transversal};

    struct Point {
        model::DriveType drive;
        double omega_d;
        double total = std::numeric_limits<double>::quiet_NaN();
        double delta = std::numeric_limits<double>::quiet_NaN();
        double dt = 0.0;
        int steps_per_period = 0;
        std::string flag;
    };
    std::vector<Point> points;
    for (auto d : drives)
        for (double w : cfg.sweep.omega_d) {
            Point p;
            p.drive = d;
            p.omega_d = w;
            points.push_back(p);
        }

    parallel_for(points.size(), ctx.workers(), [&](std::size_t i) {
        auto& p = points[i];
        try {
            const auto m = model::single_spin(cfg.system.omega, p.drive, cfg.system.eps_d, p.omega_d, cfg.system.phase);
            const auto run = heat_run(ctx, m);
            p.dt = run.grid.dt;
            p.steps_per_period = run.grid.steps_per_period;
            p.total = obs::total_heat_current(run.spectrum);
            p.delta = 0.0;
            for (double w : run.spectrum.weights) p.delta += w;
        } catch (const std::exception& e) {
            p.flag = single_line(e.what());
        }
    });

    CsvWriter csv(ctx.artifact("total_current.csv"),
                  {"drive_type", "omega_d", "total", "continuous", "delta", "dt", "steps_per_period", "flag"});
    int failed = 0;
    for (const auto& p : points) {
        if (!p.flag.empty()) {
            ++failed;
            ctx.warn("sweep point " + model::to_string(p.drive) + " omega_d=" + format_number(p.omega_d) + ": " + p.flag);
        }
        csv.row(model::to_string(p.drive), p.omega_d, p.total, p.total - p.delta, p.delta, p.dt, p.steps_per_period,
                p.flag);
    }
    ctx.results() = {{"points", points.size()}, {"failed_points", failed}};
}

void cmd_concurrence_map(RunContext& ctx) {
    const auto& cfg = ctx.config();
    require_preset(cfg, "two-spin", "concurrence-map");
    if (cfg.sweep.omega_d.empty()) throw InputError("config field 'sweep.omega_d' must list at least one frequency");
    if (cfg.sweep.eps_d.empty()) throw InputError("config field 'sweep.eps_d' must list at least one amplitude");
    obs::ConcurrenceMapOptions mo;
    mo.dt_target = cfg.grid.dt;
    mo.workers = ctx.workers();
    mo.channels = cfg.channel_options();
    mo.steady = ctx.steady_options();
    const obs::ModelFactory factory = [&cfg](double w, double e) { return cfg.system_model(w, e); };
    const obs::IfProvider provider = [&ctx, &cfg](double dt) {
        return ctx.semigroup(cfg.system_model(0.0, 0.0).coupling, dt);
    };
    const auto map = obs::concurrence_map(factory, provider, cfg.sweep.omega_d, cfg.sweep.eps_d, mo);
    CsvWriter csv(ctx.artifact("concurrence_map.csv"), {"omega_d", "eps_d", "value", "dt", "steps_per_period", "flag"});
    int failed = 0;
    for (const auto& p : map.points) {
        const std::string flag = single_line(p.flag);
        if (!p.ok) {
            ++failed;
            ctx.warn("map point omega_d=" + format_number(p.omega_d) + " eps_d=" + format_number(p.eps_d) + ": " + flag);
        }
        csv.row(p.omega_d, p.eps_d, p.value, p.dt, p.steps_per_period, flag);
    }
    ctx.results() = {{"points", map.points.size()}, {"failed_points", failed}};
}

void cmd_spectral_analysis(RunContext& ctx) {
    const auto& cfg = ctx.config();
    require_preset(cfg, "two-spin", "spectral-analysis");
    const auto m = cfg.system_model(0.0, 0.0);
    const auto grid = model::TrotterGrid::undriven(cfg.grid.dt);
    const auto fp = ctx.propagator(m, grid);
    obs::SpectralAnalysisOptions so;
    so.reference = cfg.initial_state();
    so.scan_points = cfg.spectral.scan_points;
    so.positivity_tolerance = cfg.spectral.positivity_tolerance;
    ctx.log() << "spectral analysis: dimension " << fp.dimension() << '\n';
    const auto sa = obs::spectral_analysis(fp, so);

    {
        CsvWriter csv(ctx.artifact("spectral_modes.csv"), {"re_gamma", "im_gamma", "re_lambda", "im_lambda", "weight",
                                                           "condition", "max_concurrence", "scanned"});
        for (const auto& mode : sa.modes)
            csv.row(mode.rate.real(), mode.rate.imag(), mode.eigenvalue.real(), mode.eigenvalue.imag(), mode.weight,
                    mode.condition, mode.max_concurrence, mode.scanned ? 1 : 0);
    }

    // Reconstruction against direct propagation over the quench window.
    const long n = cfg.quench_steps(grid.dt);
    const auto tr = engine::propagate_quench(fp, cfg.initial_state(), n);
    const auto set = observables_for(cfg);
    double worst = 0.0;
    {
        CsvWriter csv(ctx.artifact("spectral_reconstruction.csv"),
                      {"t", "concurrence_direct", "concurrence_reconstructed", "max_abs_difference"});
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            const Matrix rec = sa.reconstruct(tr.times[i]);
            const double diff = (rec - tr.states[i]).cwiseAbs().maxCoeff();
            worst = std::max(worst, diff);
            csv.row(tr.times[i], set.eval(tr.states[i])[0], set.eval(0.5 * (rec + rec.adjoint()))[0], diff);
        }
    }
    ctx.results() = {{"dt", sa.dt},
                     {"steady_cluster_size", sa.steady_cluster.size()},
                     {"condition_number", sa.condition_number},
                     {"skipped_ill_conditioned", sa.skipped_ill_conditioned},
                     {"max_reconstruction_error", worst}};
}

void cmd_benchmark(RunContext& ctx) {
    const auto& cfg = ctx.config();
    require_preset(cfg, "single-spin", "benchmark");
    const std::vector<std::pair<std::string, Matrix>> observables{
        {"sx", ops::pauli_x()}, {"sy", ops::pauli_y()}, {"sz", ops::pauli_z()}};
    CsvWriter summary(ctx.artifact("benchmark_summary.csv"),
                      {"omega_d", "omega_eff", "max_abs_sx", "max_abs_sy", "max_abs_sz", "mean_abs_sz"});
    json points = json::array();
    for (std::size_t i = 0; i < cfg.benchmark.omega_d.size(); ++i) {
        const double wd = cfg.benchmark.omega_d[i];
        const auto m = cfg.system_model(wd, cfg.system.eps_d);
        const auto grid = model::TrotterGrid::for_model(m, cfg.grid.dt);
        const auto fp = ctx.propagator(m, grid);
        const long n = grid.dt > 0 ? static_cast<long>(std::llround(cfg.grid.t_final / grid.dt)) : 0;
        ctx.log() << "benchmark omega_d=" << format_number(wd) << ": " << n << " engine steps\n";
        const auto exact = engine::propagate_quench(fp, cfg.initial_state(), n);
        const auto em = redfield::magnus_effective_model(m);
        const auto me = redfield::redfield_propagate(em, ctx.fit(), cfg.initial_state(), exact.times.back(),
                                                     cfg.benchmark.dt_me);
        const auto cmp = redfield::compare_trajectories(exact, me, observables);
        write_trajectory(ctx, "benchmark_exact_" + std::to_string(i) + ".csv", exact);
        write_trajectory(ctx, "benchmark_redfield_" + std::to_string(i) + ".csv", me);
        summary.row(wd, em.omega_eff, cmp.observables[0].max_abs, cmp.observables[1].max_abs, cmp.observables[2].max_abs,
                    cmp.observables[2].mean_abs);
        points.push_back({{"omega_d", wd},
                          {"omega_eff", em.omega_eff},
                          {"engine_dt", grid.dt},
                          {"max_abs_sz", cmp.observables[2].max_abs}});
    }
    ctx.results() = {{"redfield_variant", kRedfieldVariant}, {"points", points}};
}

const std::map<std::string, std::function<void(RunContext&)>>& registry() {
    static const std::map<std::string, std::function<void(RunContext&)>> r{
        {"fit-bath", cmd_fit_bath},
        {"build-if", cmd_build_if},
        {"quench", cmd_quench},
        {"spectrum", cmd_spectrum},
        {"steady", cmd_steady},
        {"heat-current", cmd_heat_current},
        {"total-current-sweep", cmd_total_current_sweep},
        {"concurrence-map", cmd_concurrence_map},
        {"spectral-analysis", cmd_spectral_analysis},
        {"benchmark", cmd_benchmark},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"fit-bath",     "build-if",     "quench",
                                                "spectrum",     "steady",       "heat-current",
                                                "total-current-sweep", "concurrence-map", "spectral-analysis",
                                                "benchmark"};
    return names;
}

bool is_command(const std::string& name) { return registry().count(name) > 0; }

void run(const AppOptions& options, std::ostream& log) {
    const auto it = registry().find(options.command);
    if (it == registry().end()) throw InputError("unknown command '" + options.command + "'");
    RunConfig cfg = load_config(options.config_path);

    if (options.out_dir) cfg.output.directory = *options.out_dir;
    else if (auto e = env("FLOQUET_IF_OUT")) cfg.output.directory = *e;

    int workers = cfg.workers;
    if (options.workers) {
        workers = *options.workers;
    } else if (auto e = env("FLOQUET_IF_WORKERS")) {
        try {
            workers = std::stoi(*e);
        } catch (const std::exception&) {
            throw InputError("FLOQUET_IF_WORKERS must be an integer, got '" + *e + "'");
        }
    }
    if (workers < 0) throw InputError("worker count must be non-negative");
    if (workers == 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    const bool use_cache = cfg.cache.enable && !options.no_cache;
    if (!use_cache) cfg.cache.enable = false;
    RunContext ctx(cfg, cfg.output.directory, workers, use_cache, log);
    it->second(ctx);
    ctx.write_metadata(options.command);
    log << options.command << ": results written to " << cfg.output.directory << '\n';
}

}  // namespace floquet::app
