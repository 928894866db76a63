// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinphase/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>
#include <system_error>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spinphase/channels.hpp"
#include "spinphase/coherent.hpp"
#include "spinphase/io.hpp"
#include "spinphase/phasespace.hpp"
#include "spinphase/unravel.hpp"

namespace spinphase::cli {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view text, const char* what) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + ": '" + std::string(text) + "' is not a finite number");
    }
    return v;
}

template <typename Int>
Int parse_int(std::string_view text, const char* what) {
    const std::string t = trim(text);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(std::string(what) + ": '" + std::string(text) + "' is not an integer");
    }
    return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(trim(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<double> parse_times(std::string_view text) {
    std::vector<double> out;
    for (const auto& s : split(text, ',')) out.push_back(parse_double(s, "--times"));
    return out;
}

std::vector<int> parse_iterations(std::string_view text) {
    std::vector<int> out;
    for (const auto& s : split(text, ',')) out.push_back(parse_int<int>(s, "--iterations"));
    return out;
}

std::pair<int, int> parse_grid(std::string_view text) {
    const auto x = text.find('x');
    if (x == std::string_view::npos) {
        throw ConfigError("--grid expects NTHETAxNPHI, e.g. 181x360");
    }
    return {parse_int<int>(text.substr(0, x), "--grid"),
            parse_int<int>(text.substr(x + 1), "--grid")};
}

HalfInt spin_of(const RunConfig& cfg) {
    try {
        return parse_spin(cfg.J);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("J: ") + e.what());
    }
}

}  // namespace

Model parse_model(std::string_view text) {
    if (text == "lindblad") return Model::lindblad;
    if (text == "povm") return Model::povm;
    if (text == "unravel") return Model::unravel;
    throw ConfigError("model must be lindblad, povm or unravel, got '" + std::string(text) + "'");
}

GammaRule parse_gamma_rule(std::string_view text) {
    if (text == "fixed") return GammaRule::fixed;
    if (text == "one_over_J") return GammaRule::one_over_J;
    throw ConfigError("gamma_rule must be fixed or one_over_J, got '" + std::string(text) + "'");
}

double parse_sigma(std::string_view text) {
    const std::string t = trim(text);
    if (t == "q") return kSigmaHusimi;
    if (t == "w") return kSigmaWigner;
    if (t == "p") return kSigmaP;
    return parse_double(t, "sigma");
}

InitialState InitialState::parse(std::string_view text) {
    InitialState s;
    const std::string t = trim(text);
    const auto colon = t.find(':');
    const std::string head = t.substr(0, colon);
    const std::string tail = colon == std::string::npos ? std::string() : t.substr(colon + 1);
    if (head == "coherent") {
        s.kind = Kind::coherent;
        if (colon != std::string::npos) {
            const auto parts = split(tail, ',');
            if (parts.size() != 2) {
                throw ConfigError("coherent state expects coherent:THETA,PHI");
            }
            s.theta = parse_double(parts[0], "coherent theta");
            s.phi = parse_double(parts[1], "coherent phi");
            if (s.theta < 0.0 || s.theta > kPi) {
                throw ConfigError("coherent theta must lie in [0, pi]");
            }
        }
    } else if (head == "cat" && colon == std::string::npos) {
        s.kind = Kind::cat;
    } else if (head == "basis" && colon != std::string::npos) {
        s.kind = Kind::basis;
        try {
            s.m = HalfInt::parse(tail);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("basis state m: ") + e.what());
        }
    } else if (head == "file" && colon != std::string::npos && !tail.empty()) {
        s.kind = Kind::file;
        s.path = tail;
    } else {
        throw ConfigError("initial state must be coherent[:THETA,PHI], cat, basis:M or file:PATH, got '" +
                          t + "'");
    }
    return s;
}

DensityMatrix InitialState::build(HalfInt J) const {
    switch (kind) {
        case Kind::coherent:
            return DensityMatrix::pure(J, coherent_state(J, {theta, phi}).amplitudes);
        case Kind::cat: {
            Vector psi = Vector::Zero(J.dim());
            psi(0) += 1.0;
            psi(J.dim() - 1) += 1.0;
            return DensityMatrix::pure(J, psi.normalized());
        }
        case Kind::basis:
            if (m.twice() > J.twice() || m.twice() < -J.twice() || (J.twice() - m.twice()) % 2 != 0) {
                throw ConfigError("basis state m = " + m.to_string() + " is not valid for J = " +
                                  J.to_string());
            }
            return DensityMatrix::basis_state(J, m);
        case Kind::file: {
            const DensityMatrix rho = state_from_json(read_file(path));
            if (rho.J != J) {
                throw ConfigError("state file holds J = " + rho.J.to_string() +
                                  " but the run uses J = " + J.to_string());
            }
            return rho;
        }
    }
    throw ConfigError("unknown initial state kind");
}

void RunConfig::validate() const {
    (void)spin_of(*this);
    if (gamma && (!std::isfinite(*gamma) || *gamma < 0.0 ||
                  (*gamma == 0.0 && model != Model::unravel))) {
        throw ConfigError("gamma must be positive (zero is allowed only for the unravel model)");
    }
    if (!std::isfinite(sigma)) throw ConfigError("sigma must be finite");
    if (times.empty()) throw ConfigError("times must not be empty");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0) {
            throw ConfigError("times must be non-negative");
        }
        if (i > 0 && times[i] < times[i - 1]) throw ConfigError("times must be sorted");
    }
    if (iterations.empty()) throw ConfigError("iterations must not be empty");
    for (std::size_t i = 0; i < iterations.size(); ++i) {
        if (iterations[i] < 0) throw ConfigError("iterations must be non-negative");
        if (i > 0 && iterations[i] < iterations[i - 1]) {
            throw ConfigError("iterations must be sorted");
        }
    }
    if (n_theta < 2 || n_phi < 1) {
        throw ConfigError("grid needs n_theta >= 2 and n_phi >= 1");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (n_traj < 1) throw ConfigError("n_traj must be at least 1");
}

RunConfig apply_config_json(RunConfig cfg, std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (const auto& [key, v] : doc.items()) {
            if (key == "J") {
                cfg.J = v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>());
            } else if (key == "model") {
                cfg.model = parse_model(v.get<std::string>());
            } else if (key == "gamma") {
                if (v.is_null()) cfg.gamma.reset();
                else cfg.gamma = v.get<double>();
            } else if (key == "gamma_rule") {
                cfg.gamma_rule = parse_gamma_rule(v.get<std::string>());
            } else if (key == "initial_state") {
                cfg.initial_state = InitialState::parse(v.get<std::string>());
            } else if (key == "sigma") {
                cfg.sigma = v.is_string() ? parse_sigma(v.get<std::string>()) : v.get<double>();
            } else if (key == "times") {
                cfg.times = v.get<std::vector<double>>();
            } else if (key == "iterations") {
                cfg.iterations = v.get<std::vector<int>>();
            } else if (key == "grid") {
                const auto g = v.get<std::vector<int>>();
                if (g.size() != 2) throw ConfigError("grid must be [n_theta, n_phi]");
                cfg.n_theta = g[0];
                cfg.n_phi = g[1];
            } else if (key == "n_theta") {
                cfg.n_theta = v.get<int>();
            } else if (key == "n_phi") {
                cfg.n_phi = v.get<int>();
            } else if (key == "output_dir") {
                cfg.output_dir = v.get<std::string>();
            } else if (key == "seed") {
                cfg.seed = v.get<std::uint64_t>();
            } else if (key == "dt") {
                cfg.dt = v.get<double>();
            } else if (key == "n_traj") {
                cfg.n_traj = v.get<std::int64_t>();
            } else if (key == "snapshots") {
                cfg.snapshots = v.get<bool>();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
    }
    return cfg;
}

double effective_gamma(const RunConfig& cfg, HalfInt J) {
    if (cfg.gamma) return *cfg.gamma;
    if (cfg.gamma_rule == GammaRule::one_over_J && J.twice() > 0) return 1.0 / J.value();
    return 1.0;
}

namespace {

struct Flags {
    std::string config, J, model, gamma, gamma_rule, initial, sigma, times, iterations, grid,
        output_dir, seed, dt, n_traj, out;
    bool snapshots = false;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;
    CLI::Option* config_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void add_flags(CLI::App* sub, Flags& f) {
    auto opt = [&](const char* name, std::string& target, const char* help,
                   std::function<void(RunConfig&)> apply) {
        CLI::Option* o = sub->add_option(name, target, help);
        f.setters.emplace_back(o, std::move(apply));
        return o;
    };
    f.config_opt = sub->add_option("--config", f.config, "JSON configuration file; flags win");
    f.out_opt = sub->add_option("--out", f.out, "Write the report to this file instead of stdout");
    opt("--J", f.J, "Spin as an exact half-integer: 1/2, 1, 5", [&f](RunConfig& c) { c.J = f.J; });
    opt("--model", f.model, "lindblad | povm | unravel",
        [&f](RunConfig& c) { c.model = parse_model(f.model); });
    opt("--gamma", f.gamma, "Decoherence rate (overrides --gamma-rule)",
        [&f](RunConfig& c) { c.gamma = parse_double(f.gamma, "--gamma"); });
    opt("--gamma-rule", f.gamma_rule, "fixed | one_over_J",
        [&f](RunConfig& c) { c.gamma_rule = parse_gamma_rule(f.gamma_rule); });
    opt("--initial", f.initial, "coherent[:THETA,PHI] | cat | basis:M | file:PATH",
        [&f](RunConfig& c) { c.initial_state = InitialState::parse(f.initial); });
    opt("--sigma", f.sigma, "Ordering parameter, or q / w / p",
        [&f](RunConfig& c) { c.sigma = parse_sigma(f.sigma); });
    opt("--times", f.times, "Comma-separated sorted times",
        [&f](RunConfig& c) { c.times = parse_times(f.times); });
    opt("--iterations", f.iterations, "Comma-separated sorted POVM iteration counts",
        [&f](RunConfig& c) { c.iterations = parse_iterations(f.iterations); });
    opt("--grid", f.grid, "Display grid NTHETAxNPHI", [&f](RunConfig& c) {
        std::tie(c.n_theta, c.n_phi) = parse_grid(f.grid);
    });
    opt("--output-dir", f.output_dir, "Directory for generated files",
        [&f](RunConfig& c) { c.output_dir = f.output_dir; });
    opt("--seed", f.seed, "Monte Carlo seed",
        [&f](RunConfig& c) { c.seed = parse_int<std::uint64_t>(f.seed, "--seed"); });
    opt("--dt", f.dt, "Monte Carlo time step",
        [&f](RunConfig& c) { c.dt = parse_double(f.dt, "--dt"); });
    opt("--n-traj", f.n_traj, "Number of Monte Carlo trajectories",
        [&f](RunConfig& c) { c.n_traj = parse_int<std::int64_t>(f.n_traj, "--n-traj"); });
    CLI::Option* snap = sub->add_flag("--snapshots", f.snapshots, "Write state snapshot JSON files");
    f.setters.emplace_back(snap, [&f](RunConfig& c) { c.snapshots = f.snapshots; });
}

RunConfig resolve(const Flags& f, std::optional<Model> forced) {
    RunConfig cfg;
    if (f.config_opt->count() > 0) cfg = apply_config_json(cfg, read_file(f.config));
    for (const auto& [o, apply] : f.setters) {
        if (o->count() > 0) apply(cfg);
    }
    if (forced) cfg.model = *forced;
    cfg.validate();
    return cfg;
}

struct Context {
    RunConfig cfg;
    HalfInt J;
    double gamma;
    std::optional<std::filesystem::path> out_path;
    std::ostream& out;
    std::ostream& err;

    void emit(const std::string& text) const {
        if (out_path) write_file(*out_path, text);
        else out << text;
    }

    std::filesystem::path output_file(const std::string& name) const {
        std::error_code ec;
        std::filesystem::create_directories(cfg.output_dir, ec);
        if (ec) {
            throw IoError("cannot create output directory '" + cfg.output_dir.string() +
                          "': " + ec.message());
        }
        return cfg.output_dir / name;
    }

    void write(const std::string& name, const std::string& text) const {
        const auto path = output_file(name);
        write_file(path, text);
        out << "wrote " << path.string() << "\n";
    }
};

std::string fmt(double x) { return format_double(x); }

void append_moments(std::string& csv, const std::string& t, const MomentVector& m) {
    for (int L = 0; L <= m.max_rank(); ++L) {
        for (int k = -L; k <= L; ++k) {
            const Complex c = m(L, k);
            csv += t + "," + std::to_string(L) + "," + std::to_string(k) + "," + fmt(c.real()) +
                   "," + fmt(c.imag()) + "\n";
        }
    }
}

KickConfig kick_config(const Context& ctx, const std::vector<double>& times) {
    KickConfig k;
    k.gamma = ctx.gamma;
    k.dt = ctx.cfg.dt;
    k.n_traj = ctx.cfg.n_traj;
    k.seed = ctx.cfg.seed;
    for (double t : times) {
        k.record_steps.push_back(static_cast<int>(std::llround(t / k.dt)));
    }
    k.n_steps = k.record_steps.empty() ? 0 : *std::max_element(k.record_steps.begin(), k.record_steps.end());
    return k;
}

MomentVector lindblad_moments(const MomentVector& m0, double t, double gamma, HalfInt J) {
    if (gamma == 0.0) return m0;
    return lindblad_propagate_analytic(m0, t, {gamma, J});
}

// --- subcommands ------------------------------------------------------------

void cmd_rates(const Context& ctx) { ctx.emit(rates_csv(decay_rates(ctx.J, ctx.gamma))); }

void cmd_tensor_table(const Context& ctx) { ctx.emit(tensor_table_json(*TensorBasis::shared(ctx.J))); }

void cmd_evolve(const Context& ctx) {
    const auto basis = TensorBasis::shared(ctx.J);
    const DensityMatrix rho0 = ctx.cfg.initial_state.build(ctx.J);
    const MomentVector m0 = expand(rho0, *basis);
    std::string csv = "t,L,k,re,im\n";
    std::vector<std::pair<std::string, MomentVector>> frames;
    switch (ctx.cfg.model) {
        case Model::lindblad:
            for (double t : ctx.cfg.times) {
                frames.emplace_back(fmt(t), lindblad_moments(m0, t, ctx.gamma, ctx.J));
            }
            break;
        case Model::povm:
            for (int n : ctx.cfg.iterations) {
                frames.emplace_back(std::to_string(n), povm_apply_spectral(m0, n));
            }
            break;
        case Model::unravel: {
            const TrajectoryEnsemble ens = run_ensemble(rho0, kick_config(ctx, ctx.cfg.times));
            for (const auto& w : ens.warnings) ctx.err << "warning: " << w << "\n";
            for (std::size_t r = 0; r < ens.times.size(); ++r) {
                frames.emplace_back(fmt(ens.times[r]), ens.mean[r]);
            }
            break;
        }
    }
    for (std::size_t i = 0; i < frames.size(); ++i) {
        append_moments(csv, frames[i].first, frames[i].second);
        if (ctx.cfg.snapshots) {
            const Reconstruction rec = reconstruct(frames[i].second, *basis);
            ctx.write("state_" + std::to_string(i) + ".json", state_to_json(rec.state));
        }
    }
    ctx.write("moments.csv", csv);
}

json point_json(const PhasePoint& p) { return {{"theta", p.theta}, {"phi", p.phi}}; }

double kernel_value(const DensityMatrix& rho, double sigma, const PhasePoint& p) {
    const Matrix w = sw_kernel_matrix(rho.J, sigma, p);
    return rho.mat.cwiseProduct(w.transpose()).sum().real();
}

void cmd_wigner(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    if (cfg.n_theta < ctx.J.twice() + 2) {
        ctx.err << "warning: n_theta = " << cfg.n_theta << " is coarse for J = " << ctx.J.to_string()
                << " (recommended >= " << ctx.J.twice() + 2 << ")\n";
    }
    const auto basis = TensorBasis::shared(ctx.J);
    const DensityMatrix rho0 = cfg.initial_state.build(ctx.J);
    const MomentVector m0 = expand(rho0, *basis);
    const SphereGrid grid = SphereGrid::equiangular(cfg.n_theta, cfg.n_phi);
    const QuasiDist F0 = quasidistribution(rho0, cfg.sigma, grid, Sampling::spectral);

    json frames = json::array();
    auto record = [&](const std::string& name, const QuasiDist& F, const MomentVector& moments,
                      json entry) {
        const auto [lo, hi] = std::minmax_element(F.values.begin(), F.values.end());
        const auto ilo = static_cast<std::size_t>(lo - F.values.begin());
        const auto ihi = static_cast<std::size_t>(hi - F.values.begin());
        const DensityMatrix rho = reconstruct(moments, *basis).state;
        const double kmin = kernel_value(rho, cfg.sigma, grid.points[ilo]);
        const double kmax = kernel_value(rho, cfg.sigma, grid.points[ihi]);
        entry["file"] = name;
        entry["min"] = *lo;
        entry["argmin"] = point_json(grid.points[ilo]);
        entry["max"] = *hi;
        entry["argmax"] = point_json(grid.points[ihi]);
        entry["kernel_min"] = kmin;
        entry["kernel_max"] = kmax;
        entry["extrema_error"] = std::max(std::abs(kmin - *lo), std::abs(kmax - *hi));
        ctx.write(name + ".csv", grid_csv(F));
        ctx.write(name + ".ppm", render_ppm(F));
        ctx.write(name + ".json", spectral_json(F));
        frames.push_back(std::move(entry));
    };

    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
        const double t = cfg.times[i];
        const QuasiDist F = heat_propagate_spectral(F0, t, ctx.gamma);
        record("lindblad_t" + std::to_string(i), F, lindblad_moments(m0, t, ctx.gamma, ctx.J),
               {{"model", "lindblad"}, {"t", t}});
    }
    for (int n : cfg.iterations) {
        const MomentVector mn = povm_apply_spectral(m0, n);
        const DensityMatrix rho_n = reconstruct(mn, *basis).state;
        QuasiDist F = quasidistribution(rho_n, cfg.sigma, grid, Sampling::spectral);
        F.time_label = n;
        const QuasiDist shifted = povm_sigma_shift(F0, n);
        double shift_err = 0.0;
        for (std::size_t j = 0; j < F.values.size(); ++j) {
            shift_err = std::max(shift_err, std::abs(F.values[j] - shifted.values[j]));
        }
        if (shift_err > 1e-10) {
            ctx.err << "warning: sigma-shift cross-check differs by " << shift_err << " at n = " << n
                    << "\n";
        }
        record("povm_n" + std::to_string(n), F, mn,
               {{"model", "povm"}, {"n", n}, {"sigma_shift_error", shift_err}});
    }
    json summary;
    summary["J"] = ctx.J.to_string();
    summary["sigma"] = cfg.sigma;
    summary["gamma"] = ctx.gamma;
    summary["grid"] = {cfg.n_theta, cfg.n_phi};
    summary["frames"] = std::move(frames);
    ctx.write("wigner_summary.json", summary.dump(2) + "\n");
}

// Index k with the largest |m(L,k)|; ties go to the smallest k.
int dominant_k(const MomentVector& m, int L) {
    int best = -L;
    for (int k = -L + 1; k <= L; ++k) {
        if (std::abs(m(L, k)) > std::abs(m(L, best)) * (1.0 + 1e-12)) best = k;
    }
    return best;
}

json ratio_json(const MomentVector& m0, const std::vector<MomentVector>& series, double theory) {
    json out;
    out["theory"] = theory;
    if (m0.max_rank() < 2) {
        out["error"] = "rank-2 moments need J >= 1";
        return out;
    }
    const int k1 = dominant_k(m0, 1);
    const int k2 = dominant_k(m0, 2);
    out["k1"] = k1;
    out["k2"] = k2;
    std::vector<Complex> s1, s2;
    for (const auto& m : series) {
        s1.push_back(m(1, k1));
        s2.push_back(m(2, k2));
    }
    try {
        const RatioReport rep = ratio_statistic(s1, s2);
        out["per_sample"] = rep.per_sample;
        out["mean"] = rep.mean;
        out["spread"] = rep.spread;
        out["time_independent"] = rep.time_independent;
    } catch (const std::invalid_argument& e) {
        out["error"] = e.what();
    }
    return out;
}

void cmd_compare(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const auto basis = TensorBasis::shared(ctx.J);
    const DensityMatrix rho0 = cfg.initial_state.build(ctx.J);
    const MomentVector m0 = expand(rho0, *basis);

    std::vector<MomentVector> lind{m0};
    for (double t : cfg.times) {
        if (t > 0.0) lind.push_back(lindblad_moments(m0, t, ctx.gamma, ctx.J));
    }
    std::vector<MomentVector> povm{m0};
    for (int n : cfg.iterations) {
        if (n > 0) povm.push_back(povm_apply_spectral(m0, n));
    }
    const DecayRateTable rates = decay_rates(ctx.J, ctx.gamma);
    const bool has2 = ctx.J.twice() >= 2;

    json report;
    report["J"] = ctx.J.to_string();
    report["gamma"] = ctx.gamma;
    report["R"]["lindblad"] = ratio_json(m0, lind, has2 ? rates.lindblad[2] / rates.lindblad[1] : 0.0);
    report["R"]["povm"] = ratio_json(m0, povm, has2 ? rates.povm[2] / rates.povm[1] : 0.0);

    json per = json::array();
    double worst = 0.0;
    for (int n : cfg.iterations) {
        const double t = n * std::log(3.0) / ctx.gamma;
        const Matrix a = reconstruct(povm_apply_spectral(m0, n), *basis).state.mat;
        const Matrix b = reconstruct(lindblad_moments(m0, t, ctx.gamma, ctx.J), *basis).state.mat;
        const double diff = max_abs_diff(a, b);
        worst = std::max(worst, diff);
        per.push_back({{"n", n}, {"t", t}, {"difference", diff}});
    }
    report["equivalence"]["per_iteration"] = std::move(per);
    report["equivalence"]["max_state_difference"] = worst;
    ctx.emit(report.dump(2) + "\n");
}

void cmd_unravel(const Context& ctx) {
    const auto basis = TensorBasis::shared(ctx.J);
    const DensityMatrix rho0 = ctx.cfg.initial_state.build(ctx.J);
    const MomentVector m0 = expand(rho0, *basis);
    KickConfig kc = kick_config(ctx, ctx.cfg.times);
    const TrajectoryEnsemble ens = run_ensemble(rho0, kc);
    for (const auto& w : ens.warnings) ctx.err << "warning: " << w << "\n";

    std::string csv = "t,L,k,re_mean,im_mean,stderr,re_analytic,im_analytic,deviation,flag\n";
    int flagged = 0;
    for (std::size_t r = 0; r < ens.times.size(); ++r) {
        const double t = ens.times[r];
        const MomentVector ref = lindblad_moments(m0, t, ctx.gamma, ctx.J);
        const MomentVector& mean = ens.mean[r];
        for (int L = 0; L <= mean.max_rank(); ++L) {
            for (int k = -L; k <= L; ++k) {
                const double se = ens.std_error[r][static_cast<std::size_t>(moment_index(L, k))];
                const double dev = std::abs(mean(L, k) - ref(L, k));
                const bool bad = dev > 5.0 * se + 1e-12;
                flagged += bad ? 1 : 0;
                csv += fmt(t) + "," + std::to_string(L) + "," + std::to_string(k) + "," +
                       fmt(mean(L, k).real()) + "," + fmt(mean(L, k).imag()) + "," + fmt(se) + "," +
                       fmt(ref(L, k).real()) + "," + fmt(ref(L, k).imag()) + "," + fmt(dev) + "," +
                       (bad ? "deviates" : "ok") + "\n";
            }
        }
    }
    ctx.write("unravel.csv", csv);
    if (ctx.cfg.snapshots) ctx.write("unravel_mean_state.json", state_to_json(ens.mean_state));
    ctx.out << "trajectories " << ens.n_traj << ", moments beyond 5 stderr: " << flagged << "\n";
}

void cmd_positivity(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const DensityMatrix rho0 = cfg.initial_state.build(ctx.J);
    const SphereGrid grid = SphereGrid::equiangular(cfg.n_theta, cfg.n_phi);
    const PositivityTime pt = positivity_time(ctx.J, cfg.sigma, ctx.gamma);
    const FirstPositive fp = first_positive_time(rho0, cfg.sigma, ctx.gamma, grid);
    const int fi = first_positive_iteration(rho0, cfg.sigma, grid);
    const QuasiDist F0 = quasidistribution(rho0, cfg.sigma, grid, Sampling::spectral);
    const PositivityScan scan = positivity_scan(F0);

    json report;
    report["J"] = ctx.J.to_string();
    report["sigma"] = cfg.sigma;
    report["gamma"] = ctx.gamma;
    report["positivity_iterations"] = positivity_iterations(cfg.sigma);
    report["t_star"] = pt.t_star;
    report["kind"] = pt.kind;
    if (pt.asymptotic) report["t_star_asymptotic"] = *pt.asymptotic;
    report["damped_kernel_time"] = damped_kernel_time(ctx.J, cfg.sigma, ctx.gamma);
    report["initial_min"] = scan.min_value;
    report["initial_argmin"] = point_json(scan.argmin);
    if (fp.found) report["empirical_first_positive_time"] = fp.time;
    else report["empirical_first_positive_time"] = nullptr;
    if (fi >= 0) report["empirical_first_positive_iteration"] = fi;
    else report["empirical_first_positive_iteration"] = nullptr;
    ctx.emit(report.dump(2) + "\n");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spin decoherence: Lindblad flow, coherent-state POVMs and phase-space distributions",
                 "spinphase"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        void (*fn)(const Context&);
    };
    const std::vector<Sub> subs = {
        {"rates", "Decay-rate table of both models (CSV)", cmd_rates},
        {"evolve", "Moment time series (CSV) and optional state snapshots", cmd_evolve},
        {"wigner", "Quasidistribution grids (CSV, PPM, JSON) for both models", cmd_wigner},
        {"compare", "Ratio statistic and J=1/2 equivalence report (JSON)", cmd_compare},
        {"unravel", "Monte Carlo unraveling against the analytic solution (CSV)", cmd_unravel},
        {"positivity", "Positivity iterations, times and empirical scans (JSON)", cmd_positivity},
        {"tensor-table", "Dump the tensor-operator basis (JSON)", cmd_tensor_table},
    };
    std::vector<Flags> flags(subs.size());
    std::vector<CLI::App*> apps;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        CLI::App* sub = app.add_subcommand(subs[i].name, subs[i].help);
        add_flags(sub, flags[i]);
        apps.push_back(sub);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (!apps[i]->parsed()) continue;
            // The unravel subcommand always runs the trajectory model.
            const std::optional<Model> forced =
                subs[i].fn == cmd_unravel ? std::optional<Model>(Model::unravel) : std::nullopt;
            const RunConfig cfg = resolve(flags[i], forced);
            const HalfInt J = spin_of(cfg);
            std::optional<std::filesystem::path> out_path;
            if (flags[i].out_opt->count() > 0) out_path = flags[i].out;
            const Context ctx{cfg, J, effective_gamma(cfg, J), out_path, out, err};
            subs[i].fn(ctx);
            return kExitOk;
        }
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitConfig;
}

}  // namespace spinphase::cli
