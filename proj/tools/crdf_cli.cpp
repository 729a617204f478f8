// Command-line front end: rate-distortion sweeps, causality bounds, filter
// design, filter realization, and coder simulation, emitting CSV/JSON for
// plotting.  All commands are deterministic given their flags and seed.

#include <atomic>
#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crdf/bounds.hpp"
#include "crdf/classic_rdf.hpp"
#include "crdf/design.hpp"
#include "crdf/gauss_markov.hpp"
#include "crdf/realization.hpp"
#include "crdf/serialize.hpp"
#include "crdf/simulate.hpp"
#include "crdf/spectrum.hpp"

namespace {

using namespace crdf;

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::string format_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct SourceOptions {
    std::string ar_coeffs;
    double xi_var = 1.0;
    std::string psd_file;
    std::size_t grid_points = 4096;
};

void add_source_flags(CLI::App* cmd, SourceOptions& src) {
    cmd->add_option("--ar", src.ar_coeffs,
                    "AR regression coefficients a_1,a_2,... (comma separated)");
    cmd->add_option("--xi-var", src.xi_var, "AR innovation variance (default 1)");
    cmd->add_option("--psd-file", src.psd_file, "tabulated PSD (CSV: omega,psd)");
    cmd->add_option("--grid", src.grid_points, "frequency grid points (default 4096)");
}

SpectralModel make_spectrum(const SourceOptions& src) {
    if (!src.psd_file.empty()) return load_psd_csv(src.psd_file);
    if (src.ar_coeffs.empty())
        throw CLI::ValidationError("source", "provide --ar or --psd-file");
    return psd_from_ar(ArModel{parse_list(src.ar_coeffs), src.xi_var},
                       FrequencyGrid(src.grid_points));
}

std::optional<ArModel> maybe_ar(const SourceOptions& src) {
    if (src.ar_coeffs.empty()) return std::nullopt;
    return ArModel{parse_list(src.ar_coeffs), src.xi_var};
}

void write_output(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << payload;
}

struct DistortionGridOptions {
    std::string explicit_list;
    double d_min = 0.0;
    double d_max = 0.0;
    std::size_t d_points = 25;
};

void add_distortion_flags(CLI::App* cmd, DistortionGridOptions& opt) {
    cmd->add_option("--d", opt.explicit_list, "explicit distortion list (comma separated)");
    cmd->add_option("--d-min", opt.d_min, "log-spaced range start");
    cmd->add_option("--d-max", opt.d_max, "log-spaced range end");
    cmd->add_option("--d-points", opt.d_points, "log-spaced point count (default 25)");
}

std::vector<double> make_distortion_grid(const DistortionGridOptions& opt, double variance) {
    std::vector<double> d;
    if (!opt.explicit_list.empty()) {
        d = parse_list(opt.explicit_list);
    } else {
        double lo = opt.d_min > 0.0 ? opt.d_min : 0.01 * variance;
        double hi = opt.d_max > 0.0 ? opt.d_max : 0.95 * variance;
        if (!(lo > 0.0) || !(hi > lo)) throw CLI::ValidationError("--d-min/--d-max", "bad range");
        const std::size_t n = std::max<std::size_t>(2, opt.d_points);
        for (std::size_t i = 0; i < n; ++i)
            d.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1)));
    }
    for (double v : d)
        if (!(v > 0.0) || v > variance)
            throw CLI::ValidationError("--d", "distortions must lie in (0, sigma_x^2]");
    return d;
}

double to_output_units(double nats, const std::string& units) {
    return units == "nats" ? nats : nats / std::numbers::ln2;
}

/// Rate(D) for the iterative design: bisect the target rate until the achieved
/// distortion lands within 1% of the request.  Rate -> distortion is monotone.
double design_rate_for_distortion(const SpectralModel& spec, double target_d, std::size_t taps,
                                  std::size_t iters) {
    double lo = 1e-6, hi = 0.5;  // nats
    auto final_d = [&](double rate) {
        return design_filters(spec, rate, taps, iters).distortion_trace.back();
    };
    while (final_d(hi) > target_d) {
        hi *= 2.0;
        if (hi > 48.0) throw std::runtime_error("design rate bracket exhausted");
    }
    double rate = hi;
    for (int it = 0; it < 60; ++it) {
        rate = 0.5 * (lo + hi);
        const double d = final_d(rate);
        if (std::abs(d - target_d) <= 0.01 * target_d) return rate;
        if (d > target_d)
            lo = rate;
        else
            hi = rate;
    }
    return rate;
}

int cmd_sweep(const SourceOptions& src, const DistortionGridOptions& dgrid,
              const std::string& curves_csv, const std::string& units, std::size_t taps,
              std::size_t iters, std::size_t jobs, double epsilon, bool epsilon_set,
              const std::string& out_path) {
    const auto spec = make_spectrum(src);
    const auto ar = maybe_ar(src);
    const auto d_grid = make_distortion_grid(dgrid, spec.variance());

    std::vector<std::string> curves;
    {
        std::istringstream in(curves_csv);
        std::string tok;
        while (std::getline(in, tok, ',')) curves.push_back(tok);
    }
    for (const auto& c : curves)
        if (c != "shannon" && c != "r_perp" && c != "awgn" && c != "rcit_ar1" && c != "b1" &&
            c != "b2" && c != "b3" && c != "procedure2")
            throw CLI::ValidationError("--curves", "unknown curve " + c);

    // worker pool over distortion points; rows land in a pre-sized table
    std::vector<std::vector<std::string>> cells(d_grid.size(),
                                                std::vector<std::string>(curves.size()));
    std::atomic<std::size_t> cursor{0};
    std::mutex diag_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t row = cursor.fetch_add(1);
            if (row >= d_grid.size()) return;
            const double D = d_grid[row];
            for (std::size_t col = 0; col < curves.size(); ++col) {
                try {
                    const auto& curve = curves[col];
                    double nats = 0.0;
                    if (curve == "shannon") {
                        nats = shannon_rdf(spec, D).rate;
                    } else if (curve == "r_perp") {
                        nats = r_perp(spec, D).rate;
                    } else if (curve == "awgn") {
                        nats = awgn_rate(spec, D);
                    } else if (curve == "rcit_ar1") {
                        if (!ar || ar->coeffs.size() != 1)
                            throw std::runtime_error("rcit_ar1 needs a first-order --ar source");
                        nats = causal_rdf_ar1(ar->coeffs[0], ar->innovation_variance, D);
                    } else if (curve == "b1") {
                        nats = bound_b1(spec, D);
                    } else if (curve == "b2") {
                        nats = bound_b2(spec, D);
                    } else if (curve == "b3") {
                        nats = bound_b3(spec, D,
                                        epsilon_set ? epsilon : default_b3_epsilon(spec, D));
                    } else {  // procedure2
                        nats = design_rate_for_distortion(spec, D, taps, iters);
                    }
                    cells[row][col] = format_num(to_output_units(nats, units));
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(diag_mutex);
                    std::cerr << "sweep: D=" << format_num(D) << " curve=" << curves[col]
                              << " failed: " << e.what() << "\n";
                }
            }
        }
    };
    const std::size_t nthreads =
        std::max<std::size_t>(1, jobs ? jobs : std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t + 1 < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ostringstream csv;
    csv << "D";
    for (const auto& c : curves) csv << "," << c;
    csv << "\n";
    for (std::size_t row = 0; row < d_grid.size(); ++row) {
        csv << format_num(d_grid[row]);
        for (std::size_t col = 0; col < curves.size(); ++col) csv << "," << cells[row][col];
        csv << "\n";
    }
    write_output(out_path, csv.str());
    return 0;
}

int cmd_bounds(const SourceOptions& src, const DistortionGridOptions& dgrid, double epsilon,
               bool epsilon_set, const std::string& units, const std::string& out_path) {
    const auto spec = make_spectrum(src);
    const auto d_grid = make_distortion_grid(dgrid, spec.variance());
    std::ostringstream csv;
    csv << "D,r_shannon,b1,b2,b3,epsilon\n";
    for (double D : d_grid) {
        const double eps = epsilon_set ? epsilon : default_b3_epsilon(spec, D);
        csv << format_num(D) << "," << format_num(to_output_units(shannon_rdf(spec, D).rate, units))
            << "," << format_num(to_output_units(bound_b1(spec, D), units)) << ","
            << format_num(to_output_units(bound_b2(spec, D), units)) << ","
            << format_num(to_output_units(bound_b3(spec, D, eps), units)) << ","
            << format_num(eps) << "\n";
    }
    write_output(out_path, csv.str());
    return 0;
}

int cmd_design(const SourceOptions& src, double rate_bits, double rate_nats, std::size_t taps,
               std::size_t iters, const std::string& out_path) {
    const auto spec = make_spectrum(src);
    const double nats = rate_nats > 0.0 ? rate_nats : rate_bits * std::numbers::ln2;
    if (!(nats > 0.0)) throw CLI::ValidationError("--rate-bits/--rate-nats", "need a positive rate");
    const auto outcome = design_filters(spec, nats, taps, iters);
    write_output(out_path, to_json(outcome).dump(2) + "\n");
    return 0;
}

int cmd_realize(const SourceOptions& src, const std::string& design_path, std::size_t taps,
                const std::string& out_path) {
    std::ifstream in(design_path);
    if (!in) throw std::runtime_error("cannot open design file " + design_path);
    const auto outcome = design_outcome_from_json(nlohmann::json::parse(in));
    SourceOptions resized = src;
    resized.grid_points = outcome.state.grid.size();
    const auto spec = make_spectrum(resized);
    const auto fs = build_filter_set(spec, outcome, taps);
    write_output(out_path, to_json(fs).dump(2) + "\n");
    return 0;
}

int cmd_simulate(const SourceOptions& src, const std::string& filters_path,
                 const std::string& variant, std::size_t samples, std::size_t burn_in,
                 std::uint64_t seed, const std::string& trace_path, const std::string& out_path) {
    const auto ar = maybe_ar(src);
    if (!ar) throw CLI::ValidationError("--ar", "simulate needs an AR source");
    std::ifstream in(filters_path);
    if (!in) throw std::runtime_error("cannot open filter file " + filters_path);
    const auto fs = filter_set_from_json(nlohmann::json::parse(in));
    SimConfig cfg;
    cfg.n_samples = samples;
    cfg.burn_in = burn_in;
    cfg.seed = seed;
    cfg.variant = variant == "awgn" ? ChannelVariant::awgn : ChannelVariant::sdusq;
    SimReport rep;
    if (!trace_path.empty()) {
        std::ofstream trace(trace_path, std::ios::binary);
        if (!trace) throw std::runtime_error("cannot open trace file " + trace_path);
        trace << "k,x,v,w,y,n_prime\n";
        rep = simulate(*ar, fs, cfg, &trace);
    } else {
        rep = simulate(*ar, fs, cfg);
    }
    write_output(out_path, to_json(rep).dump(2) + "\n");
    return 0;
}

int cmd_srdf(const std::string& schedule_path, const std::string& out_path) {
    std::ifstream in(schedule_path);
    if (!in) throw std::runtime_error("cannot open schedule file " + schedule_path);
    const auto sched = schedule_from_json(nlohmann::json::parse(in));
    const double nats = srdf_rate(sched);
    nlohmann::json j{{"rate_nats", nats},
                     {"rate_bits", nats / std::numbers::ln2},
                     {"effective_distortions", effective_distortions(sched)}};
    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"causal rate-distortion toolbox for stationary Gaussian sources"};
    app.require_subcommand(1);

    SourceOptions src;
    DistortionGridOptions dgrid;
    std::string out_path, units = "bits";
    std::string curves = "shannon,r_perp,awgn,b1,b2,b3";
    std::size_t taps = 8, iters = 4, jobs = 0;
    double rate_bits = 0.0, rate_nats = 0.0, epsilon = 0.0;
    std::string design_path, filters_path, schedule_path, variant = "sdusq", trace_path;
    std::size_t samples = std::size_t{1} << 17, burn_in = 4096, realize_taps = 64;
    std::uint64_t seed = 0;

    auto* sweep = app.add_subcommand("sweep", "rate-distortion curves as CSV");
    add_source_flags(sweep, src);
    add_distortion_flags(sweep, dgrid);
    sweep->add_option("--curves", curves,
                      "subset of shannon,r_perp,awgn,rcit_ar1,b1,b2,b3,procedure2");
    sweep->add_option("--taps", taps, "denoiser FIR order for procedure2 (default 8)");
    sweep->add_option("--iters", iters, "design rounds for procedure2 (default 4)");
    auto* sweep_eps = sweep->add_option("--epsilon", epsilon, "epsilon for b3 (default: automatic)");
    sweep->add_option("--jobs", jobs, "worker threads (default: hardware)");
    sweep->add_option("--units", units)->check(CLI::IsMember({"bits", "nats"}));
    sweep->add_option("--out", out_path, "output file (default stdout)");

    auto* bounds = app.add_subcommand("bounds", "causal rate-loss bound table as CSV");
    add_source_flags(bounds, src);
    add_distortion_flags(bounds, dgrid);
    auto* eps_opt = bounds->add_option("--epsilon", epsilon, "epsilon for b3 (default: automatic)");
    bounds->add_option("--units", units)->check(CLI::IsMember({"bits", "nats"}));
    bounds->add_option("--out", out_path);

    auto* design = app.add_subcommand("design", "iterative causal filter design as JSON");
    add_source_flags(design, src);
    design->add_option("--rate-bits", rate_bits, "target rate, bits/sample");
    design->add_option("--rate-nats", rate_nats, "target rate, nats/sample");
    design->add_option("--taps", taps, "denoiser FIR order (default 8)");
    design->add_option("--iters", iters, "design rounds (default 4)");
    design->add_option("--out", out_path);

    auto* realize = app.add_subcommand("realize", "minimum-phase filter set from a design JSON");
    add_source_flags(realize, src);
    realize->add_option("--design", design_path, "design JSON from the design command")->required();
    realize->add_option("--taps", realize_taps, "impulse-response truncation length (default 64)");
    realize->add_option("--out", out_path);

    auto* simulate_cmd = app.add_subcommand("simulate", "time-domain coder simulation as JSON");
    add_source_flags(simulate_cmd, src);
    simulate_cmd->add_option("--filters", filters_path, "filter set JSON from realize")->required();
    simulate_cmd->add_option("--variant", variant)->check(CLI::IsMember({"awgn", "sdusq"}));
    simulate_cmd->add_option("--samples", samples, "run length (default 2^17)");
    simulate_cmd->add_option("--burn-in", burn_in, "transient samples to discard (default 4096)");
    simulate_cmd->add_option("--seed", seed, "64-bit seed (default 0)");
    simulate_cmd->add_option("--trace", trace_path, "raw trace CSV (k,x,v,w,y,n_prime)");
    simulate_cmd->add_option("--out", out_path);

    auto* srdf = app.add_subcommand("srdf", "sequential RDF of a distortion schedule");
    srdf->add_option("--schedule", schedule_path,
                     "JSON {sigma0_sq, a[], xi_var[], D[]}")->required();
    srdf->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed())
            return cmd_sweep(src, dgrid, curves, units, taps, iters, jobs, epsilon,
                             sweep_eps->count() > 0, out_path);
        if (bounds->parsed())
            return cmd_bounds(src, dgrid, epsilon, eps_opt->count() > 0, units, out_path);
        if (design->parsed()) return cmd_design(src, rate_bits, rate_nats, taps, iters, out_path);
        if (realize->parsed()) return cmd_realize(src, design_path, realize_taps, out_path);
        if (simulate_cmd->parsed())
            return cmd_simulate(src, filters_path, variant, samples, burn_in, seed, trace_path,
                                out_path);
        if (srdf->parsed()) return cmd_srdf(schedule_path, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
