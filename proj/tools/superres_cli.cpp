// Command-line front end: detect, recover, phase, witness, bounds, simulate.

#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "superres/superres.hpp"

namespace {

using namespace superres;
using io::json;

struct DataSource {
    std::string measure;
    std::string samples;
    double sigma = 0.0;
    double omega = 1.0;
    std::uint64_t seed = 0;
};

void add_source_options(CLI::App* cmd, DataSource& src) {
    auto* m = cmd->add_option("--measure", src.measure, "measure JSON file");
    auto* s = cmd->add_option("--samples", src.samples, "recorded samples CSV");
    m->excludes(s);
    s->excludes(m);
    cmd->add_option("--omega", src.omega, "cutoff frequency")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", src.seed, "noise seed");
}

/// Owns whichever oracle the flags describe.
struct LoadedOracle {
    std::unique_ptr<Oracle> oracle;
    std::vector<Sample> samples; // replay mode only
    int dimension = 0;
};

LoadedOracle load_oracle(const DataSource& src, int dim) {
    LoadedOracle out;
    if (!src.measure.empty()) {
        auto mu = io::load_measure(src.measure);
        if (dim != 0 && mu.dimension != dim) throw std::invalid_argument("measure dimension does not match --dim");
        out.dimension = mu.dimension;
        out.oracle = std::make_unique<MeasurementOracle>(std::move(mu), src.omega, src.sigma, src.seed);
    } else if (!src.samples.empty()) {
        out.samples = io::load_samples(src.samples, out.dimension);
        if (dim != 0 && out.dimension != dim) throw std::invalid_argument("samples dimension does not match --dim");
        out.oracle = std::make_unique<ReplayOracle>(out.dimension, src.omega, out.samples);
    } else {
        throw std::invalid_argument("one of --measure or --samples is required");
    }
    return out;
}

void emit(const json& j, const std::string& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) std::cout << text;
    else io::write_file(path, text);
}

Axis parse_axis(const std::string& text) {
    const auto a = text.find(':');
    const auto b = text.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos)
        throw std::invalid_argument("grid axis must be lo:hi:steps, got '" + text + "'");
    Axis ax;
    ax.lo = io::parse_double(text.substr(0, a));
    ax.hi = io::parse_double(text.substr(a + 1, b - a - 1));
    const double steps = io::parse_double(text.substr(b + 1));
    if (steps < 1 || steps != static_cast<int>(steps)) throw std::invalid_argument("grid steps must be a positive integer");
    ax.steps = static_cast<int>(steps);
    return ax;
}

/// "lo:hi:steps,lo:hi:steps" for log10 SRF then log10 1/sigma.
PhaseGrid parse_grid(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--grid must be srf_lo:srf_hi:steps,sig_lo:sig_hi:steps");
    return {parse_axis(text.substr(0, comma)), parse_axis(text.substr(comma + 1))};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resolution-limited detection and recovery of point sources from band-limited Fourier data"};
    app.require_subcommand(1);

    // detect
    DataSource det_src;
    int det_dim = 0, det_N = 12, det_smax = 8;
    auto* detect_cmd = app.add_subcommand("detect", "estimate the number of sources");
    add_source_options(detect_cmd, det_src);
    detect_cmd->add_option("--sigma", det_src.sigma, "noise level")->required()->check(CLI::NonNegativeNumber);
    detect_cmd->add_option("--dim", det_dim, "dimension (default: that of the input)")->check(CLI::IsMember({1, 2, 3}));
    detect_cmd->add_option("--N", det_N, "directions per family")->check(CLI::PositiveNumber);
    detect_cmd->add_option("--smax", det_smax, "largest Hankel order")->check(CLI::PositiveNumber);

    // recover
    DataSource rec_src;
    int rec_dim = 0, rec_n = 0, rec_N = 12, rec_s = 8;
    std::string rec_out;
    auto* recover_cmd = app.add_subcommand("recover", "recover source locations and amplitudes");
    add_source_options(recover_cmd, rec_src);
    recover_cmd->add_option("--sigma", rec_src.sigma, "noise level")->check(CLI::NonNegativeNumber);
    recover_cmd->add_option("--dim", rec_dim, "dimension (default: that of the input)")->check(CLI::IsMember({1, 2, 3}));
    recover_cmd->add_option("--n", rec_n, "number of sources")->required()->check(CLI::PositiveNumber);
    recover_cmd->add_option("--N", rec_N, "directions per family")->check(CLI::PositiveNumber);
    recover_cmd->add_option("--s", rec_s, "Hankel order (1D) or largest sweep order")->check(CLI::PositiveNumber);
    recover_cmd->add_option("--out", rec_out, "write JSON here instead of stdout");

    // phase
    std::string ph_mode = "number", ph_grid = "0.3:1.2:10,1:12:12", ph_out;
    PhaseConfig ph;
    auto* phase_cmd = app.add_subcommand("phase", "phase-transition experiment");
    phase_cmd->add_option("--mode", ph_mode, "number or support")->check(CLI::IsMember({"number", "support"}));
    phase_cmd->add_option("--dim", ph.dimension, "dimension")->check(CLI::IsMember({2, 3}));
    phase_cmd->add_option("--n", ph.n, "number of sources")->check(CLI::Range(2, 6));
    phase_cmd->add_option("--grid", ph_grid, "log10 SRF and log10 1/sigma axes, lo:hi:steps,lo:hi:steps");
    phase_cmd->add_option("--trials", ph.trials, "trials per cell")->check(CLI::PositiveNumber);
    phase_cmd->add_option("--seed", ph.seed, "master seed");
    phase_cmd->add_option("--N", ph.N, "directions per family")->check(CLI::PositiveNumber);
    phase_cmd->add_option("--smax", ph.s_max, "largest Hankel order")->check(CLI::PositiveNumber);
    phase_cmd->add_option("--plane-grid", ph.plane_grid, "3D plane family grid (0: same as --N)")->check(CLI::NonNegativeNumber);
    phase_cmd->add_option("--threads", ph.threads, "worker threads")->check(CLI::PositiveNumber);
    phase_cmd->add_option("--out", ph_out, "CSV output file")->required();

    // witness
    int w_n = 2;
    double w_sigma = 1e-4, w_mmin = 1.0, w_omega = 1.0;
    std::string w_mode = "number";
    auto* witness_cmd = app.add_subcommand("witness", "construct a lower-bound witness pair");
    witness_cmd->add_option("--n", w_n, "number of sources")->check(CLI::Range(2, 10));
    witness_cmd->add_option("--sigma", w_sigma, "noise level")->required()->check(CLI::PositiveNumber);
    witness_cmd->add_option("--mmin", w_mmin, "minimum amplitude")->check(CLI::PositiveNumber);
    witness_cmd->add_option("--omega", w_omega, "cutoff frequency")->check(CLI::PositiveNumber);
    witness_cmd->add_option("--mode", w_mode, "number or support")->check(CLI::IsMember({"number", "support"}));

    // bounds
    int b_n = 2, b_dim = 2;
    double b_sigma = 1e-4, b_mmin = 1.0, b_omega = 1.0;
    auto* bounds_cmd = app.add_subcommand("bounds", "resolution-limit bounds");
    bounds_cmd->add_option("--n", b_n, "number of sources")->check(CLI::Range(2, 100));
    bounds_cmd->add_option("--dim", b_dim, "dimension")->check(CLI::PositiveNumber);
    bounds_cmd->add_option("--sigma", b_sigma, "noise level")->required()->check(CLI::PositiveNumber);
    bounds_cmd->add_option("--mmin", b_mmin, "minimum amplitude")->check(CLI::PositiveNumber);
    bounds_cmd->add_option("--omega", b_omega, "cutoff frequency")->check(CLI::PositiveNumber);

    // simulate
    DataSource sim_src;
    int sim_N = 12, sim_smax = 8;
    std::string sim_out;
    auto* simulate_cmd = app.add_subcommand("simulate", "record the samples a detection run queries, as a samples CSV");
    sim_src.seed = 0;
    simulate_cmd->add_option("--measure", sim_src.measure, "measure JSON file")->required();
    simulate_cmd->add_option("--sigma", sim_src.sigma, "noise level")->check(CLI::NonNegativeNumber);
    simulate_cmd->add_option("--omega", sim_src.omega, "cutoff frequency")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", sim_src.seed, "noise seed");
    simulate_cmd->add_option("--N", sim_N, "directions per family")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--smax", sim_smax, "largest Hankel order (1D: record order)")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--out", sim_out, "CSV output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*detect_cmd) {
            const auto src = load_oracle(det_src, det_dim);
            det_dim = src.dimension;
            if (det_dim == 1 && !det_src.samples.empty()) {
                const auto sw = sweep_detect_1d(line_from_samples(src.samples), det_src.sigma, det_smax);
                DetectionResult r;
                r.count = sw.count;
                r.winner = 0;
                DirectionReport rep{UnitVector{1.0}, sw.count, {}};
                if (sw.order > 0) rep.singular = sw.singular[static_cast<std::size_t>(sw.order - 1)];
                r.per_direction.push_back(std::move(rep));
                emit(io::detection_json(r), "");
            } else {
                DetectionConfig cfg{det_src.sigma, det_smax, det_N, det_dim};
                emit(io::detection_json(detect(*src.oracle, cfg)), "");
            }
        } else if (*recover_cmd) {
            const auto src = load_oracle(rec_src, rec_dim);
            rec_dim = src.dimension;
            if (rec_dim == 1) {
                LineSamples line;
                if (!rec_src.samples.empty()) {
                    const auto record = line_from_samples(src.samples);
                    line = recover_cmd->count("--s") ? subsample(record, rec_s) : record;
                } else {
                    line = sample_line(*src.oracle, rec_s);
                }
                emit(io::pencil_json(matrix_pencil(line, rec_n)), rec_out);
            } else {
                RecoveryConfig cfg;
                cfg.N = rec_N;
                cfg.s_max = rec_s;
                const auto r = rec_dim == 2 ? recover_2d(*src.oracle, rec_n, rec_src.sigma, cfg)
                                            : recover_3d(*src.oracle, rec_n, rec_src.sigma, cfg);
                emit(io::recovery_json(r), rec_out);
            }
        } else if (*phase_cmd) {
            ph.mode = parse_mode(ph_mode);
            ph.grid = parse_grid(ph_grid);
            const auto result = phase_diagram(ph);
            io::write_file(ph_out, io::phase_csv(result.records));
            std::size_t successes = 0;
            for (const auto& r : result.records) successes += r.success ? 1 : 0;
            emit(json{{"trials", result.records.size()}, {"successes", successes},
                      {"boundary", io::boundary_json(result.boundary)}},
                 "");
        } else if (*witness_cmd) {
            emit(io::witness_json(witness(w_n, w_sigma, w_mmin, w_omega, parse_mode(w_mode))), "");
        } else if (*bounds_cmd) {
            emit(io::bounds_json(bounds(b_n, b_dim, b_omega, b_sigma, b_mmin)), "");
        } else if (*simulate_cmd) {
            const auto mu = io::load_measure(sim_src.measure);
            const MeasurementOracle oracle(mu, sim_src.omega, sim_src.sigma, sim_src.seed);
            std::vector<Sample> samples;
            if (mu.dimension == 1) {
                const auto line = sample_line(oracle, sim_smax);
                for (int t = 0; t < line.count(); ++t) samples.push_back({line.omega(t), line.values[t]});
            } else {
                const RecordingOracle rec(oracle);
                detect(rec, DetectionConfig{sim_src.sigma, sim_smax, sim_N, mu.dimension});
                samples = rec.samples();
            }
            io::write_file(sim_out, io::samples_csv(samples, mu.dimension));
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
