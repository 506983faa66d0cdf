// bifurjet command-line pipeline: synthetic event generation, Durham
// clustering, QUBO-based clustering with simulated bifurcation solvers,
// mass reconstruction, annealing simulation and TTS arithmetic.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bifurjet/anneal.hpp"
#include "bifurjet/durham.hpp"
#include "bifurjet/event_io.hpp"
#include "bifurjet/ising.hpp"
#include "bifurjet/jet_qubo.hpp"
#include "bifurjet/metrics.hpp"
#include "bifurjet/parallel.hpp"
#include "bifurjet/sb.hpp"

namespace {

using nlohmann::ordered_json;
using namespace bifurjet;

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BIFURJET_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return hardware_threads();
}

void write_config_echo(const ordered_json& config, const std::string& out_path) {
    const std::string path = out_path + ".config.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config echo '" + path + "'");
    out << config.dump(2) << '\n';
    std::cout << "config: " << config.dump() << '\n';
}

void write_lines(const std::vector<std::string>& lines, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const auto& line : lines) out << line << '\n';
    if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

ordered_json jet_to_json(const Jet& jet) {
    ordered_json j;
    j["e"] = jet.p4.e;
    j["px"] = jet.p4.px;
    j["py"] = jet.p4.py;
    j["pz"] = jet.p4.pz;
    j["btag"] = jet.btag;
    j["constituents"] = jet.constituents;
    return j;
}

void warn_njet_mismatch(const std::vector<Event>& events, int njet) {
    if (events.empty()) return;
    const auto it = events.front().meta.find("process");
    if (it == events.front().meta.end()) return;
    try {
        const int expected = process_njet(parse_process(it->second));
        if (expected != njet)
            std::cerr << "warning: events are tagged process '" << it->second
                      << "' (n_jet " << expected << ") but --njet is " << njet << "\n";
    } catch (const std::exception&) {
        // unknown tag, nothing to check
    }
}

// --------------------------------------------------------------------------

struct GenOptions {
    std::string process = "z";
    int events = 10;
    std::uint64_t seed = 1;
    double sqrt_s = 0.0;
    int min_particles = 4;
    int max_particles = 6;
    double spread = 0.05;
    double smear = 0.0;
    int threads = 0;
    std::string out;
};

int run_gen(const GenOptions& opt) {
    SyntheticSpec base;
    base.process = parse_process(opt.process);
    base.sqrt_s = opt.sqrt_s;
    base.min_particles = opt.min_particles;
    base.max_particles = opt.max_particles;
    base.angular_spread = opt.spread;
    base.energy_smear = opt.smear;
    base.seed = opt.seed;
    base.validate();

    ordered_json config{{"command", "gen"},       {"process", opt.process},
                        {"events", opt.events},   {"seed", opt.seed},
                        {"sqrt_s", base.resolved_sqrt_s()},
                        {"min_particles", opt.min_particles},
                        {"max_particles", opt.max_particles},
                        {"spread", opt.spread},   {"smear", opt.smear},
                        {"out", opt.out}};
    write_config_echo(config, opt.out);

    std::vector<Event> events(static_cast<std::size_t>(opt.events));
    parallel_for(events.size(), resolve_threads(opt.threads), [&](std::size_t i) {
        SyntheticSpec spec = base;
        spec.seed = child_seed(opt.seed, i);
        Event event = generate_synthetic_event(spec).event;
        event.meta["index"] = std::to_string(i);
        events[i] = std::move(event);
    });
    write_events(events, opt.out);
    std::cout << "wrote " << events.size() << " events to " << opt.out << '\n';
    return 0;
}

// --------------------------------------------------------------------------

struct DurhamOptions {
    std::string events_path;
    int njet = 2;
    int threads = 0;
    std::string out;
};

int run_durham(const DurhamOptions& opt) {
    ordered_json config{{"command", "durham"},
                        {"events", opt.events_path},
                        {"njet", opt.njet},
                        {"out", opt.out}};
    write_config_echo(config, opt.out);

    const std::vector<Event> events = read_events(opt.events_path);
    warn_njet_mismatch(events, opt.njet);
    std::vector<std::string> lines(events.size());
    parallel_for(events.size(), resolve_threads(opt.threads), [&](std::size_t i) {
        const std::vector<Jet> jets = durham_exclusive(events[i], opt.njet);
        ordered_json j;
        j["index"] = i;
        j["jets"] = ordered_json::array();
        for (const Jet& jet : jets) j["jets"].push_back(jet_to_json(jet));
        if (jets.size() >= 2) {
            const Preselection sel = event_preselection(jets);
            j["preselection"] = {{"pass", sel.pass}, {"reasons", sel.reasons}};
        }
        lines[i] = j.dump();
    });
    write_lines(lines, opt.out);
    std::cout << "clustered " << events.size() << " events into " << opt.njet
              << " jets each -> " << opt.out << '\n';
    return 0;
}

// --------------------------------------------------------------------------

struct SolveOptions {
    std::string events_path;
    int njet = 2;
    std::string metric = "eekt";
    std::string solver = "bsb";
    std::string encoding = "onehot";
    int shots = 0;  // 0 -> 100 for njet == 2, 50 otherwise
    int steps = 1000;
    int sweeps = 1000;
    std::uint64_t seed = 1;
    double a0 = 1.0;
    double dt = 0.25;
    std::optional<double> c0;
    std::optional<double> lambda;
    int keep = 0;  // simplify_event when > 0
    int record_every = 0;
    int threads = 0;
    std::string timing_out;
    std::string out;

    int resolved_shots() const { return shots > 0 ? shots : (njet == 2 ? 100 : 50); }

    SolverSpec make_spec(const std::string& name) const {
        SolverSpec spec = SolverSpec::parse(name);
        spec.sb.a0 = a0;
        spec.sb.dt = dt;
        spec.sb.c0 = c0;
        spec.sb.steps = steps;
        spec.sa.sweeps = sweeps;
        return spec;
    }

    ordered_json config_json(const char* command) const {
        ordered_json j{{"command", command}, {"events", events_path},
                       {"njet", njet},       {"metric", metric},
                       {"solver", solver},   {"encoding", encoding},
                       {"shots", resolved_shots()}, {"steps", steps},
                       {"sweeps", sweeps},   {"seed", seed},
                       {"a0", a0},           {"dt", dt},
                       {"keep", keep},       {"record_every", record_every},
                       {"out", out}};
        if (c0) j["c0"] = *c0;
        if (lambda) j["lambda"] = *lambda;
        return j;
    }
};

struct EventSolveResult {
    std::string line;
    double wall_time_s = 0.0;
    std::size_t qubo_size = 0;
};

EventSolveResult solve_event(const Event& input, const SolveOptions& opt,
                             std::uint64_t event_seed, std::size_t index) {
    Event event = input;
    if (opt.keep > 0) event = simplify_event(event, opt.keep).event;

    const DistanceKind metric = parse_distance_kind(opt.metric);
    const int n_input = static_cast<int>(event.particles.size());
    const std::vector<Jet> reference = durham_exclusive(event, opt.njet);
    const Matrix dist = distance_matrix(event, metric);

    const bool onehot = opt.encoding == "onehot";
    const Qubo qubo = onehot ? build_multijet_qubo(event, opt.njet, metric, opt.lambda)
                             : build_dijet_qubo(event, metric);
    const IsingModel model = qubo_to_ising(qubo);

    const SolverSpec spec = opt.make_spec(opt.solver);
    const auto t0 = std::chrono::steady_clock::now();
    const ShotEnsemble ensemble =
        multi_shot(spec, model, opt.resolved_shots(), event_seed, opt.record_every, 1);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const BitConfig bits = spins_to_bits(ensemble.best().best_spins);
    DecodeReport decoded;
    if (onehot) {
        decoded = decode_assignment(bits, n_input, opt.njet, &dist);
    } else {
        decoded.assignment.n_input = n_input;
        decoded.assignment.jets.assign(2, {});
        for (int i = 0; i < n_input; ++i)
            decoded.assignment.jets[bits.bits[static_cast<std::size_t>(i)] ? 0 : 1].push_back(i);
    }
    const EfficiencyReport eff = jet_efficiency(decoded.assignment, reference);

    ordered_json j;
    j["index"] = index;
    j["n_input"] = n_input;
    j["qubo_size"] = qubo.n;
    j["best_energy"] = ensemble.best().best_energy;
    j["violations"] = decoded.violation_count();
    j["repaired"] = decoded.repaired;
    j["efficiency"] = {{"mean", eff.mean}, {"per_jet", eff.per_jet}};
    j["assignment"] = decoded.assignment.jets;
    return {j.dump(), wall, qubo.n};
}

int run_cluster(const SolveOptions& opt) {
    if (opt.encoding != "onehot" && opt.encoding != "dijet")
        throw std::invalid_argument("--encoding must be onehot or dijet");
    if (opt.encoding == "dijet" && opt.njet != 2)
        throw std::invalid_argument("dijet encoding requires --njet 2");
    write_config_echo(opt.config_json("cluster"), opt.out);

    const std::vector<Event> events = read_events(opt.events_path);
    warn_njet_mismatch(events, opt.njet);
    std::vector<EventSolveResult> results(events.size());
    parallel_for(events.size(), resolve_threads(opt.threads), [&](std::size_t i) {
        results[i] = solve_event(events[i], opt, child_seed(opt.seed, i), i);
    });

    std::vector<std::string> lines;
    lines.reserve(results.size());
    double total_wall = 0.0;
    for (const auto& r : results) {
        lines.push_back(r.line);
        total_wall += r.wall_time_s;
    }
    write_lines(lines, opt.out);

    // wall-clock numbers stay out of --out so reruns are byte-identical
    if (!opt.timing_out.empty()) {
        std::ofstream timing(opt.timing_out);
        if (!timing) throw std::runtime_error("cannot open '" + opt.timing_out + "'");
        timing << "index,qubo_size,wall_time_s\n";
        for (std::size_t i = 0; i < results.size(); ++i)
            timing << i << ',' << results[i].qubo_size << ',' << results[i].wall_time_s << '\n';
    }
    std::cout << "solved " << events.size() << " events; mean solve time "
              << (events.empty() ? 0.0 : total_wall / static_cast<double>(events.size()))
              << " s/event -> " << opt.out << '\n';
    return 0;
}

// --------------------------------------------------------------------------

struct BenchOptions {
    SolveOptions solve;
    std::size_t event_index = 0;
};

int run_bench(const BenchOptions& opt) {
    if (opt.solve.encoding != "onehot")
        throw std::invalid_argument("bench supports only the onehot encoding");
    if (opt.solve.record_every < 1)
        throw std::invalid_argument("bench requires --record-every >= 1");
    ordered_json config = opt.solve.config_json("bench");
    config["event_index"] = opt.event_index;
    write_config_echo(config, opt.solve.out);

    const std::vector<Event> all = read_events(opt.solve.events_path);
    if (opt.event_index >= all.size())
        throw std::invalid_argument("--event-index out of range, file has " +
                                    std::to_string(all.size()) + " events");
    Event event = all[opt.event_index];
    if (opt.solve.keep > 0) event = simplify_event(event, opt.solve.keep).event;
    warn_njet_mismatch(all, opt.solve.njet);

    const DistanceKind metric = parse_distance_kind(opt.solve.metric);
    const std::vector<Jet> reference = durham_exclusive(event, opt.solve.njet);
    const Matrix dist = distance_matrix(event, metric);
    const Qubo qubo = build_multijet_qubo(event, opt.solve.njet, metric, opt.solve.lambda);
    const IsingModel model = qubo_to_ising(qubo);

    std::vector<std::string> solvers;
    {
        std::stringstream ss(opt.solve.solver);
        std::string token;
        while (std::getline(ss, token, ',')) solvers.push_back(token);
    }
    if (solvers.empty()) throw std::invalid_argument("no solver given");

    std::ofstream out(opt.solve.out);
    if (!out) throw std::runtime_error("cannot open '" + opt.solve.out + "' for writing");
    out.precision(17);
    if (solvers.size() > 1) out << "solver,";
    out << "step,time_s,energy_mean,energy_std,eff_mean,eff_std\n";
    const int threads = resolve_threads(opt.solve.threads);
    for (std::size_t s = 0; s < solvers.size(); ++s) {
        const SolverSpec spec = opt.solve.make_spec(solvers[s]);
        const ShotEnsemble ensemble =
            multi_shot(spec, model, opt.solve.resolved_shots(), child_seed(opt.solve.seed, s),
                       opt.solve.record_every, threads);
        for (const TrajectoryRow& row : trajectory_aggregate(ensemble, reference, &dist)) {
            if (solvers.size() > 1) out << solvers[s] << ',';
            out << row.step << ',' << row.time_s << ',' << row.energy_mean << ','
                << row.energy_std << ',' << row.eff_mean << ',' << row.eff_std << '\n';
        }
    }
    std::cout << "benchmarked " << opt.solve.solver << " on event " << opt.event_index
              << " (" << qubo.n << " spins) -> " << opt.solve.out << '\n';
    return 0;
}

// --------------------------------------------------------------------------

struct MassOptions {
    std::string events_path;
    std::string process;  // empty -> read from event meta
    std::string source = "durham";
    int njet = 0;         // 0 -> per-process default
    double mw = kWMassReference;
    double mt = kTopMassReference;
    int threads = 0;
    std::string out;
};

int run_mass(const MassOptions& opt) {
    if (opt.source != "durham" && opt.source != "truth")
        throw std::invalid_argument("--source must be durham or truth");
    ordered_json config{{"command", "mass"}, {"events", opt.events_path},
                        {"process", opt.process}, {"source", opt.source},
                        {"njet", opt.njet},  {"mw", opt.mw},
                        {"mt", opt.mt},      {"out", opt.out}};
    write_config_echo(config, opt.out);

    const std::vector<Event> events = read_events(opt.events_path);
    std::vector<std::string> lines(events.size());
    parallel_for(events.size(), resolve_threads(opt.threads), [&](std::size_t i) {
        const Event& event = events[i];
        std::string process_tag = opt.process;
        if (process_tag.empty()) {
            const auto it = event.meta.find("process");
            if (it == event.meta.end())
                throw std::runtime_error("event " + std::to_string(i) +
                                         " has no process tag; pass --process");
            process_tag = it->second;
        }
        const Process process = parse_process(process_tag);
        const int njet = opt.njet > 0 ? opt.njet : process_njet(process);
        const std::vector<Jet> jets = opt.source == "truth"
                                          ? truth_jets(event)
                                          : durham_exclusive(event, njet);
        const MassResult masses = reconstruct_masses(jets, process, opt.mw, opt.mt);
        ordered_json j;
        j["index"] = i;
        j["process"] = process_tag;
        j["masses"] = ordered_json::object();
        for (const auto& [key, value] : masses.masses) j["masses"][key] = value;
        j["warnings"] = masses.warnings;
        lines[i] = j.dump();
    });
    write_lines(lines, opt.out);
    std::cout << "reconstructed masses for " << events.size() << " events -> " << opt.out << '\n';
    return 0;
}

// --------------------------------------------------------------------------

struct AnnealOptions {
    std::string events_path;
    std::size_t event_index = 0;
    int keep = 6;
    int njet = 2;
    std::string metric = "eekt";
    std::optional<double> lambda;
    double total_time = 20.0;
    int steps = 1000;
    int record_every = 10;
    bool no_normalize = false;
    std::string out;
};

int run_anneal(const AnnealOptions& opt) {
    ordered_json config{{"command", "anneal"},   {"events", opt.events_path},
                        {"event_index", opt.event_index}, {"keep", opt.keep},
                        {"njet", opt.njet},      {"metric", opt.metric},
                        {"total_time", opt.total_time},   {"steps", opt.steps},
                        {"record_every", opt.record_every},
                        {"normalize", !opt.no_normalize}, {"out", opt.out}};
    if (opt.lambda) config["lambda"] = *opt.lambda;
    write_config_echo(config, opt.out);

    const std::vector<Event> all = read_events(opt.events_path);
    if (opt.event_index >= all.size())
        throw std::invalid_argument("--event-index out of range, file has " +
                                    std::to_string(all.size()) + " events");
    const Event event = simplify_event(all[opt.event_index], opt.keep).event;
    const Qubo qubo = build_multijet_qubo(event, opt.njet, parse_distance_kind(opt.metric),
                                          opt.lambda);
    IsingModel model = qubo_to_ising(qubo);
    if (model.n > kMaxAnnealSpins)
        throw std::invalid_argument("problem needs " + std::to_string(model.n) +
                                    " qubits; reduce --keep or --njet (limit " +
                                    std::to_string(kMaxAnnealSpins) + ")");

    if (!opt.no_normalize) {
        // rescale couplings so the evolution runs at O(1) energy; the ground
        // state is invariant under a positive scale
        double scale = 0.0;
        for (std::size_t i = 0; i < model.n; ++i) {
            scale = std::max(scale, std::abs(model.h[i]));
            for (std::size_t j = 0; j < model.n; ++j)
                scale = std::max(scale, std::abs(model.j(i, j)));
        }
        if (scale > 0.0) {
            for (std::size_t i = 0; i < model.n; ++i) {
                model.h[i] /= scale;
                for (std::size_t j = 0; j < model.n; ++j) model.j(i, j) /= scale;
            }
            model.offset /= scale;
        }
    }

    const auto t0 = std::chrono::steady_clock::now();
    const AnnealResult result = anneal_evolve(model, AnnealSchedule::linear(), opt.total_time,
                                              opt.steps, std::max(1, opt.record_every));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream out(opt.out);
    if (!out) throw std::runtime_error("cannot open '" + opt.out + "' for writing");
    out << "s,energy_expectation,ground_probability,norm\n";
    out.precision(17);
    for (const AnnealTraceRow& row : result.trace)
        out << row.s << ',' << row.energy_expectation << ',' << row.ground_probability << ','
            << row.norm << '\n';

    const double p = ground_state_probability(result.state, model);
    std::cout << "annealed " << model.n << " qubits over t=" << opt.total_time
              << ": ground-state probability " << p << " (wall " << wall << " s)\n";
    if (p > 0.0)
        std::cout << "TTS at 99%: " << time_to_solution(p, opt.total_time) << " (annealing-time units)\n";
    return 0;
}

// --------------------------------------------------------------------------

struct TtsOptions {
    double p = 0.0;
    double t_shot = 0.0;
    double target = 0.99;
};

int run_tts(const TtsOptions& opt) {
    std::cout.precision(12);
    std::cout << time_to_solution(opt.p, opt.t_shot, opt.target) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QUBO multijet clustering with simulated-bifurcation solvers"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate synthetic events");
    gen_cmd->add_option("--process", gen.process, "z, zh or tt")->capture_default_str();
    gen_cmd->add_option("--events", gen.events, "number of events")->required();
    gen_cmd->add_option("--seed", gen.seed, "master seed")->capture_default_str();
    gen_cmd->add_option("--sqrt-s", gen.sqrt_s, "center-of-mass energy in GeV (0 = default)");
    gen_cmd->add_option("--min-particles", gen.min_particles, "min particles per jet")
        ->capture_default_str();
    gen_cmd->add_option("--max-particles", gen.max_particles, "max particles per jet")
        ->capture_default_str();
    gen_cmd->add_option("--spread", gen.spread, "fragmentation cone width in rad")
        ->capture_default_str();
    gen_cmd->add_option("--smear", gen.smear, "relative Gaussian energy smear")
        ->capture_default_str();
    gen_cmd->add_option("--threads", gen.threads, "worker threads (0 = auto)");
    gen_cmd->add_option("--out", gen.out, "output JSONL path")->required();

    DurhamOptions durham;
    auto* durham_cmd = app.add_subcommand("durham", "exclusive ee-kt clustering");
    durham_cmd->add_option("--events", durham.events_path, "input JSONL")->required();
    durham_cmd->add_option("--njet", durham.njet, "exclusive jet count")->capture_default_str();
    durham_cmd->add_option("--threads", durham.threads, "worker threads (0 = auto)");
    durham_cmd->add_option("--out", durham.out, "output JSONL path")->required();

    SolveOptions cluster;
    auto* cluster_cmd = app.add_subcommand("cluster", "QUBO clustering with a QAIA solver");
    cluster_cmd->add_option("--events", cluster.events_path, "input JSONL")->required();
    cluster_cmd->add_option("--njet", cluster.njet, "jet multiplicity")->capture_default_str();
    cluster_cmd->add_option("--metric", cluster.metric, "eekt or angle")->capture_default_str();
    cluster_cmd->add_option("--solver", cluster.solver, "bsb, dsb or sa")->capture_default_str();
    cluster_cmd->add_option("--encoding", cluster.encoding, "onehot or dijet")
        ->capture_default_str();
    cluster_cmd->add_option("--shots", cluster.shots, "shots per event (0: 100 dijet / 50)");
    cluster_cmd->add_option("--steps", cluster.steps, "SB iterations")->capture_default_str();
    cluster_cmd->add_option("--sweeps", cluster.sweeps, "SA sweeps")->capture_default_str();
    cluster_cmd->add_option("--seed", cluster.seed, "master seed")->capture_default_str();
    cluster_cmd->add_option("--a0", cluster.a0, "SB detuning")->capture_default_str();
    cluster_cmd->add_option("--dt", cluster.dt, "SB time step")->capture_default_str();
    cluster_cmd->add_option("--c0", [&cluster](const CLI::results_t& r) {
        cluster.c0 = std::stod(r[0]);
        return true;
    }, "SB coupling strength (default: auto)");
    cluster_cmd->add_option("--lambda", [&cluster](const CLI::results_t& r) {
        cluster.lambda = std::stod(r[0]);
        return true;
    }, "one-hot penalty (default: 1.1 N max Q)");
    cluster_cmd->add_option("--keep", cluster.keep, "keep only N highest-pt particles");
    cluster_cmd->add_option("--record-every", cluster.record_every, "trajectory grid");
    cluster_cmd->add_option("--threads", cluster.threads, "worker threads (0 = auto)");
    cluster_cmd->add_option("--timing", cluster.timing_out, "per-event wall-time CSV");
    cluster_cmd->add_option("--out", cluster.out, "output JSONL path")->required();

    BenchOptions bench;
    bench.solve.record_every = 10;
    auto* bench_cmd = app.add_subcommand("bench", "energy/efficiency-vs-time trajectories");
    bench_cmd->add_option("--events", bench.solve.events_path, "input JSONL")->required();
    bench_cmd->add_option("--event-index", bench.event_index, "event to benchmark")
        ->capture_default_str();
    bench_cmd->add_option("--njet", bench.solve.njet, "jet multiplicity")->capture_default_str();
    bench_cmd->add_option("--metric", bench.solve.metric, "eekt or angle")->capture_default_str();
    bench_cmd->add_option("--solver", bench.solve.solver, "comma list of bsb,dsb,sa")
        ->capture_default_str();
    bench_cmd->add_option("--shots", bench.solve.shots, "shots (0: 100 dijet / 50)");
    bench_cmd->add_option("--steps", bench.solve.steps, "SB iterations")->capture_default_str();
    bench_cmd->add_option("--sweeps", bench.solve.sweeps, "SA sweeps")->capture_default_str();
    bench_cmd->add_option("--seed", bench.solve.seed, "master seed")->capture_default_str();
    bench_cmd->add_option("--keep", bench.solve.keep, "keep only N highest-pt particles");
    bench_cmd->add_option("--record-every", bench.solve.record_every, "trajectory grid")
        ->capture_default_str();
    bench_cmd->add_option("--threads", bench.solve.threads, "worker threads (0 = auto)");
    bench_cmd->add_option("--out", bench.solve.out, "output CSV path")->required();

    MassOptions mass;
    auto* mass_cmd = app.add_subcommand("mass", "invariant-mass reconstruction");
    mass_cmd->add_option("--events", mass.events_path, "input JSONL")->required();
    mass_cmd->add_option("--process", mass.process, "z, zh or tt (default: event meta)");
    mass_cmd->add_option("--source", mass.source, "durham or truth")->capture_default_str();
    mass_cmd->add_option("--njet", mass.njet, "jet count (0 = per-process default)");
    mass_cmd->add_option("--mw", mass.mw, "W mass reference")->capture_default_str();
    mass_cmd->add_option("--mt", mass.mt, "top mass reference")->capture_default_str();
    mass_cmd->add_option("--threads", mass.threads, "worker threads (0 = auto)");
    mass_cmd->add_option("--out", mass.out, "output JSONL path")->required();

    AnnealOptions anneal;
    auto* anneal_cmd = app.add_subcommand("anneal", "transverse-field Ising evolution");
    anneal_cmd->add_option("--events", anneal.events_path, "input JSONL")->required();
    anneal_cmd->add_option("--event-index", anneal.event_index, "event to simulate")
        ->capture_default_str();
    anneal_cmd->add_option("--keep", anneal.keep, "highest-pt particles to keep")
        ->capture_default_str();
    anneal_cmd->add_option("--njet", anneal.njet, "jet multiplicity")->capture_default_str();
    anneal_cmd->add_option("--metric", anneal.metric, "eekt or angle")->capture_default_str();
    anneal_cmd->add_option("--lambda", [&anneal](const CLI::results_t& r) {
        anneal.lambda = std::stod(r[0]);
        return true;
    }, "one-hot penalty (default: 1.1 N max Q)");
    anneal_cmd->add_option("--total-time", anneal.total_time, "annealing duration")
        ->capture_default_str();
    anneal_cmd->add_option("--steps", anneal.steps, "integrator steps")->capture_default_str();
    anneal_cmd->add_option("--record-every", anneal.record_every, "trace grid")
        ->capture_default_str();
    anneal_cmd->add_flag("--no-normalize", anneal.no_normalize,
                         "keep raw GeV^2 couplings (slower integration)");
    anneal_cmd->add_option("--out", anneal.out, "output CSV path")->required();

    TtsOptions tts;
    auto* tts_cmd = app.add_subcommand("tts", "time-to-solution arithmetic");
    tts_cmd->add_option("--p", tts.p, "per-shot success probability")->required();
    tts_cmd->add_option("--t-shot", tts.t_shot, "time per shot in seconds")->required();
    tts_cmd->add_option("--target", tts.target, "target success probability")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (durham_cmd->parsed()) return run_durham(durham);
        if (cluster_cmd->parsed()) return run_cluster(cluster);
        if (bench_cmd->parsed()) return run_bench(bench);
        if (mass_cmd->parsed()) return run_mass(mass);
        if (anneal_cmd->parsed()) return run_anneal(anneal);
        if (tts_cmd->parsed()) return run_tts(tts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
