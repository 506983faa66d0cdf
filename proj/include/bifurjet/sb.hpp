#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifurjet/ising.hpp"
#include "bifurjet/parallel.hpp"
#include "bifurjet/rng.hpp"

namespace bifurjet {

enum class PumpKind { Linear };

// Linear pump ramp a(t): 0 at step 0, a0 at the final step.
inline double pump_schedule(int step, int steps, double a0) {
    if (steps < 1) throw std::invalid_argument("pump_schedule: steps must be >= 1");
    if (step < 0 || step > steps)
        throw std::invalid_argument("pump_schedule: step " + std::to_string(step) +
                                    " outside [0, " + std::to_string(steps) + "]");
    return a0 * static_cast<double>(step) / static_cast<double>(steps);
}

struct SbParams {
    double a0 = 1.0;             // detuning frequency
    std::optional<double> c0;    // coupling strength; auto-scaled when unset
    double dt = 0.25;            // symplectic Euler time step
    int steps = 1000;
    PumpKind pump = PumpKind::Linear;
    int record_every = 0;        // 0 disables trajectory recording

    void validate() const {
        if (!(a0 > 0.0)) throw std::invalid_argument("SbParams: a0 must be > 0");
        if (c0 && !(*c0 > 0.0)) throw std::invalid_argument("SbParams: c0 must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("SbParams: dt must be > 0");
        if (steps < 1) throw std::invalid_argument("SbParams: steps must be >= 1");
        if (record_every < 0) throw std::invalid_argument("SbParams: record_every must be >= 0");
    }
};

struct SaParams {
    int sweeps = 1000;
    double beta_min = 0.1;
    double beta_max = 10.0;
    int record_every = 0;

    void validate() const {
        if (sweeps < 1) throw std::invalid_argument("SaParams: sweeps must be >= 1");
        if (!(beta_min > 0.0) || !(beta_min < beta_max))
            throw std::invalid_argument("SaParams: require 0 < beta_min < beta_max");
        if (record_every < 0) throw std::invalid_argument("SaParams: record_every must be >= 0");
    }
};

struct TrajectoryPoint {
    int step = 0;
    double best_energy = 0.0;  // best-so-far, non-increasing along the trajectory
    double wall_time_s = 0.0;  // cumulative within the shot
    SpinConfig best_spins;
};

struct SolverResult {
    SpinConfig best_spins;
    double best_energy = 0.0;
    int best_step = 0;
    std::vector<TrajectoryPoint> trajectory;
    std::uint64_t shot_seed = 0;
};

// Test hook: called after every completed update step with the oscillator
// positions (bSB/dSB only).
using StepObserver = std::function<void(int step, std::span<const double> x)>;

namespace detail {

inline double auto_c0(const IsingModel& m) {
    const double sigma = std::max(m.j.offdiag_rms(), 1e-12);
    return 0.5 / (sigma * std::sqrt(static_cast<double>(m.n)));
}

// Shared bSB/dSB loop. The dynamics as written drive the system toward
// maximizing the Ising form, so the couplings and fields enter negated to
// make the solver a minimizer of H(x) = 1/2 sum J x x + sum h x + offset.
template <bool Discrete>
SolverResult sb_solve_impl(const IsingModel& m, const SbParams& p, std::uint64_t seed,
                           const StepObserver& observer) {
    m.validate();
    p.validate();
    const std::size_t n = m.n;
    const double c0 = p.c0 ? *p.c0 : auto_c0(m);

    Rng rng(seed);
    std::vector<double> x(n, 0.0), y(n), force(n);
    for (auto& v : y) v = rng.uniform(-0.1, 0.1);

    std::vector<std::int8_t> spins(n);
    SolverResult result;
    result.shot_seed = seed;
    result.best_energy = std::numeric_limits<double>::infinity();

    const auto t0 = std::chrono::steady_clock::now();
    for (int step = 1; step <= p.steps; ++step) {
        const double a = pump_schedule(step, p.steps, p.a0);

        // mean-field force, negated model: -(h_i + sum_j J_ij z_j)
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = m.j.row(i);
            double acc = 0.0;
            if constexpr (Discrete) {
                for (std::size_t j = 0; j < n; ++j)
                    acc += row[j] * (x[j] >= 0.0 ? 1.0 : -1.0);
            } else {
                for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
            }
            force[i] = -(acc + m.h[i]);
        }
        // two-phase symplectic update: all y first, then all x
        const double detune = p.a0 - a;
        for (std::size_t i = 0; i < n; ++i)
            y[i] += p.dt * (-detune * x[i] + c0 * force[i]);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += p.dt * p.a0 * y[i];
            if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
                throw std::runtime_error(
                    "simulated bifurcation diverged at step " + std::to_string(step) +
                    " (dt=" + std::to_string(p.dt) + ", c0=" + std::to_string(c0) +
                    "); reduce dt");
            if (x[i] > 1.0) { x[i] = 1.0; y[i] = 0.0; }
            else if (x[i] < -1.0) { x[i] = -1.0; y[i] = 0.0; }
        }

        for (std::size_t i = 0; i < n; ++i) spins[i] = x[i] >= 0.0 ? 1 : -1;
        const double energy = ising_energy_unchecked(m, spins.data());
        if (energy < result.best_energy) {
            result.best_energy = energy;
            result.best_spins.spins = spins;
            result.best_step = step;
        }
        if (observer) observer(step, std::span<const double>(x));
        if (p.record_every > 0 && (step % p.record_every == 0 || step == p.steps)) {
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            result.trajectory.push_back({step, result.best_energy, elapsed, result.best_spins});
        }
    }
    return result;
}

}  // namespace detail

// Ballistic simulated bifurcation: continuous positions with inelastic walls
// at x = +-1; the sign vector is sampled after every step and the best energy
// seen is kept.
inline SolverResult bsb_solve(const IsingModel& m, const SbParams& p, std::uint64_t seed,
                              const StepObserver& observer = {}) {
    return detail::sb_solve_impl<false>(m, p, seed, observer);
}

// Discrete simulated bifurcation: the mean-field term uses sgn(x_j).
inline SolverResult dsb_solve(const IsingModel& m, const SbParams& p, std::uint64_t seed,
                              const StepObserver& observer = {}) {
    return detail::sb_solve_impl<true>(m, p, seed, observer);
}

// Single-spin Metropolis baseline on a geometric inverse-temperature ladder
// from beta_min to beta_max, one full sweep per rung.
inline SolverResult sa_solve(const IsingModel& m, const SaParams& p, std::uint64_t seed) {
    m.validate();
    p.validate();
    const std::size_t n = m.n;

    Rng rng(seed);
    std::vector<std::int8_t> spins(n);
    for (auto& s : spins) s = rng.uniform() < 0.5 ? -1 : 1;

    SolverResult result;
    result.shot_seed = seed;
    result.best_energy = detail::ising_energy_unchecked(m, spins.data());
    result.best_spins.spins = spins;
    result.best_step = 0;

    double energy = result.best_energy;
    const double ratio = p.beta_max / p.beta_min;
    const auto t0 = std::chrono::steady_clock::now();
    for (int sweep = 1; sweep <= p.sweeps; ++sweep) {
        const double t = p.sweeps == 1
                             ? 1.0
                             : static_cast<double>(sweep - 1) / static_cast<double>(p.sweeps - 1);
        const double beta = p.beta_min * std::pow(ratio, t);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = m.j.row(i);
            double local = m.h[i];
            for (std::size_t j = 0; j < n; ++j)
                local += row[j] * static_cast<double>(spins[j]);
            const double delta = -2.0 * static_cast<double>(spins[i]) * local;
            if (delta <= 0.0 || rng.uniform() < std::exp(-beta * delta)) {
                spins[i] = static_cast<std::int8_t>(-spins[i]);
                energy += delta;
            }
        }
        if (energy < result.best_energy) {
            // recompute from spins so the stored value is exact, not drifted
            const double exact = detail::ising_energy_unchecked(m, spins.data());
            if (exact < result.best_energy) {
                result.best_energy = exact;
                result.best_spins.spins = spins;
                result.best_step = sweep;
            }
            energy = exact;
        }
        if (p.record_every > 0 && (sweep % p.record_every == 0 || sweep == p.sweeps)) {
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            result.trajectory.push_back({sweep, result.best_energy, elapsed, result.best_spins});
        }
    }
    return result;
}

struct SolverSpec {
    enum class Kind { Bsb, Dsb, Sa };
    Kind kind = Kind::Bsb;
    SbParams sb;
    SaParams sa;

    static SolverSpec parse(const std::string& name) {
        SolverSpec spec;
        if (name == "bsb") spec.kind = Kind::Bsb;
        else if (name == "dsb") spec.kind = Kind::Dsb;
        else if (name == "sa") spec.kind = Kind::Sa;
        else throw std::invalid_argument("unknown solver '" + name + "'");
        return spec;
    }

    const char* name() const {
        switch (kind) {
            case Kind::Bsb: return "bsb";
            case Kind::Dsb: return "dsb";
            case Kind::Sa: return "sa";
        }
        return "?";
    }
};

inline SolverResult solve_one(const SolverSpec& spec, const IsingModel& m, std::uint64_t seed) {
    switch (spec.kind) {
        case SolverSpec::Kind::Bsb: return bsb_solve(m, spec.sb, seed);
        case SolverSpec::Kind::Dsb: return dsb_solve(m, spec.sb, seed);
        case SolverSpec::Kind::Sa: return sa_solve(m, spec.sa, seed);
    }
    throw std::logic_error("unreachable solver kind");
}

struct EnergyStat {
    int step = 0;
    double mean = 0.0;
    double stddev = 0.0;       // population standard deviation across shots
    double mean_time_s = 0.0;
};

struct ShotEnsemble {
    std::vector<SolverResult> shots;
    std::size_t best_shot = 0;
    std::vector<EnergyStat> energy_stats;

    const SolverResult& best() const { return shots[best_shot]; }
};

// Runs n_shots independent seeded shots; shot k always uses
// child_seed(master_seed, k), so the ensemble is identical no matter how many
// threads execute it or in which order shots finish.
inline ShotEnsemble multi_shot(const SolverSpec& spec, const IsingModel& m, int n_shots,
                               std::uint64_t master_seed, int record_every, int threads = 1) {
    if (n_shots < 1) throw std::invalid_argument("multi_shot: n_shots must be >= 1");
    SolverSpec run = spec;
    run.sb.record_every = record_every;
    run.sa.record_every = record_every;

    ShotEnsemble ensemble;
    ensemble.shots.resize(static_cast<std::size_t>(n_shots));
    parallel_for(static_cast<std::size_t>(n_shots), threads, [&](std::size_t k) {
        ensemble.shots[k] = solve_one(run, m, child_seed(master_seed, k));
    });

    for (std::size_t k = 1; k < ensemble.shots.size(); ++k)
        if (ensemble.shots[k].best_energy < ensemble.shots[ensemble.best_shot].best_energy)
            ensemble.best_shot = k;

    if (record_every > 0) {
        const auto& grid = ensemble.shots[0].trajectory;
        for (const auto& shot : ensemble.shots) {
            if (shot.trajectory.size() != grid.size())
                throw std::runtime_error("multi_shot: inconsistent recording grids");
            for (std::size_t g = 0; g < grid.size(); ++g)
                if (shot.trajectory[g].step != grid[g].step)
                    throw std::runtime_error("multi_shot: inconsistent recording grids");
        }
        const double count = static_cast<double>(ensemble.shots.size());
        for (std::size_t g = 0; g < grid.size(); ++g) {
            EnergyStat stat;
            stat.step = grid[g].step;
            for (const auto& shot : ensemble.shots) {
                stat.mean += shot.trajectory[g].best_energy;
                stat.mean_time_s += shot.trajectory[g].wall_time_s;
            }
            stat.mean /= count;
            stat.mean_time_s /= count;
            double var = 0.0;
            for (const auto& shot : ensemble.shots) {
                const double d = shot.trajectory[g].best_energy - stat.mean;
                var += d * d;
            }
            stat.stddev = std::sqrt(var / count);
            ensemble.energy_stats.push_back(stat);
        }
    }
    return ensemble;
}

}  // namespace bifurjet
