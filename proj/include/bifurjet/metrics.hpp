#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifurjet/durham.hpp"
#include "bifurjet/event.hpp"
#include "bifurjet/jet_qubo.hpp"
#include "bifurjet/sb.hpp"

namespace bifurjet {

constexpr double kTopMassReference = 172.5;  // GeV
constexpr double kWMassReference = 80.4;     // GeV

struct EfficiencyReport {
    std::vector<double> per_jet;   // per reference jet, in [0, 1]
    std::vector<int> matching;     // matching[k] = solver jet matched to reference jet k
    double mean = 0.0;
};

// Fraction of each reference jet's constituents that the solver assigned
// identically, with the jet-to-jet correspondence chosen as the permutation
// maximizing total overlap (so a pure relabeling scores 1 everywhere).
inline EfficiencyReport jet_efficiency(const JetAssignment& solver_jets,
                                       const std::vector<Jet>& reference_jets) {
    const std::size_t n_jet = reference_jets.size();
    if (solver_jets.jets.size() != n_jet)
        throw std::invalid_argument("jet_efficiency: solver has " +
                                    std::to_string(solver_jets.jets.size()) +
                                    " jets, reference has " + std::to_string(n_jet));
    if (n_jet == 0 || n_jet > 8)
        throw std::invalid_argument("jet_efficiency: jet count out of range");

    const std::size_t n_input = static_cast<std::size_t>(solver_jets.n_input);
    std::vector<int> ref_of(n_input, -1);
    std::size_t ref_total = 0;
    for (std::size_t k = 0; k < n_jet; ++k) {
        if (reference_jets[k].constituents.empty())
            throw std::invalid_argument("jet_efficiency: empty reference jet");
        for (int idx : reference_jets[k].constituents) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= n_input || ref_of[idx] != -1)
                throw std::invalid_argument("jet_efficiency: constituent universes differ");
            ref_of[static_cast<std::size_t>(idx)] = static_cast<int>(k);
            ++ref_total;
        }
    }
    if (ref_total != n_input)
        throw std::invalid_argument("jet_efficiency: constituent universes differ");

    // overlap[s][k] = |solver jet s  intersect  reference jet k|
    std::vector<std::vector<int>> overlap(n_jet, std::vector<int>(n_jet, 0));
    std::vector<bool> seen(n_input, false);
    std::size_t solver_total = 0;
    for (std::size_t s = 0; s < n_jet; ++s)
        for (int idx : solver_jets.jets[s]) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= n_input ||
                seen[static_cast<std::size_t>(idx)])
                throw std::invalid_argument("jet_efficiency: constituent universes differ");
            seen[static_cast<std::size_t>(idx)] = true;
            ++solver_total;
            ++overlap[s][static_cast<std::size_t>(ref_of[idx])];
        }
    if (solver_total != n_input)
        throw std::invalid_argument("jet_efficiency: constituent universes differ");

    const auto per_jet_of = [&](const std::vector<int>& p) {
        std::vector<double> eff(n_jet);
        for (std::size_t k = 0; k < n_jet; ++k)
            eff[k] = static_cast<double>(overlap[p[k]][k]) /
                     static_cast<double>(reference_jets[k].constituents.size());
        return eff;
    };

    // maximize total overlap; break ties on the lexicographically largest
    // per-jet vector so the result is invariant under solver-jet relabeling
    std::vector<int> perm(n_jet);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best_perm = perm;
    std::vector<double> best_eff = per_jet_of(perm);
    int best_total = 0;
    for (std::size_t k = 0; k < n_jet; ++k) best_total += overlap[perm[k]][k];
    while (std::next_permutation(perm.begin(), perm.end())) {
        int total = 0;
        for (std::size_t k = 0; k < n_jet; ++k) total += overlap[perm[k]][k];
        if (total < best_total) continue;
        std::vector<double> eff = per_jet_of(perm);
        if (total > best_total || eff > best_eff) {
            best_total = total;
            best_perm = perm;
            best_eff = std::move(eff);
        }
    }

    EfficiencyReport report;
    report.matching = best_perm;
    report.per_jet = std::move(best_eff);
    report.mean = std::accumulate(report.per_jet.begin(), report.per_jet.end(), 0.0) /
                  static_cast<double>(n_jet);
    return report;
}

// Invariant mass of the four-vector sum, clipped at zero.
inline double invariant_mass(std::span<const Jet> jets) {
    if (jets.empty()) throw std::invalid_argument("invariant_mass: empty jet list");
    FourVector sum;
    for (const Jet& jet : jets) sum += jet.p4;
    return sum.mass();
}

inline double invariant_mass(const Jet& a, const Jet& b) {
    const std::array<Jet, 2> pair{a, b};
    return invariant_mass(std::span<const Jet>(pair));
}

struct TopPairing {
    std::array<std::array<int, 2>, 2> w_pairs;  // light-jet indices of (W1, W2)
    std::array<double, 2> w_masses;
    std::array<double, 2> top_masses;           // top1 = W1 + b[assoc], top2 = W2 + other b
    int b_association = 0;                      // 0: (W1,b0)(W2,b1); 1: (W1,b1)(W2,b0)
    double w_deviation = 0.0;                   // |m_W1 - m_W| + |m_W2 - m_W|
};

// Two-step reconstruction: of the three light-jet pairings, pick the one with
// the least summed deviation from the W mass, then associate W candidates with
// b jets by compatibility with the top mass. Ties break to the lowest-index
// option.
inline TopPairing top_pairing(const std::array<Jet, 2>& b_jets,
                              const std::array<Jet, 4>& light_jets, double m_w,
                              double m_top = kTopMassReference) {
    if (!(m_w > 0.0)) throw std::invalid_argument("top_pairing: m_w must be positive");
    static constexpr std::array<std::array<std::array<int, 2>, 2>, 3> kPairings{{
        {{{0, 1}, {2, 3}}},
        {{{0, 2}, {1, 3}}},
        {{{0, 3}, {1, 2}}},
    }};

    TopPairing best;
    double best_dev = std::numeric_limits<double>::infinity();
    for (const auto& pairing : kPairings) {
        const double m1 = invariant_mass(light_jets[pairing[0][0]], light_jets[pairing[0][1]]);
        const double m2 = invariant_mass(light_jets[pairing[1][0]], light_jets[pairing[1][1]]);
        const double dev = std::abs(m1 - m_w) + std::abs(m2 - m_w);
        if (dev < best_dev) {
            best_dev = dev;
            best.w_pairs = pairing;
            best.w_masses = {m1, m2};
        }
    }
    best.w_deviation = best_dev;

    std::array<FourVector, 2> w_p4;
    for (int w = 0; w < 2; ++w)
        w_p4[w] = light_jets[best.w_pairs[w][0]].p4 + light_jets[best.w_pairs[w][1]].p4;

    double best_top_dev = std::numeric_limits<double>::infinity();
    for (int assoc = 0; assoc < 2; ++assoc) {
        const double t1 = (w_p4[0] + b_jets[assoc == 0 ? 0 : 1].p4).mass();
        const double t2 = (w_p4[1] + b_jets[assoc == 0 ? 1 : 0].p4).mass();
        const double dev = std::abs(t1 - m_top) + std::abs(t2 - m_top);
        if (dev < best_top_dev) {
            best_top_dev = dev;
            best.b_association = assoc;
            best.top_masses = {t1, t2};
        }
    }
    return best;
}

// TTS = t_shot * ln(1 - target) / ln(1 - p_success), capped at t_shot once a
// single shot already reaches the target probability.
inline double time_to_solution(double p_success, double t_shot, double target = 0.99) {
    if (!(t_shot > 0.0)) throw std::invalid_argument("time_to_solution: t_shot must be > 0");
    if (!(target > 0.0) || !(target < 1.0))
        throw std::invalid_argument("time_to_solution: target must be in (0, 1)");
    if (!(p_success > 0.0))
        throw std::invalid_argument("time_to_solution: unreachable solution (p_success = 0)");
    if (p_success > 1.0) throw std::invalid_argument("time_to_solution: p_success > 1");
    if (p_success >= target) return t_shot;
    return t_shot * std::log(1.0 - target) / std::log(1.0 - p_success);
}

struct MassResult {
    std::map<std::string, double> masses;  // keyed Z / H / W1 / W2 / top1 / top2
    std::vector<std::string> warnings;
};

// Process-specific mass hypotheses from a fixed-multiplicity jet list.
// ZH: the two b-tagged jets are the Higgs candidate, the rest the Z.
// TT: two-step W/top pairing over the four non-b jets.
inline MassResult reconstruct_masses(const std::vector<Jet>& jets, Process process,
                                     double m_w = kWMassReference,
                                     double m_top = kTopMassReference) {
    MassResult out;
    std::vector<Jet> b, light;
    for (const Jet& jet : jets) (jet.btag ? b : light).push_back(jet);

    switch (process) {
        case Process::Z: {
            out.masses["Z"] = invariant_mass(std::span<const Jet>(jets));
            break;
        }
        case Process::ZH: {
            if (jets.size() != 4)
                out.warnings.push_back("expected 4 jets for ZH, got " + std::to_string(jets.size()));
            if (b.size() != 2) {
                out.warnings.push_back("expected exactly 2 b-tagged jets, got " +
                                       std::to_string(b.size()));
                break;
            }
            out.masses["H"] = invariant_mass(b[0], b[1]);
            if (light.size() >= 2)
                out.masses["Z"] = invariant_mass(std::span<const Jet>(light));
            break;
        }
        case Process::TT: {
            if (b.size() != 2 || light.size() != 4) {
                out.warnings.push_back("expected 2 b-tagged + 4 light jets, got " +
                                       std::to_string(b.size()) + " + " +
                                       std::to_string(light.size()));
                break;
            }
            const TopPairing pairing =
                top_pairing({b[0], b[1]}, {light[0], light[1], light[2], light[3]}, m_w, m_top);
            out.masses["W1"] = pairing.w_masses[0];
            out.masses["W2"] = pairing.w_masses[1];
            out.masses["top1"] = pairing.top_masses[0];
            out.masses["top2"] = pairing.top_masses[1];
            break;
        }
    }
    return out;
}

struct TrajectoryRow {
    int step = 0;
    double time_s = 0.0;
    double energy_mean = 0.0;
    double energy_std = 0.0;
    double eff_mean = 0.0;
    double eff_std = 0.0;
};

// Fig-5-style table: per recorded step, mean and population standard deviation
// across shots of the best-so-far energy and of the decoded assignment's mean
// efficiency against the reference jets.
inline std::vector<TrajectoryRow> trajectory_aggregate(const ShotEnsemble& ensemble,
                                                       const std::vector<Jet>& reference_jets,
                                                       const Matrix* distance = nullptr) {
    if (ensemble.shots.empty() || ensemble.shots[0].trajectory.empty())
        throw std::invalid_argument("trajectory_aggregate: ensemble has no recorded trajectory");
    const int n_jet = static_cast<int>(reference_jets.size());
    int n_input = 0;
    for (const Jet& jet : reference_jets) n_input += static_cast<int>(jet.constituents.size());

    const std::size_t rows = ensemble.shots[0].trajectory.size();
    for (const auto& shot : ensemble.shots)
        if (shot.trajectory.size() != rows)
            throw std::invalid_argument("trajectory_aggregate: inconsistent recording grids");

    const double count = static_cast<double>(ensemble.shots.size());
    std::vector<TrajectoryRow> table;
    table.reserve(rows);
    for (std::size_t g = 0; g < rows; ++g) {
        TrajectoryRow row;
        row.step = ensemble.shots[0].trajectory[g].step;
        std::vector<double> effs;
        effs.reserve(ensemble.shots.size());
        for (const auto& shot : ensemble.shots) {
            const auto& pt = shot.trajectory[g];
            if (pt.step != row.step)
                throw std::invalid_argument("trajectory_aggregate: inconsistent recording grids");
            row.time_s += pt.wall_time_s;
            row.energy_mean += pt.best_energy;
            const BitConfig bits = spins_to_bits(pt.best_spins);
            const DecodeReport decoded = decode_assignment(bits, n_input, n_jet, distance);
            effs.push_back(jet_efficiency(decoded.assignment, reference_jets).mean);
        }
        row.time_s /= count;
        row.energy_mean /= count;
        row.eff_mean = std::accumulate(effs.begin(), effs.end(), 0.0) / count;
        double evar = 0.0, fvar = 0.0;
        for (std::size_t k = 0; k < ensemble.shots.size(); ++k) {
            const double de = ensemble.shots[k].trajectory[g].best_energy - row.energy_mean;
            evar += de * de;
            const double df = effs[k] - row.eff_mean;
            fvar += df * df;
        }
        row.energy_std = std::sqrt(evar / count);
        row.eff_std = std::sqrt(fvar / count);
        table.push_back(row);
    }
    return table;
}

}  // namespace bifurjet
