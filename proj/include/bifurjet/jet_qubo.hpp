#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifurjet/event.hpp"
#include "bifurjet/ising.hpp"

namespace bifurjet {

enum class DistanceKind { Angle, EeKt };

inline DistanceKind parse_distance_kind(const std::string& name) {
    if (name == "angle") return DistanceKind::Angle;
    if (name == "eekt") return DistanceKind::EeKt;
    throw std::invalid_argument("unknown distance metric '" + name + "'");
}

// Q_ij = -(p_i . p_j) / (2 |p_i| |p_j|), dimensionless, in [-1/2, 1/2].
inline double angle_distance(const Particle& pi, const Particle& pj) {
    if (pi.p4.p() == 0.0 || pj.p4.p() == 0.0)
        throw std::domain_error("angle_distance: zero-momentum particle");
    return -0.5 * cos_angle(pi.p4, pj.p4);
}

// Q_ij = 2 min(E_i^2, E_j^2) (1 - cos theta_ij), GeV^2.
inline double eekt_distance(const Particle& pi, const Particle& pj) {
    if (pi.p4.p() == 0.0 || pj.p4.p() == 0.0)
        throw std::domain_error("eekt_distance: zero-momentum particle");
    const double emin2 = std::min(pi.p4.e * pi.p4.e, pj.p4.e * pj.p4.e);
    return 2.0 * emin2 * (1.0 - cos_angle(pi.p4, pj.p4));
}

// Full N x N distance matrix, including the diagonal (the angle metric has
// Q_ii = -1/2; ee-kt has Q_ii = 0). Zero-momentum inputs are reported by index.
inline Matrix distance_matrix(const Event& event, DistanceKind kind) {
    const std::size_t n = event.particles.size();
    for (std::size_t i = 0; i < n; ++i)
        if (event.particles[i].p4.p() == 0.0)
            throw std::domain_error("particle " + std::to_string(i) +
                                    " has zero momentum");
    Matrix q(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = kind == DistanceKind::Angle
                                 ? angle_distance(event.particles[i], event.particles[j])
                                 : eekt_distance(event.particles[i], event.particles[j]);
            q(i, j) = v;
            q(j, i) = v;
        }
    }
    return q;
}

// Dijet encoding: one bit per constituent, 1 -> jet A, 0 -> jet B.
inline Qubo build_dijet_qubo(const Event& event, DistanceKind kind) {
    if (event.particles.size() < 2)
        throw std::invalid_argument("build_dijet_qubo: need at least 2 particles, got " +
                                    std::to_string(event.particles.size()));
    return canonicalize(distance_matrix(event, kind));
}

// lambda = 1.1 * N_input * max_ij Q_ij, floored so it stays positive for
// degenerate (all-collinear) events. The penalty must exceed
// N_input * max Q_ij for the one-hot constraint to dominate.
inline double default_lambda(double q_entries_max, int n_input) {
    if (n_input < 1)
        throw std::invalid_argument("default_lambda: n_input must be >= 1");
    return 1.1 * static_cast<double>(n_input) * std::max(q_entries_max, 1e-12);
}

// One-hot multijet encoding: variable (n, i) = n * N_input + i says
// "constituent i belongs to jet n". Per-jet distance blocks plus the penalty
// lambda * sum_i (1 - sum_n s_i^(n))^2 expanded exactly into
// (coupling, linear, offset).
inline Qubo build_multijet_qubo(const Event& event, int n_jet, DistanceKind kind,
                                std::optional<double> lambda = std::nullopt) {
    const int n_input = static_cast<int>(event.particles.size());
    if (n_jet < 2)
        throw std::invalid_argument("build_multijet_qubo: n_jet must be >= 2");
    if (n_input < n_jet)
        throw std::invalid_argument("build_multijet_qubo: n_jet=" + std::to_string(n_jet) +
                                    " exceeds N_input=" + std::to_string(n_input));
    if (lambda && !(*lambda > 0.0))
        throw std::invalid_argument("build_multijet_qubo: lambda must be positive");

    const Matrix q = distance_matrix(event, kind);
    const double lam = lambda ? *lambda : default_lambda(q.max_entry(), n_input);

    const std::size_t total = static_cast<std::size_t>(n_jet) * static_cast<std::size_t>(n_input);
    Qubo out = Qubo::zero(total);
    const auto var = [n_input](int jet, int i) {
        return static_cast<std::size_t>(jet) * static_cast<std::size_t>(n_input) +
               static_cast<std::size_t>(i);
    };

    // block-diagonal distance terms; Q_ii lands in linear (s^2 = s)
    for (int jet = 0; jet < n_jet; ++jet) {
        for (int i = 0; i < n_input; ++i) {
            out.linear[var(jet, i)] += q(i, i);
            for (int j = 0; j < n_input; ++j)
                if (i != j) out.coupling(var(jet, i), var(jet, j)) += q(i, j);
        }
    }
    // penalty: +lam on every ordered pair of same-constituent variables,
    // -lam per variable, +lam * N_input constant
    for (int i = 0; i < n_input; ++i) {
        for (int n = 0; n < n_jet; ++n) {
            out.linear[var(n, i)] += -lam;
            for (int m = 0; m < n_jet; ++m)
                if (n != m) out.coupling(var(n, i), var(m, i)) += lam;
        }
    }
    out.offset += lam * n_input;
    return out;
}

// Partition of constituent indices into n_jet jets; jets may be empty only
// on repaired (constraint-violating) decodes.
struct JetAssignment {
    std::vector<std::vector<int>> jets;
    int n_input = 0;
};

struct DecodeReport {
    JetAssignment assignment;
    std::vector<int> unassigned;      // constituents with no set bit
    std::vector<int> multi_assigned;  // constituents with >= 2 set bits
    std::vector<int> empty_jets;      // jets that received no constituent
    bool repaired = false;

    // violations of the per-constituent one-hot constraint; empty jets are
    // flagged separately since they do not break the penalty term
    int violation_count() const {
        return static_cast<int>(unassigned.size() + multi_assigned.size());
    }
};

inline BitConfig encode_assignment(const JetAssignment& a) {
    BitConfig b;
    b.bits.assign(a.jets.size() * static_cast<std::size_t>(a.n_input), 0);
    for (std::size_t jet = 0; jet < a.jets.size(); ++jet)
        for (int i : a.jets[jet])
            b.bits[jet * static_cast<std::size_t>(a.n_input) + static_cast<std::size_t>(i)] = 1;
    return b;
}

// Decodes a one-hot bit vector into jets. Constituents assigned zero or
// multiple times are reported and then repaired deterministically: each
// violating constituent (ascending index) goes to the jet that adds the least
// pairwise distance, computed against already-settled members. Without a
// distance matrix the repair falls back to the lowest eligible jet index.
inline DecodeReport decode_assignment(const BitConfig& bits, int n_input, int n_jet,
                                      const Matrix* distance = nullptr) {
    if (n_input < 1 || n_jet < 1)
        throw std::invalid_argument("decode_assignment: counts must be positive");
    const std::size_t expect =
        static_cast<std::size_t>(n_input) * static_cast<std::size_t>(n_jet);
    if (bits.bits.size() != expect)
        throw std::invalid_argument("decode_assignment: expected " + std::to_string(expect) +
                                    " bits, got " + std::to_string(bits.bits.size()));
    bits.validate();
    if (distance && (distance->rows() != static_cast<std::size_t>(n_input) ||
                     distance->cols() != static_cast<std::size_t>(n_input)))
        throw std::invalid_argument("decode_assignment: distance matrix size mismatch");

    DecodeReport report;
    report.assignment.n_input = n_input;
    report.assignment.jets.assign(static_cast<std::size_t>(n_jet), {});

    std::vector<int> owner(static_cast<std::size_t>(n_input), -1);
    for (int i = 0; i < n_input; ++i) {
        int count = 0;
        for (int n = 0; n < n_jet; ++n) {
            if (bits.bits[static_cast<std::size_t>(n) * n_input + i]) {
                ++count;
                if (count == 1) owner[static_cast<std::size_t>(i)] = n;
            }
        }
        if (count == 0) report.unassigned.push_back(i);
        else if (count >= 2) {
            report.multi_assigned.push_back(i);
            owner[static_cast<std::size_t>(i)] = -1;
        }
    }

    for (int i = 0; i < n_input; ++i)
        if (owner[static_cast<std::size_t>(i)] >= 0)
            report.assignment.jets[static_cast<std::size_t>(owner[i])].push_back(i);

    if (report.violation_count() > 0) {
        report.repaired = true;
        std::vector<int> violators;
        violators.insert(violators.end(), report.unassigned.begin(), report.unassigned.end());
        violators.insert(violators.end(), report.multi_assigned.begin(),
                         report.multi_assigned.end());
        std::sort(violators.begin(), violators.end());
        for (int i : violators) {
            int best_jet = 0;
            if (distance) {
                double best_cost = std::numeric_limits<double>::infinity();
                for (int n = 0; n < n_jet; ++n) {
                    double cost = 0.0;
                    for (int k : report.assignment.jets[static_cast<std::size_t>(n)])
                        cost += (*distance)(static_cast<std::size_t>(i),
                                            static_cast<std::size_t>(k));
                    if (cost < best_cost) {
                        best_cost = cost;
                        best_jet = n;
                    }
                }
            }
            report.assignment.jets[static_cast<std::size_t>(best_jet)].push_back(i);
        }
        for (auto& jet : report.assignment.jets) std::sort(jet.begin(), jet.end());
    }
    for (int n = 0; n < n_jet; ++n)
        if (report.assignment.jets[static_cast<std::size_t>(n)].empty())
            report.empty_jets.push_back(n);
    return report;
}

}  // namespace bifurjet
