#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifurjet/ising.hpp"

namespace bifurjet {

constexpr std::size_t kMaxAnnealSpins = 14;

struct Statevector {
    std::vector<std::complex<double>> amplitudes;

    std::size_t n_qubits() const {
        std::size_t n = 0;
        while ((std::size_t{1} << n) < amplitudes.size()) ++n;
        return n;
    }

    double norm() const {
        double s = 0.0;
        for (const auto& a : amplitudes) s += std::norm(a);
        return std::sqrt(s);
    }
};

// Annealing schedule H(s) = A(s) H_initial + B(s) H_target over normalized
// time s in [0, 1]. The default is the linear ramp A = 1 - s, B = s.
struct AnnealSchedule {
    std::function<double(double)> a;
    std::function<double(double)> b;

    static AnnealSchedule linear() {
        return {[](double s) { return 1.0 - s; }, [](double s) { return s; }};
    }

    void validate() const {
        if (!a || !b) throw std::invalid_argument("AnnealSchedule: missing A or B");
        if (!(a(0.0) > 0.0))
            throw std::invalid_argument("AnnealSchedule: A(0) must be positive");
        if (std::abs(b(0.0)) > 1e-12)
            throw std::invalid_argument("AnnealSchedule: B(0) must be zero");
    }
};

// Diagonal of the target Hamiltonian in the computational basis, with the
// convention sigma^z|0> = +|0> (bit 0 of index b is qubit 0, z_i = +1 for
// bit value 0). The couplings enter as J/2 so the spectrum reproduces the
// Ising energies of `m`, offset included.
inline std::vector<double> build_target_hamiltonian(const IsingModel& m) {
    m.validate();
    if (m.n > kMaxAnnealSpins)
        throw std::invalid_argument("build_target_hamiltonian: n = " + std::to_string(m.n) +
                                    " exceeds the " + std::to_string(kMaxAnnealSpins) +
                                    "-spin statevector limit");
    const std::size_t dim = std::size_t{1} << m.n;
    std::vector<double> diag(dim, 0.0);
    std::vector<double> z(m.n);
    for (std::size_t b = 0; b < dim; ++b) {
        for (std::size_t i = 0; i < m.n; ++i) z[i] = (b >> i) & 1 ? -1.0 : 1.0;
        double e = m.offset;
        for (std::size_t i = 0; i < m.n; ++i) {
            const double* row = m.j.row(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < m.n; ++j) acc += row[j] * z[j];
            e += 0.5 * acc * z[i] + m.h[i] * z[i];
        }
        diag[b] = e;
    }
    return diag;
}

struct AnnealTraceRow {
    double s = 0.0;
    double energy_expectation = 0.0;  // <psi| H_target |psi>
    double ground_probability = 0.0;
    double norm = 0.0;
};

struct AnnealResult {
    Statevector state;
    std::vector<AnnealTraceRow> trace;
};

namespace detail {

// w = (A * sum_i sigma_i^x + B * diag) v
inline void apply_hamiltonian(double a_coef, double b_coef, const std::vector<double>& diag,
                              std::size_t n, const std::vector<std::complex<double>>& v,
                              std::vector<std::complex<double>>& w) {
    const std::size_t dim = v.size();
    for (std::size_t b = 0; b < dim; ++b) w[b] = b_coef * diag[b] * v[b];
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t mask = std::size_t{1} << i;
        for (std::size_t b = 0; b < dim; ++b) w[b] += a_coef * v[b ^ mask];
    }
}

inline double ground_probability_from_diag(const std::vector<double>& diag,
                                           const std::vector<std::complex<double>>& amps) {
    double emin = diag[0];
    for (double d : diag) emin = std::min(emin, d);
    const double tol = 1e-9 * (1.0 + std::abs(emin));
    double p = 0.0;
    for (std::size_t b = 0; b < diag.size(); ++b)
        if (diag[b] <= emin + tol) p += std::norm(amps[b]);
    return p;
}

}  // namespace detail

// Simulates H(s) = A(s) sum_i sigma_i^x + B(s) H_target from the transverse
// field ground state |-> ^ n. Each step applies the midpoint propagator
// exp(-i H(s_mid) dt) to the statevector via a sub-stepped Taylor expansion
// (step size capped so the series converges at machine precision); the
// propagator is unitary, so the norm is monitored as an integration check.
inline AnnealResult anneal_evolve(const IsingModel& m, const AnnealSchedule& schedule,
                                  double total_time, int steps, int record_every = 0) {
    schedule.validate();
    if (!(total_time > 0.0)) throw std::invalid_argument("anneal_evolve: total_time must be > 0");
    if (steps < 1) throw std::invalid_argument("anneal_evolve: steps must be >= 1");

    const std::vector<double> diag = build_target_hamiltonian(m);
    const std::size_t n = m.n;
    const std::size_t dim = diag.size();
    double diag_absmax = 0.0;
    for (double d : diag) diag_absmax = std::max(diag_absmax, std::abs(d));

    AnnealResult result;
    auto& psi = result.state.amplitudes;
    psi.assign(dim, {0.0, 0.0});
    const double amp0 = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t b = 0; b < dim; ++b)
        psi[b] = (std::popcount(b) & 1) ? -amp0 : amp0;

    std::vector<std::complex<double>> term(dim), next(dim);
    const double dt = total_time / static_cast<double>(steps);

    const auto record = [&](double s) {
        AnnealTraceRow row;
        row.s = s;
        for (std::size_t b = 0; b < dim; ++b)
            row.energy_expectation += diag[b] * std::norm(psi[b]);
        row.ground_probability = detail::ground_probability_from_diag(diag, psi);
        row.norm = result.state.norm();
        result.trace.push_back(row);
    };
    if (record_every > 0) record(0.0);

    for (int step = 0; step < steps; ++step) {
        const double s_mid = (static_cast<double>(step) + 0.5) / static_cast<double>(steps);
        const double a_coef = schedule.a(s_mid);
        const double b_coef = schedule.b(s_mid);

        // infinity-norm bound keeps ||H|| * sub_dt small enough for Taylor
        const double h_norm = std::abs(a_coef) * static_cast<double>(n) +
                              std::abs(b_coef) * diag_absmax;
        const int substeps = std::max(1, static_cast<int>(std::ceil(h_norm * dt / 0.5)));
        const std::complex<double> step_factor(0.0, -dt / static_cast<double>(substeps));

        for (int sub = 0; sub < substeps; ++sub) {
            term = psi;
            double term_scale = 1.0;
            for (int k = 1; k <= 64; ++k) {
                detail::apply_hamiltonian(a_coef, b_coef, diag, n, term, next);
                const std::complex<double> coef = step_factor / static_cast<double>(k);
                term_scale = 0.0;
                for (std::size_t b = 0; b < dim; ++b) {
                    term[b] = coef * next[b];
                    psi[b] += term[b];
                    term_scale = std::max(term_scale, std::abs(term[b]));
                }
                if (term_scale < 1e-18) break;
            }
            if (term_scale >= 1e-18)
                throw std::runtime_error("anneal_evolve: propagator series failed to converge");
        }

        const double norm = result.state.norm();
        if (std::abs(norm - 1.0) > 1e-6)
            throw std::runtime_error("anneal_evolve: norm drift " +
                                     std::to_string(std::abs(norm - 1.0)) +
                                     " at step " + std::to_string(step + 1) +
                                     "; integration unstable");
        if (record_every > 0 &&
            ((step + 1) % record_every == 0 || step + 1 == steps))
            record(static_cast<double>(step + 1) / static_cast<double>(steps));
    }
    return result;
}

// Total weight of the amplitudes sitting on minimum-energy bitstrings.
inline double ground_state_probability(const Statevector& psi, const IsingModel& m) {
    const std::vector<double> diag = build_target_hamiltonian(m);
    if (diag.size() != psi.amplitudes.size())
        throw std::invalid_argument("ground_state_probability: dimension mismatch");
    return detail::ground_probability_from_diag(diag, psi.amplitudes);
}

}  // namespace bifurjet
