#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifurjet/matrix.hpp"

namespace bifurjet {

// Canonical QUBO: symmetric zero-diagonal coupling matrix, linear vector and
// constant offset over {0,1} variables. Diagonal terms of a raw matrix are
// folded into `linear` (s^2 = s), so the QUBO <-> Ising conversion below is
// exact with the offset tracked.
struct Qubo {
    std::size_t n = 0;
    Matrix coupling;
    std::vector<double> linear;
    double offset = 0.0;

    static Qubo zero(std::size_t n) {
        return {n, Matrix::zero(n), std::vector<double>(n, 0.0), 0.0};
    }

    void validate() const {
        if (n < 1) throw std::invalid_argument("Qubo: n must be >= 1");
        if (coupling.rows() != n || coupling.cols() != n || linear.size() != n)
            throw std::invalid_argument("Qubo: inconsistent dimensions");
        if (!coupling.all_finite() || !std::isfinite(offset))
            throw std::invalid_argument("Qubo: non-finite entries");
        for (double v : linear)
            if (!std::isfinite(v)) throw std::invalid_argument("Qubo: non-finite entries");
        if (!coupling.is_symmetric())
            throw std::invalid_argument("Qubo: coupling must be symmetric");
        if (!coupling.has_zero_diagonal())
            throw std::invalid_argument("Qubo: coupling diagonal must be zero");
    }
};

// Ising model over +-1 spins: H(x) = 1/2 sum_{i!=j} j_ij x_i x_j
//                                    + sum_i h_i x_i + offset.
struct IsingModel {
    std::size_t n = 0;
    Matrix j;
    std::vector<double> h;
    double offset = 0.0;

    static IsingModel zero(std::size_t n) {
        return {n, Matrix::zero(n), std::vector<double>(n, 0.0), 0.0};
    }

    void validate() const {
        if (n < 1) throw std::invalid_argument("IsingModel: n must be >= 1");
        if (j.rows() != n || j.cols() != n || h.size() != n)
            throw std::invalid_argument("IsingModel: inconsistent dimensions");
        if (!j.all_finite() || !std::isfinite(offset))
            throw std::invalid_argument("IsingModel: non-finite entries");
        for (double v : h)
            if (!std::isfinite(v)) throw std::invalid_argument("IsingModel: non-finite entries");
        if (!j.is_symmetric())
            throw std::invalid_argument("IsingModel: j must be symmetric");
        if (!j.has_zero_diagonal())
            throw std::invalid_argument("IsingModel: j diagonal must be zero");
    }
};

struct SpinConfig {
    std::vector<std::int8_t> spins;  // entries exactly -1 or +1

    void validate() const {
        for (auto s : spins)
            if (s != -1 && s != 1)
                throw std::invalid_argument("SpinConfig: entries must be -1 or +1");
    }
};

struct BitConfig {
    std::vector<std::uint8_t> bits;  // entries exactly 0 or 1

    void validate() const {
        for (auto b : bits)
            if (b != 0 && b != 1)
                throw std::invalid_argument("BitConfig: entries must be 0 or 1");
    }
};

inline SpinConfig bits_to_spins(const BitConfig& b) {
    SpinConfig s;
    s.spins.reserve(b.bits.size());
    for (auto v : b.bits) s.spins.push_back(v ? 1 : -1);
    return s;
}

inline BitConfig spins_to_bits(const SpinConfig& s) {
    BitConfig b;
    b.bits.reserve(s.spins.size());
    for (auto v : s.spins) b.bits.push_back(v > 0 ? 1 : 0);
    return b;
}

inline void check_length(std::size_t model_n, std::size_t config_n, const char* what) {
    if (model_n != config_n)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch, model has " +
                                    std::to_string(model_n) + " variables but configuration has " +
                                    std::to_string(config_n));
}

// E(s) = sum_{i!=j} coupling_ij s_i s_j + sum_i linear_i s_i + offset.
// The sum runs over ordered pairs, so each symmetric off-diagonal counts twice.
inline double qubo_energy(const Qubo& q, const BitConfig& s) {
    check_length(q.n, s.bits.size(), "qubo_energy");
    s.validate();
    double quad = 0.0;
    for (std::size_t i = 0; i < q.n; ++i) {
        if (!s.bits[i]) continue;
        const double* row = q.coupling.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < q.n; ++j)
            if (s.bits[j]) acc += row[j];
        quad += acc;  // diagonal is zero by invariant
    }
    double lin = 0.0;
    for (std::size_t i = 0; i < q.n; ++i)
        if (s.bits[i]) lin += q.linear[i];
    return quad + lin + q.offset;
}

namespace detail {

// Hot-path energy without validation; spins must hold +-1 entries.
inline double ising_energy_unchecked(const IsingModel& m,
                                     const std::int8_t* spins) {
    double quad = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
        const double* row = m.j.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m.n; ++j)
            acc += row[j] * static_cast<double>(spins[j]);
        quad += acc * static_cast<double>(spins[i]);
    }
    double lin = 0.0;
    for (std::size_t i = 0; i < m.n; ++i)
        lin += m.h[i] * static_cast<double>(spins[i]);
    return 0.5 * quad + lin + m.offset;
}

}  // namespace detail

inline double ising_energy(const IsingModel& m, const SpinConfig& x) {
    check_length(m.n, x.spins.size(), "ising_energy");
    x.validate();
    return detail::ising_energy_unchecked(m, x.spins.data());
}

// Exact conversion: qubo_energy(q, s) == ising_energy(qubo_to_ising(q), 2s-1)
// for every bit vector s.
inline IsingModel qubo_to_ising(const Qubo& q) {
    q.validate();
    IsingModel m = IsingModel::zero(q.n);
    double coupling_sum = 0.0;
    for (std::size_t i = 0; i < q.n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < q.n; ++j) {
            m.j(i, j) = 0.5 * q.coupling(i, j);
            row_sum += q.coupling(i, j);
        }
        m.h[i] = 0.5 * row_sum + 0.5 * q.linear[i];
        coupling_sum += row_sum;
    }
    double linear_sum = 0.0;
    for (double v : q.linear) linear_sum += v;
    m.offset = q.offset + 0.25 * coupling_sum + 0.5 * linear_sum;
    return m;
}

// Canonicalizes an arbitrary square matrix Q into (coupling, linear, offset):
// diagonal entries move to `linear` via s^2 = s and off-diagonals are
// symmetrized by averaging, preserving sum_{i,j} Q_ij s_i s_j for all s.
inline Qubo canonicalize(const Matrix& raw) {
    if (!raw.is_square() || raw.rows() < 1)
        throw std::invalid_argument("canonicalize: matrix must be square and non-empty");
    if (!raw.all_finite())
        throw std::invalid_argument("canonicalize: matrix has non-finite entries");
    const std::size_t n = raw.rows();
    Qubo q = Qubo::zero(n);
    for (std::size_t i = 0; i < n; ++i) {
        q.linear[i] = raw(i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (raw(i, j) + raw(j, i));
            q.coupling(i, j) = v;
            q.coupling(j, i) = v;
        }
    }
    return q;
}

}  // namespace bifurjet
