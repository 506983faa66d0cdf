#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include "bifurjet/anneal.hpp"
#include "oracles.hpp"

using namespace bifurjet;

namespace {

IsingModel single_spin_field() {
    IsingModel m = IsingModel::zero(1);
    m.h[0] = -1.0;
    return m;
}

IsingModel ferromagnet() {
    IsingModel m = IsingModel::zero(2);
    m.j(0, 1) = -1.0;
    m.j(1, 0) = -1.0;
    return m;
}

double fidelity(const std::vector<std::complex<double>>& a,
                const std::vector<std::complex<double>>& b) {
    std::complex<double> ip = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ip += std::conj(a[i]) * b[i];
    return std::abs(ip);
}

// Straightforward RK4 integration of i dpsi/dt = H(t/T) psi as an independent
// cross-check of the Taylor propagator.
std::vector<std::complex<double>> rk4_evolve(const IsingModel& m, double total_time,
                                             int steps) {
    const std::vector<double> diag = build_target_hamiltonian(m);
    const std::size_t dim = diag.size();
    std::vector<std::complex<double>> psi(dim);
    const double amp0 = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t b = 0; b < dim; ++b)
        psi[b] = (std::popcount(b) & 1) ? -amp0 : amp0;

    const auto apply = [&](double s, const std::vector<std::complex<double>>& v,
                           std::vector<std::complex<double>>& out) {
        const double a_coef = 1.0 - s, b_coef = s;
        for (std::size_t b = 0; b < dim; ++b) out[b] = b_coef * diag[b] * v[b];
        for (std::size_t i = 0; i < m.n; ++i) {
            const std::size_t mask = std::size_t{1} << i;
            for (std::size_t b = 0; b < dim; ++b) out[b] += a_coef * v[b ^ mask];
        }
        const std::complex<double> minus_i(0.0, -1.0);
        for (auto& x : out) x *= minus_i;
    };

    const double dt = total_time / steps;
    std::vector<std::complex<double>> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    for (int step = 0; step < steps; ++step) {
        const double t = step * dt;
        apply(t / total_time, psi, k1);
        for (std::size_t b = 0; b < dim; ++b) tmp[b] = psi[b] + 0.5 * dt * k1[b];
        apply((t + 0.5 * dt) / total_time, tmp, k2);
        for (std::size_t b = 0; b < dim; ++b) tmp[b] = psi[b] + 0.5 * dt * k2[b];
        apply((t + 0.5 * dt) / total_time, tmp, k3);
        for (std::size_t b = 0; b < dim; ++b) tmp[b] = psi[b] + dt * k3[b];
        apply((t + dt) / total_time, tmp, k4);
        for (std::size_t b = 0; b < dim; ++b)
            psi[b] += dt / 6.0 * (k1[b] + 2.0 * k2[b] + 2.0 * k3[b] + k4[b]);
    }
    return psi;
}

}  // namespace

TEST_CASE("target diagonal reproduces the hand-computed spectra") {
    SECTION("single spin in a field") {
        const std::vector<double> d = build_target_hamiltonian(single_spin_field());
        REQUIRE(d.size() == 2);
        CHECK(d[0] == -1.0);  // |0> has z = +1
        CHECK(d[1] == 1.0);
    }
    SECTION("zero model") {
        const std::vector<double> d = build_target_hamiltonian(IsingModel::zero(3));
        for (double v : d) CHECK(v == 0.0);
    }
    SECTION("ferromagnet has the degenerate aligned pair") {
        const std::vector<double> d = build_target_hamiltonian(ferromagnet());
        REQUIRE(d.size() == 4);
        CHECK(d[0b00] == -1.0);
        CHECK(d[0b01] == 1.0);
        CHECK(d[0b10] == 1.0);
        CHECK(d[0b11] == -1.0);
    }
    SECTION("spin-count guard") {
        CHECK_THROWS_AS(build_target_hamiltonian(IsingModel::zero(15)), std::invalid_argument);
    }
}

TEST_CASE("target diagonal minimum equals the brute-force Ising minimum") {
    Rng rng(2025);
    for (const std::size_t n : {2, 4, 8, 12}) {
        IsingModel m = oracles::random_ising(rng, n);
        m.offset = rng.uniform(-1.0, 1.0);
        const std::vector<double> d = build_target_hamiltonian(m);
        double dmin = d[0];
        for (double v : d) dmin = std::min(dmin, v);
        const auto [emin, spins] = oracles::brute_force_ising_minimum(m);
        REQUIRE(dmin == Catch::Approx(emin).margin(1e-12));
    }
}

TEST_CASE("near-zero evolution time leaves the initial state untouched") {
    const AnnealResult r =
        anneal_evolve(ferromagnet(), AnnealSchedule::linear(), 1e-8, 1);
    const std::size_t dim = r.state.amplitudes.size();
    std::vector<std::complex<double>> initial(dim);
    const double amp0 = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t b = 0; b < dim; ++b)
        initial[b] = (std::popcount(b) & 1) ? -amp0 : amp0;
    CHECK(fidelity(initial, r.state.amplitudes) > 0.999);
}

TEST_CASE("slow anneal reaches the single-spin ground state") {
    const AnnealResult r =
        anneal_evolve(single_spin_field(), AnnealSchedule::linear(), 100.0, 10000);
    CHECK(ground_state_probability(r.state, single_spin_field()) > 0.99);
    CHECK(std::abs(r.state.norm() - 1.0) < 1e-8);
}

TEST_CASE("slow anneal reaches the ferromagnetic ground subspace") {
    const AnnealResult r =
        anneal_evolve(ferromagnet(), AnnealSchedule::linear(), 100.0, 10000);
    const double p = ground_state_probability(r.state, ferromagnet());
    CHECK(p > 0.99);  // |00> and |11> combined
}

TEST_CASE("the Taylor propagator agrees with an RK4 oracle") {
    Rng rng(626);
    IsingModel m = oracles::random_ising(rng, 2);
    const AnnealResult taylor = anneal_evolve(m, AnnealSchedule::linear(), 10.0, 2000);
    const auto rk4 = rk4_evolve(m, 10.0, 200000);
    CHECK(fidelity(taylor.state.amplitudes, rk4) > 1.0 - 1e-6);
}

TEST_CASE("ground probability is non-decreasing with anneal time") {
    // averaged over a few random 2-spin models per point to smooth oscillations
    Rng rng(727);
    std::vector<IsingModel> models;
    for (int k = 0; k < 5; ++k) models.push_back(oracles::random_ising(rng, 2));
    double last = -1.0;
    for (double total_time = 1.0; total_time <= 128.0; total_time *= 2.0) {
        double mean = 0.0;
        for (const IsingModel& m : models) {
            const AnnealResult r = anneal_evolve(m, AnnealSchedule::linear(), total_time,
                                                 static_cast<int>(200 * total_time));
            mean += ground_state_probability(r.state, m);
        }
        mean /= static_cast<double>(models.size());
        REQUIRE(mean >= last - 1e-6);
        last = mean;
    }
}

TEST_CASE("trace rows carry expectation, probability and norm") {
    const AnnealResult r =
        anneal_evolve(ferromagnet(), AnnealSchedule::linear(), 20.0, 200, 50);
    REQUIRE_FALSE(r.trace.empty());
    CHECK(r.trace.front().s == 0.0);
    CHECK(r.trace.back().s == 1.0);
    for (const AnnealTraceRow& row : r.trace) {
        CHECK(std::abs(row.norm - 1.0) < 1e-8);
        CHECK(row.ground_probability >= 0.0);
        CHECK(row.ground_probability <= 1.0 + 1e-12);
    }
    // the ground probability should grow over the sweep
    CHECK(r.trace.back().ground_probability > r.trace.front().ground_probability);
}

TEST_CASE("ground_state_probability sums the minimum-energy amplitudes") {
    SECTION("exact basis ground state") {
        Statevector psi;
        psi.amplitudes = {{1.0, 0.0}, {0.0, 0.0}};
        CHECK(ground_state_probability(psi, single_spin_field()) == 1.0);
    }
    SECTION("uniform superposition on one spin") {
        const double r = 1.0 / std::sqrt(2.0);
        Statevector psi;
        psi.amplitudes = {{r, 0.0}, {r, 0.0}};
        CHECK(ground_state_probability(psi, single_spin_field()) == Catch::Approx(0.5));
    }
    SECTION("Bell state on the degenerate ferromagnet") {
        const double r = 1.0 / std::sqrt(2.0);
        Statevector psi;
        psi.amplitudes = {{r, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {r, 0.0}};
        CHECK(ground_state_probability(psi, ferromagnet()) == Catch::Approx(1.0));
    }
}

TEST_CASE("schedule conventions are validated") {
    AnnealSchedule bad{[](double) { return 0.0; }, [](double s) { return s; }};
    CHECK_THROWS_AS(anneal_evolve(single_spin_field(), bad, 1.0, 10), std::invalid_argument);
    AnnealSchedule bad2{[](double s) { return 1.0 - s; }, [](double) { return 0.5; }};
    CHECK_THROWS_AS(anneal_evolve(single_spin_field(), bad2, 1.0, 10), std::invalid_argument);
}
