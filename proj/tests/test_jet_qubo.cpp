#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "bifurjet/jet_qubo.hpp"
#include "bifurjet/rng.hpp"
#include "oracles.hpp"

using namespace bifurjet;

namespace {

Particle particle(double e, double ux, double uy, double uz) {
    const Vec3 u = Vec3{ux, uy, uz}.unit();
    Particle p;
    p.p4 = {e, e * u.x, e * u.y, e * u.z};
    return p;
}

Event back_to_back_pair(double e1 = 1.0, double e2 = 1.0) {
    Event event;
    event.particles.push_back(particle(e1, 0, 0, 1));
    event.particles.push_back(particle(e2, 0, 0, -1));
    return event;
}

bool is_one_hot(const BitConfig& bits, int n_input, int n_jet) {
    for (int i = 0; i < n_input; ++i) {
        int count = 0;
        for (int n = 0; n < n_jet; ++n)
            count += bits.bits[static_cast<std::size_t>(n) * n_input + i];
        if (count != 1) return false;
    }
    return true;
}

// Distance block sum for a one-hot assignment: sum over jets of
// sum_{i != j in jet} Q_ij.
double block_distance_sum(const Matrix& q, const BitConfig& bits, int n_input, int n_jet) {
    double sum = 0.0;
    for (int n = 0; n < n_jet; ++n)
        for (int i = 0; i < n_input; ++i)
            for (int j = 0; j < n_input; ++j) {
                if (i == j) continue;
                if (bits.bits[static_cast<std::size_t>(n) * n_input + i] &&
                    bits.bits[static_cast<std::size_t>(n) * n_input + j])
                    sum += q(i, j);
            }
    return sum;
}

}  // namespace

TEST_CASE("angle distance is -cos(theta)/2") {
    const Particle a = particle(3.0, 0, 0, 1);
    CHECK(angle_distance(a, particle(7.0, 0, 0, 1)) == Catch::Approx(-0.5));
    CHECK(angle_distance(a, particle(2.0, 1, 0, 0)) == Catch::Approx(0.0).margin(1e-15));
    CHECK(angle_distance(a, particle(5.0, 0, 0, -1)) == Catch::Approx(0.5));
}

TEST_CASE("ee-kt distance matches hand evaluation") {
    CHECK(eekt_distance(particle(3.0, 0, 0, 1), particle(9.0, 0, 0, 1)) ==
          Catch::Approx(0.0).margin(1e-12));
    CHECK(eekt_distance(particle(1.0, 0, 0, 1), particle(2.0, 0, 0, -1)) == Catch::Approx(4.0));
    CHECK(eekt_distance(particle(3.0, 0, 0, 1), particle(4.0, 1, 0, 0)) == Catch::Approx(18.0));
}

TEST_CASE("distances are symmetric under argument swap") {
    Rng rng(5);
    const Event event = oracles::random_event(rng, 8);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            const Particle& a = event.particles[i];
            const Particle& b = event.particles[j];
            CHECK(angle_distance(a, b) == angle_distance(b, a));
            CHECK(eekt_distance(a, b) == eekt_distance(b, a));
        }
}

TEST_CASE("distance matrix reports zero-momentum particles by index") {
    Event event = back_to_back_pair();
    Particle rest;
    rest.p4 = {1.0, 0.0, 0.0, 0.0};
    event.particles.push_back(rest);
    CHECK_THROWS_WITH(distance_matrix(event, DistanceKind::EeKt),
                      Catch::Matchers::ContainsSubstring("particle 2"));
}

TEST_CASE("dijet QUBO separates a back-to-back pair") {
    const Event event = back_to_back_pair();
    const Qubo q = build_dijet_qubo(event, DistanceKind::EeKt);
    q.validate();
    REQUIRE(q.n == 2);

    const auto [best, best_bits] = oracles::brute_force_qubo_minimum(q);
    CHECK(best == Catch::Approx(0.0).margin(1e-12));
    // both separating labelings reach the minimum
    CHECK(qubo_energy(q, {{1, 0}}) == Catch::Approx(best).margin(1e-12));
    CHECK(qubo_energy(q, {{0, 1}}) == Catch::Approx(best).margin(1e-12));
    CHECK(qubo_energy(q, {{1, 1}}) > best);
}

TEST_CASE("angle dijet QUBO absorbs the -1/2 diagonal into linear") {
    Rng rng(11);
    const Event event = oracles::random_event(rng, 5);
    const Qubo q = build_dijet_qubo(event, DistanceKind::Angle);
    for (std::size_t i = 0; i < q.n; ++i) CHECK(q.linear[i] == Catch::Approx(-0.5));
}

TEST_CASE("collinear particles give an all-zero ee-kt coupling") {
    Event event;
    for (double e : {5.0, 3.0, 2.0}) event.particles.push_back(particle(e, 0, 0, 1));
    const Qubo q = build_dijet_qubo(event, DistanceKind::EeKt);
    for (std::size_t i = 0; i < q.n; ++i) {
        CHECK(q.linear[i] == 0.0);
        for (std::size_t j = 0; j < q.n; ++j)
            CHECK(q.coupling(i, j) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("build_dijet_qubo needs two particles") {
    Event event;
    event.particles.push_back(particle(1.0, 0, 0, 1));
    CHECK_THROWS_AS(build_dijet_qubo(event, DistanceKind::EeKt), std::invalid_argument);
}

TEST_CASE("multijet QUBO has n_jet * N_input variables") {
    Rng rng(17);
    const Event event = oracles::random_event(rng, 32);
    const Qubo q = build_multijet_qubo(event, 2, DistanceKind::EeKt);
    CHECK(q.n == 64);
}

TEST_CASE("multijet minimum sits on the one-hot separating assignments") {
    const Event event = back_to_back_pair();
    const Qubo q = build_multijet_qubo(event, 2, DistanceKind::EeKt);
    REQUIRE(q.n == 4);

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> minima;
    BitConfig s;
    s.bits.resize(4);
    for (std::uint64_t mask = 0; mask < 16; ++mask) {
        for (std::size_t i = 0; i < 4; ++i) s.bits[i] = (mask >> i) & 1;
        const double e = qubo_energy(q, s);
        if (e < best - 1e-12) {
            best = e;
            minima = {mask};
        } else if (e <= best + 1e-12) {
            minima.push_back(mask);
        }
    }
    CHECK(best == Catch::Approx(0.0).margin(1e-12));
    // jet-major layout: (jet0: p0 p1, jet1: p0 p1) -> 0b1001 and 0b0110
    REQUIRE(minima.size() == 2);
    CHECK(((minima[0] == 0b1001 && minima[1] == 0b0110) ||
           (minima[0] == 0b0110 && minima[1] == 0b1001)));
}

TEST_CASE("one-hot energies equal the distance block sum") {
    Rng rng(23);
    const DistanceKind kind = GENERATE(DistanceKind::EeKt, DistanceKind::Angle);
    for (int n_jet = 2; n_jet <= 3; ++n_jet) {
        for (int n_input = n_jet; n_input <= 4; ++n_input) {
            const Event event = oracles::random_event(rng, static_cast<std::size_t>(n_input));
            const Matrix dist = distance_matrix(event, kind);
            const Qubo q = build_multijet_qubo(event, n_jet, kind);

            // enumerate every one-hot assignment: constituent i -> jet digit[i]
            std::vector<int> jet_of(static_cast<std::size_t>(n_input), 0);
            std::uint64_t combos = 1;
            for (int i = 0; i < n_input; ++i) combos *= static_cast<std::uint64_t>(n_jet);
            for (std::uint64_t code = 0; code < combos; ++code) {
                std::uint64_t rest = code;
                for (int i = 0; i < n_input; ++i) {
                    jet_of[static_cast<std::size_t>(i)] = static_cast<int>(rest % n_jet);
                    rest /= static_cast<std::uint64_t>(n_jet);
                }
                BitConfig bits;
                bits.bits.assign(q.n, 0);
                for (int i = 0; i < n_input; ++i)
                    bits.bits[static_cast<std::size_t>(jet_of[i]) * n_input + i] = 1;
                REQUIRE(is_one_hot(bits, n_input, n_jet));
                const double expect =
                    block_distance_sum(dist, bits, n_input, n_jet) +
                    [&] {  // diagonal Q_ii contributes once per assigned variable
                        double d = 0.0;
                        for (int i = 0; i < n_input; ++i) d += dist(i, i);
                        return d;
                    }();
                REQUIRE(qubo_energy(q, bits) == Catch::Approx(expect).margin(1e-9));
            }
        }
    }
}

TEST_CASE("default lambda dominates the one-hot constraint") {
    Rng rng(31);
    for (int n_input = 2; n_input <= 4; ++n_input) {
        const Event event = oracles::random_event(rng, static_cast<std::size_t>(n_input));
        const Qubo q = build_multijet_qubo(event, 2, DistanceKind::EeKt);
        const std::size_t dim = std::size_t{1} << q.n;
        double best = std::numeric_limits<double>::infinity();
        BitConfig s;
        s.bits.resize(q.n);
        std::vector<std::uint64_t> minima;
        for (std::uint64_t mask = 0; mask < dim; ++mask) {
            for (std::size_t i = 0; i < q.n; ++i) s.bits[i] = (mask >> i) & 1;
            const double e = qubo_energy(q, s);
            if (e < best - 1e-9) {
                best = e;
                minima = {mask};
            } else if (e <= best + 1e-9) {
                minima.push_back(mask);
            }
        }
        for (const std::uint64_t mask : minima) {
            for (std::size_t i = 0; i < q.n; ++i) s.bits[i] = (mask >> i) & 1;
            REQUIRE(is_one_hot(s, n_input, 2));
        }
    }
}

TEST_CASE("default_lambda follows the 1.1 N max(Q) rule") {
    CHECK(default_lambda(10.0, 4) == Catch::Approx(44.0));
    CHECK(default_lambda(0.0, 5) == Catch::Approx(1.1 * 5 * 1e-12));
    CHECK(default_lambda(0.0, 5) > 0.0);
    CHECK(default_lambda(1.0, 1) == Catch::Approx(1.1));
    CHECK_THROWS_AS(default_lambda(1.0, 0), std::invalid_argument);
}

TEST_CASE("build_multijet_qubo validates its inputs") {
    const Event event = back_to_back_pair();
    CHECK_THROWS_AS(build_multijet_qubo(event, 3, DistanceKind::EeKt), std::invalid_argument);
    CHECK_THROWS_AS(build_multijet_qubo(event, 2, DistanceKind::EeKt, -1.0),
                    std::invalid_argument);
}

TEST_CASE("decode splits clean one-hot bits without violations") {
    const DecodeReport r = decode_assignment({{1, 0, 0, 1}}, 2, 2);
    CHECK(r.violation_count() == 0);
    CHECK_FALSE(r.repaired);
    CHECK(r.assignment.jets[0] == std::vector<int>{0});
    CHECK(r.assignment.jets[1] == std::vector<int>{1});
}

TEST_CASE("decode reports unassigned and double-assigned constituents") {
    // jet-major: constituent 0 claimed by both jets, constituent 1 by neither
    const DecodeReport r = decode_assignment({{1, 0, 1, 0}}, 2, 2);
    CHECK(r.unassigned == std::vector<int>{1});
    CHECK(r.multi_assigned == std::vector<int>{0});
    CHECK(r.violation_count() == 2);
    CHECK(r.repaired);
    // repaired result is still a partition
    std::vector<int> all;
    for (const auto& jet : r.assignment.jets) all.insert(all.end(), jet.begin(), jet.end());
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<int>{0, 1});
}

TEST_CASE("decode flags empty jets on otherwise valid assignments") {
    const DecodeReport r = decode_assignment({{1, 1, 0, 0}}, 2, 2);
    CHECK(r.violation_count() == 0);
    CHECK(r.assignment.jets[0] == std::vector<int>{0, 1});
    CHECK(r.empty_jets == std::vector<int>{1});
}

TEST_CASE("repair uses the distance matrix when provided") {
    // three constituents, two jets; constituent 2 unassigned and much closer
    // to constituent 1 (jet 1) than to constituent 0 (jet 0)
    Matrix dist(3, 3);
    dist(0, 2) = dist(2, 0) = 100.0;
    dist(1, 2) = dist(2, 1) = 1.0;
    const DecodeReport r = decode_assignment({{1, 0, 0, 0, 1, 0}}, 3, 2, &dist);
    CHECK(r.unassigned == std::vector<int>{2});
    CHECK(r.assignment.jets[1] == std::vector<int>{1, 2});
}

TEST_CASE("decode then encode round-trips one-hot bit vectors") {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const int n_jet = rng.uniform_int(2, 4);
        const int n_input = rng.uniform_int(n_jet, 10);
        BitConfig bits;
        bits.bits.assign(static_cast<std::size_t>(n_jet * n_input), 0);
        for (int i = 0; i < n_input; ++i) {
            const int jet = rng.uniform_int(0, n_jet - 1);
            bits.bits[static_cast<std::size_t>(jet) * n_input + i] = 1;
        }
        const DecodeReport r = decode_assignment(bits, n_input, n_jet);
        REQUIRE(r.violation_count() == 0);
        const BitConfig round = encode_assignment(r.assignment);
        REQUIRE(round.bits == bits.bits);
    }
}

TEST_CASE("decode validates the bit-vector length") {
    CHECK_THROWS_WITH(decode_assignment({{1, 0, 0}}, 2, 2),
                      Catch::Matchers::ContainsSubstring("4") &&
                          Catch::Matchers::ContainsSubstring("3"));
}

TEST_CASE("both metrics are rotation invariant") {
    Rng rng(53);
    const Event event = oracles::random_event(rng, 10);
    const Vec3 axis = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double angle = rng.uniform(0.0, 2.0 * M_PI);
    Event rotated = event;
    for (Particle& p : rotated.particles) p.p4 = rotate(p.p4, axis, angle);

    for (const DistanceKind kind : {DistanceKind::Angle, DistanceKind::EeKt}) {
        const Matrix a = distance_matrix(event, kind);
        const Matrix b = distance_matrix(rotated, kind);
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                REQUIRE(std::abs(a(i, j) - b(i, j)) <= 1e-9 * (1.0 + std::abs(a(i, j))));
    }
}
