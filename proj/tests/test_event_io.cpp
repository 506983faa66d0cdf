#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "bifurjet/event_io.hpp"
#include "bifurjet/metrics.hpp"
#include "oracles.hpp"

using namespace bifurjet;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name)
        : path(std::filesystem::temp_directory_path() /
               (name + "." + std::to_string(::getpid()) + ".jsonl")) {}
    ~TempFile() { std::error_code ec; std::filesystem::remove(path, ec); }
};

SyntheticSpec spec_for(Process process, std::uint64_t seed, double spread = 0.05) {
    SyntheticSpec spec;
    spec.process = process;
    spec.seed = seed;
    spec.angular_spread = spread;
    return spec;
}

FourVector event_total(const Event& event) {
    FourVector sum;
    for (const Particle& p : event.particles) sum += p.p4;
    return sum;
}

}  // namespace

TEST_CASE("events round-trip through JSONL bit-exactly") {
    Rng rng(404);
    std::vector<Event> events;
    for (int i = 0; i < 100; ++i) {
        Event e = oracles::random_event(rng, 1 + static_cast<std::size_t>(rng.uniform_int(0, 9)));
        e.meta["index"] = std::to_string(i);
        if (rng.uniform() < 0.5) {
            for (std::size_t k = 0; k < e.particles.size(); ++k) {
                e.particles[k].flavor = rng.uniform() < 0.3 ? Flavor::B : Flavor::Light;
                e.particles[k].truth_jet = static_cast<int>(k % 3);
            }
        }
        events.push_back(std::move(e));
    }

    TempFile tmp("roundtrip");
    write_events(events, tmp.path.string());
    const std::vector<Event> back = read_events(tmp.path.string());
    REQUIRE(back.size() == events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        REQUIRE(back[i].meta == events[i].meta);
        REQUIRE(back[i].particles.size() == events[i].particles.size());
        for (std::size_t k = 0; k < events[i].particles.size(); ++k) {
            const Particle& a = events[i].particles[k];
            const Particle& b = back[i].particles[k];
            REQUIRE(a.p4.e == b.p4.e);
            REQUIRE(a.p4.px == b.p4.px);
            REQUIRE(a.p4.py == b.p4.py);
            REQUIRE(a.p4.pz == b.p4.pz);
            REQUIRE(a.flavor == b.flavor);
            REQUIRE(a.truth_jet == b.truth_jet);
        }
    }
}

TEST_CASE("an empty file reads as an empty list") {
    TempFile tmp("empty");
    std::ofstream(tmp.path).close();
    CHECK(read_events(tmp.path.string()).empty());
}

TEST_CASE("parse errors cite the line number") {
    TempFile tmp("badline");
    {
        Rng rng(1);
        std::ofstream out(tmp.path);
        const Event good = oracles::random_event(rng, 2);
        for (int i = 0; i < 6; ++i) out << event_to_json(good).dump() << '\n';
        out << "{ this is not json\n";
    }
    CHECK_THROWS_WITH(read_events(tmp.path.string()),
                      Catch::Matchers::ContainsSubstring("line 7"));
}

TEST_CASE("missing fields are named") {
    TempFile tmp("missing");
    std::ofstream(tmp.path) << R"({"particles":[{"e":1.0,"py":0.0,"pz":1.0}]})" << "\n";
    CHECK_THROWS_WITH(read_events(tmp.path.string()),
                      Catch::Matchers::ContainsSubstring("px"));
}

TEST_CASE("Z limit: tiny spread and one particle per jet is back-to-back") {
    SyntheticSpec spec = spec_for(Process::Z, 8, 1e-12);
    spec.min_particles = 1;
    spec.max_particles = 1;
    const GeneratedEvent gen = generate_synthetic_event(spec);
    REQUIRE(gen.event.particles.size() == 2);
    const double e_half = process_sqrt_s(Process::Z) / 2.0;
    CHECK(gen.event.particles[0].p4.e == Catch::Approx(e_half).epsilon(1e-9));
    CHECK(gen.event.particles[1].p4.e == Catch::Approx(e_half).epsilon(1e-9));
    CHECK(cos_angle(gen.event.particles[0].p4, gen.event.particles[1].p4) ==
          Catch::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("generated events conserve the total four-momentum") {
    for (const Process process : {Process::Z, Process::ZH, Process::TT}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const GeneratedEvent gen = generate_synthetic_event(spec_for(process, seed));
            const double roots = process_sqrt_s(process);
            const FourVector total = event_total(gen.event);
            REQUIRE(std::abs(total.e - roots) <= 1e-6 * roots);
            REQUIRE(std::abs(total.px) <= 1e-6 * roots);
            REQUIRE(std::abs(total.py) <= 1e-6 * roots);
            REQUIRE(std::abs(total.pz) <= 1e-6 * roots);
        }
    }
}

TEST_CASE("truth jets cover the event and match the recorded four-momenta") {
    const GeneratedEvent gen = generate_synthetic_event(spec_for(Process::TT, 21));
    REQUIRE(gen.truth.size() == 6);
    std::vector<bool> seen(gen.event.particles.size(), false);
    for (std::size_t t = 0; t < gen.truth.size(); ++t) {
        FourVector sum;
        for (int idx : gen.truth[t].constituents) {
            REQUIRE_FALSE(seen[static_cast<std::size_t>(idx)]);
            seen[static_cast<std::size_t>(idx)] = true;
            REQUIRE(gen.event.particles[static_cast<std::size_t>(idx)].truth_jet == static_cast<int>(t));
            sum += gen.event.particles[static_cast<std::size_t>(idx)].p4;
        }
        REQUIRE(std::abs(sum.e - gen.truth[t].p4.e) <= 1e-9 * (1.0 + sum.e));
        REQUIRE(std::abs(sum.px - gen.truth[t].p4.px) <= 1e-9 * (1.0 + std::abs(sum.px)));
        REQUIRE(std::abs(sum.py - gen.truth[t].p4.py) <= 1e-9 * (1.0 + std::abs(sum.py)));
        REQUIRE(std::abs(sum.pz - gen.truth[t].p4.pz) <= 1e-9 * (1.0 + std::abs(sum.pz)));
    }
    for (bool s : seen) REQUIRE(s);
}

TEST_CASE("ZH truth b system reproduces the Higgs mass") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const GeneratedEvent gen = generate_synthetic_event(spec_for(Process::ZH, seed));
        FourVector b_sum;
        for (const Particle& p : gen.event.particles)
            if (p.flavor == Flavor::B) b_sum += p.p4;
        REQUIRE(b_sum.mass() == Catch::Approx(kHiggsMass).epsilon(1e-3));
    }
}

TEST_CASE("TT truth W pairs hit the W mass in the collinear limit") {
    const GeneratedEvent gen = generate_synthetic_event(spec_for(Process::TT, 5, 1e-12));
    // light truth jets (1,2) and (4,5) are the W decay products by construction
    const double m_w1 = invariant_mass(gen.truth[1], gen.truth[2]);
    const double m_w2 = invariant_mass(gen.truth[4], gen.truth[5]);
    CHECK(m_w1 == Catch::Approx(kWMass).epsilon(1e-6));
    CHECK(m_w2 == Catch::Approx(kWMass).epsilon(1e-6));
    CHECK(gen.truth[0].btag);
    CHECK(gen.truth[3].btag);
}

TEST_CASE("infeasible kinematics are rejected") {
    SyntheticSpec spec = spec_for(Process::ZH, 1);
    spec.sqrt_s = 200.0;  // below m_H + m_Z
    CHECK_THROWS_AS(generate_synthetic_event(spec), std::invalid_argument);
    SyntheticSpec tt = spec_for(Process::TT, 1);
    tt.sqrt_s = 300.0;
    CHECK_THROWS_AS(generate_synthetic_event(tt), std::invalid_argument);
}

TEST_CASE("simplify keeps the highest-pt particles in order") {
    Event event;
    for (const double pt : {5.0, 3.0, 4.0}) {
        Particle p;
        p.p4 = {std::hypot(pt, 1.0), pt, 0.0, 1.0};
        event.particles.push_back(p);
    }
    const SimplifiedEvent kept = simplify_event(event, 2);
    REQUIRE(kept.event.particles.size() == 2);
    CHECK(kept.event.particles[0].p4.px == 5.0);
    CHECK(kept.event.particles[1].p4.px == 4.0);
    CHECK_FALSE(kept.keep_exceeded_input);

    const SimplifiedEvent same = simplify_event(event, 3);
    CHECK(same.event.particles.size() == 3);
    CHECK_FALSE(same.keep_exceeded_input);

    const SimplifiedEvent over = simplify_event(event, 5);
    CHECK(over.event.particles.size() == 3);
    CHECK(over.keep_exceeded_input);
}

TEST_CASE("simplify output is a pt-dominating subset") {
    Rng rng(515);
    for (int trial = 0; trial < 20; ++trial) {
        const Event event = oracles::random_event(rng, 12);
        const int keep = rng.uniform_int(1, 12);
        const SimplifiedEvent s = simplify_event(event, keep);
        REQUIRE(s.event.particles.size() == static_cast<std::size_t>(keep));
        double min_kept = std::numeric_limits<double>::infinity();
        for (const Particle& p : s.event.particles) min_kept = std::min(min_kept, p.pt());
        // every kept particle must appear in the input
        for (const Particle& p : s.event.particles) {
            bool found = false;
            for (const Particle& q : event.particles)
                found |= q.p4.e == p.p4.e && q.p4.px == p.p4.px && q.p4.py == p.p4.py &&
                         q.p4.pz == p.p4.pz;
            REQUIRE(found);
        }
        // count how many inputs strictly beat the weakest kept particle
        int stronger = 0;
        for (const Particle& q : event.particles)
            if (q.pt() > min_kept) ++stronger;
        REQUIRE(stronger <= keep - 1);
    }
}

TEST_CASE("energy smear breaks exact conservation but keeps particles valid") {
    SyntheticSpec spec = spec_for(Process::Z, 3);
    spec.energy_smear = 0.05;
    const GeneratedEvent gen = generate_synthetic_event(spec);
    for (std::size_t i = 0; i < gen.event.particles.size(); ++i)
        gen.event.particles[i].validate(static_cast<int>(i));
}
