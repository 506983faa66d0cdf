#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bifurjet/event.hpp"
#include "bifurjet/rng.hpp"

namespace bifurjet {

constexpr double kZMass = 91.2;    // GeV
constexpr double kHiggsMass = 125.0;
constexpr double kTopMass = 172.5;
constexpr double kWMass = 80.4;

inline Process parse_process(const std::string& name) {
    if (name == "z") return Process::Z;
    if (name == "zh") return Process::ZH;
    if (name == "tt") return Process::TT;
    throw std::invalid_argument("unknown process '" + name + "' (expected z, zh or tt)");
}

inline const char* process_name(Process p) {
    switch (p) {
        case Process::Z: return "z";
        case Process::ZH: return "zh";
        case Process::TT: return "tt";
    }
    return "?";
}

// Synthetic event recipe standing in for a full MC production chain: exact
// parton-level two-body kinematics for the process topology, then each parton
// fragmented into massless particles inside a narrow cone.
struct SyntheticSpec {
    Process process = Process::Z;
    double sqrt_s = 0.0;          // 0 selects the per-process default
    int min_particles = 4;        // per jet
    int max_particles = 6;
    double angular_spread = 0.05; // radians
    double energy_smear = 0.0;    // relative Gaussian smear; 0 disables
    std::uint64_t seed = 1;

    double resolved_sqrt_s() const {
        return sqrt_s > 0.0 ? sqrt_s : process_sqrt_s(process);
    }

    void validate() const {
        if (sqrt_s < 0.0) throw std::invalid_argument("SyntheticSpec: sqrt_s must be positive");
        if (min_particles < 1 || max_particles < min_particles)
            throw std::invalid_argument("SyntheticSpec: bad particles_per_jet range");
        if (!(angular_spread > 0.0) || angular_spread > M_PI / 4.0)
            throw std::invalid_argument("SyntheticSpec: angular_spread must be in (0, pi/4]");
        if (energy_smear < 0.0)
            throw std::invalid_argument("SyntheticSpec: energy_smear must be >= 0");
    }
};

struct GeneratedEvent {
    Event event;
    std::vector<Jet> truth;  // per-parton truth jets, four-momenta = particle sums
};

namespace detail {

struct Parton {
    FourVector p4;
    Flavor flavor;
};

inline Vec3 random_direction(Rng& rng) {
    const double cos_t = rng.uniform(-1.0, 1.0);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    return {sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t};
}

// Two-body decay of a parent with mass M into (m1, m2); returns lab-frame
// four-vectors given the parent's lab four-momentum.
inline std::pair<FourVector, FourVector> two_body_decay(const FourVector& parent, double m1,
                                                        double m2, Rng& rng) {
    const double M = parent.mass();
    if (M < m1 + m2 + 1e-12)
        throw std::invalid_argument("two_body_decay: parent mass below threshold");
    const double e1 = (M * M + m1 * m1 - m2 * m2) / (2.0 * M);
    const double e2 = M - e1;
    const double pmag = std::sqrt(std::max(0.0, e1 * e1 - m1 * m1));
    const Vec3 dir = random_direction(rng);
    FourVector a{e1, pmag * dir.x, pmag * dir.y, pmag * dir.z};
    FourVector b{e2, -pmag * dir.x, -pmag * dir.y, -pmag * dir.z};
    const Vec3 beta = parent.p3() * (1.0 / parent.e);
    return {boost(a, beta), boost(b, beta)};
}

inline void check_pair_mass(const FourVector& a, const FourVector& b, double expect,
                            const char* what) {
    const double m = (a + b).mass();
    if (std::abs(m - expect) > 1e-6 * expect)
        throw std::logic_error(std::string("synthetic generator: ") + what +
                               " pair mass off target");
}

// Splits a massless parton into count massless particles: flat Dirichlet
// energy fractions and a Gaussian cone of width `spread` around the parton
// axis, then a rigid rotation bringing the momentum sum back onto the axis.
inline std::vector<FourVector> fragment(const FourVector& parton, int count, double spread,
                                        Rng& rng) {
    const Vec3 axis = parton.p3().unit();
    std::vector<double> z(static_cast<std::size_t>(count));
    double z_sum = 0.0;
    for (auto& v : z) {
        v = std::max(-std::log(1.0 - rng.uniform()), 1e-9);
        z_sum += v;
    }

    // orthonormal frame around the axis
    Vec3 e1 = std::abs(axis.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    e1 = (e1 - axis * axis.dot(e1)).unit();
    const Vec3 e2 = axis.cross(e1);

    std::vector<FourVector> out;
    out.reserve(z.size());
    Vec3 total{};
    for (double zi : z) {
        const double g1 = rng.gaussian(), g2 = rng.gaussian();
        const Vec3 dir = (axis + e1 * (spread * g1) + e2 * (spread * g2)).unit();
        const double energy = parton.e * zi / z_sum;
        out.push_back(massless(energy, dir));
        total += out.back().p3();
    }
    if (total.norm() > 0.0) {
        for (auto& p : out) {
            const Vec3 r = rotate_onto(p.p3(), total, axis);
            p = {p.e, r.x, r.y, r.z};
        }
    }
    return out;
}

}  // namespace detail

// Builds one event: parton kinematics conserve four-momentum exactly and hit
// the process masses; fragmentation keeps particles massless; a final tiny
// boost-and-rescale pins the event total back to (sqrt_s, 0) at rounding
// level. Truth jets are recorded as the per-parton particle sums.
inline GeneratedEvent generate_synthetic_event(const SyntheticSpec& spec) {
    spec.validate();
    const double roots = spec.resolved_sqrt_s();
    Rng rng(spec.seed);

    std::vector<detail::Parton> partons;
    switch (spec.process) {
        case Process::Z: {
            const Vec3 dir = detail::random_direction(rng);
            const double e = roots / 2.0;
            partons.push_back({massless(e, dir), Flavor::Light});
            partons.push_back({massless(e, dir * -1.0), Flavor::Light});
            detail::check_pair_mass(partons[0].p4, partons[1].p4, roots, "Z");
            break;
        }
        case Process::ZH: {
            if (roots < kHiggsMass + kZMass)
                throw std::invalid_argument("sqrt_s below ZH threshold");
            const double s = roots * roots;
            const double eh = (s + kHiggsMass * kHiggsMass - kZMass * kZMass) / (2.0 * roots);
            const double ez = roots - eh;
            const double pmag = std::sqrt(std::max(0.0, eh * eh - kHiggsMass * kHiggsMass));
            const Vec3 dir = detail::random_direction(rng);
            const FourVector higgs{eh, pmag * dir.x, pmag * dir.y, pmag * dir.z};
            const FourVector z{ez, -pmag * dir.x, -pmag * dir.y, -pmag * dir.z};
            auto [b1, b2] = detail::two_body_decay(higgs, 0.0, 0.0, rng);
            auto [q1, q2] = detail::two_body_decay(z, 0.0, 0.0, rng);
            detail::check_pair_mass(b1, b2, kHiggsMass, "H -> bb");
            detail::check_pair_mass(q1, q2, kZMass, "Z -> qq");
            partons = {{b1, Flavor::B}, {b2, Flavor::B}, {q1, Flavor::Light}, {q2, Flavor::Light}};
            break;
        }
        case Process::TT: {
            if (roots < 2.0 * kTopMass)
                throw std::invalid_argument("sqrt_s below tt threshold");
            const double et = roots / 2.0;
            const double pmag = std::sqrt(std::max(0.0, et * et - kTopMass * kTopMass));
            const Vec3 dir = detail::random_direction(rng);
            const FourVector top{et, pmag * dir.x, pmag * dir.y, pmag * dir.z};
            const FourVector antitop{et, -pmag * dir.x, -pmag * dir.y, -pmag * dir.z};
            for (const FourVector& t : {top, antitop}) {
                auto [b, w] = detail::two_body_decay(t, 0.0, kWMass, rng);
                auto [q1, q2] = detail::two_body_decay(w, 0.0, 0.0, rng);
                detail::check_pair_mass(q1, q2, kWMass, "W -> qq");
                partons.push_back({b, Flavor::B});
                partons.push_back({q1, Flavor::Light});
                partons.push_back({q2, Flavor::Light});
            }
            break;
        }
    }

    GeneratedEvent out;
    out.event.meta["process"] = process_name(spec.process);
    out.event.meta["sqrt_s"] = std::to_string(roots);
    out.event.meta["seed"] = std::to_string(spec.seed);

    for (std::size_t jet = 0; jet < partons.size(); ++jet) {
        const int count = rng.uniform_int(spec.min_particles, spec.max_particles);
        for (const FourVector& p4 :
             detail::fragment(partons[jet].p4, count, spec.angular_spread, rng)) {
            Particle particle;
            particle.p4 = p4;
            particle.flavor = partons[jet].flavor;
            particle.truth_jet = static_cast<int>(jet);
            out.event.particles.push_back(particle);
        }
    }

    // pin the event total to (sqrt_s, 0): boost to the overall rest frame,
    // then rescale; both keep particles massless
    FourVector total;
    for (const Particle& p : out.event.particles) total += p.p4;
    const Vec3 beta = total.p3() * (-1.0 / total.e);
    const double m_total = total.mass();
    if (!(m_total > 0.0)) throw std::logic_error("synthetic generator: degenerate event total");
    const double scale = roots / m_total;
    for (Particle& p : out.event.particles) p.p4 = boost(p.p4, beta) * scale;

    if (spec.energy_smear > 0.0) {
        for (Particle& p : out.event.particles) {
            const double f = std::max(1.0 + spec.energy_smear * rng.gaussian(), 0.01);
            p.p4 = p.p4 * f;
        }
    }

    for (std::size_t i = 0; i < out.event.particles.size(); ++i)
        out.event.particles[i].validate(static_cast<int>(i));
    out.truth = truth_jets(out.event);
    return out;
}

// ---------------------------------------------------------------------------
// JSON Lines serialization: one event per line,
// {"meta":{...},"particles":[{"e":..,"px":..,"py":..,"pz":..,
//  "flavor":"b"|"light"|null,"truth_jet":int|null},...]}

inline nlohmann::ordered_json particle_to_json(const Particle& p) {
    nlohmann::ordered_json j;
    j["e"] = p.p4.e;
    j["px"] = p.p4.px;
    j["py"] = p.p4.py;
    j["pz"] = p.p4.pz;
    if (p.flavor == Flavor::None) j["flavor"] = nullptr;
    else j["flavor"] = p.flavor == Flavor::B ? "b" : "light";
    if (p.truth_jet) j["truth_jet"] = *p.truth_jet;
    else j["truth_jet"] = nullptr;
    return j;
}

inline nlohmann::ordered_json event_to_json(const Event& event) {
    nlohmann::ordered_json j;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : event.meta) j["meta"][k] = v;
    j["particles"] = nlohmann::ordered_json::array();
    for (const Particle& p : event.particles) j["particles"].push_back(particle_to_json(p));
    return j;
}

inline Event event_from_json(const nlohmann::json& j) {
    Event event;
    if (j.contains("meta")) {
        if (!j["meta"].is_object()) throw std::runtime_error("field 'meta' must be an object");
        for (const auto& [k, v] : j["meta"].items())
            event.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    if (!j.contains("particles") || !j["particles"].is_array())
        throw std::runtime_error("missing required field 'particles'");
    int idx = 0;
    for (const auto& pj : j["particles"]) {
        Particle p;
        for (const char* field : {"e", "px", "py", "pz"})
            if (!pj.contains(field) || !pj[field].is_number())
                throw std::runtime_error("particle " + std::to_string(idx) +
                                         " missing required field '" + field + "'");
        p.p4 = {pj["e"].get<double>(), pj["px"].get<double>(), pj["py"].get<double>(),
                pj["pz"].get<double>()};
        if (pj.contains("flavor") && !pj["flavor"].is_null()) {
            const std::string f = pj["flavor"].get<std::string>();
            if (f == "b") p.flavor = Flavor::B;
            else if (f == "light") p.flavor = Flavor::Light;
            else throw std::runtime_error("particle " + std::to_string(idx) +
                                          " has unknown flavor '" + f + "'");
        }
        if (pj.contains("truth_jet") && !pj["truth_jet"].is_null())
            p.truth_jet = pj["truth_jet"].get<int>();
        p.validate(idx);
        event.particles.push_back(std::move(p));
        ++idx;
    }
    return event;
}

inline void write_events(std::span<const Event> events, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const Event& event : events) out << event_to_json(event).dump() << '\n';
    if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

inline std::vector<Event> read_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<Event> events;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            events.push_back(event_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error("events file '" + path + "', line " +
                                     std::to_string(line_no) + ": " + e.what());
        }
    }
    return events;
}

// ---------------------------------------------------------------------------

struct SimplifiedEvent {
    Event event;
    bool keep_exceeded_input = false;  // warning: keep > N, event returned unchanged
};

// Keeps the `keep` particles of highest transverse momentum, preserving the
// original relative order; ties resolve to the earlier index.
inline SimplifiedEvent simplify_event(const Event& event, int keep) {
    if (keep < 1) throw std::invalid_argument("simplify_event: keep must be >= 1");
    const int n = static_cast<int>(event.particles.size());
    if (keep >= n) return {event, keep > n};

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double pa = event.particles[static_cast<std::size_t>(a)].pt();
        const double pb = event.particles[static_cast<std::size_t>(b)].pt();
        if (pa != pb) return pa > pb;
        return a < b;
    });
    order.resize(static_cast<std::size_t>(keep));
    std::sort(order.begin(), order.end());

    SimplifiedEvent out;
    out.event.meta = event.meta;
    out.event.meta["simplified_from"] = std::to_string(n);
    for (int idx : order) out.event.particles.push_back(event.particles[static_cast<std::size_t>(idx)]);
    return out;
}

}  // namespace bifurjet
