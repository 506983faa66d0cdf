#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifurjet/kinematics.hpp"

namespace bifurjet {

enum class Flavor { None, Light, B };

enum class Process { Z, ZH, TT };

inline int process_njet(Process p) {
    switch (p) {
        case Process::Z: return 2;
        case Process::ZH: return 4;
        case Process::TT: return 6;
    }
    return 2;
}

inline double process_sqrt_s(Process p) {
    switch (p) {
        case Process::Z: return 91.0;
        case Process::ZH: return 240.0;
        case Process::TT: return 350.0;
    }
    return 91.0;
}

// One particle-flow candidate. Energies and momenta in GeV; truth labels are
// carried only by synthetic events.
struct Particle {
    FourVector p4;
    Flavor flavor = Flavor::None;
    std::optional<int> truth_jet;

    double e() const { return p4.e; }
    double pt() const { return p4.pt(); }

    // e > 0 and mass^2 >= -1e-6 e^2 (slightly tachyonic candidates tolerated
    // to rounding).
    void validate(int index = -1) const {
        const std::string tag =
            index >= 0 ? "particle " + std::to_string(index) : "particle";
        if (!(p4.e > 0.0))
            throw std::invalid_argument(tag + ": energy must be positive");
        if (!std::isfinite(p4.e) || !std::isfinite(p4.px) ||
            !std::isfinite(p4.py) || !std::isfinite(p4.pz))
            throw std::invalid_argument(tag + ": non-finite four-momentum");
        if (p4.mass2() < -1e-6 * p4.e * p4.e)
            throw std::invalid_argument(tag + ": tachyonic four-momentum");
    }
};

struct Event {
    std::vector<Particle> particles;
    std::map<std::string, std::string> meta;

    std::size_t size() const { return particles.size(); }
};

// A reconstructed jet: E-scheme four-momentum plus the indices of the input
// particles it owns.
struct Jet {
    FourVector p4;
    std::vector<int> constituents;
    bool btag = false;
};

inline Jet make_jet(const Event& event, std::vector<int> constituents) {
    Jet jet;
    jet.constituents = std::move(constituents);
    double b_energy = 0.0;
    for (int idx : jet.constituents) {
        const Particle& p = event.particles.at(static_cast<std::size_t>(idx));
        jet.p4 += p.p4;
        if (p.flavor == Flavor::B) b_energy += p.p4.e;
    }
    jet.btag = jet.p4.e > 0.0 && b_energy > 0.5 * jet.p4.e;
    return jet;
}

// Rebuilds the truth-jet partition from per-particle labels.
inline std::vector<Jet> truth_jets(const Event& event) {
    int n_jet = 0;
    for (const Particle& p : event.particles) {
        if (!p.truth_jet)
            throw std::invalid_argument("event lacks truth-jet labels");
        n_jet = std::max(n_jet, *p.truth_jet + 1);
    }
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(n_jet));
    for (std::size_t i = 0; i < event.particles.size(); ++i)
        groups[static_cast<std::size_t>(*event.particles[i].truth_jet)]
            .push_back(static_cast<int>(i));
    std::vector<Jet> jets;
    jets.reserve(groups.size());
    for (auto& g : groups) jets.push_back(make_jet(event, std::move(g)));
    return jets;
}

}  // namespace bifurjet
