#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifurjet/event.hpp"

namespace bifurjet {

// d_ij = 2 min(E_i^2, E_j^2) (1 - cos theta_ij) between two pseudojets.
// A merged pseudojet can end up with zero momentum (exactly back-to-back
// inputs); the angle is then taken as 90 degrees so the distance stays finite.
inline double durham_distance(const FourVector& a, const FourVector& b) {
    const double pa = a.p(), pb = b.p();
    double cos_ij = 0.0;
    if (pa > 0.0 && pb > 0.0)
        cos_ij = std::clamp(a.p3().dot(b.p3()) / (pa * pb), -1.0, 1.0);
    const double emin2 = std::min(a.e * a.e, b.e * b.e);
    return 2.0 * emin2 * (1.0 - cos_ij);
}

// Exclusive Durham (ee-kt) clustering: repeatedly merge the pair with the
// smallest d_ij (E-scheme four-vector sum) until n_jet pseudojets remain.
// Ties break to the lowest (i, j) pair in the current list, which makes the
// result deterministic.
//
// Distances to unchanged pseudojets are cached between iterations; only the
// merged pseudojet's row is recomputed.
inline std::vector<Jet> durham_exclusive(const Event& event, int n_jet) {
    const std::size_t n = event.particles.size();
    if (n_jet < 1) throw std::invalid_argument("durham_exclusive: n_jet must be >= 1");
    if (n < static_cast<std::size_t>(n_jet))
        throw std::invalid_argument("durham_exclusive: event has " + std::to_string(n) +
                                    " particles, need at least " + std::to_string(n_jet));

    struct PseudoJet {
        FourVector p4;
        std::vector<int> constituents;
    };
    std::vector<PseudoJet> pj;
    pj.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        pj.push_back({event.particles[i].p4, {static_cast<int>(i)}});

    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i][j] = durham_distance(pj[i].p4, pj[j].p4);

    while (pj.size() > static_cast<std::size_t>(n_jet)) {
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < pj.size(); ++i)
            for (std::size_t j = i + 1; j < pj.size(); ++j)
                if (d[i][j] < best) {
                    best = d[i][j];
                    bi = i;
                    bj = j;
                }

        pj[bi].p4 += pj[bj].p4;
        pj[bi].constituents.insert(pj[bi].constituents.end(),
                                   pj[bj].constituents.begin(),
                                   pj[bj].constituents.end());
        pj.erase(pj.begin() + static_cast<std::ptrdiff_t>(bj));

        for (auto& row : d) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bj));
        d.erase(d.begin() + static_cast<std::ptrdiff_t>(bj));
        for (std::size_t k = 0; k < pj.size(); ++k) {
            if (k == bi) continue;
            const double v = durham_distance(pj[bi].p4, pj[k].p4);
            d[std::min(bi, k)][std::max(bi, k)] = v;
        }
    }

    std::vector<Jet> jets;
    jets.reserve(pj.size());
    for (auto& p : pj) {
        std::sort(p.constituents.begin(), p.constituents.end());
        Jet jet = make_jet(event, std::move(p.constituents));
        jets.push_back(std::move(jet));
    }
    return jets;
}

// sqrt(2 min(E_n^2, E_m^2) (1 - cos theta_nm)) in GeV.
inline double jet_separation(const Jet& jn, const Jet& jm) {
    if (jn.p4.p() == 0.0 || jm.p4.p() == 0.0)
        throw std::domain_error("jet_separation: zero-momentum jet");
    const double emin2 = std::min(jn.p4.e * jn.p4.e, jm.p4.e * jm.p4.e);
    return std::sqrt(2.0 * emin2 * (1.0 - cos_angle(jn.p4, jm.p4)));
}

struct Preselection {
    bool pass = true;
    std::vector<std::string> reasons;
};

// Acceptance |cos theta| < 0.9 for every jet, and the two lowest-pt jets must
// be separated by more than 20 GeV.
inline Preselection event_preselection(const std::vector<Jet>& jets) {
    if (jets.size() < 2)
        throw std::invalid_argument("event_preselection: need at least 2 jets");
    Preselection sel;
    for (std::size_t i = 0; i < jets.size(); ++i) {
        const double c = jets[i].p4.p() == 0.0 ? 1.0 : jets[i].p4.cos_theta();
        if (!(std::abs(c) < 0.9)) {
            sel.pass = false;
            sel.reasons.push_back("jet " + std::to_string(i) + " outside acceptance |cos theta| < 0.9");
        }
    }
    std::vector<std::size_t> order(jets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (jets[a].p4.pt() != jets[b].p4.pt()) return jets[a].p4.pt() < jets[b].p4.pt();
        return a < b;
    });
    const double sep = jet_separation(jets[order[0]], jets[order[1]]);
    if (!(sep > 20.0)) {
        sel.pass = false;
        sel.reasons.push_back("two lowest-pt jets separated by " + std::to_string(sep) +
                              " GeV, require > 20");
    }
    return sel;
}

}  // namespace bifurjet
