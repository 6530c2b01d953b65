#pragma once

// Proj+ shadows: Cartier certificates on the standard cover, sheaf cohomology
// of twists, the Serre-equivalence roundtrip and isomorphisms in the quotient
// by torsion.

#include <optional>
#include <string>
#include <vector>

#include "ggm/localcohom.hpp"

namespace ggm {

/// Unit u = numerator / f^k of weight d on D(f), with inverse witness
/// v = inverse / f^k' and u v = 1 in A_f.
struct PatchUnit {
    std::string patch;
    bool found = false;
    std::string numerator;
    int k = 0;
    std::string inverse;
    int k_inverse = 0;
    int bound = 0;
};

struct CartierCertificate {
    int d = 0;
    int bound = 0;
    bool certified = false;
    std::vector<PatchUnit> patches;
    std::string verdict() const;  // "Certified" or "NotCertifiedUpTo(<bound>)"
};

/// Searches every patch D(f), f a positive generator, for an invertible
/// element of (A_f)_d. Throws DegenerateGradingError when there is no cover.
CartierCertificate cartier_certificate(const RingPtr& ring, int d, int search_bound = 4,
                                       const EngineOptions& opt = {});

/// H^j(X+, M~(i)) for i in the window, via the Čech complex on I+.
CohomologyTable sheaf_cohomology_table(const SpacePtr& module, int i_min, int i_max, const EngineOptions& opt = {});

struct RoundtripRow {
    int weight = 0;
    bool idempotent = false;       // N'' = N' with the unit an isomorphism
    Verdict kernel = Verdict::Inconclusive;
    Verdict cokernel = Verdict::Inconclusive;
    std::optional<bool> cartier;   // N_i = N'_i realized, on weights in dZ
    std::size_t sat_dim = 0;
    std::string note;
    bool pass() const;
};

struct RoundtripReport {
    int d = 0;
    std::vector<RoundtripRow> rows;
    std::string note;
    bool pass() const;
};

RoundtripReport serre_roundtrip_check(const SpacePtr& module, int i_min, int i_max, const EngineOptions& opt = {},
                                      int search_bound = 4);

struct QuotientIsoReport {
    Verdict kernel = Verdict::Torsion;
    Verdict cokernel = Verdict::Torsion;
    std::optional<int> witness_weight;
    std::string note;
    /// ker and coker are torsion on the whole window.
    bool iso() const { return kernel == Verdict::Torsion && cokernel == Verdict::Torsion; }
    bool inconclusive() const;
};

QuotientIsoReport quotient_iso_check(const MapPtr& phi, int i_min, int i_max, const TorsionOptions& opt = {});

}  // namespace ggm
