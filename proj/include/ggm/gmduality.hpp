#pragma once

// Weightwise shadows of Greenlees–May duality: derived completion towers,
// completeness checks, vanishing of RΓ on localizations, and the
// Grothendieck duality identity for the structure sheaf.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ggm/localcohom.hpp"

namespace ggm {

/// Finite model of M_f: V_k = (M/Γ_f M)_{k + T deg f}, i.e. fractions x/f^T.
class LocalizedModel : public GradedSpace {
public:
    LocalizedModel(SpacePtr base, Poly f, int denominators, int budget = 16, int span = 3);

    std::size_t dim(int k) const override { return quotient_.dim(k + shift_); }
    Matrix mult(const Poly& g, int k) const override { return quotient_.mult(g, k + shift_); }
    std::string name() const override;

    const Poly& element() const { return quotient_.element(); }
    int denominators() const { return denominators_; }

private:
    TorsionQuotient quotient_;
    int denominators_;
    int shift_;
};

enum class Completeness { Complete, NotComplete, Inconclusive };
std::string to_string(Completeness c);

/// Weight-i tower ... -> V_{i-2m} -> V_{i-m} -> V_i with transitions f.
struct TowerReport {
    std::optional<std::size_t> lim;
    std::optional<std::size_t> lim1;
    int depth = 0;
    bool adaptive = false;              // f acts invertibly on a localized model
    std::vector<std::size_t> stable_images;  // stable image dims at V_i, V_{i-m}, ...
    std::string note;
};

TowerReport tower_limits(const GradedSpace& v, const Poly& f, int i, int depth = 16, int span = 3);

struct CompletenessReport {
    Completeness verdict = Completeness::Inconclusive;
    std::optional<int> witness_weight;
    std::string witness_element;
    std::string note;
};

CompletenessReport derived_complete_check(const GradedSpace& v, const std::vector<Poly>& gens, int i_min, int i_max,
                                          int depth = 16, int span = 3);

struct CompletionRow {
    int weight = 0;
    std::optional<std::size_t> dim;   // stabilized dim (M/I^n M)_i
    std::size_t module_dim = 0;
    std::vector<std::size_t> chain;   // dim (M/I^n M)_i for n = 1, 2, ...
};

struct CompletionReport {
    std::vector<CompletionRow> rows;
    Completeness adic = Completeness::Inconclusive;
    Completeness derived = Completeness::Inconclusive;
    bool consistent = true;  // adically complete implies derived complete
};

CompletionReport graded_completion(const GradedSpace& v, const std::vector<Poly>& gens, int i_min, int i_max,
                                   int n_max = 16, int span = 3);

struct GammaVanishingReport {
    bool hypothesis = false;  // f lies in the ideal generated by gens
    bool vanishes = false;
    int denominators = 0;
    CohomologyTable table;
    std::vector<std::pair<int, int>> nonzero;       // (j, i)
    std::vector<std::pair<int, int>> inconclusive;  // (j, i)
    std::string note;
};

/// RΓ_I(A_f) on the window via the truncated Čech backend applied to the model of A_f.
GammaVanishingReport gamma_vanishing_on_localization(const RingPtr& ring, const Poly& f, const std::vector<Poly>& gens,
                                                     int i_min, int i_max, const EngineOptions& opt = {});

struct DualityCell {
    int j = 0;
    int i = 0;
    std::optional<std::size_t> sheaf;  // dim H^j(O(i)) from the Koszul Čech table
    std::optional<std::size_t> dual;   // dim H^{j-n} of the dual Čech slice at weight a - i
    bool pass = false;
    std::string note;
};

struct DualityReport {
    int n = 0;
    std::optional<int> twist;         // detected dualizing twist a
    std::vector<int> matching_twists;
    std::vector<DualityCell> cells;
    std::string note;
    bool pass() const;
};

DualityReport ggm_duality_check(const RingPtr& ring, int i_min, int i_max, const EngineOptions& opt = {});

}  // namespace ggm
