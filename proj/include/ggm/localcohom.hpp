#pragma once

// Local cohomology RΓ_I(M) as a colimit of Koszul complexes on the diagonal
// system (m,...,m), the Čech complex Č_I(M), a truncated-Čech cross-check,
// saturation, the exact triangle RΓ -> M -> Č, and weight vanishing bounds.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ggm/complex.hpp"
#include "ggm/module.hpp"

namespace ggm {

struct EngineOptions {
    int budget = 16;  // largest Koszul stage / kernel-chain length tried
    int span = 3;     // confirmation span for stabilization
    int trunc = 6;    // denominator bound of the truncated localizations
    int jobs = 1;
};

/// Ordered subsets of {0..r-1} of a given size (lexicographic).
std::vector<std::vector<int>> subsets_of_size(int r, int q);

/// M / Γ_f(M), where Γ_f(M)_k = ker(f^N : M_k -> M_{k+N deg f}) for N past the
/// point where the kernel chain is stationary. Throws StabilizationError when
/// the chain does not settle within the budget.
class TorsionQuotient : public GradedSpace {
public:
    TorsionQuotient(SpacePtr base, Poly f, int budget = 16, int span = 3);

    std::size_t dim(int k) const override;
    Matrix mult(const Poly& g, int k) const override;
    std::string name() const override;

    const GradedSpace& base() const { return *base_; }
    const Poly& element() const { return f_; }
    /// Class of a base vector / a basis element lifted back to the base.
    SparseVec project(const SparseVec& v, int k) const;
    SparseVec lift(std::size_t idx, int k) const;
    std::size_t torsion_dim(int k) const;

private:
    struct Piece {
        EchelonBasis torsion;
        std::vector<std::uint32_t> basis;
        std::vector<std::int32_t> position;
    };
    const Piece& piece(int k) const;

    SpacePtr base_;
    Poly f_;
    int deg_;
    int budget_, span_;
    mutable std::mutex mu_;
    mutable std::map<int, std::shared_ptr<const Piece>> cache_;
};

/// Stage m of the Koszul complex K(M; f_1^m..f_r^m): degree q is
/// (+)_{|S|=q} M(m * sum_{s in S} deg f_s).
class KoszulStage {
public:
    KoszulStage(SpacePtr module, std::vector<Poly> gens, int m);

    int power() const { return m_; }
    int length() const { return static_cast<int>(gens_.size()); }
    /// Twists m * deg(f_S) of the summands in degree q, in subset order.
    std::vector<int> twists(int q) const;
    SliceComplex slice(int i) const;
    /// Component in degree q of the transition to stage m2 >= m at weight i.
    Matrix transition(int m2, int i, int q) const;
    /// All degrees of the transition, as a verified chain map.
    std::vector<Matrix> transition_all(int m2, int i) const;

private:
    SpacePtr module_;
    std::vector<Poly> gens_;
    std::vector<int> degs_;
    int m_;
};

struct Cell {
    std::optional<std::size_t> dim;  // empty when Inconclusive
    int stage = 0;                    // Koszul stage or truncation reached
    std::string note;
};

struct CohomologyTable {
    std::string backend;  // "koszul-colimit" or "cech-truncated"
    std::string complex;  // "RGamma" or "Cech"
    int i_min = 0, i_max = -1;
    int j_min = 0, j_max = -1;
    std::map<std::pair<int, int>, Cell> cells;  // (j, i)

    const Cell& at(int j, int i) const;
    std::optional<std::size_t> dim(int j, int i) const { return at(j, i).dim; }
    bool complete() const;
    std::size_t inconclusive() const;
};

/// RΓ_I(M) via the Koszul colimit. Cells are stable when the rank of
/// H^j(K_m) -> H^j(K_{m+span}) equals the rank to K_{m+span+1} and is constant
/// for `span` consecutive m.
CohomologyTable local_cohomology_table(const SpacePtr& module, const std::vector<Poly>& gens, int i_min, int i_max,
                                       const EngineOptions& opt = {});

/// Realized degree-zero data at weight i: the torsion Γ_I(M)_i inside M_i and
/// the map η : M_i -> H^0(Č)_i into a concrete model of H^0(Č)_i.
struct RealizedH0 {
    bool stable = false;
    std::string note;
    int stage = 0;
    std::vector<SparseVec> torsion;  // basis of Γ_I(M)_i in M_i
    std::size_t h0_dim = 0;          // dim of the model of H^0(Č)_i
    Matrix eta;                      // M_i -> model of H^0(Č)_i
    std::size_t delta_rank = 0;      // rank of H^0(Č)_i -> H^1(RΓ)_i
    bool delta_eta_zero = true;
};

RealizedH0 realize_h0(const SpacePtr& module, const std::vector<Poly>& gens, int i, const EngineOptions& opt = {},
                      bool corrupt = false);

struct CechResult {
    CohomologyTable table;
    std::map<int, RealizedH0> realized;  // by weight
};

/// Č_I(M): H^j(Č)_i = H^{j+1}(RΓ)_i for j >= 1; H^0 from the four-term
/// sequence 0 -> Γ_I(M)_i -> M_i -> H^0(Č)_i -> H^1(RΓ)_i -> 0.
CechResult cech_table(const SpacePtr& module, const std::vector<Poly>& gens, int i_min, int i_max,
                      const EngineOptions& opt = {}, const CohomologyTable* rgamma = nullptr);

/// Weight-i slice of the (extended when `extended`) Čech complex with each
/// M_{f_S} replaced by (M/Γ_{f_S})_{i + trunc*deg f_S}, i.e. by fractions with
/// denominator f_S^trunc.
SliceComplex truncated_cech_slice(const SpacePtr& module, const std::vector<Poly>& gens, int i, int trunc,
                                  bool extended, const EngineOptions& opt = {});

struct OracleResult {
    std::optional<std::size_t> dim;
    std::size_t dim_at_trunc = 0;
    std::size_t dim_at_next = 0;
    std::size_t transition_rank = 0;
    int trunc = 0;
    std::string note;
};

/// dim H^j of the truncated slice, declared stable when the inclusion of the
/// trunc model into the trunc+1 model is an isomorphism on H^j.
OracleResult cech_truncated_oracle(const SpacePtr& module, const std::vector<Poly>& gens, int j, int i, int trunc,
                                   bool extended, const EngineOptions& opt = {});

/// All degrees of the truncated oracle at weight i in one pass.
std::vector<OracleResult> cech_truncated_oracle_all(const SpacePtr& module, const std::vector<Poly>& gens, int i,
                                                    int trunc, bool extended, const EngineOptions& opt = {});

CohomologyTable cech_truncated_table(const SpacePtr& module, const std::vector<Poly>& gens, int i_min, int i_max,
                                     bool extended, const EngineOptions& opt = {});

/// N' = H^0(Č_I(M)) realized as the kernel of
/// (+)_s (M/Γ_{f_s})_{i+T d_s} -> (+)_{s<t} (M/Γ_{f_s f_t})_{i+T(d_s+d_t)}.
class SaturationModel : public GradedSpace {
public:
    SaturationModel(SpacePtr module, std::vector<Poly> gens, int trunc, int budget = 16, int span = 3);

    std::size_t dim(int i) const override;
    Matrix mult(const Poly& g, int i) const override;
    std::string name() const override { return "sat(" + module_->name() + ")"; }

    /// The unit M_i -> N'_i, x -> (f_s^T x / f_s^T)_s.
    Matrix unit(int i) const;
    const GradedSpace& module() const { return *module_; }
    int trunc() const { return trunc_; }
    const std::vector<Poly>& generators() const { return gens_; }
    const TorsionQuotient& component(std::size_t s) const { return *single_.at(s); }

    /// Basis element k of N'_i as a tuple (mu_s) in (+)_s (M/Γ_{f_s})_{i+T d_s}.
    SparseVec ambient_vector(int i, std::size_t k) const { return piece(i).basis.at(k); }
    std::size_t component_offset(int i, std::size_t s) const { return piece(i).offsets.at(s); }
    /// Coordinates of a tuple known to lie in N'_i.
    SparseVec coordinates(int i, const SparseVec& tuple) const { return coordinates(piece(i), tuple); }

private:
    struct Piece {
        std::vector<std::size_t> offsets;
        std::size_t ambient = 0;
        std::vector<SparseVec> basis;  // null-space normal form
    };
    const Piece& piece(int i) const;
    SparseVec coordinates(const Piece& p, const SparseVec& v) const;

    SpacePtr module_;
    std::vector<Poly> gens_;
    std::vector<int> degs_;
    int trunc_;
    std::vector<std::shared_ptr<const TorsionQuotient>> single_;
    std::map<std::pair<int, int>, std::shared_ptr<const TorsionQuotient>> pair_;
    mutable std::mutex mu_;
    mutable std::map<int, std::shared_ptr<const Piece>> cache_;
};

/// The unit M -> N' as a SpaceMap.
class SaturationUnit : public SpaceMap {
public:
    explicit SaturationUnit(std::shared_ptr<const SaturationModel> sat) : sat_(std::move(sat)) {}
    const GradedSpace& source() const override { return sat_->module(); }
    const GradedSpace& target() const override { return *sat_; }
    Matrix at(int i) const override { return sat_->unit(i); }

private:
    std::shared_ptr<const SaturationModel> sat_;
};

struct SaturationRow {
    int weight = 0;
    std::optional<std::size_t> sat_dim;
    std::size_t module_dim = 0;
    std::size_t kernel_dim = 0;
    std::size_t cokernel_dim = 0;
    Matrix unit;
    bool agrees_with_cech = false;  // dim N'_i equals H^0(Č)_i from the four-term sequence
    std::string note;
};

struct SaturationReport {
    std::vector<SaturationRow> rows;
    bool complete() const;
};

SaturationReport saturate(const SpacePtr& module, const std::vector<Poly>& gens, int i_min, int i_max,
                          const EngineOptions& opt = {});

struct TriangleRow {
    int weight = 0;
    bool pass = false;
    bool inconclusive = false;
    std::string detail;
};

struct TriangleReport {
    std::vector<TriangleRow> rows;
    bool pass() const;
    std::optional<int> first_failure() const;
};

/// Exactness of ... -> H^j(RΓ)_i -> H^j(M)_i -> H^j(Č)_i -> H^{j+1}(RΓ)_i -> ...
/// by rank bookkeeping on realized maps. `corrupt_weight` zeroes the
/// differential d^0 used to realize η at that weight (negative control).
TriangleReport triangle_check(const SpacePtr& module, const std::vector<Poly>& gens, int i_min, int i_max,
                              const EngineOptions& opt = {}, std::optional<int> corrupt_weight = std::nullopt);

struct VanishingBounds {
    std::optional<int> c_plus;   // RΓ_{I+}(M)_i = 0 for all window i > c_plus
    std::optional<int> c_minus;  // RΓ_{I-}(M)_i = 0 for all window i < c_minus
    std::string note_plus, note_minus;
};

VanishingBounds vanishing_bounds(const ModulePtr& module, int i_min, int i_max, const EngineOptions& opt = {});

}  // namespace ggm
