#pragma once

// Graded modules: the abstract per-weight interface shared by presented
// modules and the finite models of localizations, plus presented modules,
// maps between them, and torsion tests.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ggm/linalg.hpp"
#include "ggm/ring.hpp"

namespace ggm {

/// A graded A-module known weight by weight: finite-dimensional pieces V_i
/// with fixed bases and the action of homogeneous ring elements.
class GradedSpace {
public:
    explicit GradedSpace(RingPtr ring) : ring_(std::move(ring)) {}
    virtual ~GradedSpace() = default;

    const WeightedRing& ring() const { return *ring_; }
    const RingPtr& ring_ptr() const { return ring_; }
    const Field& field() const { return ring_->field(); }

    virtual std::size_t dim(int i) const = 0;
    /// Multiplication by a homogeneous f as a matrix V_i -> V_{i + deg f}.
    virtual Matrix mult(const Poly& f, int i) const = 0;
    virtual std::string name() const = 0;

private:
    RingPtr ring_;
};

using SpacePtr = std::shared_ptr<const GradedSpace>;

/// Weight-i piece of a presented module F/R with F = sum_t A(-a_t). Basis
/// elements are the coordinates of F_i that are not pivots of R_i.
struct WeightPiece {
    int weight = 0;
    std::size_t dim = 0;
    std::size_t free_dim = 0;
    std::vector<std::size_t> offsets;   // start of generator t's block in F_i
    std::vector<std::uint32_t> basis;   // F_i coordinate of each basis element
    std::vector<std::int32_t> position; // F_i coordinate -> basis index, -1 on pivots
    EchelonBasis relations;
};

class GradedModule : public GradedSpace {
public:
    using Column = std::vector<Poly>;  // one entry per generator

    GradedModule(RingPtr ring, std::vector<int> twists, std::vector<Column> relations, std::string name = "M");

    static std::shared_ptr<const GradedModule> build(RingPtr ring, std::vector<int> twists,
                                                     std::vector<Column> relations, std::string name = "M");
    /// Relation entries given as strings in the ring's syntax.
    static std::shared_ptr<const GradedModule> parse(RingPtr ring, std::vector<int> twists,
                                                     const std::vector<std::vector<std::string>>& relations,
                                                     std::string name = "M");
    static std::shared_ptr<const GradedModule> free(RingPtr ring, std::vector<int> twists = {0},
                                                    std::string name = "A");

    const std::vector<int>& twists() const { return twists_; }
    const std::vector<Column>& relations() const { return relations_; }
    std::size_t generators() const { return twists_.size(); }

    const WeightPiece& weight_piece(int i) const;
    std::size_t dim(int i) const override { return weight_piece(i).dim; }
    Matrix mult(const Poly& f, int i) const override;
    std::string name() const override { return name_; }

    /// Weight of a module element (one polynomial per generator); throws
    /// MembershipError for malformed or inhomogeneous elements.
    int element_weight(const Column& x) const;
    /// Coordinates of an element in F_i and in M_i.
    SparseVec free_coords(const Column& x, int i) const;
    SparseVec coords(const Column& x, int i) const;
    SparseVec project(const SparseVec& free_vec, int i) const;
    /// Human-readable label of basis element k of M_i, e.g. "x*y e1".
    std::string basis_label(int i, std::size_t k) const;

    /// M(n): twists shifted so that M(n)_i = M_{i+n} with identical bases.
    std::shared_ptr<const GradedModule> twist(int n) const;

private:
    std::vector<int> twists_;
    std::vector<Column> relations_;
    std::vector<int> column_degree_;
    std::string name_;

    struct Cache {
        std::mutex mu;
        std::map<int, std::shared_ptr<const WeightPiece>> pieces;
        std::map<std::pair<std::string, int>, std::shared_ptr<const Matrix>> mults;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

using ModulePtr = std::shared_ptr<const GradedModule>;

/// Degree-zero map between graded spaces, known weight by weight.
class SpaceMap {
public:
    virtual ~SpaceMap() = default;
    virtual const GradedSpace& source() const = 0;
    virtual const GradedSpace& target() const = 0;
    virtual Matrix at(int i) const = 0;
};

using MapPtr = std::shared_ptr<const SpaceMap>;

/// Homomorphism of presented modules sending generator e_t of the source to
/// sum_u images[t][u] e'_u. Well-definedness is verified at each requested weight.
class ModuleMap : public SpaceMap {
public:
    ModuleMap(ModulePtr source, ModulePtr target, std::vector<GradedModule::Column> images);
    static std::shared_ptr<const ModuleMap> identity(ModulePtr m);

    const GradedSpace& source() const override { return *src_; }
    const GradedSpace& target() const override { return *tgt_; }
    Matrix at(int i) const override;

private:
    ModulePtr src_, tgt_;
    std::vector<GradedModule::Column> images_;
};

/// V_i = ker(phi_i). Coordinates of a kernel vector are its entries at the
/// free columns of the null-space normal form.
class KernelSpace : public GradedSpace {
public:
    explicit KernelSpace(MapPtr phi);
    std::size_t dim(int i) const override;
    Matrix mult(const Poly& f, int i) const override;
    std::string name() const override { return "ker(" + phi_->source().name() + ")"; }
    /// Basis of ker(phi_i) as vectors of the source piece.
    const std::vector<SparseVec>& basis(int i) const;

private:
    MapPtr phi_;
    mutable std::mutex mu_;
    mutable std::map<int, std::shared_ptr<const std::vector<SparseVec>>> cache_;
};

/// V_i = target_i / im(phi_i), basis = non-pivot coordinates of the image.
class CokernelSpace : public GradedSpace {
public:
    explicit CokernelSpace(MapPtr phi);
    std::size_t dim(int i) const override;
    Matrix mult(const Poly& f, int i) const override;
    std::string name() const override { return "coker(" + phi_->target().name() + ")"; }
    /// Class of a target vector.
    SparseVec project(const SparseVec& v, int i) const;
    /// Basis element k of the cokernel as a target vector.
    SparseVec lift(std::size_t k, int i) const;

private:
    struct Piece {
        EchelonBasis image;
        std::vector<std::uint32_t> basis;
        std::vector<std::int32_t> position;
    };
    const Piece& piece(int i) const;

    MapPtr phi_;
    mutable std::mutex mu_;
    mutable std::map<int, std::shared_ptr<const Piece>> cache_;
};

// ---------------------------------------------------------------- torsion

enum class Verdict { Torsion, NotTorsion, Inconclusive };

std::string to_string(Verdict v);

struct TorsionVerdict {
    Verdict verdict = Verdict::Inconclusive;
    std::string witness;  // generator (or product set) that fails to kill the element
    int steps = 0;        // power / exponent reached
    std::string note;
};

struct TorsionOptions {
    int budget = 12;  // largest power tried
    int span = 3;     // confirmation span for kernel-chain stationarity
};

/// Kernel-chain test: x in V_i is torsion iff every generator power f^s kills it.
TorsionVerdict torsion_test(const GradedSpace& v, int i, const SparseVec& x, const PositiveGenerators& gens,
                            const TorsionOptions& opt = {});
/// Alternative test: x * (A_d)^n = 0 for some n.
TorsionVerdict torsion_test_powers(const GradedSpace& v, int i, const SparseVec& x, int d,
                                   const TorsionOptions& opt = {});
/// Alternative test: x * A_t = 0 for all t >= s, checked on s..s+dmax-1.
TorsionVerdict torsion_test_tail(const GradedSpace& v, int i, const SparseVec& x, int dmax,
                                 const TorsionOptions& opt = {});

/// Tests every generator e_t of a presented module.
TorsionVerdict torsion_test_generators(const GradedModule& m, const PositiveGenerators& gens,
                                       const TorsionOptions& opt = {});
/// Tests a whole weight piece: every basis vector of V_i.
TorsionVerdict torsion_test_piece(const GradedSpace& v, int i, const PositiveGenerators& gens,
                                  const TorsionOptions& opt = {});

}  // namespace ggm
