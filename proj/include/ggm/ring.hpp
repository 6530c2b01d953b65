#pragma once

// Z-graded quotient rings A = k[x_1..x_n]/J with a weight vector.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ggm/linalg.hpp"
#include "ggm/poly.hpp"

namespace ggm {

/// Homogeneous generators f_1..f_p of the ideal A_{>0}A (or A_{<0}A when
/// sign = -1), their degrees |deg f_j| and d = lcm of the degrees.
struct PositiveGenerators {
    std::vector<Poly> gens;
    std::vector<int> degrees;
    int d = 1;
    int sign = 1;
};

class WeightedRing {
public:
    static constexpr int kDefaultBound = 30;

    WeightedRing(std::vector<std::string> vars, std::vector<int> weights, const std::vector<Poly>& relations,
                 const Field& k, int bound = kDefaultBound);

    /// Parses relation strings and builds the ring.
    static std::shared_ptr<const WeightedRing> build(const std::vector<std::string>& vars,
                                                     const std::vector<int>& weights,
                                                     const std::vector<std::string>& relations, const Field& k,
                                                     int bound = kDefaultBound);

    const std::vector<std::string>& vars() const { return vars_; }
    const std::vector<int>& weights() const { return weights_; }
    std::size_t nvars() const { return vars_.size(); }
    const Field& field() const { return field_; }
    const std::vector<Poly>& groebner() const { return gb_; }
    const std::vector<Poly>& relations() const { return relations_; }
    int bound() const { return bound_; }

    /// Validated weight window; nullopt when every weight is exactly enumerable.
    const std::optional<std::pair<int, int>>& window() const { return window_; }
    bool in_window(int i) const;
    void require_window(int i) const;

    Poly parse(const std::string& text) const { return parse_poly(text, vars_, field_); }
    Poly one() const { return Poly::constant(nvars(), field_, 1); }
    Poly var(std::size_t k) const { return Poly::variable(nvars(), k, field_); }

    /// Weight of a nonzero homogeneous polynomial; throws HomogeneityError otherwise.
    int weight_of(const Poly& f) const;
    bool is_standard(const Monomial& m) const;

    /// Standard monomials of weight i ordered by total degree, then
    /// lexicographically descending.
    const std::vector<Monomial>& weight_basis(int i) const;
    std::size_t dim(int i) const { return weight_basis(i).size(); }

    Poly normal_form(const Poly& p) const;
    /// Coordinates of a weight-i polynomial in weight_basis(i) (normalizes first).
    SparseVec coords(const Poly& p, int i) const;
    Poly from_coords(int i, const SparseVec& v) const;
    /// Multiplication by f as a map A_i -> A_{i + deg f}.
    Matrix mult_map(const Poly& f, int i) const;

    PositiveGenerators positive_generators(int sign = 1) const;
    /// Same presentation with negated weights (I^- becomes I^+).
    std::shared_ptr<const WeightedRing> flipped() const;

    bool ideal_contains(const std::vector<Poly>& gens, const Poly& f) const;

    std::string describe() const;

private:
    struct Piece {
        std::vector<Monomial> basis;
        std::map<Monomial, std::uint32_t> index;
    };
    struct Cache {
        std::mutex mu;
        std::map<int, std::shared_ptr<const Piece>> pieces;
        std::map<Monomial, Poly> monomial_nf;
    };

    const Piece& piece(int i) const;
    std::vector<Monomial> enumerate_exact(int i) const;
    void validate_local_finiteness();
    Poly monomial_normal_form(const Monomial& m) const;

    std::vector<std::string> vars_;
    std::vector<int> weights_;
    Field field_;
    std::vector<Poly> relations_;
    std::vector<Poly> gb_;
    int bound_;
    bool exact_ = false;  // all weights share a strict sign
    std::optional<std::pair<int, int>> window_;
    std::map<int, std::vector<Monomial>> bounded_;  // mixed-sign enumeration up to the bound
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

using RingPtr = std::shared_ptr<const WeightedRing>;

/// Tests A_N = A_d * A_{N-d} by comparing ranks.
bool check_AN_Ad(const WeightedRing& ring, int N);

/// A^{(m)} with (A^{(m)})_i = A_{mi}; delegates everything to the base ring.
class VeroneseView {
public:
    VeroneseView(RingPtr base, int m);
    const WeightedRing& base() const { return *base_; }
    int multiplier() const { return m_; }
    const std::vector<Monomial>& weight_basis(int i) const { return base_->weight_basis(m_ * i); }
    std::size_t dim(int i) const { return base_->dim(m_ * i); }
    /// f must have base weight divisible by m.
    Matrix mult_map(const Poly& f, int i) const;

private:
    RingPtr base_;
    int m_;
};

}  // namespace ggm
