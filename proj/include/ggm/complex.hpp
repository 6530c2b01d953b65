#pragma once

// Cochain complexes of finite-dimensional vector spaces at a single weight.

#include <cstddef>
#include <vector>

#include "ggm/linalg.hpp"

namespace ggm {

/// Terms C^lo .. C^{lo+n-1}; diffs[k] : C^{lo+k} -> C^{lo+k+1}.
class SliceComplex {
public:
    SliceComplex() = default;

    int weight() const { return weight_; }
    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(dims_.size()) - 1; }
    const Field& field() const { return field_; }
    std::size_t dim(int j) const;
    /// d^j : C^j -> C^{j+1}; a correctly shaped zero matrix outside the stored range.
    Matrix d(int j) const;
    const std::vector<std::size_t>& dims() const { return dims_; }

private:
    friend SliceComplex build_slice(int, int, std::vector<std::size_t>, std::vector<Matrix>, const Field&);
    int weight_ = 0;
    int lo_ = 0;
    Field field_;
    std::vector<std::size_t> dims_;
    std::vector<Matrix> diffs_;
};

/// Validates shapes and d o d = 0 (ComplexError names the first failing degree).
SliceComplex build_slice(int weight, int lo, std::vector<std::size_t> dims, std::vector<Matrix> diffs,
                         const Field& k);

struct CohomologyDim {
    int degree;
    std::size_t dim;
};

std::vector<CohomologyDim> cohomology_dims(const SliceComplex& c);
std::size_t cohomology_dim(const SliceComplex& c, int j);

/// Basis of the cocycles Z^j and an echelon basis of the coboundaries B^j.
std::vector<SparseVec> cocycles(const SliceComplex& c, int j);
EchelonBasis coboundaries(const SliceComplex& c, int j);

/// Rank of the map H^j(src) -> H^j(tgt) induced by f : src^j -> tgt^j.
std::size_t induced_rank(const SliceComplex& src, const SliceComplex& tgt, const Matrix& f, int j);

/// Chain map given by one matrix per degree of the source range; commutation
/// with the differentials is verified at construction.
class SliceMap {
public:
    SliceMap(const SliceComplex& src, const SliceComplex& tgt, std::vector<Matrix> maps, int lo);
    const SliceComplex& source() const { return *src_; }
    const SliceComplex& target() const { return *tgt_; }
    /// f^j : src^j -> tgt^j (zero outside the stored range).
    Matrix at(int j) const;

private:
    const SliceComplex* src_;
    const SliceComplex* tgt_;
    std::vector<Matrix> maps_;
    int lo_;
};

/// cone^j = src^{j+1} (+) tgt^j with d = [[-d_src, 0], [f, d_tgt]].
SliceComplex mapping_cone(const SliceMap& f);

/// Checks dim H^j(cone) = dim coker(H^j f) + dim ker(H^{j+1} f) for every j.
bool cone_long_exact(const SliceMap& f);

/// k-linear dual: D^j = (C^{-j})^*, with transposed differentials.
SliceComplex dual_slice(const SliceComplex& c);

}  // namespace ggm
