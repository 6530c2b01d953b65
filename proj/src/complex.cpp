#include "ggm/complex.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "ggm/error.hpp"

namespace ggm {

std::size_t SliceComplex::dim(int j) const
{
    if (j < lo_ || j > hi())
        return 0;
    return dims_[static_cast<std::size_t>(j - lo_)];
}

Matrix SliceComplex::d(int j) const
{
    if (j >= lo_ && j < hi())
        return diffs_[static_cast<std::size_t>(j - lo_)];
    return Matrix(dim(j + 1), dim(j), field_);
}

SliceComplex build_slice(int weight, int lo, std::vector<std::size_t> dims, std::vector<Matrix> diffs, const Field& k)
{
    if (dims.empty()) {
        dims.push_back(0);
        diffs.clear();
    }
    if (diffs.size() + 1 != dims.size())
        throw DimensionError(fmt::format("{} terms need {} differentials, got {}", dims.size(), dims.size() - 1,
                                         diffs.size()));
    for (std::size_t q = 0; q < diffs.size(); ++q) {
        if (diffs[q].cols() != dims[q] || diffs[q].rows() != dims[q + 1])
            throw DimensionError(fmt::format("differential in degree {} has shape {}x{}, expected {}x{}",
                                             lo + static_cast<int>(q), diffs[q].rows(), diffs[q].cols(), dims[q + 1],
                                             dims[q]));
    }
    for (std::size_t q = 0; q + 1 < diffs.size(); ++q) {
        if (!(diffs[q + 1] * diffs[q]).is_zero())
            throw ComplexError(fmt::format("d o d != 0 starting in degree {}", lo + static_cast<int>(q)),
                               lo + static_cast<int>(q));
    }
    SliceComplex c;
    c.weight_ = weight;
    c.lo_ = lo;
    c.field_ = k;
    c.dims_ = std::move(dims);
    c.diffs_ = std::move(diffs);
    return c;
}

std::size_t cohomology_dim(const SliceComplex& c, int j)
{
    const std::size_t n = c.dim(j);
    if (n == 0)
        return 0;
    return n - rank(c.d(j)) - rank(c.d(j - 1));
}

std::vector<CohomologyDim> cohomology_dims(const SliceComplex& c)
{
    std::vector<CohomologyDim> out;
    long euler_terms = 0, euler_h = 0;
    for (int j = c.lo(); j <= c.hi(); ++j) {
        std::size_t h = cohomology_dim(c, j);
        out.push_back({j, h});
        long sign = (j % 2 == 0) ? 1 : -1;
        euler_terms += sign * static_cast<long>(c.dim(j));
        euler_h += sign * static_cast<long>(h);
    }
    if (euler_terms != euler_h)
        throw std::logic_error("Euler characteristic mismatch");
    return out;
}

std::vector<SparseVec> cocycles(const SliceComplex& c, int j)
{
    if (c.dim(j) == 0)
        return {};
    return rank_kernel(c.d(j)).kernel;
}

EchelonBasis coboundaries(const SliceComplex& c, int j) { return column_space(c.d(j - 1)); }

std::size_t induced_rank(const SliceComplex& src, const SliceComplex& tgt, const Matrix& f, int j)
{
    EchelonBasis b = coboundaries(tgt, j);
    std::size_t r = 0;
    for (const auto& z : cocycles(src, j))
        if (b.insert(f.apply(z)))
            ++r;
    return r;
}

SliceMap::SliceMap(const SliceComplex& src, const SliceComplex& tgt, std::vector<Matrix> maps, int lo)
    : src_(&src), tgt_(&tgt), maps_(std::move(maps)), lo_(lo)
{
    for (int j = std::min(src.lo(), tgt.lo()) - 1; j <= std::max(src.hi(), tgt.hi()); ++j) {
        Matrix fj = at(j), fj1 = at(j + 1);
        if (fj.rows() != tgt.dim(j) || fj.cols() != src.dim(j))
            throw DimensionError(fmt::format("chain map component in degree {} has the wrong shape", j));
        if (!(tgt.d(j) * fj == fj1 * src.d(j)))
            throw ComplexError(fmt::format("chain map does not commute with the differentials in degree {}", j), j);
    }
}

Matrix SliceMap::at(int j) const
{
    if (j >= lo_ && j < lo_ + static_cast<int>(maps_.size()))
        return maps_[static_cast<std::size_t>(j - lo_)];
    return Matrix(tgt_->dim(j), src_->dim(j), src_->field());
}

SliceComplex mapping_cone(const SliceMap& f)
{
    const auto& s = f.source();
    const auto& t = f.target();
    const int lo = std::min(s.lo() - 1, t.lo());
    const int hi = std::max(s.hi() - 1, t.hi());
    const Field k = s.field();
    std::vector<std::size_t> dims;
    std::vector<Matrix> diffs;
    for (int j = lo; j <= hi; ++j)
        dims.push_back(s.dim(j + 1) + t.dim(j));
    for (int j = lo; j < hi; ++j) {
        const std::size_t a = s.dim(j + 1), b = t.dim(j);
        const std::size_t a2 = s.dim(j + 2), b2 = t.dim(j + 1);
        Matrix ds = s.d(j + 1), dt = t.d(j), fj = f.at(j + 1);
        std::vector<SparseVec> cols;
        for (std::size_t c = 0; c < a; ++c) {
            SparseVec v;
            for (const auto& e : ds.column(c).entries())
                v.push_back(e.index, -e.value);
            for (const auto& e : fj.column(c).entries())
                v.push_back(a2 + e.index, e.value);
            cols.push_back(std::move(v));
        }
        for (std::size_t c = 0; c < b; ++c) {
            SparseVec v;
            for (const auto& e : dt.column(c).entries())
                v.push_back(a2 + e.index, e.value);
            cols.push_back(std::move(v));
        }
        diffs.push_back(Matrix::from_columns(a2 + b2, std::move(cols), k));
    }
    return build_slice(s.weight(), lo, std::move(dims), std::move(diffs), k);
}

bool cone_long_exact(const SliceMap& f)
{
    SliceComplex cone = mapping_cone(f);
    const auto& s = f.source();
    const auto& t = f.target();
    for (int j = cone.lo() - 1; j <= cone.hi() + 1; ++j) {
        std::size_t rj = induced_rank(s, t, f.at(j), j);
        std::size_t rj1 = induced_rank(s, t, f.at(j + 1), j + 1);
        std::size_t coker = cohomology_dim(t, j) - rj;
        std::size_t ker = cohomology_dim(s, j + 1) - rj1;
        if (cohomology_dim(cone, j) != coker + ker)
            return false;
    }
    return true;
}

SliceComplex dual_slice(const SliceComplex& c)
{
    const int lo = -c.hi();
    std::vector<std::size_t> dims;
    std::vector<Matrix> diffs;
    for (int j = lo; j <= -c.lo(); ++j)
        dims.push_back(c.dim(-j));
    for (int j = lo; j < -c.lo(); ++j)
        diffs.push_back(c.d(-j - 1).transpose());
    return build_slice(-c.weight(), lo, std::move(dims), std::move(diffs), c.field());
}

}  // namespace ggm
