#include <doctest.h>

#include <random>

#include "ggm/complex.hpp"
#include "ggm/error.hpp"
#include "ggm/localcohom.hpp"

using namespace ggm;

namespace {

const Field Q = Field::rationals();

std::vector<std::size_t> h_dims(const SliceComplex& c)
{
    std::vector<std::size_t> out;
    for (const auto& h : cohomology_dims(c))
        out.push_back(h.dim);
    return out;
}

SliceComplex koszul_xy(int weight)
{
    auto r = WeightedRing::build({"x", "y"}, {1, 1}, {}, Q);
    auto a = GradedModule::free(r);
    return KoszulStage(a, {r->parse("x"), r->parse("y")}, 1).slice(weight);
}

}  // namespace

TEST_CASE("build_slice examples")
{
    auto zero = build_slice(0, 0, {0}, {}, Q);
    CHECK(h_dims(zero) == std::vector<std::size_t>{0});

    auto id = build_slice(0, 0, {1, 1}, {Matrix::identity(1, Q)}, Q);
    CHECK(h_dims(id) == std::vector<std::size_t>{0, 0});

    auto k = koszul_xy(-2);
    CHECK(k.dims() == std::vector<std::size_t>{0, 0, 1});
    CHECK(h_dims(k) == std::vector<std::size_t>{0, 0, 1});

    Matrix one = Matrix::identity(1, Q);
    try {
        build_slice(0, 3, {1, 1, 1}, {one, one}, Q);
        FAIL("expected ComplexError");
    } catch (const ComplexError& e) {
        CHECK(e.degree() == 3);
    }
    CHECK_THROWS_AS(build_slice(0, 0, {2, 1}, {one}, Q), DimensionError);
}

TEST_CASE("cohomology_dims examples")
{
    auto k0 = koszul_xy(0);
    CHECK(k0.dims() == std::vector<std::size_t>{1, 4, 3});
    CHECK(h_dims(k0) == std::vector<std::size_t>{0, 0, 0});
    CHECK(h_dims(koszul_xy(-1)) == std::vector<std::size_t>{0, 0, 0});
    CHECK(h_dims(koszul_xy(3)) == std::vector<std::size_t>{0, 0, 0});
}

TEST_CASE("mapping_cone examples")
{
    auto c = koszul_xy(1);
    std::vector<Matrix> ids;
    for (int j = 0; j <= 2; ++j)
        ids.push_back(Matrix::identity(c.dim(j), Q));
    SliceMap id(c, c, ids, 0);
    auto cone = mapping_cone(id);
    for (const auto& h : cohomology_dims(cone))
        CHECK(h.dim == 0);
    CHECK(cone_long_exact(id));

    auto d = koszul_xy(-2);
    auto src = build_slice(0, 0, {1, 2}, {Matrix::from_rows({{1}, {0}}, Q)}, Q);
    SliceMap zero(src, d, {}, 0);
    auto cz = mapping_cone(zero);
    for (int j = cz.lo() - 1; j <= cz.hi() + 1; ++j) {
        CHECK(cz.dim(j) == src.dim(j + 1) + d.dim(j));
        CHECK(cohomology_dim(cz, j) == cohomology_dim(src, j + 1) + cohomology_dim(d, j));
    }
    CHECK(cone_long_exact(zero));
}

TEST_CASE("cone of the Koszul transition for (x) on Q[x]")
{
    auto r = WeightedRing::build({"x"}, {1}, {}, Q);
    auto a = GradedModule::free(r);
    std::vector<Poly> gens{r->parse("x")};
    KoszulStage k1(a, gens, 1), k2(a, gens, 2);
    // H^1(K_m)_i = A_{i+m}/x^m A_i; the transition K_1 -> K_2 is multiplication by x in degree 1
    std::vector<std::size_t> expected_cone_h1{1, 0, 0, 0};
    for (int i = -2; i <= 1; ++i) {
        auto s1 = k1.slice(i);
        auto s2 = k2.slice(i);
        SliceMap t(s1, s2, k1.transition_all(2, i), 0);
        CHECK(cone_long_exact(t));
        auto cone = mapping_cone(t);
        CHECK(cohomology_dim(cone, 1) == expected_cone_h1[static_cast<std::size_t>(i + 2)]);
        CHECK(cohomology_dim(cone, 0) == 0);
    }
}

TEST_CASE("dual_slice examples")
{
    auto c = build_slice(0, 0, {1, 2}, {Matrix::from_rows({{1}, {0}}, Q)}, Q);
    auto dc = dual_slice(c);
    CHECK(dc.lo() == -1);
    CHECK(dc.dim(-1) == 2);
    CHECK(dc.dim(0) == 1);
    CHECK(cohomology_dim(dc, -1) == cohomology_dim(c, 1));
    CHECK(cohomology_dim(dc, 0) == cohomology_dim(c, 0));
    auto ddc = dual_slice(dc);
    CHECK(ddc.dims() == c.dims());
    CHECK(ddc.lo() == c.lo());

    // Čech slice of A on P^1 at weight -3 dualizes to H^0(O(1)) in degree -1
    auto r = WeightedRing::build({"x", "y"}, {1, 1}, {}, Q);
    auto a = GradedModule::free(r);
    auto cech = truncated_cech_slice(a, {r->parse("x"), r->parse("y")}, -3, 6, false);
    CHECK(cohomology_dim(cech, 1) == 2);
    auto dual = dual_slice(cech);
    CHECK(cohomology_dim(dual, -1) == 2);
    CHECK(cohomology_dim(dual, 0) == 0);
}

TEST_CASE("random complexes: Euler characteristic, cone exactness, dual involution")
{
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> coeff(-2, 2);
    const Field f7 = Field::prime(7);
    for (int trial = 0; trial < 40; ++trial) {
        const Field& k = trial % 2 ? Q : f7;
        // C: k^a -> k^b -> k^c built as d1 * d0 = 0 by factoring through a kernel
        std::size_t a = 1 + trial % 3, b = 2 + trial % 4, c = 1 + trial % 2;
        Matrix d1(c, b, k);
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = 0; j < b; ++j)
                d1.set(i, j, Scalar(k, coeff(rng)));
        auto ker = rank_kernel(d1).kernel;
        Matrix d0(b, a, k);
        for (std::size_t j = 0; j < a && !ker.empty(); ++j) {
            SparseVec col;
            for (const auto& v : ker)
                col.axpy(Scalar(k, coeff(rng)), v);
            d0.set_column(j, col);
        }
        auto cx = build_slice(0, -1, {a, b, c}, {d0, d1}, k);
        long chi_terms = static_cast<long>(a) - static_cast<long>(b) + static_cast<long>(c);
        long chi_h = 0;
        for (const auto& h : cohomology_dims(cx))
            chi_h += (h.degree % 2 == 0 ? 1 : -1) * static_cast<long>(h.dim);
        CHECK(chi_terms == -chi_h);

        auto dd = dual_slice(dual_slice(cx));
        CHECK(dd.dims() == cx.dims());
        for (int j = -1; j <= 1; ++j)
            CHECK(cohomology_dim(dual_slice(cx), -j) == cohomology_dim(cx, j));

        // scalar multiple of the identity is a chain map
        std::vector<Matrix> maps;
        for (int j = -1; j <= 1; ++j) {
            Matrix m(cx.dim(j), cx.dim(j), k);
            for (std::size_t t = 0; t < cx.dim(j); ++t)
                m.set(t, t, Scalar(k, trial % 3));
            maps.push_back(m);
        }
        SliceMap f(cx, cx, maps, -1);
        CHECK(cone_long_exact(f));
    }
}
