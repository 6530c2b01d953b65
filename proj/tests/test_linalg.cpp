#include <doctest.h>

#include <random>

#include "ggm/error.hpp"
#include "ggm/linalg.hpp"

using namespace ggm;

namespace {

const Field Q = Field::rationals();

std::vector<Scalar> ints(const Field& k, std::initializer_list<std::int64_t> xs)
{
    std::vector<Scalar> out;
    for (auto x : xs)
        out.emplace_back(k, x);
    return out;
}

}  // namespace

TEST_CASE("rational arithmetic stays normalized")
{
    Rational a(6, -4);
    CHECK(a.to_string() == "-3/2");
    CHECK((a + Rational(3, 2)).is_zero());
    CHECK((a * a).to_string() == "9/4");
    CHECK((Rational(1) / Rational(3)).to_string() == "1/3");
    Rational big(std::numeric_limits<std::int64_t>::max());
    Rational sum = big + big;
    CHECK(sum.to_string() == "18446744073709551614");
    CHECK((sum - big) == big);
    Rational tiny(1, std::numeric_limits<std::int64_t>::max());
    CHECK((tiny * tiny * Rational(std::numeric_limits<std::int64_t>::max())) == tiny);
}

TEST_CASE("rank and kernel of a rank-one matrix")
{
    auto m = Matrix::from_rows({{1, 2}, {2, 4}}, Q);
    auto rk = rank_kernel(m);
    CHECK(rk.rank == 1);
    REQUIRE(rk.kernel.size() == 1);
    // the normal form has 1 at the free column; (2,-1) spans the same line
    CHECK(rk.kernel[0] == SparseVec::from_dense(ints(Q, {-2, 1})));
    CHECK(m.apply(rk.kernel[0]).empty());
}

TEST_CASE("identity has full rank and trivial kernel")
{
    auto rk = rank_kernel(Matrix::identity(3, Q));
    CHECK(rk.rank == 3);
    CHECK(rk.kernel.empty());
}

TEST_CASE("rank over F_5 drops when the determinant vanishes mod 5")
{
    auto f5 = Field::prime(5);
    CHECK(rank(Matrix::from_rows({{1, 2}, {3, 1}}, f5)) == 1);
    CHECK(rank(Matrix::from_rows({{1, 2}, {3, 1}}, Q)) == 2);
}

TEST_CASE("solve_linear")
{
    auto x = solve_linear(Matrix::identity(2, Q), ints(Q, {1, 2}));
    REQUIRE(x);
    CHECK(*x == ints(Q, {1, 2}));

    auto y = solve_linear(Matrix::from_rows({{1, 1}}, Q), ints(Q, {3}));
    REQUIRE(y);
    CHECK(*y == ints(Q, {3, 0}));

    CHECK_FALSE(solve_linear(Matrix::from_rows({{1, 2}, {2, 4}}, Q), ints(Q, {1, 1})));
    CHECK_THROWS_AS(solve_linear(Matrix::identity(2, Q), ints(Q, {1})), DimensionError);
}

TEST_CASE("field parsing")
{
    CHECK(Field::parse("Q").is_rational());
    CHECK(Field::parse("Fp:101").characteristic() == 101);
    CHECK_THROWS_AS(Field::parse("Fp:100"), ArgumentError);
    CHECK_THROWS_AS(Field::parse("R"), ArgumentError);
}

TEST_CASE("random matrices: rank(m) = rank(m^T), kernels are annihilated, Q agrees with F_p")
{
    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> entry(-3, 3);
    std::uniform_int_distribution<int> size(1, 7);
    for (int trial = 0; trial < 200; ++trial) {
        const int r = size(rng), c = size(rng);
        std::vector<std::vector<std::int64_t>> rows(r, std::vector<std::int64_t>(c));
        for (auto& row : rows)
            for (auto& v : row)
                v = entry(rng) * (trial % 3 == 0 ? entry(rng) : 1);
        auto m = Matrix::from_rows(rows, Q);
        auto rk = rank_kernel(m);
        CHECK(rk.rank + rk.kernel.size() == static_cast<std::size_t>(c));
        CHECK(rank(m.transpose()) == rk.rank);
        for (const auto& k : rk.kernel)
            CHECK(m.apply(k).empty());
        // 1000003 is far above any minor of these small integer matrices that could vanish by accident
        CHECK(rank(Matrix::from_rows(rows, Field::prime(1000003))) == rk.rank);
        CHECK(rank_kernel(m).kernel == rk.kernel);
    }
}

TEST_CASE("echelon reduction with tracked coefficients")
{
    EchelonBasis eb(3, Q);
    eb.insert(SparseVec::from_dense(ints(Q, {1, 1, 0})));
    eb.insert(SparseVec::from_dense(ints(Q, {0, 1, 1})));
    std::vector<Scalar> coeffs;
    auto v = SparseVec::from_dense(ints(Q, {2, 5, 3}));
    auto res = eb.reduce_tracking(v, coeffs);
    CHECK(res.empty());
    SparseVec rebuilt;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        rebuilt.axpy(coeffs[i], eb.rows()[i]);
    CHECK(rebuilt == v);
}
