#include <doctest.h>

#include <random>

#include "ggm/error.hpp"
#include "ggm/groebner.hpp"
#include "ggm/ring.hpp"

using namespace ggm;

namespace {

const Field Q = Field::rationals();

std::vector<std::string> names(const RingPtr& r, const std::vector<Monomial>& ms)
{
    std::vector<std::string> out;
    for (const auto& m : ms)
        out.push_back(mono_to_string(m, r->vars()));
    return out;
}

long binom(long n, long k)
{
    if (k < 0 || n < k)
        return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

Poly random_poly(const WeightedRing& r, std::mt19937& rng, int max_deg)
{
    std::uniform_int_distribution<int> c(-3, 3), e(0, max_deg);
    Poly p(r.nvars(), r.field());
    for (int t = 0; t < 4; ++t) {
        Monomial m(r.nvars());
        for (auto& x : m)
            x = e(rng);
        p.add_term(m, Scalar(r.field(), c(rng)));
    }
    return p;
}

}  // namespace

TEST_CASE("polynomial parser")
{
    std::vector<std::string> v{"x", "y"};
    auto p = parse_poly(" (x + y)^2 - 2 * x*y ", v, Q);
    CHECK(p.to_string(v) == "x^2 + y^2");
    CHECK(parse_poly("-3*x^2*y + 4", v, Q).to_string(v) == "-3*x^2*y + 4");
    CHECK(parse_poly("7*x", v, Field::prime(5)).to_string(v) == "2*x");
    CHECK_THROWS_AS(parse_poly("x + z", v, Q), ParseError);
    CHECK_THROWS_AS(parse_poly("x +", v, Q), ParseError);
    CHECK_THROWS_AS(parse_poly("x ^", v, Q), ParseError);
}

TEST_CASE("build_ring examples")
{
    auto plane = WeightedRing::build({"x", "y"}, {1, 1}, {}, Q);
    CHECK(names(plane, plane->weight_basis(0)) == std::vector<std::string>{"1"});
    CHECK_FALSE(plane->window().has_value());

    auto cross = WeightedRing::build({"x", "y"}, {1, -1}, {"x*y"}, Q);
    for (int i = -10; i <= 10; ++i)
        CHECK(cross->dim(i) == 1);

    CHECK_THROWS_AS(WeightedRing::build({"x", "y"}, {1, 1}, {"x + y^2"}, Q), HomogeneityError);
    CHECK_THROWS_AS(WeightedRing::build({"x", "y"}, {1, -1}, {}, Q), LocalFinitenessError);
    CHECK_THROWS_AS(WeightedRing::build({"x", "y"}, {1}, {}, Q), ArgumentError);
}

TEST_CASE("mixed-sign window is validated and enforced")
{
    auto cross = WeightedRing::build({"x", "y"}, {1, -1}, {"x*y"}, Q, 12);
    REQUIRE(cross->window());
    CHECK(cross->window()->first == -10);
    CHECK(cross->window()->second == 10);
    CHECK_THROWS_AS(cross->weight_basis(11), WindowError);
}

TEST_CASE("normal_form examples and algebra-section property")
{
    auto cross = WeightedRing::build({"x", "y"}, {1, -1}, {"x*y"}, Q);
    CHECK(cross->normal_form(cross->parse("x*y")).is_zero());

    auto r = WeightedRing::build({"x", "y"}, {1, 1}, {"x^2"}, Q);
    CHECK(r->normal_form(r->parse("(x+y)^2")).to_string(r->vars()) == "2*x*y + y^2");

    auto twisted = WeightedRing::build({"x", "y", "z"}, {1, 1, 1}, {"x^2 - y*z", "x*y - z^2"}, Q);
    CHECK(is_groebner(twisted->groebner()));
    std::mt19937 rng(7);
    for (int t = 0; t < 30; ++t) {
        Poly a = random_poly(*twisted, rng, 3), b = random_poly(*twisted, rng, 3);
        Poly na = twisted->normal_form(a);
        CHECK(twisted->normal_form(na) == na);
        CHECK(twisted->normal_form(a * b) == twisted->normal_form(na * twisted->normal_form(b)));
        CHECK(twisted->normal_form(a + b) == twisted->normal_form(a) + twisted->normal_form(b));
    }
}

TEST_CASE("weight_basis examples")
{
    auto plane = WeightedRing::build({"x", "y"}, {1, 1}, {}, Q);
    CHECK(names(plane, plane->weight_basis(2)) == std::vector<std::string>{"x^2", "x*y", "y^2"});
    CHECK(plane->weight_basis(-1).empty());

    auto cross = WeightedRing::build({"x", "y"}, {1, -1}, {"x*y"}, Q);
    CHECK(names(cross, cross->weight_basis(-3)) == std::vector<std::string>{"y^3"});
}

TEST_CASE("dimensions match Hilbert series coefficients")
{
    auto p1 = WeightedRing::build({"x", "y"}, {1, 1}, {}, Q);
    auto p2 = WeightedRing::build({"x", "y", "z"}, {1, 1, 1}, {}, Q);
    auto p112 = WeightedRing::build({"x", "y", "z"}, {1, 1, 2}, {}, Q);
    for (int i = 0; i <= 12; ++i) {
        CHECK(p1->dim(i) == static_cast<std::size_t>(i + 1));
        CHECK(p2->dim(i) == static_cast<std::size_t>(binom(i + 2, 2)));
        // #{(a,b,c): a+b+2c = i} = sum over c of (i - 2c + 1)
        long expect = 0;
        for (int c = 0; 2 * c <= i; ++c)
            expect += i - 2 * c + 1;
        CHECK(p112->dim(i) == static_cast<std::size_t>(expect));
    }
}

TEST_CASE("positive_generators examples")
{
    auto p1 = WeightedRing::build({"x", "y"}, {1, 1}, {}, Q);
    auto g = p1->positive_generators();
    CHECK(g.gens.size() == 2);
    CHECK(g.degrees == std::vector<int>{1, 1});
    CHECK(g.d == 1);

    auto w12 = WeightedRing::build({"x", "y"}, {1, 2}, {}, Q);
    auto g12 = w12->positive_generators();
    CHECK(g12.degrees == std::vector<int>{1, 2});
    CHECK(g12.d == 2);

    auto cross = WeightedRing::build({"x", "y"}, {1, -1}, {"x*y"}, Q);
    auto gc = cross->positive_generators();
    REQUIRE(gc.gens.size() == 1);
    CHECK(gc.gens[0].to_string(cross->vars()) == "x");
    auto gm = cross->positive_generators(-1);
    REQUIRE(gm.gens.size() == 1);
    CHECK(gm.gens[0].to_string(cross->vars()) == "y");

    auto neg = WeightedRing::build({"x"}, {-1}, {}, Q);
    CHECK_THROWS_AS(neg->positive_generators(), DegenerateGradingError);
}

TEST_CASE("check_AN_Ad examples")
{
    CHECK(check_AN_Ad(*WeightedRing::build({"x", "y"}, {1, 2}, {}, Q), 3));
    CHECK(check_AN_Ad(*WeightedRing::build({"x", "y"}, {1, 1}, {}, Q), 1));
    CHECK(check_AN_Ad(*WeightedRing::build({"x", "y"}, {1, -1}, {"x*y"}, Q), 2));
    CHECK_THROWS_AS(check_AN_Ad(*WeightedRing::build({"x", "y"}, {1, 2}, {}, Q), 1), ArgumentError);
}

TEST_CASE("Veronese views")
{
    auto p1 = WeightedRing::build({"x", "y"}, {1, 1}, {}, Q);
    VeroneseView one(p1, 1);
    for (int i = -3; i <= 3; ++i)
        CHECK(one.weight_basis(i) == p1->weight_basis(i));
    VeroneseView two(p1, 2);
    CHECK(two.dim(1) == 3);
    for (int i = -3; i <= 4; ++i)
        CHECK(two.weight_basis(i) == p1->weight_basis(2 * i));

    auto cross = WeightedRing::build({"x", "y"}, {1, -1}, {"x*y"}, Q);
    VeroneseView c2(cross, 2);
    CHECK(names(cross, c2.weight_basis(-1)) == std::vector<std::string>{"y^2"});
    CHECK(c2.mult_map(cross->parse("x^2"), 1).at(0, 0).is_one());
    CHECK_THROWS_AS(c2.mult_map(cross->parse("x"), 1), ArgumentError);
    CHECK_THROWS_AS(VeroneseView(p1, 0), ArgumentError);
}

TEST_CASE("ring multiplication maps")
{
    auto p1 = WeightedRing::build({"x", "y"}, {1, 1}, {}, Q);
    CHECK(rank(p1->mult_map(p1->parse("x"), 1)) == 2);
    auto cross = WeightedRing::build({"x", "y"}, {1, -1}, {"x*y"}, Q);
    CHECK(cross->mult_map(cross->parse("y"), 1).is_zero());
    CHECK_THROWS_AS(p1->mult_map(p1->parse("x + y^2"), 0), HomogeneityError);
}

TEST_CASE("ideal membership")
{
    auto p1 = WeightedRing::build({"x", "y"}, {1, 1}, {}, Q);
    std::vector<Poly> m{p1->var(0), p1->var(1)};
    CHECK(p1->ideal_contains(m, p1->parse("x*y")));
    CHECK_FALSE(p1->ideal_contains(m, p1->one()));
}
