#include <doctest.h>

#include "ggm/error.hpp"
#include "ggm/projgeom.hpp"

using namespace ggm;

namespace {

const Field Q = Field::rationals();

RingPtr p1() { return WeightedRing::build({"x", "y"}, {1, 1}, {}, Q); }
RingPtr p2() { return WeightedRing::build({"x", "y", "z"}, {1, 1, 1}, {}, Q); }
RingPtr p112() { return WeightedRing::build({"x", "y", "z"}, {1, 1, 2}, {}, Q); }
RingPtr cross() { return WeightedRing::build({"x", "y"}, {1, -1}, {"x*y"}, Q); }

std::size_t count_112(int i)
{
    std::size_t n = 0;
    for (int c = 0; 2 * c <= i; ++c)
        n += static_cast<std::size_t>(i - 2 * c + 1);
    return n;
}

}  // namespace

TEST_CASE("cartier_certificate examples")
{
    auto c1 = cartier_certificate(p1(), 1);
    CHECK(c1.certified);
    CHECK(c1.verdict() == "Certified");
    REQUIRE(c1.patches.size() == 2);
    CHECK(c1.patches[0].numerator == "x");
    CHECK(c1.patches[0].k == 0);
    CHECK(c1.patches[1].numerator == "y");

    auto w1 = cartier_certificate(p112(), 1);
    CHECK(!w1.certified);
    CHECK(w1.verdict() == "NotCertifiedUpTo(4)");
    auto w2 = cartier_certificate(p112(), 2);
    CHECK(w2.certified);
    std::vector<std::string> units;
    for (const auto& p : w2.patches)
        units.push_back(p.numerator);
    CHECK(units == std::vector<std::string>{"x^2", "y^2", "z"});

    auto cx = cartier_certificate(cross(), 1);
    CHECK(cx.certified);
    REQUIRE(cx.patches.size() == 1);
    CHECK(cx.patches[0].patch == "D(x)");
    CHECK(cx.patches[0].numerator == "x");

    CHECK_THROWS_AS(cartier_certificate(p1(), 0), ArgumentError);
    auto neg = WeightedRing::build({"x"}, {-1}, {}, Q);
    CHECK_THROWS_AS(cartier_certificate(neg, 1), DegenerateGradingError);
}

TEST_CASE("certified unit and inverse multiply to a power of f")
{
    auto r = p112();
    auto cert = cartier_certificate(r, 2);
    auto gens = r->positive_generators();
    for (std::size_t s = 0; s < cert.patches.size(); ++s) {
        const auto& p = cert.patches[s];
        REQUIRE(p.found);
        Poly prod = r->parse(p.numerator) * r->parse(p.inverse);
        Poly power = gens.gens[s].pow(static_cast<unsigned>(p.k + p.k_inverse));
        CHECK(r->normal_form(prod - power).is_zero());
    }
}

TEST_CASE("sheaf_cohomology_table examples")
{
    auto r = p2();
    auto a = GradedModule::free(r);
    auto t = sheaf_cohomology_table(a, -4, 3);
    CHECK(t.dim(0, 2) == 6u);
    CHECK(t.dim(2, -3) == 1u);
    CHECK(t.dim(2, -4) == 3u);
    for (int i = -4; i <= 3; ++i)
        CHECK(t.dim(1, i) == 0u);

    auto w = p112();
    auto tw = sheaf_cohomology_table(GradedModule::free(w), 0, 5);
    for (int i = 0; i <= 5; ++i)
        CHECK(tw.dim(0, i) == count_112(i));

    auto t1 = sheaf_cohomology_table(GradedModule::free(p1()), -4, 4);
    auto r1 = p1();
    auto shifted = sheaf_cohomology_table(GradedModule::free(r1)->twist(2), -4, 2);
    for (int i = -4; i <= 2; ++i)
        for (int j = 0; j <= 1; ++j)
            CHECK(shifted.dim(j, i) == t1.dim(j, i + 2));
}

TEST_CASE("Veronese compatibility: the conic is P^1 with O(1) = O_P1(2)")
{
    auto conic = WeightedRing::build({"u", "v", "w"}, {1, 1, 1}, {"u*w - v^2"}, Q);
    auto tc = sheaf_cohomology_table(GradedModule::free(conic), -2, 2);
    auto tp = sheaf_cohomology_table(GradedModule::free(p1()), -4, 4);
    for (int i = -2; i <= 2; ++i)
        for (int j = 0; j <= 1; ++j)
            CHECK(tc.dim(j, i) == tp.dim(j, 2 * i));
}

TEST_CASE("serre_roundtrip_check examples")
{
    auto r = p1();
    auto ideal = GradedModule::parse(r, {1, 1}, {{"y", "-x"}}, "I");
    auto rep = serre_roundtrip_check(ideal, -2, 3);
    CHECK(rep.d == 1);
    CHECK(rep.pass());
    for (const auto& row : rep.rows)
        CHECK(row.sat_dim == r->dim(row.weight));

    auto w = p112();
    auto rw = serre_roundtrip_check(GradedModule::free(w), -2, 4);
    CHECK(rw.d == 2);
    CHECK(rw.pass());
    for (const auto& row : rw.rows)
        CHECK(row.cartier.has_value() == (row.weight % 2 == 0));

    auto tors = GradedModule::parse(r, {0}, {{"x^2"}, {"y"}});
    auto rt = serre_roundtrip_check(tors, -1, 3);
    CHECK(rt.pass());
    for (const auto& row : rt.rows)
        CHECK(row.sat_dim == 0);
}

TEST_CASE("saturation is monotone")
{
    auto r = p1();
    auto gens = r->positive_generators().gens;
    auto m = GradedModule::parse(r, {0, 1}, {{"x^2", "0"}, {"y^3", "x^2"}});
    auto rep = saturate(m, gens, -2, 4);
    for (const auto& row : rep.rows) {
        REQUIRE(row.sat_dim);
        CHECK(*row.sat_dim >= rank(row.unit));
    }
}

TEST_CASE("quotient_iso_check examples")
{
    auto r = p1();
    auto a = GradedModule::free(r);
    auto ideal = GradedModule::parse(r, {1, 1}, {{"y", "-x"}}, "I");
    auto inc = std::make_shared<const ModuleMap>(ideal, a,
                                                 std::vector<GradedModule::Column>{{r->parse("x")}, {r->parse("y")}});
    auto q = quotient_iso_check(inc, -2, 4);
    CHECK(q.iso());

    CHECK(quotient_iso_check(ModuleMap::identity(a), -2, 4).iso());

    auto quot = GradedModule::parse(r, {0}, {{"x"}});
    auto proj = std::make_shared<const ModuleMap>(a, quot, std::vector<GradedModule::Column>{{r->one()}});
    auto qp = quotient_iso_check(proj, -2, 4);
    CHECK(!qp.iso());
    CHECK(qp.kernel == Verdict::NotTorsion);
    CHECK(qp.cokernel == Verdict::Torsion);
    CHECK(qp.witness_weight == 1);
}

TEST_CASE("Cartier multiplication pairing on P^1")
{
    // H^0(O(i)) x H^0(O(j)) -> H^0(O(i+j)) is onto for i, j >= 0 when d = 1 is certified
    auto r = p1();
    REQUIRE(cartier_certificate(r, 1).certified);
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 3; ++j) {
            EchelonBasis img(r->dim(i + j), Q);
            for (const auto& m : r->weight_basis(i)) {
                Matrix mm = r->mult_map(Poly::monomial(m, Scalar::one(Q), Q), j);
                for (std::size_t c = 0; c < mm.cols(); ++c)
                    img.insert(mm.column(c));
            }
            CHECK(img.rank() == r->dim(i + j));
        }
}
