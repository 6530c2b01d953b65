#include <doctest.h>

#include "ggm/error.hpp"
#include "ggm/localcohom.hpp"

using namespace ggm;

namespace {

const Field Q = Field::rationals();

RingPtr p1() { return WeightedRing::build({"x", "y"}, {1, 1}, {}, Q); }
RingPtr p2() { return WeightedRing::build({"x", "y", "z"}, {1, 1, 1}, {}, Q); }
RingPtr cross() { return WeightedRing::build({"x", "y"}, {1, -1}, {"x*y"}, Q); }

std::size_t binom2(int n) { return n < 0 ? 0 : static_cast<std::size_t>((n + 1) * (n + 2) / 2); }

// dim H^r(RGamma_{(x_1..x_r)}(k[x_1..x_r]))_i = #{a in Z_{>=1}^r : sum a = -i}
std::size_t top_count(int r, int i)
{
    const int n = -i - r;
    if (n < 0)
        return 0;
    return r == 2 ? static_cast<std::size_t>(n + 1) : binom2(n);
}

}  // namespace

TEST_CASE("koszul_complex examples")
{
    auto r1 = WeightedRing::build({"x"}, {1}, {}, Q);
    auto a1 = GradedModule::free(r1);
    KoszulStage k(a1, {r1->parse("x")}, 3);
    CHECK(k.length() == 1);
    CHECK(k.twists(0) == std::vector<int>{0});
    CHECK(k.twists(1) == std::vector<int>{3});
    auto s = k.slice(1);
    CHECK(s.dims() == std::vector<std::size_t>{1, 1});

    auto r = p1();
    auto a = GradedModule::free(r);
    KoszulStage k2(a, {r->parse("x"), r->parse("y")}, 1);
    CHECK(k2.twists(1) == std::vector<int>{1, 1});
    CHECK(k2.twists(2) == std::vector<int>{2});
    CHECK(subsets_of_size(2, 1).size() == 2);
    auto s2 = k2.slice(-2);
    CHECK(s2.dims() == std::vector<std::size_t>{0, 0, 1});
    CHECK(cohomology_dim(s2, 2) == 1);

    for (int i = -3; i <= 2; ++i)
        CHECK_NOTHROW(k2.transition_all(3, i));

    CHECK_THROWS_AS(KoszulStage(a, {r->parse("x + y^2")}, 1).slice(0), HomogeneityError);
}

TEST_CASE("local_cohomology_table on P^1")
{
    auto r = p1();
    auto a = GradedModule::free(r);
    auto t = local_cohomology_table(a, {r->parse("x"), r->parse("y")}, -4, 4);
    CHECK(t.complete());
    CHECK(t.backend == "koszul-colimit");
    for (int i = -4; i <= 4; ++i) {
        CHECK(t.dim(0, i) == 0u);
        CHECK(t.dim(1, i) == 0u);
        CHECK(t.dim(2, i) == top_count(2, i));
    }
    CHECK(t.dim(2, -4) == 3u);
    CHECK(t.dim(2, -1) == 0u);
    CHECK_THROWS_AS(t.at(3, 0), ArgumentError);
}

TEST_CASE("local_cohomology_table on P^2 matches the monomial count")
{
    auto r = p2();
    auto a = GradedModule::free(r);
    auto t = local_cohomology_table(a, {r->parse("x"), r->parse("y"), r->parse("z")}, -5, 1);
    CHECK(t.complete());
    for (int i = -5; i <= 1; ++i) {
        for (int j = 0; j <= 2; ++j)
            CHECK(t.dim(j, i) == 0u);
        CHECK(t.dim(3, i) == top_count(3, i));
    }
}

TEST_CASE("torsion modules are their own local cohomology")
{
    auto r = p1();
    auto m = GradedModule::parse(r, {0}, {{"x"}, {"y"}});
    auto t = local_cohomology_table(m, r->positive_generators().gens, -3, 3);
    for (int i = -3; i <= 3; ++i) {
        CHECK(t.dim(0, i) == (i == 0 ? 1u : 0u));
        CHECK(t.dim(1, i) == 0u);
        CHECK(t.dim(2, i) == 0u);
    }
}

TEST_CASE("local cohomology of k[x,y]/(xy) with weights (1,-1)")
{
    auto r = cross();
    auto a = GradedModule::free(r);
    auto gens = r->positive_generators();
    REQUIRE(gens.gens.size() == 1);
    auto t = local_cohomology_table(a, gens.gens, -4, 4);
    for (int i = -4; i <= 4; ++i) {
        CHECK(t.dim(0, i) == (i < 0 ? 1u : 0u));
        CHECK(t.dim(1, i) == (i < 0 ? 1u : 0u));
    }
    auto c = cech_table(a, gens.gens, -4, 4);
    for (int i = -4; i <= 4; ++i)
        CHECK(c.table.dim(0, i) == 1u);
}

TEST_CASE("cech_table on P^1")
{
    auto r = p1();
    auto a = GradedModule::free(r);
    auto res = cech_table(a, {r->parse("x"), r->parse("y")}, -4, 4);
    const auto& t = res.table;
    CHECK(t.j_max == 1);
    for (int i = -4; i <= 4; ++i) {
        CHECK(t.dim(0, i) == (i >= 0 ? static_cast<std::size_t>(i + 1) : 0u));
        CHECK(t.dim(1, i) == (i <= -2 ? static_cast<std::size_t>(-i - 1) : 0u));
        const auto& re = res.realized.at(i);
        REQUIRE(re.stable);
        CHECK(re.h0_dim == *t.dim(0, i));
        CHECK(re.eta.cols() == a->dim(i));
        CHECK(rank(re.eta) == a->dim(i));
    }
}

TEST_CASE("cech_table of a torsion module vanishes")
{
    auto r = p1();
    auto m = GradedModule::parse(r, {0}, {{"x^2"}, {"y^3"}});
    auto res = cech_table(m, r->positive_generators().gens, -3, 5);
    for (int i = -3; i <= 5; ++i) {
        CHECK(res.table.dim(0, i) == 0u);
        CHECK(res.table.dim(1, i) == 0u);
    }
}

TEST_CASE("truncated Cech oracle")
{
    auto r = p1();
    auto a = GradedModule::free(r);
    std::vector<Poly> gens{r->parse("x"), r->parse("y")};
    for (int trunc = 2; trunc <= 5; ++trunc) {
        auto o = cech_truncated_oracle(a, gens, 1, -2, trunc, false);
        CHECK(o.dim == 1u);
    }
    auto o1 = cech_truncated_oracle(a, gens, 1, -2, 1, false);
    CHECK(o1.dim_at_trunc == 1);

    // trunc 1 -> 2 on H^0: the models grow monotonically
    for (int i = 0; i <= 3; ++i) {
        auto lo = cech_truncated_oracle(a, gens, 0, i, 1, false);
        auto hi = cech_truncated_oracle(a, gens, 0, i, 2, false);
        CHECK(lo.dim_at_trunc <= hi.dim_at_trunc);
        CHECK(hi.dim == static_cast<std::size_t>(i + 1));
    }
    CHECK_THROWS_AS(cech_truncated_oracle(a, gens, 0, 0, 0, false), ArgumentError);
}

TEST_CASE("backend agreement on P^1 and P^2")
{
    for (const auto& r : {p1(), p2()}) {
        auto a = GradedModule::free(r);
        auto gens = r->positive_generators().gens;
        auto mods = std::vector<SpacePtr>{a, GradedModule::parse(r, {1}, {{"x"}}), a->twist(-1)};
        for (const auto& m : mods) {
            auto koszul = local_cohomology_table(m, gens, -4, 3);
            auto oracle = cech_truncated_table(m, gens, -4, 3, true);
            for (const auto& [key, cell] : koszul.cells) {
                const auto& other = oracle.at(key.first, key.second);
                if (cell.dim && other.dim)
                    CHECK(*cell.dim == *other.dim);
            }
            CHECK(oracle.complete());
        }
    }
}

TEST_CASE("generating-set independence and twist compatibility")
{
    auto r = p1();
    auto a = GradedModule::free(r);
    auto t1 = local_cohomology_table(a, {r->parse("x"), r->parse("y")}, -4, 3);
    auto t2 = local_cohomology_table(a, {r->parse("x"), r->parse("y"), r->parse("x + y")}, -4, 3);
    for (int i = -4; i <= 3; ++i) {
        for (int j = 0; j <= 2; ++j)
            CHECK(t1.dim(j, i) == t2.dim(j, i));
        CHECK(t2.dim(3, i) == 0u);
    }
    auto t3 = local_cohomology_table(a, {r->parse("x^2"), r->parse("y")}, -4, 3);
    for (int i = -4; i <= 3; ++i)
        for (int j = 0; j <= 2; ++j)
            CHECK(t1.dim(j, i) == t3.dim(j, i));

    auto m = GradedModule::parse(r, {0, 1}, {{"y^2", "x"}});
    auto gens = r->positive_generators().gens;
    auto tm = local_cohomology_table(m, gens, -4, 4);
    auto tw = local_cohomology_table(m->twist(1), gens, -5, 3);
    for (int i = -5; i <= 3; ++i)
        for (int j = 0; j <= 2; ++j)
            CHECK(tw.dim(j, i) == tm.dim(j, i + 1));
}

TEST_CASE("realized H^0 classes are torsion")
{
    auto r = p1();
    auto m = GradedModule::parse(r, {0, 0}, {{"x", "0"}, {"y^2", "0"}, {"0", "x*y"}});
    auto gens = r->positive_generators();
    for (int i = 0; i <= 3; ++i) {
        auto re = realize_h0(m, gens.gens, i);
        REQUIRE(re.stable);
        for (const auto& x : re.torsion)
            CHECK(torsion_test(*m, i, x, gens).verdict == Verdict::Torsion);
    }
}

TEST_CASE("Serre vanishing shadow")
{
    for (const auto& r : {p1(), p2()}) {
        auto m = GradedModule::parse(r, {0}, {{"x*y"}});
        auto gens = r->positive_generators().gens;
        auto c = cech_table(m, gens, 0, 4);
        for (int i = 0; i <= 4; ++i)
            for (int j = 1; j <= c.table.j_max; ++j)
                CHECK(c.table.dim(j, i) == 0u);
    }
}

TEST_CASE("saturate examples")
{
    auto r = p1();
    auto gens = r->positive_generators().gens;
    auto ideal = GradedModule::parse(r, {1, 1}, {{"y", "-x"}}, "I");
    auto rep = saturate(ideal, gens, -3, 4);
    REQUIRE(rep.complete());
    for (const auto& row : rep.rows) {
        CHECK(row.sat_dim == r->dim(row.weight));
        CHECK(row.kernel_dim == 0);
        CHECK(row.cokernel_dim == (row.weight == 0 ? 1u : 0u));
        CHECK(row.agrees_with_cech);
    }

    auto a = GradedModule::free(r);
    for (const auto& row : saturate(a, gens, 0, 5).rows) {
        CHECK(row.kernel_dim == 0);
        CHECK(row.cokernel_dim == 0);
        CHECK(row.sat_dim == row.module_dim);
    }

    auto tors = GradedModule::parse(r, {0}, {{"x^2"}, {"y^2"}});
    for (const auto& row : saturate(tors, gens, -2, 4).rows)
        CHECK(row.sat_dim == 0u);
}

TEST_CASE("saturation model is a graded module")
{
    auto r = p1();
    auto gens = r->positive_generators().gens;
    auto ideal = GradedModule::parse(r, {1, 1}, {{"y", "-x"}}, "I");
    auto sat = std::make_shared<const SaturationModel>(ideal, gens, 8);
    Poly x = r->parse("x"), y = r->parse("y");
    for (int i = 0; i <= 3; ++i) {
        CHECK(sat->mult(x * y, i) == sat->mult(x, i + 1) * sat->mult(y, i));
        CHECK(sat->mult(x, i) * sat->unit(i) == sat->unit(i + 1) * ideal->mult(x, i));
    }
    auto unit = std::make_shared<const SaturationUnit>(sat);
    CokernelSpace coker(unit);
    KernelSpace ker(unit);
    for (int i = -1; i <= 3; ++i) {
        CHECK(coker.dim(i) == (i == 0 ? 1u : 0u));
        CHECK(ker.dim(i) == 0);
    }
}

TEST_CASE("triangle_check")
{
    auto r = p1();
    auto gens = r->positive_generators().gens;
    auto a = GradedModule::free(r);
    auto rep = triangle_check(a, gens, -4, 4);
    CHECK(rep.pass());
    CHECK(!rep.first_failure());

    auto ideal = GradedModule::parse(r, {1, 1}, {{"y", "-x"}}, "I");
    CHECK(triangle_check(ideal, gens, -4, 4).pass());

    auto mixed = GradedModule::parse(r, {0, 0}, {{"x", "0"}, {"y^2", "0"}});
    CHECK(triangle_check(mixed, gens, -3, 3).pass());

    auto bad = triangle_check(a, gens, -4, 4, {}, 2);
    CHECK(!bad.pass());
    CHECK(bad.first_failure() == 2);
}

TEST_CASE("vanishing_bounds examples")
{
    auto r = p1();
    auto a = GradedModule::free(r);
    auto vb = vanishing_bounds(a, -5, 5);
    // H^2 of A lives exactly in weights <= -2
    CHECK(vb.c_plus == -2);
    CHECK(vb.c_minus == 0);

    auto c = cross();
    auto vc = vanishing_bounds(GradedModule::free(c), -4, 4);
    CHECK(vc.c_plus == -1);
    CHECK(vc.c_minus == 1);

    auto tors = GradedModule::parse(r, {0}, {{"x^2"}, {"y^2"}});
    auto vt = vanishing_bounds(tors, -3, 5);
    CHECK(vt.c_plus == 2);

    auto narrow = vanishing_bounds(GradedModule::free(c), -4, -2);
    CHECK(!narrow.c_plus);
    CHECK(narrow.note_plus == "NotFoundInWindow");
}
