#include "ggm/groebner.hpp"

#include <algorithm>

namespace ggm {

namespace {

Poly monic(const Poly& p) { return p.scaled(p.leading().coeff.inverse()); }

Poly s_poly(const Poly& f, const Poly& g)
{
    const Monomial l = mono_lcm(f.leading().mono, g.leading().mono);
    Poly a = f.times_term(mono_div(l, f.leading().mono), f.leading().coeff.inverse());
    Poly b = g.times_term(mono_div(l, g.leading().mono), g.leading().coeff.inverse());
    return a - b;
}

bool coprime(const Monomial& a, const Monomial& b)
{
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] > 0 && b[k] > 0)
            return false;
    return true;
}

}  // namespace

Poly reduce_by(const Poly& p, const std::vector<Poly>& basis)
{
    Poly rem(p.nvars(), p.field());
    Poly work = p;
    while (!work.is_zero()) {
        const auto lt = work.leading();
        const Poly* divisor = nullptr;
        for (const auto& g : basis) {
            if (divides(g.leading().mono, lt.mono)) {
                divisor = &g;
                break;
            }
        }
        if (divisor) {
            Scalar c = lt.coeff / divisor->leading().coeff;
            work = work - divisor->times_term(mono_div(lt.mono, divisor->leading().mono), c);
        } else {
            rem.add_term(lt.mono, lt.coeff);
            work = work - Poly::monomial(lt.mono, lt.coeff, p.field());
        }
    }
    return rem;
}

std::vector<Poly> reduced_groebner(const std::vector<Poly>& gens)
{
    std::vector<Poly> g;
    for (const auto& p : gens)
        if (!p.is_zero())
            g.push_back(monic(p));
    if (g.empty())
        return g;

    struct Pair {
        std::size_t i, j;
        int deg;
    };
    std::vector<Pair> pairs;
    auto add_pairs = [&](std::size_t j) {
        for (std::size_t i = 0; i < j; ++i)
            pairs.push_back({i, j, total_degree(mono_lcm(g[i].leading().mono, g[j].leading().mono))});
    };
    for (std::size_t j = 1; j < g.size(); ++j)
        add_pairs(j);

    while (!pairs.empty()) {
        auto best = std::min_element(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            return a.deg != b.deg ? a.deg < b.deg : (a.j != b.j ? a.j < b.j : a.i < b.i);
        });
        Pair pr = *best;
        pairs.erase(best);
        if (coprime(g[pr.i].leading().mono, g[pr.j].leading().mono))
            continue;
        Poly r = reduce_by(s_poly(g[pr.i], g[pr.j]), g);
        if (!r.is_zero()) {
            g.push_back(monic(r));
            add_pairs(g.size() - 1);
        }
    }

    // minimize: drop elements whose leading monomial is divisible by another's
    std::vector<Poly> minimal;
    for (std::size_t i = 0; i < g.size(); ++i) {
        bool redundant = false;
        for (std::size_t j = 0; j < g.size() && !redundant; ++j) {
            if (i == j || !divides(g[j].leading().mono, g[i].leading().mono))
                continue;
            redundant = g[j].leading().mono != g[i].leading().mono || j < i;
        }
        if (!redundant)
            minimal.push_back(g[i]);
    }
    // interreduce tails
    std::vector<Poly> reduced;
    for (std::size_t i = 0; i < minimal.size(); ++i) {
        std::vector<Poly> others;
        for (std::size_t j = 0; j < minimal.size(); ++j)
            if (j != i)
                others.push_back(minimal[j]);
        // leading terms are mutually non-divisible, so only tails change
        reduced.push_back(monic(reduce_by(minimal[i], others)));
    }
    std::sort(reduced.begin(), reduced.end(),
              [](const Poly& a, const Poly& b) { return grevlex_cmp(a.leading().mono, b.leading().mono) < 0; });
    return reduced;
}

bool is_groebner(const std::vector<Poly>& basis)
{
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i + 1; j < basis.size(); ++j)
            if (!reduce_by(s_poly(basis[i], basis[j]), basis).is_zero())
                return false;
    return true;
}

}  // namespace ggm
