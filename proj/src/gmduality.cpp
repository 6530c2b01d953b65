#include "ggm/gmduality.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>

#include <fmt/format.h>

#include "ggm/error.hpp"
#include "ggm/parallel.hpp"

namespace ggm {

LocalizedModel::LocalizedModel(SpacePtr base, Poly f, int denominators, int budget, int span)
    : GradedSpace(base->ring_ptr()),
      quotient_(base, std::move(f), budget, span),
      denominators_(denominators),
      shift_(denominators * base->ring().weight_of(quotient_.element()))
{
    if (denominators < 0)
        throw ArgumentError("denominator bound must be nonnegative");
}

std::string LocalizedModel::name() const
{
    return fmt::format("{}[1/{}]", quotient_.base().name(), element().to_string(ring().vars()));
}

std::string to_string(Completeness c)
{
    switch (c) {
    case Completeness::Complete:
        return "Complete";
    case Completeness::NotComplete:
        return "NotComplete";
    default:
        return "Inconclusive";
    }
}

// ---------------------------------------------------------------- towers

namespace {

// dim of the stable image of V_{base - n e} -> V_base
std::optional<std::size_t> stable_image(const GradedSpace& v, const Poly& f, int e, int base, int depth, int span)
{
    const std::size_t n0 = v.dim(base);
    if (n0 == 0)
        return 0;
    Matrix comp = Matrix::identity(n0, v.field());
    std::vector<std::size_t> chain;
    for (int n = 1; n <= depth; ++n) {
        // V_{base - n e} -> V_{base - (n-1) e} -> ... -> V_base
        comp = comp * v.mult(f, base - n * e);
        chain.push_back(rank(comp));
        if (chain.back() == 0)
            return 0;
        // ranks only decrease; a nonzero plateau is accepted at full depth
        if (n == depth && chain.size() > static_cast<std::size_t>(span)) {
            bool flat = true;
            for (std::size_t t = chain.size() - static_cast<std::size_t>(span) - 1; t < chain.size(); ++t)
                flat = flat && chain[t] == chain.back();
            if (flat)
                return chain.back();
        }
    }
    return std::nullopt;
}

}  // namespace

TowerReport tower_limits(const GradedSpace& v, const Poly& f, int i, int depth, int span)
{
    TowerReport rep;
    rep.depth = depth;
    const int e = v.ring().weight_of(f);
    if (e == 0)
        throw ArgumentError("tower element must have nonzero weight");
    if (const auto* model = dynamic_cast<const LocalizedModel*>(&v)) {
        if (model->element() == f) {
            // f is invertible on M_f: every transition is an isomorphism
            rep.adaptive = true;
            rep.lim = v.dim(i);
            rep.lim1 = 0;
            rep.stable_images.assign(static_cast<std::size_t>(span) + 1, v.dim(i));
            return rep;
        }
        rep.note = "tower of a localized model against a different element";
        return rep;
    }
    try {
        for (int k = 0; k <= span; ++k) {
            auto s = stable_image(v, f, e, i - k * e, depth, span);
            if (!s) {
                rep.note = fmt::format("image chain at V_{} not stationary within depth {}", i - k * e, depth);
                return rep;
            }
            rep.stable_images.push_back(*s);
        }
        if (std::adjacent_find(rep.stable_images.begin(), rep.stable_images.end(), std::not_equal_to<>()) !=
            rep.stable_images.end()) {
            rep.note = "stable images differ along the tower";
            return rep;
        }
        rep.lim = rep.stable_images.front();

        // lim^1: cokernel of (v_k) -> (v_k - f v_{k+1}) on V_i, ..., V_{i - depth e}
        std::vector<std::size_t> off{0};
        for (int k = 0; k <= depth; ++k)
            off.push_back(off.back() + v.dim(i - k * e));
        std::vector<Block> blocks;
        for (int k = 0; k < depth; ++k) {
            const std::size_t nk = v.dim(i - k * e);
            blocks.push_back({off[static_cast<std::size_t>(k)], off[static_cast<std::size_t>(k)],
                              Matrix::identity(nk, v.field())});
            blocks.push_back({off[static_cast<std::size_t>(k)], off[static_cast<std::size_t>(k + 1)],
                              -v.mult(f, i - (k + 1) * e)});
        }
        const std::size_t rows = off[static_cast<std::size_t>(depth)];
        Matrix diff = block_matrix(rows, off.back(), blocks, v.field());
        rep.lim1 = rows - rank(diff);
    } catch (const WindowError& err) {
        rep.lim.reset();
        rep.lim1.reset();
        rep.note = err.what();
    }
    return rep;
}

CompletenessReport derived_complete_check(const GradedSpace& v, const std::vector<Poly>& gens, int i_min, int i_max,
                                          int depth, int span)
{
    CompletenessReport rep;
    bool inconclusive = false;
    for (int i = i_min; i <= i_max; ++i)
        for (const auto& f : gens) {
            auto t = tower_limits(v, f, i, depth, span);
            if (!t.lim || !t.lim1) {
                if (!inconclusive)
                    rep.note = fmt::format("weight {}: {}", i, t.note);
                inconclusive = true;
                continue;
            }
            if (*t.lim != 0 || *t.lim1 != 0) {
                rep.verdict = Completeness::NotComplete;
                rep.witness_weight = i;
                rep.witness_element = f.to_string(v.ring().vars());
                rep.note = fmt::format("lim = {}, lim1 = {}", *t.lim, *t.lim1);
                return rep;
            }
        }
    rep.verdict = inconclusive ? Completeness::Inconclusive : Completeness::Complete;
    return rep;
}

// ---------------------------------------------------------------- completion

CompletionReport graded_completion(const GradedSpace& v, const std::vector<Poly>& gens, int i_min, int i_max,
                                   int n_max, int span)
{
    std::vector<int> degs;
    for (const auto& f : gens)
        degs.push_back(v.ring().weight_of(f));
    std::map<std::pair<int, int>, EchelonBasis> memo;
    // echelon basis of (I^n M)_w
    std::function<const EchelonBasis&(int, int)> power = [&](int n, int w) -> const EchelonBasis& {
        auto key = std::make_pair(n, w);
        auto it = memo.find(key);
        if (it != memo.end())
            return it->second;
        const std::size_t dw = v.dim(w);
        EchelonBasis e(dw, v.field());
        if (n == 0) {
            for (std::size_t c = 0; c < dw; ++c)
                e.insert(SparseVec::unit(c, v.field()));
        } else if (dw > 0) {
            for (std::size_t t = 0; t < gens.size(); ++t) {
                const int w2 = w - degs[t];
                const EchelonBasis& prev = power(n - 1, w2);
                if (prev.rank() == 0)
                    continue;
                Matrix m = v.mult(gens[t], w2);
                for (const auto& row : prev.rows())
                    e.insert(m.apply(row));
            }
        }
        return memo.emplace(key, std::move(e)).first->second;
    };

    CompletionReport rep;
    bool all = true, any_bad = false;
    for (int i = i_min; i <= i_max; ++i) {
        CompletionRow row;
        row.weight = i;
        try {
            row.module_dim = v.dim(i);
            for (int n = 1; n <= n_max && !row.dim; ++n) {
                row.chain.push_back(row.module_dim - power(n, i).rank());
                const std::size_t len = row.chain.size();
                // the chain is nondecreasing and bounded by dim M_i; a smaller
                // limit is only accepted after the whole budget
                if (row.chain.back() == row.module_dim)
                    row.dim = row.chain.back();
                else if (n == n_max && len > static_cast<std::size_t>(span) &&
                         std::all_of(row.chain.end() - span - 1, row.chain.end(),
                                     [&](std::size_t x) { return x == row.chain.back(); }))
                    row.dim = row.chain.back();
            }
        } catch (const WindowError&) {
            row.dim.reset();
        }
        if (!row.dim)
            all = false;
        else if (*row.dim != row.module_dim)
            any_bad = true;
        rep.rows.push_back(std::move(row));
    }
    rep.adic = any_bad ? Completeness::NotComplete : (all ? Completeness::Complete : Completeness::Inconclusive);
    rep.derived = derived_complete_check(v, gens, i_min, i_max, n_max, span).verdict;
    rep.consistent = !(rep.adic == Completeness::Complete && rep.derived == Completeness::NotComplete);
    return rep;
}

// ---------------------------------------------------------------- orthogonality

GammaVanishingReport gamma_vanishing_on_localization(const RingPtr& ring, const Poly& f, const std::vector<Poly>& gens,
                                                     int i_min, int i_max, const EngineOptions& opt)
{
    GammaVanishingReport rep;
    rep.hypothesis = ring->ideal_contains(gens, f);
    if (!rep.hypothesis)
        rep.note = "hypothesis not satisfied: f is not in the ideal";
    rep.denominators = opt.trunc + std::max(std::abs(i_min), std::abs(i_max));
    auto model = std::make_shared<const LocalizedModel>(GradedModule::free(ring), f, rep.denominators, opt.budget,
                                                        opt.span);
    rep.table = cech_truncated_table(model, gens, i_min, i_max, true, opt);
    for (const auto& [key, cell] : rep.table.cells) {
        if (!cell.dim)
            rep.inconclusive.push_back(key);
        else if (*cell.dim != 0)
            rep.nonzero.push_back(key);
    }
    rep.vanishes = rep.nonzero.empty() && rep.inconclusive.empty();
    return rep;
}

// ---------------------------------------------------------------- duality

bool DualityReport::pass() const
{
    return twist.has_value() && !cells.empty() &&
           std::all_of(cells.begin(), cells.end(), [](const DualityCell& c) { return c.pass; });
}

namespace {

struct DualSide {
    bool stable = false;
    std::map<int, std::size_t> dims;  // degree of the dual slice -> dim H
    std::string note;
};

DualSide dual_side(const SpacePtr& a, const std::vector<Poly>& gens, int w, const EngineOptions& opt)
{
    DualSide out;
    const int trunc = opt.trunc + std::abs(w);
    try {
        auto oracle = cech_truncated_oracle_all(a, gens, w, trunc, false, opt);
        out.stable = std::all_of(oracle.begin(), oracle.end(), [](const OracleResult& o) { return o.dim.has_value(); });
        if (!out.stable) {
            for (const auto& o : oracle)
                if (!o.dim)
                    out.note = o.note;
            return out;
        }
        SliceComplex dual = dual_slice(truncated_cech_slice(a, gens, w, trunc, false, opt));
        for (int k = dual.lo() - 1; k <= dual.hi() + 1; ++k)
            out.dims[k] = cohomology_dim(dual, k);
    } catch (const StabilizationError& e) {
        out.stable = false;
        out.note = e.what();
    } catch (const WindowError& e) {
        out.stable = false;
        out.note = e.what();
    }
    return out;
}

std::size_t dim_at(const std::map<int, std::size_t>& dims, int k)
{
    auto it = dims.find(k);
    return it == dims.end() ? 0 : it->second;
}

}  // namespace

DualityReport ggm_duality_check(const RingPtr& ring, int i_min, int i_max, const EngineOptions& opt)
{
    DualityReport rep;
    auto gens = ring->positive_generators();
    const int r = static_cast<int>(gens.gens.size());
    rep.n = r - 1;
    auto a = GradedModule::free(ring);
    auto sheaf = cech_table(a, gens.gens, i_min, i_max, opt).table;

    int wsum = 0;
    for (int w : ring->weights())
        wsum += std::abs(w);
    const int c_lo = -2 * wsum - 2, c_hi = 2 * wsum + 2;

    std::set<int> needed;
    for (int c = c_lo; c <= c_hi; ++c)
        for (int i = i_min; i <= i_max; ++i)
            needed.insert(c - i);
    std::vector<int> ws(needed.begin(), needed.end());
    std::vector<DualSide> sides(ws.size());
    parallel_for(ws.size(), opt.jobs, [&](std::size_t k) { sides[k] = dual_side(a, gens.gens, ws[k], opt); });
    std::map<int, const DualSide*> side;
    for (std::size_t k = 0; k < ws.size(); ++k)
        side[ws[k]] = &sides[k];

    // a is the shift for which H^n(O(i)) matches H^0 of the dual slice at a - i
    for (int c = c_lo; c <= c_hi; ++c) {
        bool match = true, nonzero = false;
        for (int i = i_min; i <= i_max && match; ++i) {
            auto lhs = sheaf.dim(rep.n, i);
            const DualSide& s = *side.at(c - i);
            if (!lhs || !s.stable) {
                match = false;
                break;
            }
            const std::size_t rhs = dim_at(s.dims, 0);
            match = *lhs == rhs;
            nonzero = nonzero || rhs != 0;
        }
        if (match && nonzero)
            rep.matching_twists.push_back(c);
    }
    if (rep.matching_twists.size() != 1) {
        rep.note = rep.matching_twists.empty() ? "no dualizing twist matches on the window"
                                               : "dualizing twist is not unique on the window";
        return rep;
    }
    rep.twist = rep.matching_twists.front();

    for (int i = i_min; i <= i_max; ++i)
        for (int j = -1; j <= rep.n + 1; ++j) {
            DualityCell cell;
            cell.j = j;
            cell.i = i;
            if (j >= 0 && j <= rep.n)
                cell.sheaf = sheaf.dim(j, i);
            else
                cell.sheaf = 0;
            const DualSide& s = *side.at(*rep.twist - i);
            if (s.stable)
                cell.dual = dim_at(s.dims, j - rep.n);
            else
                cell.note = s.note;
            cell.pass = cell.sheaf && cell.dual && *cell.sheaf == *cell.dual;
            if (!cell.sheaf)
                cell.note = "sheaf cohomology cell inconclusive";
            rep.cells.push_back(std::move(cell));
        }
    return rep;
}

}  // namespace ggm
