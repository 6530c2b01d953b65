#include "ggm/localcohom.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>

#include <fmt/format.h>

#include "ggm/error.hpp"
#include "ggm/parallel.hpp"

namespace ggm {

std::vector<std::vector<int>> subsets_of_size(int r, int q)
{
    std::vector<std::vector<int>> out;
    if (q < 0 || q > r)
        return out;
    std::vector<int> cur(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k)
        cur[static_cast<std::size_t>(k)] = k;
    while (true) {
        out.push_back(cur);
        int k = q - 1;
        while (k >= 0 && cur[static_cast<std::size_t>(k)] == r - q + k)
            --k;
        if (k < 0)
            break;
        ++cur[static_cast<std::size_t>(k)];
        for (int l = k + 1; l < q; ++l)
            cur[static_cast<std::size_t>(l)] = cur[static_cast<std::size_t>(l - 1)] + 1;
    }
    return out;
}

namespace {

int sign_before(const std::vector<int>& s, int t)
{
    int n = 0;
    for (int x : s)
        if (x < t)
            ++n;
    return n % 2 == 0 ? 1 : -1;
}

std::vector<int> with(const std::vector<int>& s, int t)
{
    std::vector<int> u = s;
    u.insert(std::upper_bound(u.begin(), u.end(), t), t);
    return u;
}

bool contains(const std::vector<int>& s, int t) { return std::find(s.begin(), s.end(), t) != s.end(); }

std::vector<int> weights_of(const WeightedRing& ring, const std::vector<Poly>& gens)
{
    std::vector<int> out;
    for (const auto& f : gens)
        out.push_back(ring.weight_of(f));
    return out;
}

Poly product(const WeightedRing& ring, const std::vector<Poly>& gens, const std::vector<int>& s)
{
    Poly p = ring.one();
    for (int t : s)
        p = p * gens[static_cast<std::size_t>(t)];
    return p;
}

int degree_sum(const std::vector<int>& degs, const std::vector<int>& s)
{
    int n = 0;
    for (int t : s)
        n += degs[static_cast<std::size_t>(t)];
    return n;
}

SparseVec slice_of(const SparseVec& v, std::size_t off, std::size_t len)
{
    SparseVec out;
    for (const auto& e : v.entries())
        if (e.index >= off && e.index < off + len)
            out.push_back(e.index - off, e.value);
    return out;
}

SparseVec shifted(const SparseVec& v, std::size_t off)
{
    SparseVec out;
    for (const auto& e : v.entries())
        out.push_back(e.index + off, e.value);
    return out;
}

// First stage at which every class of weight i can already be represented
// when the denominators are monomials in generators of weight >= dmin.
int first_stage(const std::vector<int>& degs, int i)
{
    int dmin = 0;
    for (int d : degs)
        if (d != 0)
            dmin = dmin == 0 ? std::abs(d) : std::min(dmin, std::abs(d));
    if (dmin == 0)
        return 1;
    return std::max(1, (std::abs(i) + dmin - 1) / dmin);
}

struct Stable {
    std::optional<std::size_t> value;
    int stage = 0;
    std::string note;
};

// rho(m) = rank(m, m+span); stage m is consistent when rho(m) also equals
// rank(m, m+span+1); stable once `span` consecutive consistent stages agree.
Stable stabilize(int m0, int budget, int span, const std::function<std::size_t(int, int)>& rank_fn)
{
    std::vector<std::pair<std::size_t, bool>> hist;
    int m = m0;
    for (; m + span + 1 <= m0 + budget; ++m) {
        std::size_t rho = rank_fn(m, m + span);
        bool ok = rho == rank_fn(m, m + span + 1);
        hist.emplace_back(rho, ok);
        if (static_cast<int>(hist.size()) >= span) {
            bool stable = true;
            for (std::size_t k = hist.size() - static_cast<std::size_t>(span); k < hist.size(); ++k)
                stable = stable && hist[k].second && hist[k].first == rho;
            if (stable)
                return {rho, m, {}};
        }
    }
    return {std::nullopt, m, fmt::format("no stationary span of {} within stages {}..{}", span, m0, m0 + budget)};
}

// Koszul stages, cocycles and coboundaries at one weight.
class WeightEngine {
public:
    WeightEngine(SpacePtr module, std::vector<Poly> gens, int i, bool corrupt = false)
        : module_(std::move(module)), gens_(std::move(gens)), i_(i), corrupt_(corrupt)
    {
    }

    int weight() const { return i_; }
    int r() const { return static_cast<int>(gens_.size()); }

    const KoszulStage& stage(int m)
    {
        auto it = stages_.find(m);
        if (it == stages_.end())
            it = stages_.emplace(m, std::make_unique<KoszulStage>(module_, gens_, m)).first;
        return *it->second;
    }

    const SliceComplex& slice(int m)
    {
        auto it = slices_.find(m);
        if (it != slices_.end())
            return it->second;
        SliceComplex c = stage(m).slice(i_);
        if (corrupt_) {
            std::vector<Matrix> diffs;
            for (int q = c.lo(); q < c.hi(); ++q)
                diffs.push_back(q == 0 ? Matrix(c.dim(1), c.dim(0), c.field()) : c.d(q));
            c = build_slice(c.weight(), c.lo(), c.dims(), std::move(diffs), c.field());
        }
        return slices_.emplace(m, std::move(c)).first->second;
    }

    const std::vector<SparseVec>& cocycles(int m, int j)
    {
        auto key = std::make_pair(m, j);
        auto it = cocycles_.find(key);
        if (it == cocycles_.end())
            it = cocycles_.emplace(key, ggm::cocycles(slice(m), j)).first;
        return it->second;
    }

    const EchelonBasis& boundaries(int m, int j)
    {
        auto key = std::make_pair(m, j);
        auto it = boundaries_.find(key);
        if (it == boundaries_.end())
            it = boundaries_.emplace(key, coboundaries(slice(m), j)).first;
        return it->second;
    }

    const Matrix& transition(int m, int m2, int j)
    {
        auto key = std::make_tuple(m, m2, j);
        auto it = transitions_.find(key);
        if (it == transitions_.end())
            it = transitions_.emplace(key, stage(m).transition(m2, i_, j)).first;
        return it->second;
    }

    // rank of Z^j(K_m) -> K^j(K_m2), modulo B^j(K_m2) when `mod_b`
    std::size_t rank_into(int m, int m2, int j, bool mod_b)
    {
        const auto& z = cocycles(m, j);
        if (z.empty())
            return 0;
        EchelonBasis b = mod_b ? boundaries(m2, j) : EchelonBasis(slice(m2).dim(j), module_->field());
        const Matrix& t = transition(m, m2, j);
        std::size_t r = 0;
        for (const auto& v : z)
            if (b.insert(t.apply(v)))
                ++r;
        return r;
    }

private:
    SpacePtr module_;
    std::vector<Poly> gens_;
    int i_;
    bool corrupt_;
    std::map<int, std::unique_ptr<KoszulStage>> stages_;
    std::map<int, SliceComplex> slices_;
    std::map<std::pair<int, int>, std::vector<SparseVec>> cocycles_;
    std::map<std::pair<int, int>, EchelonBasis> boundaries_;
    std::map<std::tuple<int, int, int>, Matrix> transitions_;
};

Matrix quotient_map(const GradedSpace& base, const TorsionQuotient* src, int k, const Poly& g,
                    const TorsionQuotient& tgt)
{
    const int e = base.ring().weight_of(g);
    const std::size_t n = src ? src->dim(k) : base.dim(k);
    Matrix mg = base.mult(g, k);
    std::vector<SparseVec> cols;
    cols.reserve(n);
    for (std::size_t c = 0; c < n; ++c) {
        SparseVec x = src ? src->lift(c, k) : SparseVec::unit(c, base.field());
        cols.push_back(tgt.project(mg.apply(x), k + e));
    }
    return Matrix::from_columns(tgt.dim(k + e), std::move(cols), base.field());
}

}  // namespace

// ------------------------------------------------------------ TorsionQuotient

TorsionQuotient::TorsionQuotient(SpacePtr base, Poly f, int budget, int span)
    : GradedSpace(base->ring_ptr()), base_(std::move(base)), f_(std::move(f)), budget_(budget), span_(span)
{
    deg_ = ring().weight_of(f_);
}

std::string TorsionQuotient::name() const { return base_->name() + "/Gamma_" + f_.to_string(ring().vars()); }

const TorsionQuotient::Piece& TorsionQuotient::piece(int k) const
{
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(k);
        if (it != cache_.end())
            return *it->second;
    }
    const std::size_t n = base_->dim(k);
    auto p = std::make_shared<Piece>();
    p->torsion = EchelonBasis(n, field());
    if (n > 0) {
        Matrix acc = Matrix::identity(n, field());
        std::vector<std::size_t> dims;
        std::vector<SparseVec> kernel;
        bool settled = false;
        for (int e = 1; e <= budget_ && !settled; ++e) {
            acc = base_->mult(f_, k + (e - 1) * deg_) * acc;
            auto rk = rank_kernel(acc);
            dims.push_back(rk.kernel.size());
            kernel = std::move(rk.kernel);
            if (dims.back() == n)
                settled = true;
            else if (dims.size() > static_cast<std::size_t>(span_)) {
                settled = true;
                for (std::size_t t = dims.size() - static_cast<std::size_t>(span_) - 1; t < dims.size(); ++t)
                    settled = settled && dims[t] == dims.back();
            }
        }
        if (!settled)
            throw StabilizationError(fmt::format("{}-power torsion at weight {} not stationary within {} steps",
                                                 f_.to_string(ring().vars()), k, budget_));
        for (auto& v : kernel)
            p->torsion.insert(std::move(v));
    }
    p->position.assign(n, -1);
    EchelonBasis reduced = p->torsion;
    std::vector<bool> pivot(n, false);
    for (auto c : reduced.pivots())
        pivot[c] = true;
    for (std::size_t c = 0; c < n; ++c)
        if (!pivot[c]) {
            p->position[c] = static_cast<std::int32_t>(p->basis.size());
            p->basis.push_back(static_cast<std::uint32_t>(c));
        }
    std::lock_guard<std::mutex> lock(mu_);
    return *cache_.emplace(k, std::move(p)).first->second;
}

std::size_t TorsionQuotient::dim(int k) const { return piece(k).basis.size(); }
std::size_t TorsionQuotient::torsion_dim(int k) const { return piece(k).torsion.rank(); }

SparseVec TorsionQuotient::project(const SparseVec& v, int k) const
{
    const Piece& p = piece(k);
    SparseVec out;
    const SparseVec rest = p.torsion.reduce(v);
    for (const auto& e : rest.entries())
        out.push_back(static_cast<std::size_t>(p.position[e.index]), e.value);
    return out;
}

SparseVec TorsionQuotient::lift(std::size_t idx, int k) const
{
    return SparseVec::unit(piece(k).basis.at(idx), field());
}

Matrix TorsionQuotient::mult(const Poly& g, int k) const { return quotient_map(*base_, this, k, g, *this); }

// ---------------------------------------------------------------- Koszul

KoszulStage::KoszulStage(SpacePtr module, std::vector<Poly> gens, int m)
    : module_(std::move(module)), gens_(std::move(gens)), m_(m)
{
    if (m < 1)
        throw ArgumentError("Koszul stage power must be positive");
    degs_ = weights_of(module_->ring(), gens_);
}

std::vector<int> KoszulStage::twists(int q) const
{
    std::vector<int> out;
    for (const auto& s : subsets_of_size(length(), q))
        out.push_back(m_ * degree_sum(degs_, s));
    return out;
}

SliceComplex KoszulStage::slice(int i) const
{
    const int r = length();
    const Field& k = module_->field();
    std::vector<std::vector<std::vector<int>>> subsets;
    std::vector<std::vector<std::size_t>> offsets;
    std::vector<std::size_t> dims;
    for (int q = 0; q <= r; ++q) {
        subsets.push_back(subsets_of_size(r, q));
        std::vector<std::size_t> off;
        std::size_t n = 0;
        for (const auto& s : subsets.back()) {
            off.push_back(n);
            n += module_->dim(i + m_ * degree_sum(degs_, s));
        }
        offsets.push_back(std::move(off));
        dims.push_back(n);
    }
    std::vector<Poly> powers;
    for (const auto& f : gens_)
        powers.push_back(f.pow(static_cast<unsigned>(m_)));
    std::vector<Matrix> diffs;
    for (int q = 0; q < r; ++q) {
        const auto& next = subsets[static_cast<std::size_t>(q + 1)];
        std::vector<Block> blocks;
        for (std::size_t a = 0; a < subsets[static_cast<std::size_t>(q)].size(); ++a) {
            const auto& s = subsets[static_cast<std::size_t>(q)][a];
            const int w = i + m_ * degree_sum(degs_, s);
            for (int t = 0; t < r; ++t) {
                if (contains(s, t))
                    continue;
                auto u = with(s, t);
                std::size_t b = static_cast<std::size_t>(std::find(next.begin(), next.end(), u) - next.begin());
                Matrix mm = module_->mult(powers[static_cast<std::size_t>(t)], w);
                if (sign_before(s, t) < 0)
                    mm = -mm;
                blocks.push_back({offsets[static_cast<std::size_t>(q + 1)][b], offsets[static_cast<std::size_t>(q)][a],
                                  std::move(mm)});
            }
        }
        diffs.push_back(block_matrix(dims[static_cast<std::size_t>(q + 1)], dims[static_cast<std::size_t>(q)],
                                     blocks, k));
    }
    return build_slice(i, 0, std::move(dims), std::move(diffs), k);
}

Matrix KoszulStage::transition(int m2, int i, int q) const
{
    if (m2 < m_)
        throw ArgumentError("transitions only run to later stages");
    const auto subsets = subsets_of_size(length(), q);
    std::vector<Block> blocks;
    std::size_t rows = 0, cols = 0;
    for (const auto& s : subsets) {
        const int ds = degree_sum(degs_, s);
        const int w = i + m_ * ds;
        Matrix mm = module_->mult(product(module_->ring(), gens_, s).pow(static_cast<unsigned>(m2 - m_)), w);
        const std::size_t nr = mm.rows(), nc = mm.cols();
        blocks.push_back({rows, cols, std::move(mm)});
        rows += nr;
        cols += nc;
    }
    return block_matrix(rows, cols, blocks, module_->field());
}

std::vector<Matrix> KoszulStage::transition_all(int m2, int i) const
{
    std::vector<Matrix> maps;
    for (int q = 0; q <= length(); ++q)
        maps.push_back(transition(m2, i, q));
    SliceComplex a = slice(i);
    SliceComplex b = KoszulStage(module_, gens_, m2).slice(i);
    SliceMap check(a, b, maps, 0);
    return maps;
}

// ---------------------------------------------------------------- tables

const Cell& CohomologyTable::at(int j, int i) const
{
    auto it = cells.find({j, i});
    if (it == cells.end())
        throw ArgumentError(fmt::format("no cell ({}, {}) in the {} table", j, i, complex));
    return it->second;
}

bool CohomologyTable::complete() const { return inconclusive() == 0; }

std::size_t CohomologyTable::inconclusive() const
{
    std::size_t n = 0;
    for (const auto& [key, cell] : cells)
        if (!cell.dim)
            ++n;
    return n;
}

namespace {

std::vector<int> weights_in(int lo, int hi)
{
    std::vector<int> out;
    for (int i = lo; i <= hi; ++i)
        out.push_back(i);
    return out;
}

std::vector<Cell> rgamma_cells(const SpacePtr& module, const std::vector<Poly>& gens, int i, const EngineOptions& opt)
{
    const int r = static_cast<int>(gens.size());
    std::vector<Cell> out(static_cast<std::size_t>(r + 1));
    WeightEngine eng(module, gens, i);
    const int m0 = first_stage(weights_of(module->ring(), gens), i);
    for (int j = 0; j <= r; ++j) {
        Cell& c = out[static_cast<std::size_t>(j)];
        try {
            auto st = stabilize(m0, opt.budget, opt.span,
                                [&](int m, int m2) { return eng.rank_into(m, m2, j, true); });
            c.dim = st.value;
            c.stage = st.stage;
            c.note = st.note;
        } catch (const WindowError& e) {
            c.note = e.what();
        } catch (const LocalFinitenessError& e) {
            c.note = e.what();
        }
    }
    return out;
}

}  // namespace

CohomologyTable local_cohomology_table(const SpacePtr& module, const std::vector<Poly>& gens, int i_min, int i_max,
                                       const EngineOptions& opt)
{
    weights_of(module->ring(), gens);
    CohomologyTable t;
    t.backend = "koszul-colimit";
    t.complex = "RGamma";
    t.i_min = i_min;
    t.i_max = i_max;
    t.j_min = 0;
    t.j_max = static_cast<int>(gens.size());
    const auto ws = weights_in(i_min, i_max);
    std::vector<std::vector<Cell>> per(ws.size());
    parallel_for(ws.size(), opt.jobs, [&](std::size_t k) { per[k] = rgamma_cells(module, gens, ws[k], opt); });
    for (std::size_t k = 0; k < ws.size(); ++k)
        for (int j = 0; j <= t.j_max; ++j)
            t.cells[{j, ws[k]}] = per[k][static_cast<std::size_t>(j)];
    return t;
}

RealizedH0 realize_h0(const SpacePtr& module, const std::vector<Poly>& gens, int i, const EngineOptions& opt,
                      bool corrupt)
{
    RealizedH0 out;
    const Field& k = module->field();
    try {
        WeightEngine eng(module, gens, i, corrupt);
        const int m0 = first_stage(weights_of(module->ring(), gens), i);
        auto g = stabilize(m0, opt.budget, opt.span, [&](int m, int m2) { return eng.rank_into(m, m2, 0, true); });
        auto w = stabilize(m0, opt.budget, opt.span, [&](int m, int m2) { return eng.rank_into(m, m2, 1, false); });
        if (!g.value || !w.value) {
            out.note = !g.value ? "torsion: " + g.note : "H0 model: " + w.note;
            return out;
        }
        out.torsion = eng.cocycles(g.stage, 0);
        const int m1 = w.stage + opt.span;
        const int m2 = m1 + opt.span;
        out.stage = m1;

        EchelonBasis wb(eng.slice(m1).dim(1), k);
        const Matrix& t1 = eng.transition(w.stage, m1, 1);
        for (const auto& z : eng.cocycles(w.stage, 1))
            wb.insert(t1.apply(z));
        out.h0_dim = wb.rank();

        const std::size_t n = module->dim(i);
        Matrix d0 = eng.slice(m1).d(0);
        std::vector<SparseVec> cols;
        for (std::size_t c = 0; c < n; ++c) {
            std::vector<Scalar> coeffs;
            SparseVec rest = wb.reduce_tracking(d0.column(c), coeffs);
            if (!rest.empty()) {
                out.note = fmt::format("d0 of basis vector {} leaves the H0 model", c);
                return out;
            }
            cols.push_back(SparseVec::from_dense(coeffs));
        }
        out.eta = Matrix::from_columns(out.h0_dim, std::move(cols), k);

        // δ : W -> H^1(K_m2); W's rows pushed forward modulo coboundaries
        const Matrix& t2 = eng.transition(m1, m2, 1);
        EchelonBasis b = eng.boundaries(m2, 1);
        for (const auto& row : wb.rows())
            if (b.insert(t2.apply(row)))
                ++out.delta_rank;
        const EchelonBasis& b2 = eng.boundaries(m2, 1);
        for (std::size_t c = 0; c < n; ++c) {
            SparseVec x;
            const auto& col = out.eta.column(c);
            for (const auto& e : col.entries())
                x.axpy(e.value, t2.apply(wb.rows()[e.index]));
            if (!b2.contains(x))
                out.delta_eta_zero = false;
        }
        out.stable = true;
    } catch (const WindowError& e) {
        out.note = e.what();
    } catch (const LocalFinitenessError& e) {
        out.note = e.what();
    }
    return out;
}

CechResult cech_table(const SpacePtr& module, const std::vector<Poly>& gens, int i_min, int i_max,
                      const EngineOptions& opt, const CohomologyTable* rgamma)
{
    CohomologyTable own;
    if (!rgamma) {
        own = local_cohomology_table(module, gens, i_min, i_max, opt);
        rgamma = &own;
    }
    CechResult res;
    auto& t = res.table;
    t.backend = "koszul-colimit";
    t.complex = "Cech";
    t.i_min = i_min;
    t.i_max = i_max;
    t.j_min = 0;
    t.j_max = static_cast<int>(gens.size()) - 1;
    const auto ws = weights_in(i_min, i_max);
    std::vector<RealizedH0> realized(ws.size());
    parallel_for(ws.size(), opt.jobs, [&](std::size_t k) { realized[k] = realize_h0(module, gens, ws[k], opt); });
    for (std::size_t k = 0; k < ws.size(); ++k) {
        const int i = ws[k];
        for (int j = 1; j <= t.j_max; ++j)
            t.cells[{j, i}] = rgamma->at(j + 1, i);
        Cell c0;
        const Cell& h0 = rgamma->at(0, i);
        const Cell& h1 = rgamma->at(1, i);
        c0.stage = std::max(h0.stage, h1.stage);
        std::size_t mdim = 0;
        try {
            mdim = module->dim(i);
        } catch (const WindowError& e) {
            c0.note = e.what();
        }
        if (c0.note.empty() && h0.dim && h1.dim) {
            c0.dim = mdim - *h0.dim + *h1.dim;
            if (realized[k].stable && realized[k].h0_dim != *c0.dim)
                c0.note = fmt::format("realized model has dimension {}", realized[k].h0_dim);
        } else if (c0.note.empty()) {
            c0.note = "H0 or H1 of RGamma inconclusive";
        }
        t.cells[{0, i}] = c0;
        res.realized.emplace(i, std::move(realized[k]));
    }
    return res;
}

// ---------------------------------------------------------- truncated Čech

namespace {

class TruncatedCech {
public:
    TruncatedCech(SpacePtr module, std::vector<Poly> gens, const EngineOptions& opt)
        : module_(std::move(module)), gens_(std::move(gens))
    {
        degs_ = weights_of(module_->ring(), gens_);
        const int r = static_cast<int>(gens_.size());
        for (int q = 1; q <= r; ++q)
            for (const auto& s : subsets_of_size(r, q))
                quot_.emplace(s, std::make_shared<const TorsionQuotient>(
                                     module_, product(module_->ring(), gens_, s), opt.budget, opt.span));
    }

    // subsets in degree order: (|S| ascending, lexicographic)
    std::vector<std::vector<int>> subsets(int q) const { return subsets_of_size(static_cast<int>(gens_.size()), q); }

    std::size_t comp_dim(const std::vector<int>& s, int i, int trunc) const
    {
        if (s.empty())
            return module_->dim(i);
        return quot_.at(s)->dim(i + trunc * degree_sum(degs_, s));
    }

    // multiply component S (at weight i + trunc*d_S) by g, landing in component U
    Matrix comp_map(const std::vector<int>& s, int w, const Poly& g, const std::vector<int>& u) const
    {
        const TorsionQuotient* src = s.empty() ? nullptr : quot_.at(s).get();
        return quotient_map(*module_, src, w, g, *quot_.at(u));
    }

    SliceComplex slice(int i, int trunc, bool extended) const
    {
        const int r = static_cast<int>(gens_.size());
        const int q0 = extended ? 0 : 1;
        const int shift = extended ? 0 : 1;
        const Field& k = module_->field();
        std::vector<std::size_t> dims;
        std::vector<std::vector<std::size_t>> offsets;
        for (int q = q0; q <= r; ++q) {
            std::vector<std::size_t> off;
            std::size_t n = 0;
            for (const auto& s : subsets(q)) {
                off.push_back(n);
                n += comp_dim(s, i, trunc);
            }
            offsets.push_back(std::move(off));
            dims.push_back(n);
        }
        std::vector<Poly> powers;
        for (const auto& f : gens_)
            powers.push_back(f.pow(static_cast<unsigned>(trunc)));
        std::vector<Matrix> diffs;
        for (int q = q0; q < r; ++q) {
            const auto src = subsets(q);
            const auto tgt = subsets(q + 1);
            const std::size_t qa = static_cast<std::size_t>(q - q0);
            std::vector<Block> blocks;
            for (std::size_t a = 0; a < src.size(); ++a) {
                const int w = i + trunc * degree_sum(degs_, src[a]);
                for (int t = 0; t < r; ++t) {
                    if (contains(src[a], t))
                        continue;
                    auto u = with(src[a], t);
                    std::size_t b = static_cast<std::size_t>(std::find(tgt.begin(), tgt.end(), u) - tgt.begin());
                    Matrix mm = comp_map(src[a], w, powers[static_cast<std::size_t>(t)], u);
                    if (sign_before(src[a], t) < 0)
                        mm = -mm;
                    blocks.push_back({offsets[qa + 1][b], offsets[qa][a], std::move(mm)});
                }
            }
            diffs.push_back(block_matrix(dims[qa + 1], dims[qa], blocks, k));
        }
        return build_slice(i, q0 - shift, std::move(dims), std::move(diffs), k);
    }

    // inclusion of the trunc model into the trunc+1 model in Čech degree q
    Matrix inclusion(int i, int trunc, int q) const
    {
        std::vector<Block> blocks;
        std::size_t rows = 0, cols = 0;
        for (const auto& s : subsets(q)) {
            Matrix mm = s.empty() ? Matrix::identity(module_->dim(i), module_->field())
                                  : comp_map(s, i + trunc * degree_sum(degs_, s), product(module_->ring(), gens_, s), s);
            const std::size_t nr = mm.rows(), nc = mm.cols();
            blocks.push_back({rows, cols, std::move(mm)});
            rows += nr;
            cols += nc;
        }
        return block_matrix(rows, cols, blocks, module_->field());
    }

    std::vector<OracleResult> all(int i, int trunc, bool extended) const
    {
        const int r = static_cast<int>(gens_.size());
        const int q0 = extended ? 0 : 1;
        const int shift = extended ? 0 : 1;
        SliceComplex a = slice(i, trunc, extended);
        SliceComplex b = slice(i, trunc + 1, extended);
        std::vector<OracleResult> out;
        for (int q = q0; q <= r; ++q) {
            const int j = q - shift;
            OracleResult o;
            o.trunc = trunc;
            o.dim_at_trunc = cohomology_dim(a, j);
            o.dim_at_next = cohomology_dim(b, j);
            o.transition_rank = induced_rank(a, b, inclusion(i, trunc, q), j);
            if (o.dim_at_trunc == o.dim_at_next && o.dim_at_next == o.transition_rank)
                o.dim = o.dim_at_trunc;
            else
                o.note = fmt::format("not stable at trunc {}: {} -> {} (rank {})", trunc, o.dim_at_trunc,
                                     o.dim_at_next, o.transition_rank);
            out.push_back(std::move(o));
        }
        return out;
    }

private:
    SpacePtr module_;
    std::vector<Poly> gens_;
    std::vector<int> degs_;
    std::map<std::vector<int>, std::shared_ptr<const TorsionQuotient>> quot_;
};

std::vector<OracleResult> oracle_all(const SpacePtr& module, const std::vector<Poly>& gens, int i, int trunc,
                                     bool extended, const EngineOptions& opt)
{
    const int count = static_cast<int>(gens.size()) + (extended ? 1 : 0);
    try {
        TruncatedCech tc(module, gens, opt);
        return tc.all(i, trunc, extended);
    } catch (const Error& e) {
        if (!dynamic_cast<const StabilizationError*>(&e) && !dynamic_cast<const WindowError*>(&e) &&
            !dynamic_cast<const LocalFinitenessError*>(&e))
            throw;
        std::vector<OracleResult> out(static_cast<std::size_t>(count));
        for (auto& o : out) {
            o.trunc = trunc;
            o.note = e.what();
        }
        return out;
    }
}

}  // namespace

SliceComplex truncated_cech_slice(const SpacePtr& module, const std::vector<Poly>& gens, int i, int trunc,
                                  bool extended, const EngineOptions& opt)
{
    if (trunc < 1)
        throw ArgumentError("truncation must be at least 1");
    return TruncatedCech(module, gens, opt).slice(i, trunc, extended);
}

std::vector<OracleResult> cech_truncated_oracle_all(const SpacePtr& module, const std::vector<Poly>& gens, int i,
                                                    int trunc, bool extended, const EngineOptions& opt)
{
    if (trunc < 1)
        throw ArgumentError("truncation must be at least 1");
    return oracle_all(module, gens, i, trunc, extended, opt);
}

OracleResult cech_truncated_oracle(const SpacePtr& module, const std::vector<Poly>& gens, int j, int i, int trunc,
                                   bool extended, const EngineOptions& opt)
{
    if (trunc < 1)
        throw ArgumentError("truncation must be at least 1");
    const int lo = 0;
    const int hi = static_cast<int>(gens.size()) - (extended ? 0 : 1);
    if (j < lo || j > hi) {
        OracleResult o;
        o.dim = 0;
        o.trunc = trunc;
        return o;
    }
    return oracle_all(module, gens, i, trunc, extended, opt)[static_cast<std::size_t>(j)];
}

CohomologyTable cech_truncated_table(const SpacePtr& module, const std::vector<Poly>& gens, int i_min, int i_max,
                                     bool extended, const EngineOptions& opt)
{
    CohomologyTable t;
    t.backend = "cech-truncated";
    t.complex = extended ? "RGamma" : "Cech";
    t.i_min = i_min;
    t.i_max = i_max;
    t.j_min = 0;
    t.j_max = static_cast<int>(gens.size()) - (extended ? 0 : 1);
    const auto ws = weights_in(i_min, i_max);
    std::vector<std::vector<OracleResult>> per(ws.size());
    parallel_for(ws.size(), opt.jobs, [&](std::size_t k) {
        per[k] = oracle_all(module, gens, ws[k], opt.trunc + std::abs(ws[k]), extended, opt);
    });
    for (std::size_t k = 0; k < ws.size(); ++k)
        for (int j = 0; j <= t.j_max; ++j) {
            const auto& o = per[k][static_cast<std::size_t>(j)];
            t.cells[{j, ws[k]}] = Cell{o.dim, o.trunc, o.note};
        }
    return t;
}

// ---------------------------------------------------------------- saturation

SaturationModel::SaturationModel(SpacePtr module, std::vector<Poly> gens, int trunc, int budget, int span)
    : GradedSpace(module->ring_ptr()), module_(std::move(module)), gens_(std::move(gens)), trunc_(trunc)
{
    if (trunc < 1)
        throw ArgumentError("truncation must be at least 1");
    degs_ = weights_of(ring(), gens_);
    const int r = static_cast<int>(gens_.size());
    for (int s = 0; s < r; ++s)
        single_.push_back(std::make_shared<const TorsionQuotient>(module_, gens_[static_cast<std::size_t>(s)], budget,
                                                                  span));
    for (int s = 0; s < r; ++s)
        for (int t = s + 1; t < r; ++t)
            pair_.emplace(std::make_pair(s, t),
                          std::make_shared<const TorsionQuotient>(
                              module_, gens_[static_cast<std::size_t>(s)] * gens_[static_cast<std::size_t>(t)],
                              budget, span));
}

const SaturationModel::Piece& SaturationModel::piece(int i) const
{
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(i);
        if (it != cache_.end())
            return *it->second;
    }
    const int r = static_cast<int>(gens_.size());
    auto p = std::make_shared<Piece>();
    for (int s = 0; s < r; ++s) {
        p->offsets.push_back(p->ambient);
        p->ambient += single_[static_cast<std::size_t>(s)]->dim(i + trunc_ * degs_[static_cast<std::size_t>(s)]);
    }
    std::vector<Block> blocks;
    std::size_t rows = 0;
    for (int s = 0; s < r; ++s)
        for (int t = s + 1; t < r; ++t) {
            const auto& q = *pair_.at({s, t});
            const auto us = static_cast<std::size_t>(s), ut = static_cast<std::size_t>(t);
            // (s,t) component: μ_t f_s^T - μ_s f_t^T
            Matrix from_t = quotient_map(*module_, single_[ut].get(), i + trunc_ * degs_[ut],
                                         gens_[us].pow(static_cast<unsigned>(trunc_)), q);
            Matrix from_s = quotient_map(*module_, single_[us].get(), i + trunc_ * degs_[us],
                                         gens_[ut].pow(static_cast<unsigned>(trunc_)), q);
            const std::size_t nr = from_t.rows();
            blocks.push_back({rows, p->offsets[ut], std::move(from_t)});
            blocks.push_back({rows, p->offsets[us], -from_s});
            rows += nr;
        }
    Matrix d = block_matrix(rows, p->ambient, blocks, field());
    p->basis = rank_kernel(d).kernel;
    std::lock_guard<std::mutex> lock(mu_);
    return *cache_.emplace(i, std::move(p)).first->second;
}

SparseVec SaturationModel::coordinates(const Piece& p, const SparseVec& v) const
{
    SparseVec out;
    for (std::size_t k = 0; k < p.basis.size(); ++k) {
        Scalar c = v.get(p.basis[k].entries().back().index);
        if (!c.is_zero())
            out.push_back(k, c);
    }
    return out;
}

std::size_t SaturationModel::dim(int i) const { return piece(i).basis.size(); }

Matrix SaturationModel::mult(const Poly& g, int i) const
{
    const int e = ring().weight_of(g);
    const Piece& src = piece(i);
    const Piece& tgt = piece(i + e);
    const int r = static_cast<int>(gens_.size());
    std::vector<Matrix> comps;
    for (int s = 0; s < r; ++s)
        comps.push_back(single_[static_cast<std::size_t>(s)]->mult(g, i + trunc_ * degs_[static_cast<std::size_t>(s)]));
    std::vector<SparseVec> cols;
    for (const auto& b : src.basis) {
        SparseVec img;
        for (int s = 0; s < r; ++s) {
            const auto us = static_cast<std::size_t>(s);
            SparseVec part = comps[us].apply(slice_of(b, src.offsets[us], comps[us].cols()));
            img.axpy(Scalar::one(field()), shifted(part, tgt.offsets[us]));
        }
        cols.push_back(coordinates(tgt, img));
    }
    return Matrix::from_columns(tgt.basis.size(), std::move(cols), field());
}

Matrix SaturationModel::unit(int i) const
{
    const Piece& p = piece(i);
    const int r = static_cast<int>(gens_.size());
    std::vector<Matrix> comps;
    for (int s = 0; s < r; ++s)
        comps.push_back(quotient_map(*module_, nullptr, i, gens_[static_cast<std::size_t>(s)].pow(
                                                               static_cast<unsigned>(trunc_)),
                                     *single_[static_cast<std::size_t>(s)]));
    std::vector<SparseVec> cols;
    for (std::size_t c = 0; c < module_->dim(i); ++c) {
        SparseVec img;
        for (int s = 0; s < r; ++s) {
            const auto us = static_cast<std::size_t>(s);
            img.axpy(Scalar::one(field()), shifted(comps[us].column(c), p.offsets[us]));
        }
        cols.push_back(coordinates(p, img));
    }
    return Matrix::from_columns(p.basis.size(), std::move(cols), field());
}

bool SaturationReport::complete() const
{
    return std::all_of(rows.begin(), rows.end(), [](const SaturationRow& r) { return r.sat_dim.has_value(); });
}

SaturationReport saturate(const SpacePtr& module, const std::vector<Poly>& gens, int i_min, int i_max,
                          const EngineOptions& opt)
{
    const int trunc = opt.trunc + std::max(std::abs(i_min), std::abs(i_max));
    auto model = std::make_shared<const SaturationModel>(module, gens, trunc, opt.budget, opt.span);
    auto rgamma = local_cohomology_table(module, gens, i_min, i_max, opt);
    auto cech = cech_table(module, gens, i_min, i_max, opt, &rgamma);
    SaturationReport rep;
    const auto ws = weights_in(i_min, i_max);
    rep.rows.resize(ws.size());
    parallel_for(ws.size(), opt.jobs, [&](std::size_t k) {
        SaturationRow& row = rep.rows[k];
        row.weight = ws[k];
        try {
            row.module_dim = module->dim(ws[k]);
            row.sat_dim = model->dim(ws[k]);
            row.unit = model->unit(ws[k]);
            const std::size_t rk = rank(row.unit);
            row.kernel_dim = row.module_dim - rk;
            row.cokernel_dim = *row.sat_dim - rk;
            const auto& c0 = cech.table.at(0, ws[k]);
            row.agrees_with_cech = c0.dim && *c0.dim == *row.sat_dim;
            if (!c0.dim)
                row.note = "Cech H0 inconclusive";
        } catch (const StabilizationError& e) {
            row.sat_dim.reset();
            row.note = e.what();
        } catch (const WindowError& e) {
            row.sat_dim.reset();
            row.note = e.what();
        }
    });
    return rep;
}

// ---------------------------------------------------------------- triangle

bool TriangleReport::pass() const
{
    return std::all_of(rows.begin(), rows.end(), [](const TriangleRow& r) { return r.pass; });
}

std::optional<int> TriangleReport::first_failure() const
{
    for (const auto& r : rows)
        if (!r.pass && !r.inconclusive)
            return r.weight;
    return std::nullopt;
}

TriangleReport triangle_check(const SpacePtr& module, const std::vector<Poly>& gens, int i_min, int i_max,
                              const EngineOptions& opt, std::optional<int> corrupt_weight)
{
    auto rgamma = local_cohomology_table(module, gens, i_min, i_max, opt);
    TriangleReport rep;
    const auto ws = weights_in(i_min, i_max);
    rep.rows.resize(ws.size());
    parallel_for(ws.size(), opt.jobs, [&](std::size_t k) {
        const int i = ws[k];
        TriangleRow& row = rep.rows[k];
        row.weight = i;
        const auto h0 = rgamma.dim(0, i);
        const auto h1 = rgamma.dim(1, i);
        RealizedH0 re = realize_h0(module, gens, i, opt, corrupt_weight && *corrupt_weight == i);
        if (!h0 || !h1 || !re.stable) {
            row.inconclusive = true;
            row.detail = !re.stable ? re.note : "RGamma cell inconclusive";
            return;
        }
        const std::size_t mdim = module->dim(i);
        const std::size_t eta_rank = rank(re.eta);
        std::vector<std::string> bad;
        if (re.torsion.size() != *h0)
            bad.push_back(fmt::format("Gamma has dim {} but H0(RGamma) = {}", re.torsion.size(), *h0));
        if (eta_rank + *h0 != mdim)
            bad.push_back(fmt::format("M -> H0(Cech) has rank {} but dim M - h0 = {}", eta_rank, mdim - *h0));
        if (re.h0_dim != eta_rank + re.delta_rank)
            bad.push_back(fmt::format("not exact at H0(Cech): {} != {} + {}", re.h0_dim, eta_rank, re.delta_rank));
        if (re.delta_rank != *h1)
            bad.push_back(fmt::format("H0(Cech) -> H1(RGamma) has rank {} but h1 = {}", re.delta_rank, *h1));
        if (!re.delta_eta_zero)
            bad.push_back("composite M -> H1(RGamma) is nonzero");
        if (re.h0_dim != mdim - *h0 + *h1)
            bad.push_back(fmt::format("H0(Cech) model has dim {}, four-term count gives {}", re.h0_dim,
                                      mdim - *h0 + *h1));
        row.pass = bad.empty();
        for (const auto& b : bad)
            row.detail += (row.detail.empty() ? "" : "; ") + b;
    });
    return rep;
}

// ---------------------------------------------------------------- vanishing

VanishingBounds vanishing_bounds(const ModulePtr& module, int i_min, int i_max, const EngineOptions& opt)
{
    VanishingBounds out;
    const auto& ring = module->ring();
    // weights whose RGamma cells are nonzero or inconclusive
    auto support = [&](int sign) {
        std::vector<int> live;
        try {
            auto gens = ring.positive_generators(sign);
            auto t = local_cohomology_table(module, gens.gens, i_min, i_max, opt);
            for (int i = i_min; i <= i_max; ++i)
                for (int j = t.j_min; j <= t.j_max; ++j) {
                    auto d = t.dim(j, i);
                    if (!d || *d != 0) {
                        live.push_back(i);
                        break;
                    }
                }
        } catch (const DegenerateGradingError&) {
            // the ideal is zero, so RGamma(M) = M
            for (int i = i_min; i <= i_max; ++i)
                if (module->dim(i) != 0)
                    live.push_back(i);
        }
        return live;
    };
    auto plus = support(1);
    if (plus.empty())
        out.c_plus = i_min - 1;
    else if (plus.back() == i_max)
        out.note_plus = "NotFoundInWindow";
    else
        out.c_plus = plus.back();
    auto minus = support(-1);
    if (minus.empty())
        out.c_minus = i_max + 1;
    else if (minus.front() == i_min)
        out.note_minus = "NotFoundInWindow";
    else
        out.c_minus = minus.front();
    return out;
}

}  // namespace ggm
