#include "ggm/module.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "ggm/error.hpp"

namespace ggm {

// ---------------------------------------------------------------- GradedModule

GradedModule::GradedModule(RingPtr ring, std::vector<int> twists, std::vector<Column> relations, std::string name)
    : GradedSpace(std::move(ring)), twists_(std::move(twists)), name_(std::move(name))
{
    const auto& r = this->ring();
    for (std::size_t c = 0; c < relations.size(); ++c) {
        auto& col = relations[c];
        if (col.size() != twists_.size())
            throw ArgumentError(fmt::format("relation column {} has {} entries for {} generators", c, col.size(),
                                            twists_.size()));
        std::optional<int> degree;
        for (std::size_t t = 0; t < col.size(); ++t) {
            if (col[t].is_zero())
                continue;
            auto w = col[t].weight(r.weights());
            if (!w)
                throw HomogeneityError(fmt::format("relation column {}, generator {}: entry {} is not homogeneous", c,
                                                   t, col[t].to_string(r.vars())));
            int e = *w + twists_[t];
            if (degree && *degree != e)
                throw HomogeneityError(fmt::format(
                    "relation column {} mixes weights: generator {} contributes weight {} but an earlier entry has {}",
                    c, t, e, *degree));
            degree = e;
        }
        if (!degree)
            continue;  // zero column
        relations_.push_back(col);
        column_degree_.push_back(*degree);
    }
}

ModulePtr GradedModule::build(RingPtr ring, std::vector<int> twists, std::vector<Column> relations, std::string name)
{
    return std::make_shared<const GradedModule>(std::move(ring), std::move(twists), std::move(relations),
                                                std::move(name));
}

ModulePtr GradedModule::parse(RingPtr ring, std::vector<int> twists,
                              const std::vector<std::vector<std::string>>& relations, std::string name)
{
    std::vector<Column> cols;
    for (const auto& rc : relations) {
        Column col;
        for (const auto& s : rc)
            col.push_back(ring->parse(s));
        cols.push_back(std::move(col));
    }
    return build(std::move(ring), std::move(twists), std::move(cols), std::move(name));
}

ModulePtr GradedModule::free(RingPtr ring, std::vector<int> twists, std::string name)
{
    return build(std::move(ring), std::move(twists), {}, std::move(name));
}

const WeightPiece& GradedModule::weight_piece(int i) const
{
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->pieces.find(i);
        if (it != cache_->pieces.end())
            return *it->second;
    }
    const auto& r = ring();
    auto p = std::make_shared<WeightPiece>();
    p->weight = i;
    for (int a : twists_) {
        p->offsets.push_back(p->free_dim);
        p->free_dim += r.dim(i - a);
    }
    p->relations = EchelonBasis(p->free_dim, field());
    for (std::size_t c = 0; c < relations_.size(); ++c) {
        const int e = column_degree_[c];
        for (const auto& mu : r.weight_basis(i - e)) {
            SparseVec v;
            for (std::size_t t = 0; t < twists_.size(); ++t) {
                if (relations_[c][t].is_zero())
                    continue;
                SparseVec part = r.coords(relations_[c][t].times_term(mu, Scalar::one(field())), i - twists_[t]);
                for (const auto& en : part.entries())
                    v.push_back(p->offsets[t] + en.index, en.value);
            }
            p->relations.insert(std::move(v));
        }
    }
    p->position.assign(p->free_dim, -1);
    std::vector<bool> pivot(p->free_dim, false);
    for (auto q : p->relations.pivots())
        pivot[q] = true;
    for (std::size_t c = 0; c < p->free_dim; ++c) {
        if (pivot[c])
            continue;
        p->position[c] = static_cast<std::int32_t>(p->basis.size());
        p->basis.push_back(static_cast<std::uint32_t>(c));
    }
    p->dim = p->basis.size();
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto [it, inserted] = cache_->pieces.emplace(i, std::move(p));
    return *it->second;
}

SparseVec GradedModule::project(const SparseVec& free_vec, int i) const
{
    const auto& p = weight_piece(i);
    SparseVec r = p.relations.reduce(free_vec);
    SparseVec out;
    for (const auto& e : r.entries())
        out.push_back(static_cast<std::size_t>(p.position[e.index]), e.value);
    return out;
}

int GradedModule::element_weight(const Column& x) const
{
    if (x.size() != twists_.size())
        throw MembershipError(fmt::format("element has {} coordinates, module has {} generators", x.size(),
                                          twists_.size()));
    std::optional<int> w;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (x[t].is_zero())
            continue;
        auto pw = x[t].weight(ring().weights());
        if (!pw || (w && *w != *pw + twists_[t]))
            throw MembershipError("element is not homogeneous");
        w = *pw + twists_[t];
    }
    if (!w)
        throw MembershipError("the zero element has no weight");
    return *w;
}

SparseVec GradedModule::free_coords(const Column& x, int i) const
{
    if (x.size() != twists_.size())
        throw MembershipError(fmt::format("element has {} coordinates, module has {} generators", x.size(),
                                          twists_.size()));
    const auto& p = weight_piece(i);
    SparseVec v;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (x[t].is_zero())
            continue;
        SparseVec part;
        try {
            part = ring().coords(x[t], i - twists_[t]);
        } catch (const HomogeneityError& e) {
            throw MembershipError(fmt::format("coordinate {} does not lie in weight {}: {}", t, i, e.what()));
        }
        for (const auto& en : part.entries())
            v.push_back(p.offsets[t] + en.index, en.value);
    }
    return v;
}

SparseVec GradedModule::coords(const Column& x, int i) const { return project(free_coords(x, i), i); }

std::string GradedModule::basis_label(int i, std::size_t k) const
{
    const auto& p = weight_piece(i);
    std::uint32_t c = p.basis.at(k);
    std::size_t t = static_cast<std::size_t>(std::upper_bound(p.offsets.begin(), p.offsets.end(), c) -
                                             p.offsets.begin()) -
                    1;
    const auto& mu = ring().weight_basis(i - twists_[t])[c - p.offsets[t]];
    return fmt::format("{} e{}", mono_to_string(mu, ring().vars()), t);
}

Matrix GradedModule::mult(const Poly& f, int i) const
{
    const auto& r = ring();
    const std::pair<std::string, int> key{f.to_string(r.vars()), i};
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->mults.find(key);
        if (it != cache_->mults.end())
            return *it->second;
    }
    const int e = r.weight_of(f);
    const auto& src = weight_piece(i);
    const auto& tgt = weight_piece(i + e);
    auto m = std::make_shared<Matrix>(tgt.dim, src.dim, field());
    std::size_t t = 0;
    for (std::size_t k = 0; k < src.dim; ++k) {
        const std::uint32_t c = src.basis[k];
        while (t + 1 < src.offsets.size() && src.offsets[t + 1] <= c)
            ++t;
        const auto& mu = r.weight_basis(i - twists_[t])[c - src.offsets[t]];
        SparseVec part = r.coords(f.times_term(mu, Scalar::one(field())), i + e - twists_[t]);
        SparseVec v;
        for (const auto& en : part.entries())
            v.push_back(tgt.offsets[t] + en.index, en.value);
        m->set_column(k, project(v, i + e));
    }
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->mults.emplace(key, m);
    return *m;
}

ModulePtr GradedModule::twist(int n) const
{
    std::vector<int> tw = twists_;
    for (auto& a : tw)
        a -= n;
    std::string nm = n == 0 ? name_ : fmt::format("{}({})", name_, n);
    return build(ring_ptr(), std::move(tw), relations_, nm);
}

// ---------------------------------------------------------------- ModuleMap

ModuleMap::ModuleMap(ModulePtr source, ModulePtr target, std::vector<GradedModule::Column> images)
    : src_(std::move(source)), tgt_(std::move(target)), images_(std::move(images))
{
    if (images_.size() != src_->generators())
        throw ArgumentError(fmt::format("map gives {} images for {} source generators", images_.size(),
                                        src_->generators()));
    for (std::size_t t = 0; t < images_.size(); ++t) {
        if (images_[t].size() != tgt_->generators())
            throw ArgumentError(fmt::format("image of generator {} has {} entries, target has {} generators", t,
                                            images_[t].size(), tgt_->generators()));
        for (std::size_t u = 0; u < images_[t].size(); ++u) {
            if (images_[t][u].is_zero())
                continue;
            auto w = images_[t][u].weight(src_->ring().weights());
            if (!w || *w + tgt_->twists()[u] != src_->twists()[t])
                throw HomogeneityError(
                    fmt::format("image of generator {} is not homogeneous of weight {}", t, src_->twists()[t]));
        }
    }
}

std::shared_ptr<const ModuleMap> ModuleMap::identity(ModulePtr m)
{
    std::vector<GradedModule::Column> images;
    for (std::size_t t = 0; t < m->generators(); ++t) {
        GradedModule::Column col(m->generators(), Poly(m->ring().nvars(), m->field()));
        col[t] = m->ring().one();
        images.push_back(std::move(col));
    }
    return std::make_shared<const ModuleMap>(m, m, std::move(images));
}

Matrix ModuleMap::at(int i) const
{
    const auto& r = src_->ring();
    const auto& src = src_->weight_piece(i);
    const std::size_t nt = tgt_->generators();
    auto image_of = [&](const GradedModule::Column& x) {
        GradedModule::Column y(nt, Poly(r.nvars(), r.field()));
        for (std::size_t t = 0; t < x.size(); ++t)
            if (!x[t].is_zero())
                for (std::size_t u = 0; u < nt; ++u)
                    if (!images_[t][u].is_zero())
                        y[u] = y[u] + x[t] * images_[t][u];
        return tgt_->coords(y, i);
    };
    // relations must map into relations
    for (const auto& col : src_->relations()) {
        std::optional<int> e;
        for (std::size_t t = 0; t < col.size() && !e; ++t)
            if (!col[t].is_zero())
                e = *col[t].weight(r.weights()) + src_->twists()[t];
        for (const auto& mu : r.weight_basis(i - *e)) {
            GradedModule::Column x;
            for (const auto& p : col)
                x.push_back(p.times_term(mu, Scalar::one(r.field())));
            if (!image_of(x).empty())
                throw ArgumentError(fmt::format("module map is not well defined at weight {}", i));
        }
    }
    Matrix m(tgt_->dim(i), src.dim, r.field());
    std::size_t t = 0;
    for (std::size_t k = 0; k < src.dim; ++k) {
        const std::uint32_t c = src.basis[k];
        while (t + 1 < src.offsets.size() && src.offsets[t + 1] <= c)
            ++t;
        const auto& mu = r.weight_basis(i - src_->twists()[t])[c - src.offsets[t]];
        GradedModule::Column x(src_->generators(), Poly(r.nvars(), r.field()));
        x[t] = Poly::monomial(mu, Scalar::one(r.field()), r.field());
        m.set_column(k, image_of(x));
    }
    return m;
}

// ---------------------------------------------------------------- kernels and cokernels

KernelSpace::KernelSpace(MapPtr phi) : GradedSpace(phi->source().ring_ptr()), phi_(std::move(phi)) {}

const std::vector<SparseVec>& KernelSpace::basis(int i) const
{
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(i);
        if (it != cache_.end())
            return *it->second;
    }
    auto b = std::make_shared<const std::vector<SparseVec>>(rank_kernel(phi_->at(i)).kernel);
    std::lock_guard<std::mutex> lock(mu_);
    return *cache_.emplace(i, std::move(b)).first->second;
}

std::size_t KernelSpace::dim(int i) const { return basis(i).size(); }

Matrix KernelSpace::mult(const Poly& f, int i) const
{
    const int e = ring().weight_of(f);
    const auto& src = basis(i);
    const auto& tgt = basis(i + e);
    Matrix m = phi_->source().mult(f, i);
    Matrix out(tgt.size(), src.size(), field());
    for (std::size_t k = 0; k < src.size(); ++k) {
        SparseVec w = m.apply(src[k]);
        SparseVec c;
        for (std::size_t q = 0; q < tgt.size(); ++q) {
            // the free column of a null-space normal form vector is its last entry
            Scalar v = w.get(tgt[q].entries().back().index);
            if (!v.is_zero())
                c.push_back(q, v);
        }
        out.set_column(k, std::move(c));
    }
    return out;
}

CokernelSpace::CokernelSpace(MapPtr phi) : GradedSpace(phi->target().ring_ptr()), phi_(std::move(phi)) {}

const CokernelSpace::Piece& CokernelSpace::piece(int i) const
{
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(i);
        if (it != cache_.end())
            return *it->second;
    }
    auto p = std::make_shared<Piece>();
    Matrix m = phi_->at(i);
    p->image = column_space(m);
    p->position.assign(m.rows(), -1);
    std::vector<bool> pivot(m.rows(), false);
    for (auto q : p->image.pivots())
        pivot[q] = true;
    for (std::size_t c = 0; c < m.rows(); ++c) {
        if (pivot[c])
            continue;
        p->position[c] = static_cast<std::int32_t>(p->basis.size());
        p->basis.push_back(static_cast<std::uint32_t>(c));
    }
    std::lock_guard<std::mutex> lock(mu_);
    return *cache_.emplace(i, std::move(p)).first->second;
}

std::size_t CokernelSpace::dim(int i) const { return piece(i).basis.size(); }

SparseVec CokernelSpace::project(const SparseVec& v, int i) const
{
    const auto& p = piece(i);
    SparseVec r = p.image.reduce(v);
    SparseVec out;
    for (const auto& e : r.entries())
        out.push_back(static_cast<std::size_t>(p.position[e.index]), e.value);
    return out;
}

SparseVec CokernelSpace::lift(std::size_t k, int i) const { return SparseVec::unit(piece(i).basis.at(k), field()); }

Matrix CokernelSpace::mult(const Poly& f, int i) const
{
    const int e = ring().weight_of(f);
    const std::size_t n = dim(i);
    Matrix m = phi_->target().mult(f, i);
    Matrix out(dim(i + e), n, field());
    for (std::size_t k = 0; k < n; ++k)
        out.set_column(k, project(m.apply(lift(k, i)), i + e));
    return out;
}

// ---------------------------------------------------------------- torsion tests

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Torsion:
        return "Torsion";
    case Verdict::NotTorsion:
        return "NotTorsionWitness";
    case Verdict::Inconclusive:
        return "Inconclusive";
    }
    return "?";
}

namespace {

TorsionVerdict combine(TorsionVerdict acc, const TorsionVerdict& next)
{
    if (acc.verdict == Verdict::NotTorsion)
        return acc;
    if (next.verdict == Verdict::NotTorsion || next.verdict == Verdict::Inconclusive)
        return next;
    acc.steps = std::max(acc.steps, next.steps);
    return acc;
}

bool stationary(const std::vector<std::size_t>& dims, int span)
{
    if (static_cast<int>(dims.size()) < span + 1)
        return false;
    for (int k = 1; k <= span; ++k)
        if (dims[dims.size() - 1 - k] != dims.back())
            return false;
    return true;
}

// Shared driver: `step(n, eb)` inserts the rows of the level-n annihilating
// maps into eb and returns whether x is killed at level n.
template <class Step>
TorsionVerdict kernel_chain(const GradedSpace& v, int i, const TorsionOptions& opt, const std::string& what,
                            Step step)
{
    TorsionVerdict out;
    std::vector<std::size_t> kdims;
    try {
        const std::size_t n0 = v.dim(i);
        for (int n = 1; n <= opt.budget; ++n) {
            EchelonBasis rows(n0, v.field());
            bool killed = step(n, rows);
            out.steps = n;
            if (killed) {
                out.verdict = Verdict::Torsion;
                return out;
            }
            kdims.push_back(n0 - rows.rank());
            if (stationary(kdims, opt.span)) {
                out.verdict = Verdict::NotTorsion;
                out.witness = what;
                return out;
            }
        }
        out.note = fmt::format("kernel chain not stationary within {} steps", opt.budget);
    } catch (const WindowError& e) {
        out.note = e.what();
    }
    out.verdict = Verdict::Inconclusive;
    return out;
}

void insert_rows(EchelonBasis& eb, const Matrix& m)
{
    for (auto& r : m.row_vectors())
        eb.insert(std::move(r));
}

}  // namespace

TorsionVerdict torsion_test(const GradedSpace& v, int i, const SparseVec& x, const PositiveGenerators& gens,
                            const TorsionOptions& opt)
{
    TorsionVerdict acc;
    acc.verdict = Verdict::Torsion;
    if (x.empty())
        return acc;
    const auto& r = v.ring();
    for (const auto& f : gens.gens) {
        const int e = r.weight_of(f);
        SparseVec y = x;
        Matrix power;
        TorsionVerdict one = kernel_chain(v, i, opt, f.to_string(r.vars()), [&](int n, EchelonBasis& eb) {
            Matrix step = v.mult(f, i + (n - 1) * e);
            power = n == 1 ? step : step * power;
            y = step.apply(y);
            insert_rows(eb, power);
            return y.empty();
        });
        acc = combine(acc, one);
        if (acc.verdict == Verdict::NotTorsion)
            return acc;
    }
    return acc;
}

TorsionVerdict torsion_test_powers(const GradedSpace& v, int i, const SparseVec& x, int d, const TorsionOptions& opt)
{
    if (x.empty())
        return TorsionVerdict{Verdict::Torsion, {}, 0, {}};
    const auto& r = v.ring();
    const auto& k = r.field();
    std::vector<Poly> level;  // basis of (A_d)^n inside A_{nd}
    return kernel_chain(v, i, opt, fmt::format("(A_{})^n", d), [&](int n, EchelonBasis& eb) {
        if (n == 1) {
            for (const auto& mu : r.weight_basis(d))
                level.push_back(Poly::monomial(mu, Scalar::one(k), k));
        } else {
            EchelonBasis span(r.dim(n * d), k);
            for (const auto& p : level)
                for (const auto& mu : r.weight_basis(d))
                    span.insert(r.coords(p.times_term(mu, Scalar::one(k)), n * d));
            level.clear();
            for (const auto& row : span.rows())
                level.push_back(r.from_coords(n * d, row));
        }
        bool killed = true;
        for (const auto& p : level) {
            Matrix m = v.mult(p, i);
            insert_rows(eb, m);
            if (!m.apply(x).empty())
                killed = false;
        }
        return killed;
    });
}

TorsionVerdict torsion_test_tail(const GradedSpace& v, int i, const SparseVec& x, int dmax, const TorsionOptions& opt)
{
    if (x.empty())
        return TorsionVerdict{Verdict::Torsion, {}, 0, {}};
    const auto& r = v.ring();
    const auto& k = r.field();
    return kernel_chain(v, i, opt, "A_{>=s}", [&](int s, EchelonBasis& eb) {
        bool killed = true;
        for (int t = s; t < s + dmax; ++t) {
            for (const auto& mu : r.weight_basis(t)) {
                Matrix m = v.mult(Poly::monomial(mu, Scalar::one(k), k), i);
                insert_rows(eb, m);
                if (!m.apply(x).empty())
                    killed = false;
            }
        }
        return killed;
    });
}

TorsionVerdict torsion_test_generators(const GradedModule& m, const PositiveGenerators& gens,
                                       const TorsionOptions& opt)
{
    TorsionVerdict acc;
    acc.verdict = Verdict::Torsion;
    for (std::size_t t = 0; t < m.generators(); ++t) {
        GradedModule::Column e(m.generators(), Poly(m.ring().nvars(), m.field()));
        e[t] = m.ring().one();
        const int w = m.twists()[t];
        TorsionVerdict one;
        try {
            one = torsion_test(m, w, m.coords(e, w), gens, opt);
        } catch (const WindowError& err) {
            one.verdict = Verdict::Inconclusive;
            one.note = err.what();
        }
        acc = combine(acc, one);
        if (acc.verdict == Verdict::NotTorsion)
            break;
    }
    return acc;
}

TorsionVerdict torsion_test_piece(const GradedSpace& v, int i, const PositiveGenerators& gens,
                                  const TorsionOptions& opt)
{
    TorsionVerdict acc;
    acc.verdict = Verdict::Torsion;
    std::size_t n = 0;
    try {
        n = v.dim(i);
    } catch (const WindowError& err) {
        acc.verdict = Verdict::Inconclusive;
        acc.note = err.what();
        return acc;
    }
    for (std::size_t k = 0; k < n; ++k) {
        acc = combine(acc, torsion_test(v, i, SparseVec::unit(k, v.field()), gens, opt));
        if (acc.verdict == Verdict::NotTorsion)
            break;
    }
    return acc;
}

}  // namespace ggm
