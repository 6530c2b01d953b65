#include "ggm/ring.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "ggm/error.hpp"
#include "ggm/groebner.hpp"

namespace ggm {

namespace {

bool basis_order(const Monomial& a, const Monomial& b)
{
    int da = total_degree(a), db = total_degree(b);
    if (da != db)
        return da < db;
    return a > b;  // lexicographically descending: x^2, xy, y^2
}

constexpr std::size_t kMaxEnumerated = 4'000'000;

}  // namespace

WeightedRing::WeightedRing(std::vector<std::string> vars, std::vector<int> weights, const std::vector<Poly>& relations,
                           const Field& k, int bound)
    : vars_(std::move(vars)), weights_(std::move(weights)), field_(k), bound_(bound)
{
    if (vars_.empty())
        throw ArgumentError("a ring needs at least one variable");
    if (weights_.size() != vars_.size())
        throw ArgumentError(fmt::format("{} weights given for {} variables", weights_.size(), vars_.size()));
    if (bound_ < 4)
        throw ArgumentError("local-finiteness bound must be at least 4");
    for (std::size_t r = 0; r < relations.size(); ++r) {
        if (relations[r].nvars() != vars_.size() && !relations[r].is_zero())
            throw ArgumentError(fmt::format("relation {} has the wrong number of variables", r));
        if (!relations[r].is_homogeneous(weights_))
            throw HomogeneityError(
                fmt::format("relation {} ({}) is not weight-homogeneous", r, relations[r].to_string(vars_)));
        if (!relations[r].is_zero())
            relations_.push_back(relations[r]);
    }
    gb_ = reduced_groebner(relations_);

    bool all_pos = std::all_of(weights_.begin(), weights_.end(), [](int w) { return w > 0; });
    bool all_neg = std::all_of(weights_.begin(), weights_.end(), [](int w) { return w < 0; });
    exact_ = all_pos || all_neg;
    if (!exact_)
        validate_local_finiteness();
}

std::shared_ptr<const WeightedRing> WeightedRing::build(const std::vector<std::string>& vars,
                                                        const std::vector<int>& weights,
                                                        const std::vector<std::string>& relations, const Field& k,
                                                        int bound)
{
    std::vector<Poly> rels;
    for (const auto& r : relations)
        rels.push_back(parse_poly(r, vars, k));
    return std::make_shared<const WeightedRing>(vars, weights, rels, k, bound);
}

bool WeightedRing::is_standard(const Monomial& m) const
{
    for (const auto& g : gb_)
        if (divides(g.leading().mono, m))
            return false;
    return true;
}

bool WeightedRing::in_window(int i) const
{
    if (exact_)
        return true;
    return window_ && i >= window_->first && i <= window_->second;
}

void WeightedRing::require_window(int i) const
{
    if (!in_window(i))
        throw WindowError(fmt::format("weight {} lies outside the validated window [{}, {}]", i, window_->first,
                                      window_->second),
                          i);
}

int WeightedRing::weight_of(const Poly& f) const
{
    if (f.is_zero())
        throw HomogeneityError("the zero polynomial has no weight");
    auto w = f.weight(weights_);
    if (!w)
        throw HomogeneityError(fmt::format("{} is not weight-homogeneous", f.to_string(vars_)));
    return *w;
}

std::vector<Monomial> WeightedRing::enumerate_exact(int i) const
{
    const int s = weights_.front() > 0 ? 1 : -1;
    const int target = s * i;
    std::vector<Monomial> out;
    if (target < 0)
        return out;
    Monomial cur(nvars(), 0);
    auto rec = [&](auto&& self, std::size_t k, int remaining) -> void {
        if (!is_standard(cur))
            return;
        if (k == nvars()) {
            if (remaining == 0)
                out.push_back(cur);
            return;
        }
        const int w = s * weights_[k];
        for (int e = 0; e * w <= remaining; ++e) {
            cur[k] = e;
            self(self, k + 1, remaining - e * w);
            if (!is_standard(cur))
                break;  // larger exponents stay non-standard
        }
        cur[k] = 0;
    };
    rec(rec, 0, target);
    return out;
}

void WeightedRing::validate_local_finiteness()
{
    std::set<int> late;  // weights seen at degree >= bound-1
    std::vector<Monomial> level{Monomial(nvars(), 0)};
    bounded_[0].push_back(level.front());
    std::size_t total = 1;
    for (int t = 1; t <= bound_; ++t) {
        std::set<Monomial> next;
        for (const auto& m : level) {
            for (std::size_t k = 0; k < nvars(); ++k) {
                Monomial n = m;
                ++n[k];
                if (is_standard(n))
                    next.insert(std::move(n));
            }
        }
        level.assign(next.begin(), next.end());
        total += level.size();
        if (total > kMaxEnumerated)
            throw LocalFinitenessError(
                fmt::format("more than {} standard monomials below degree {}; the ring is not locally finite at "
                            "this bound",
                            kMaxEnumerated, t),
                0);
        for (const auto& m : level) {
            int w = mono_weight(m, weights_);
            bounded_[w].push_back(m);
            if (t >= bound_ - 1)
                late.insert(w);
        }
    }
    if (late.count(0))
        throw LocalFinitenessError(
            fmt::format("weight 0 keeps acquiring standard monomials up to degree {}; A_0 is not finite-dimensional",
                        bound_),
            0);
    int min_abs = 0;
    for (int w : weights_)
        if (w != 0 && (min_abs == 0 || std::abs(w) < min_abs))
            min_abs = std::abs(w);
    const int cap = (bound_ - 2) * min_abs;
    int hi = 0, lo = 0;
    while (hi + 1 <= cap && !late.count(hi + 1))
        ++hi;
    while (lo - 1 >= -cap && !late.count(lo - 1))
        --lo;
    window_ = std::make_pair(lo, hi);
}

const WeightedRing::Piece& WeightedRing::piece(int i) const
{
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->pieces.find(i);
        if (it != cache_->pieces.end())
            return *it->second;
    }
    auto p = std::make_shared<Piece>();
    if (exact_) {
        p->basis = enumerate_exact(i);
    } else {
        require_window(i);
        auto it = bounded_.find(i);
        if (it != bounded_.end())
            p->basis = it->second;
    }
    std::sort(p->basis.begin(), p->basis.end(), basis_order);
    for (std::size_t k = 0; k < p->basis.size(); ++k)
        p->index.emplace(p->basis[k], static_cast<std::uint32_t>(k));
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto [it, inserted] = cache_->pieces.emplace(i, std::move(p));
    return *it->second;
}

const std::vector<Monomial>& WeightedRing::weight_basis(int i) const { return piece(i).basis; }

Poly WeightedRing::monomial_normal_form(const Monomial& m) const
{
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->monomial_nf.find(m);
        if (it != cache_->monomial_nf.end())
            return it->second;
    }
    Poly r = reduce_by(Poly::monomial(m, Scalar::one(field_), field_), gb_);
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->monomial_nf.emplace(m, r);
    return r;
}

Poly WeightedRing::normal_form(const Poly& p) const
{
    if (gb_.empty())
        return p;
    Poly out(nvars(), field_);
    for (const auto& t : p.terms()) {
        if (is_standard(t.mono)) {
            out.add_term(t.mono, t.coeff);
            continue;
        }
        out = out + monomial_normal_form(t.mono).scaled(t.coeff);
    }
    return out;
}

SparseVec WeightedRing::coords(const Poly& p, int i) const
{
    const Piece& pc = piece(i);
    Poly q = normal_form(p);
    std::vector<std::pair<std::uint32_t, Scalar>> parts;
    for (const auto& t : q.terms()) {
        auto it = pc.index.find(t.mono);
        if (it == pc.index.end())
            throw HomogeneityError(
                fmt::format("term {} of {} does not have weight {}", mono_to_string(t.mono, vars_), q.to_string(vars_), i));
        parts.emplace_back(it->second, t.coeff);
    }
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseVec v;
    for (auto& [k, c] : parts)
        v.push_back(k, c);
    return v;
}

Poly WeightedRing::from_coords(int i, const SparseVec& v) const
{
    const auto& basis = weight_basis(i);
    Poly p(nvars(), field_);
    for (const auto& e : v.entries())
        p.add_term(basis.at(e.index), e.value);
    return p;
}

Matrix WeightedRing::mult_map(const Poly& f, int i) const
{
    const int e = weight_of(f);
    const auto& src = weight_basis(i);
    const Piece& tgt = piece(i + e);
    Matrix m(tgt.basis.size(), src.size(), field_);
    for (std::size_t c = 0; c < src.size(); ++c) {
        Poly prod = f.times_term(src[c], Scalar::one(field_));
        m.set_column(c, coords(prod, i + e));
    }
    return m;
}

PositiveGenerators WeightedRing::positive_generators(int sign) const
{
    if (sign != 1 && sign != -1)
        throw ArgumentError("sign must be +1 or -1");
    PositiveGenerators out;
    out.sign = sign;
    std::vector<Monomial> mins;
    if (exact_) {
        if (weights_.front() * sign > 0) {
            for (std::size_t k = 0; k < nvars(); ++k) {
                Monomial m(nvars(), 0);
                m[k] = 1;
                if (is_standard(m))
                    mins.push_back(m);
            }
        }
    } else {
        for (const auto& [w, monos] : bounded_) {
            if (w * sign <= 0)
                continue;
            for (const auto& m : monos) {
                bool minimal = true;
                for (std::size_t k = 0; k < nvars() && minimal; ++k)
                    if (m[k] > 0 && (mono_weight(m, weights_) - weights_[k]) * sign > 0)
                        minimal = false;
                if (minimal)
                    mins.push_back(m);
            }
        }
    }
    if (mins.empty())
        throw DegenerateGradingError(sign > 0 ? "A_{>0} = 0: the positive Proj is empty"
                                              : "A_{<0} = 0: the negative Proj is empty");
    std::sort(mins.begin(), mins.end(), [&](const Monomial& a, const Monomial& b) {
        int wa = std::abs(mono_weight(a, weights_)), wb = std::abs(mono_weight(b, weights_));
        if (wa != wb)
            return wa < wb;
        return basis_order(a, b);
    });
    out.d = 1;
    for (const auto& m : mins) {
        int deg = std::abs(mono_weight(m, weights_));
        out.gens.push_back(Poly::monomial(m, Scalar::one(field_), field_));
        out.degrees.push_back(deg);
        out.d = std::lcm(out.d, deg);
    }
    return out;
}

std::shared_ptr<const WeightedRing> WeightedRing::flipped() const
{
    std::vector<int> w(weights_.size());
    std::transform(weights_.begin(), weights_.end(), w.begin(), [](int x) { return -x; });
    return std::make_shared<const WeightedRing>(vars_, w, relations_, field_, bound_);
}

bool WeightedRing::ideal_contains(const std::vector<Poly>& gens, const Poly& f) const
{
    std::vector<Poly> all = gb_;
    all.insert(all.end(), gens.begin(), gens.end());
    return reduce_by(f, reduced_groebner(all)).is_zero();
}

std::string WeightedRing::describe() const
{
    std::string rels;
    for (const auto& r : relations_)
        rels += (rels.empty() ? "" : ", ") + r.to_string(vars_);
    std::string ws;
    for (int w : weights_)
        ws += (ws.empty() ? "" : ",") + std::to_string(w);
    std::string vs;
    for (const auto& v : vars_)
        vs += (vs.empty() ? "" : ",") + v;
    return fmt::format("{}[{}]/({}) w=({})", field_.to_string(), vs, rels, ws);
}

bool check_AN_Ad(const WeightedRing& ring, int N)
{
    PositiveGenerators pg = ring.positive_generators();
    int sum = std::accumulate(pg.degrees.begin(), pg.degrees.end(), 0);
    int threshold = pg.d * static_cast<int>(pg.gens.size()) - sum;
    if (N <= threshold)
        throw ArgumentError(fmt::format("N = {} does not exceed d*p - sum(d_i) = {}", N, threshold));
    const int d = pg.d;
    const auto& ad = ring.weight_basis(d);
    const auto& rest = ring.weight_basis(N - d);
    EchelonBasis span(ring.dim(N), ring.field());
    for (const auto& a : ad)
        for (const auto& b : rest)
            span.insert(ring.coords(Poly::monomial(mono_mul(a, b), Scalar::one(ring.field()), ring.field()), N));
    return span.rank() == ring.dim(N);
}

VeroneseView::VeroneseView(RingPtr base, int m) : base_(std::move(base)), m_(m)
{
    if (m <= 0)
        throw ArgumentError(fmt::format("Veronese multiplier must be positive, got {}", m));
}

Matrix VeroneseView::mult_map(const Poly& f, int i) const
{
    int e = base_->weight_of(f);
    if (e % m_ != 0)
        throw ArgumentError(fmt::format("element of weight {} does not lie in the Veronese subring A^({})", e, m_));
    return base_->mult_map(f, m_ * i);
}

}  // namespace ggm
