#include "ggm/projgeom.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include <fmt/format.h>

#include "ggm/error.hpp"
#include "ggm/parallel.hpp"

namespace ggm {

std::string CartierCertificate::verdict() const
{
    return certified ? std::string("Certified") : fmt::format("NotCertifiedUpTo({})", bound);
}

namespace {

PatchUnit search_patch(const RingPtr& ring, const SpacePtr& a, const Poly& f, int d, int bound,
                       const EngineOptions& opt)
{
    PatchUnit out;
    out.patch = "D(" + f.to_string(ring->vars()) + ")";
    out.bound = bound;
    const int e = ring->weight_of(f);
    TorsionQuotient q(a, f, opt.budget, opt.span);
    const Field& k = ring->field();
    for (int kn = 0; kn <= bound; ++kn) {
        const int w = d + kn * e;
        std::vector<Monomial> numerators;
        try {
            numerators = ring->weight_basis(w);
        } catch (const WindowError&) {
            continue;
        }
        for (const auto& mono : numerators) {
            Poly g = Poly::monomial(mono, Scalar::one(k), k);
            for (int kd = 0; kd <= bound; ++kd) {
                const int wh = -d + kd * e;
                const int top = (kn + kd) * e;
                try {
                    if (q.dim(wh) == 0 || q.dim(top) == 0)
                        continue;
                    Matrix mg = q.mult(g, wh);
                    SparseVec target = q.project(ring->coords(f.pow(static_cast<unsigned>(kn + kd)), top), top);
                    auto sol = solve_linear(mg, target.to_dense(q.dim(top), k));
                    if (!sol)
                        continue;
                    SparseVec h;
                    for (std::size_t c = 0; c < sol->size(); ++c)
                        if (!(*sol)[c].is_zero())
                            h.axpy((*sol)[c], q.lift(c, wh));
                    out.found = true;
                    out.numerator = g.to_string(ring->vars());
                    out.k = kn;
                    out.inverse = ring->from_coords(wh, h).to_string(ring->vars());
                    out.k_inverse = kd;
                    return out;
                } catch (const WindowError&) {
                    continue;
                } catch (const StabilizationError&) {
                    continue;
                }
            }
        }
    }
    return out;
}

}  // namespace

CartierCertificate cartier_certificate(const RingPtr& ring, int d, int search_bound, const EngineOptions& opt)
{
    if (d <= 0)
        throw ArgumentError("Cartier degree must be positive");
    auto gens = ring->positive_generators();
    CartierCertificate cert;
    cert.d = d;
    cert.bound = search_bound;
    auto a = GradedModule::free(ring);
    cert.patches.resize(gens.gens.size());
    parallel_for(gens.gens.size(), opt.jobs,
                 [&](std::size_t s) { cert.patches[s] = search_patch(ring, a, gens.gens[s], d, search_bound, opt); });
    cert.certified = std::all_of(cert.patches.begin(), cert.patches.end(), [](const PatchUnit& p) { return p.found; });
    return cert;
}

CohomologyTable sheaf_cohomology_table(const SpacePtr& module, int i_min, int i_max, const EngineOptions& opt)
{
    auto gens = module->ring().positive_generators();
    return cech_table(module, gens.gens, i_min, i_max, opt).table;
}

// ---------------------------------------------------------------- roundtrip

bool RoundtripRow::pass() const
{
    return idempotent && kernel == Verdict::Torsion && cokernel == Verdict::Torsion && cartier.value_or(true);
}

bool RoundtripReport::pass() const
{
    return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const RoundtripRow& r) { return r.pass(); });
}

namespace {

// N'_i -> N_i where N uses the generators f_s^{e_s}: x/f_s^T = x f_s^{(e_s-1)T} / (f_s^{e_s})^T
Matrix compare_saturations(const SaturationModel& from, const SaturationModel& to, const std::vector<int>& degs,
                           const std::vector<int>& exps, int i)
{
    const GradedSpace& m = from.module();
    const int t = from.trunc();
    std::vector<Matrix> comps;
    for (std::size_t s = 0; s < degs.size(); ++s) {
        const int w = i + t * degs[s];
        const Poly g = from.generators()[s].pow(static_cast<unsigned>((exps[s] - 1) * t));
        const auto& src = from.component(s);
        const auto& tgt = to.component(s);
        Matrix mg = m.mult(g, w);
        std::vector<SparseVec> cols;
        for (std::size_t c = 0; c < src.dim(w); ++c)
            cols.push_back(tgt.project(mg.apply(src.lift(c, w)), w + m.ring().weight_of(g)));
        comps.push_back(Matrix::from_columns(tgt.dim(w + m.ring().weight_of(g)), std::move(cols), m.field()));
    }
    std::vector<SparseVec> cols;
    for (std::size_t k = 0; k < from.dim(i); ++k) {
        SparseVec v = from.ambient_vector(i, k);
        SparseVec img;
        for (std::size_t s = 0; s < degs.size(); ++s) {
            const std::size_t off = from.component_offset(i, s);
            SparseVec part;
            for (const auto& e : v.entries())
                if (e.index >= off && e.index < off + comps[s].cols())
                    part.push_back(e.index - off, e.value);
            const std::size_t off2 = to.component_offset(i, s);
            const SparseVec mapped = comps[s].apply(part);
            for (const auto& e : mapped.entries())
                img.set(e.index + off2, img.get(e.index + off2) + e.value);
        }
        cols.push_back(to.coordinates(i, img));
    }
    return Matrix::from_columns(to.dim(i), std::move(cols), m.field());
}

}  // namespace

RoundtripReport serre_roundtrip_check(const SpacePtr& module, int i_min, int i_max, const EngineOptions& opt,
                                      int search_bound)
{
    RoundtripReport rep;
    const auto& ring = module->ring_ptr();
    auto gens = ring->positive_generators();
    for (int d = 1; d <= 2 * gens.d && rep.d == 0; ++d)
        if (cartier_certificate(ring, d, search_bound, opt).certified)
            rep.d = d;
    if (rep.d == 0)
        rep.note = fmt::format("no Cartier certificate for d <= {}", 2 * gens.d);

    const int trunc = opt.trunc + std::max(std::abs(i_min), std::abs(i_max));
    auto n1 = std::make_shared<const SaturationModel>(module, gens.gens, trunc, opt.budget, opt.span);
    auto n2 = std::make_shared<const SaturationModel>(n1, gens.gens, trunc, opt.budget, opt.span);
    auto unit = std::make_shared<const SaturationUnit>(n1);
    auto ker = std::make_shared<const KernelSpace>(unit);
    auto coker = std::make_shared<const CokernelSpace>(unit);

    std::vector<int> exps;
    std::vector<Poly> gens_d;
    std::shared_ptr<const SaturationModel> nd;
    if (rep.d > 0) {
        for (std::size_t s = 0; s < gens.gens.size(); ++s) {
            const int ds = gens.degrees[s];
            exps.push_back(std::lcm(rep.d, ds) / ds);
            gens_d.push_back(gens.gens[s].pow(static_cast<unsigned>(exps.back())));
        }
        nd = std::make_shared<const SaturationModel>(module, gens_d, trunc, opt.budget, opt.span);
    }
    std::vector<int> degs;
    for (const auto& f : gens.gens)
        degs.push_back(ring->weight_of(f));

    TorsionOptions topt{opt.budget, opt.span};
    const std::size_t count = static_cast<std::size_t>(i_max - i_min + 1);
    rep.rows.resize(count);
    parallel_for(count, opt.jobs, [&](std::size_t k) {
        const int i = i_min + static_cast<int>(k);
        RoundtripRow& row = rep.rows[k];
        row.weight = i;
        try {
            row.sat_dim = n1->dim(i);
            row.idempotent = n2->dim(i) == row.sat_dim && rank(n2->unit(i)) == row.sat_dim;
            row.kernel = torsion_test_piece(*ker, i, gens, topt).verdict;
            row.cokernel = torsion_test_piece(*coker, i, gens, topt).verdict;
            if (nd && i % rep.d == 0) {
                Matrix phi = compare_saturations(*n1, *nd, degs, exps, i);
                const bool iso = nd->dim(i) == row.sat_dim && rank(phi) == row.sat_dim;
                const bool commutes = phi * n1->unit(i) == nd->unit(i);
                row.cartier = iso && commutes;
                if (!iso)
                    row.note = fmt::format("N_{} has dim {} against N'_{} = {}", i, nd->dim(i), i, row.sat_dim);
                else if (!commutes)
                    row.note = "comparison map does not commute with the units";
            }
        } catch (const StabilizationError& e) {
            row.note = e.what();
        } catch (const WindowError& e) {
            row.note = e.what();
        }
    });
    return rep;
}

// ---------------------------------------------------------------- quotient

bool QuotientIsoReport::inconclusive() const
{
    return !iso() && kernel != Verdict::NotTorsion && cokernel != Verdict::NotTorsion;
}

QuotientIsoReport quotient_iso_check(const MapPtr& phi, int i_min, int i_max, const TorsionOptions& opt)
{
    QuotientIsoReport rep;
    auto gens = phi->source().ring().positive_generators();
    KernelSpace ker(phi);
    CokernelSpace coker(phi);
    auto fold = [&](Verdict& acc, const GradedSpace& v, int i, const char* what) {
        if (acc == Verdict::NotTorsion)
            return;
        TorsionVerdict t;
        try {
            t = torsion_test_piece(v, i, gens, opt);
        } catch (const WindowError& e) {
            t.verdict = Verdict::Inconclusive;
            t.note = e.what();
        }
        if (t.verdict == Verdict::NotTorsion) {
            acc = Verdict::NotTorsion;
            rep.witness_weight = i;
            rep.note = fmt::format("{} at weight {} is not torsion (witness {})", what, i, t.witness);
        } else if (t.verdict == Verdict::Inconclusive) {
            acc = Verdict::Inconclusive;
            if (rep.note.empty())
                rep.note = fmt::format("{} at weight {}: {}", what, i, t.note);
        }
    };
    for (int i = i_min; i <= i_max; ++i) {
        fold(rep.kernel, ker, i, "kernel");
        fold(rep.cokernel, coker, i, "cokernel");
    }
    return rep;
}

}  // namespace ggm
